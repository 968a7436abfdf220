/*
 * Copyright 2026 The rnss Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RNSS_RNSS_HPP_
#define RNSS_RNSS_HPP_

#include "rnss/engine.hpp"
#include "rnss/errors.hpp"
#include "rnss/experiment.hpp"
#include "rnss/linalg.hpp"
#include "rnss/privacy_cost.hpp"
#include "rnss/regression.hpp"
#include "rnss/sharing.hpp"
#include "rnss/solver.hpp"

#endif  // RNSS_RNSS_HPP_
