// Copyright 2026 The mtnas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Umbrella header.

#ifndef MTNAS_MTNAS_HPP_
#define MTNAS_MTNAS_HPP_

#include "mtnas/cost_model.hpp"
#include "mtnas/depth_loss.hpp"
#include "mtnas/engine_config.hpp"
#include "mtnas/errors.hpp"
#include "mtnas/evaluators.hpp"
#include "mtnas/evolution.hpp"
#include "mtnas/mtl_metrics.hpp"
#include "mtnas/reward.hpp"
#include "mtnas/search_space.hpp"
#include "mtnas/text_io.hpp"

namespace mtnas {
inline constexpr const char* kVersion = "0.1.0";
}  // namespace mtnas

#endif  // MTNAS_MTNAS_HPP_
