// Copyright 2026 The EDBA-FL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "nn/params.hpp"

namespace edba {

// Momentum SGD with L2 weight decay folded into the gradient:
//   g' = g + weight_decay * params
//   v  = momentum * v + g'
//   params -= lr * v
struct SgdState {
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  FlatParams velocity;

  static SgdState for_params(const FlatParams& params, double lr, double momentum,
                             double weight_decay);
};

void sgd_step(SgdState& state, FlatParams& params, const FlatParams& grads);

}  // namespace edba
