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

#include "nn/sgd.hpp"

namespace edba {

SgdState SgdState::for_params(const FlatParams& params, double lr, double momentum,
                              double weight_decay) {
  return SgdState{lr, momentum, weight_decay, params.zeros_like()};
}

void sgd_step(SgdState& state, FlatParams& params, const FlatParams& grads) {
  require_same_layout(params, grads, "sgd_step");
  require_same_layout(params, state.velocity, "sgd_step velocity");
  auto& p = params.data();
  const auto& g = grads.data();
  auto& v = state.velocity.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double gi = g[i] + state.weight_decay * p[i];
    v[i] = state.momentum * v[i] + gi;
    p[i] -= state.lr * v[i];
  }
}

}  // namespace edba
