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

#include <span>
#include <vector>

namespace edba {

// Orthonormal type-II DCT and its inverse (type-III), backed by FFTW:
//   X_k = s_k * sum_n x_n cos(pi k (2n + 1) / (2N)),
//   s_0 = sqrt(1/N), s_k = sqrt(2/N).
std::vector<double> dct2_orthonormal(std::span<const double> x);
std::vector<double> idct2_orthonormal(std::span<const double> coeffs);

}  // namespace edba
