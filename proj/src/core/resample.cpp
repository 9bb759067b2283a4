// Copyright 2026 The semdvc Authors. All Rights Reserved.
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

#include "semdvc/resample.h"

#include <algorithm>
#include <cmath>

#include "semdvc/errors.h"

namespace semdvc {

std::size_t FixedLengthSequence::valid_length() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

FixedLengthSequence resize_to_fixed_length(const Matrix& sequence, std::size_t target) {
  if (sequence.rows == 0) throw ValidationError("cannot resize an empty sequence");
  if (target == 0) throw ValidationError("target length must be positive");
  const std::size_t n = sequence.rows;
  const std::size_t d = sequence.cols;
  FixedLengthSequence out{Matrix(target, d), std::vector<std::uint8_t>(target, 0)};

  if (n <= target) {
    std::copy(sequence.data.begin(), sequence.data.end(), out.data.data.begin());
    std::fill_n(out.mask.begin(), n, std::uint8_t{1});
    return out;
  }

  std::fill(out.mask.begin(), out.mask.end(), std::uint8_t{1});
  const double scale = target > 1 ? static_cast<double>(n - 1) / static_cast<double>(target - 1) : 0.0;
  for (std::size_t i = 0; i < target; ++i) {
    const double pos = static_cast<double>(i) * scale;
    const auto lo = std::min(static_cast<std::size_t>(std::floor(pos)), n - 1);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double w = pos - static_cast<double>(lo);
    for (std::size_t c = 0; c < d; ++c) {
      out.data(i, c) = static_cast<float>((1.0 - w) * sequence(lo, c) + w * sequence(hi, c));
    }
  }
  return out;
}

}  // namespace semdvc
