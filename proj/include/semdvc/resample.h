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

#pragma once

#include <cstdint>
#include <vector>

#include "semdvc/tensor_file.h"

namespace semdvc {

struct FixedLengthSequence {
  Matrix data;                     // target x d
  std::vector<std::uint8_t> mask;  // 1 for real frames, 0 for padding
  std::size_t valid_length() const;
};

// Longer sequences are linearly interpolated in time (endpoints aligned) to
// exactly `target` rows; shorter ones are zero-padded at the end.
FixedLengthSequence resize_to_fixed_length(const Matrix& sequence, std::size_t target = 1024);

}  // namespace semdvc
