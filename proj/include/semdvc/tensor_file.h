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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace semdvc {

// Dense row-major float matrix. Frame features are stored as rows.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, float fill = 0.0f) : rows(r), cols(c), data(r * c, fill) {}

  float& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  float operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<float> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const float> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  bool operator==(const Matrix&) const = default;
};

// Arbitrary-rank tensor as stored on disk.
struct TensorData {
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t numel() const;
  bool operator==(const TensorData&) const = default;
};

// Binary layout: "DVCT" | u32 rank | rank x u32 dims | float32 payload, all
// little-endian, payload row-major.
void write_tensor(const std::filesystem::path& path, const TensorData& tensor);
TensorData read_tensor(const std::filesystem::path& path);

void write_matrix(const std::filesystem::path& path, const Matrix& m);
// Requires a rank-2 file.
Matrix read_matrix(const std::filesystem::path& path);

}  // namespace semdvc
