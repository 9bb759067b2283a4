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

#include "semdvc/tensor_file.h"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <string>

#include "semdvc/errors.h"

namespace semdvc {
namespace {

constexpr std::array<char, 4> kMagic = {'D', 'V', 'C', 'T'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::size_t TensorData::numel() const {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         [](std::size_t a, std::uint32_t b) { return a * b; });
}

void write_tensor(const std::filesystem::path& path, const TensorData& tensor) {
  if (tensor.numel() != tensor.values.size()) {
    throw FormatError("tensor payload size does not match dims for " + path.string());
  }
  std::string buf;
  buf.reserve(8 + 4 * tensor.dims.size() + 4 * tensor.values.size());
  buf.append(kMagic.begin(), kMagic.end());
  put_u32(buf, static_cast<std::uint32_t>(tensor.dims.size()));
  for (auto d : tensor.dims) put_u32(buf, d);
  for (float f : tensor.values) put_u32(buf, std::bit_cast<std::uint32_t>(f));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

TensorData read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open tensor file: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();

  if (n < 8 || std::memcmp(p, kMagic.data(), 4) != 0) {
    throw FormatError("bad magic in tensor file: " + path.string());
  }
  TensorData t;
  const std::uint32_t rank = get_u32(p + 4);
  std::size_t pos = 8;
  if (n < pos + 4ull * rank) throw FormatError("truncated header in tensor file: " + path.string());
  t.dims.resize(rank);
  for (std::uint32_t i = 0; i < rank; ++i, pos += 4) t.dims[i] = get_u32(p + pos);

  const std::size_t expected = t.numel() * 4;
  if (n - pos < expected) {
    throw FormatError("truncated payload in tensor file " + path.string() + ": expected " +
                      std::to_string(expected) + " bytes, found " + std::to_string(n - pos));
  }
  if (n - pos > expected) {
    throw FormatError("trailing bytes in tensor file: " + path.string());
  }
  t.values.resize(t.numel());
  for (std::size_t i = 0; i < t.values.size(); ++i, pos += 4) {
    t.values[i] = std::bit_cast<float>(get_u32(p + pos));
  }
  return t;
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  write_tensor(path, TensorData{{static_cast<std::uint32_t>(m.rows), static_cast<std::uint32_t>(m.cols)},
                                m.data});
}

Matrix read_matrix(const std::filesystem::path& path) {
  TensorData t = read_tensor(path);
  if (t.dims.size() != 2) {
    throw FormatError("expected rank-2 tensor in " + path.string() + ", got rank " +
                      std::to_string(t.dims.size()));
  }
  Matrix m;
  m.rows = t.dims[0];
  m.cols = t.dims[1];
  m.data = std::move(t.values);
  return m;
}

}  // namespace semdvc
