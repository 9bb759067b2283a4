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
#include <string>
#include <vector>

#include <torch/torch.h>

namespace semdvc::model {

// Level structure of a concatenated multi-scale sequence: level l holds
// ceil(T / 2^l) frames, so the total is sum_{l=0..L} ceil(T / 2^l).
struct LevelLayout {
  std::vector<std::int64_t> lengths;
  std::vector<std::int64_t> offsets;
  std::int64_t total = 0;

  static LevelLayout for_length(std::int64_t frames, std::int64_t levels);
  std::int64_t num_levels() const { return static_cast<std::int64_t>(lengths.size()); }
  bool operator==(const LevelLayout&) const = default;
};

std::int64_t pyramid_length(std::int64_t frames, std::int64_t levels);

struct MultiScaleFeature {
  torch::Tensor data;  // (T', d)
  torch::Tensor mask;  // (T') bool, true = real frame
  LevelLayout layout;
};

// Propagates a frame mask through the pyramid with the convolution's
// kernel/stride/padding (max-pool), returning (T').
torch::Tensor pyramid_mask(const torch::Tensor& mask, std::int64_t levels);

// Level 0 is a linear projection of the input; each further level is a
// kernel-3, stride-2, padding-1 convolution over the previous level followed
// by layer normalization and ReLU.
class TemporalPyramidImpl : public torch::nn::Module {
 public:
  TemporalPyramidImpl(std::int64_t input_dim, std::int64_t output_dim, std::int64_t levels);

  // x: (T, input_dim) -> (T', output_dim)
  torch::Tensor forward(const torch::Tensor& x);

  std::int64_t levels() const { return levels_; }

 private:
  std::int64_t levels_;
  torch::nn::Linear project_{nullptr};
  torch::nn::ModuleList convs_;
  torch::nn::ModuleList norms_;
};
TORCH_MODULE(TemporalPyramid);

enum class FusionMode { kEarly, kLate };
FusionMode parse_fusion_mode(const std::string& name);

struct FusionConfig {
  FusionMode mode = FusionMode::kLate;
  std::vector<std::int64_t> modality_dims;
  std::int64_t concept_dim = 0;  // 0 disables the concept channel
  std::int64_t projection_dim = 128;
  std::int64_t model_dim = 256;
  std::int64_t levels = 3;
};

// Late fusion runs one pyramid per channel (modalities, then concepts) and
// concatenates per frame; early fusion projects and concatenates per frame
// first and runs a single shared pyramid. Both end in a projection to
// model_dim and share the same level layout.
class FeatureFusionImpl : public torch::nn::Module {
 public:
  explicit FeatureFusionImpl(FusionConfig config);

  // modalities[m]: (T, d_m); concepts: (T, N_c) or undefined when disabled;
  // mask: (T) bool.
  MultiScaleFeature forward(const std::vector<torch::Tensor>& modalities, const torch::Tensor& concepts,
                            const torch::Tensor& mask);

  const FusionConfig& config() const { return config_; }
  std::vector<TemporalPyramid>& pyramids() { return pyramids_; }
  torch::nn::Linear& output_projection() { return output_; }

 private:
  FusionConfig config_;
  std::vector<TemporalPyramid> pyramids_;             // late: one per channel; early: one
  std::vector<torch::nn::Linear> frame_projections_;  // early only
  torch::nn::Linear output_{nullptr};
};
TORCH_MODULE(FeatureFusion);

// Sinusoidal code of each frame's within-level position j / len_l, laid out
// as [sin, cos, sin, cos, ...]. Deterministic; (T', d).
torch::Tensor sinusoidal_level_encoding(const LevelLayout& layout, std::int64_t dim,
                                        torch::Dtype dtype = torch::kFloat);

// Sinusoidal position plus a learned per-level embedding.
class PositionalLevelEncodingImpl : public torch::nn::Module {
 public:
  PositionalLevelEncodingImpl(std::int64_t max_levels, std::int64_t dim);
  torch::Tensor forward(const LevelLayout& layout);

  torch::nn::Embedding& level_embedding() { return level_embed_; }

 private:
  std::int64_t dim_;
  torch::nn::Embedding level_embed_{nullptr};
};
TORCH_MODULE(PositionalLevelEncoding);

}  // namespace semdvc::model
