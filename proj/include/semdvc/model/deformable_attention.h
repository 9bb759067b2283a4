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

#include <torch/torch.h>

#include "semdvc/model/feature_pyramid.h"

namespace semdvc::model {

struct DeformableAttentionConfig {
  std::int64_t model_dim = 256;
  std::int64_t heads = 8;
  std::int64_t points = 4;
  std::int64_t levels = 4;  // pyramid levels L + 1
};

struct AttentionTrace {
  torch::Tensor output;   // (n, d)
  torch::Tensor weights;  // (n, H, levels * points), softmax-normalized per head
  torch::Tensor positions;  // (n, H, levels, points), continuous sampling coordinate
};

// 1-D multi-scale deformable attention. For each query, head, level and point
// a sampling offset and a raw weight are linear in the query. The sampling
// position on level l is ref * len_l + offset in continuous frame coordinates
// (frame i spans [i, i + 1)); values are linearly interpolated between
// neighbouring frame centres of that level, clamped to the level's ends.
// Masked frames are dropped from the interpolation and samples with no valid
// neighbour are removed from the softmax.
class MSDeformAttnImpl : public torch::nn::Module {
 public:
  explicit MSDeformAttnImpl(DeformableAttentionConfig config);

  // query: (n, d); reference: (n) in [0, 1]; value: (T', d); mask: (T') bool
  // or undefined.
  torch::Tensor forward(const torch::Tensor& query, const torch::Tensor& reference, const torch::Tensor& value,
                        const LevelLayout& layout, const torch::Tensor& mask = {});
  AttentionTrace forward_traced(const torch::Tensor& query, const torch::Tensor& reference,
                                const torch::Tensor& value, const LevelLayout& layout,
                                const torch::Tensor& mask = {});

  const DeformableAttentionConfig& config() const { return config_; }
  torch::nn::Linear& sampling_offsets() { return offsets_; }
  torch::nn::Linear& attention_weights() { return weights_; }
  torch::nn::Linear& value_projection() { return value_proj_; }
  torch::nn::Linear& output_projection() { return output_proj_; }

 private:
  void reset_parameters();

  DeformableAttentionConfig config_;
  torch::nn::Linear offsets_{nullptr}, weights_{nullptr}, value_proj_{nullptr}, output_proj_{nullptr};
};
TORCH_MODULE(MSDeformAttn);

// Normalized reference point of every frame of a multi-scale sequence:
// (j + 0.5) / len_l for frame j of level l. (T')
torch::Tensor frame_reference_points(const LevelLayout& layout, torch::Dtype dtype = torch::kFloat);

class EncoderLayerImpl : public torch::nn::Module {
 public:
  EncoderLayerImpl(DeformableAttentionConfig config, std::int64_t ffn_dim);
  torch::Tensor forward(const torch::Tensor& src, const torch::Tensor& pos, const torch::Tensor& reference,
                        const LevelLayout& layout, const torch::Tensor& mask);

 private:
  MSDeformAttn attn_{nullptr};
  torch::nn::LayerNorm norm1_{nullptr}, norm2_{nullptr};
  torch::nn::Linear ffn1_{nullptr}, ffn2_{nullptr};
};
TORCH_MODULE(EncoderLayer);

// Stack of {deformable self-attention, feed-forward} with residual + layer
// norm. Zero layers is the identity.
class DeformableEncoderImpl : public torch::nn::Module {
 public:
  DeformableEncoderImpl(DeformableAttentionConfig config, std::int64_t num_layers, std::int64_t ffn_dim);
  torch::Tensor forward(const torch::Tensor& src, const torch::Tensor& pos, const LevelLayout& layout,
                        const torch::Tensor& mask);

 private:
  torch::nn::ModuleList layers_;
};
TORCH_MODULE(DeformableEncoder);

struct EventQuerySet {
  torch::Tensor embeddings;  // (N, d)
  torch::Tensor reference;   // (N) in (0, 1)
};

struct DecoderOutput {
  torch::Tensor events;     // (N, d), q~
  torch::Tensor reference;  // (N) refined reference points
};

class DecoderLayerImpl : public torch::nn::Module {
 public:
  DecoderLayerImpl(DeformableAttentionConfig config, std::int64_t ffn_dim);
  DecoderOutput forward(const torch::Tensor& queries, const torch::Tensor& reference, const torch::Tensor& memory,
                        const LevelLayout& layout, const torch::Tensor& mask);

 private:
  torch::nn::MultiheadAttention self_attn_{nullptr};
  MSDeformAttn cross_attn_{nullptr};
  torch::nn::LayerNorm norm1_{nullptr}, norm2_{nullptr}, norm3_{nullptr};
  torch::nn::Linear ffn1_{nullptr}, ffn2_{nullptr};
  torch::nn::Linear refine1_{nullptr}, refine2_{nullptr};
};
TORCH_MODULE(DecoderLayer);

// Each layer: self-attention among queries, deformable cross-attention into
// the encoded sequence at the current reference points, feed-forward, then
// reference refinement sigmoid(logit(ref) + delta(q)).
class DeformableDecoderImpl : public torch::nn::Module {
 public:
  DeformableDecoderImpl(DeformableAttentionConfig config, std::int64_t num_layers, std::int64_t ffn_dim);

  // Initial reference points: sigmoid of a learned linear map of each query.
  torch::Tensor initial_reference(const torch::Tensor& query_embeddings);

  DecoderOutput forward(const EventQuerySet& queries, const torch::Tensor& memory, const LevelLayout& layout,
                        const torch::Tensor& mask);

 private:
  torch::nn::Linear reference_head_{nullptr};
  torch::nn::ModuleList layers_;
};
TORCH_MODULE(DeformableDecoder);

}  // namespace semdvc::model
