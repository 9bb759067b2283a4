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

#include "semdvc/model/deformable_attention.h"

#include <cmath>
#include <numbers>

#include "semdvc/errors.h"

namespace semdvc::model {

MSDeformAttnImpl::MSDeformAttnImpl(DeformableAttentionConfig config) : config_(config) {
  if (config_.heads < 1 || config_.model_dim % config_.heads != 0) {
    throw ConfigError("attention heads must divide the model dimension");
  }
  const auto samples = config_.heads * config_.levels * config_.points;
  offsets_ = register_module("sampling_offsets", torch::nn::Linear(config_.model_dim, samples));
  weights_ = register_module("attention_weights", torch::nn::Linear(config_.model_dim, samples));
  value_proj_ = register_module("value_proj", torch::nn::Linear(config_.model_dim, config_.model_dim));
  output_proj_ = register_module("output_proj", torch::nn::Linear(config_.model_dim, config_.model_dim));
  reset_parameters();
}

void MSDeformAttnImpl::reset_parameters() {
  torch::NoGradGuard no_grad;
  // Heads start looking in alternating directions at growing distances.
  offsets_->weight.zero_();
  auto bias = torch::empty({config_.heads, config_.levels, config_.points});
  for (std::int64_t h = 0; h < config_.heads; ++h) {
    const double dir = std::cos(2.0 * std::numbers::pi * static_cast<double>(h) / static_cast<double>(config_.heads));
    for (std::int64_t p = 0; p < config_.points; ++p) {
      bias.select(0, h).select(1, p).fill_(dir * static_cast<double>(p + 1));
    }
  }
  offsets_->bias.copy_(bias.flatten());
  weights_->weight.zero_();
  weights_->bias.zero_();
  torch::nn::init::xavier_uniform_(value_proj_->weight);
  value_proj_->bias.zero_();
  torch::nn::init::xavier_uniform_(output_proj_->weight);
  output_proj_->bias.zero_();
}

torch::Tensor MSDeformAttnImpl::forward(const torch::Tensor& query, const torch::Tensor& reference,
                                        const torch::Tensor& value, const LevelLayout& layout,
                                        const torch::Tensor& mask) {
  return forward_traced(query, reference, value, layout, mask).output;
}

AttentionTrace MSDeformAttnImpl::forward_traced(const torch::Tensor& query, const torch::Tensor& reference,
                                                const torch::Tensor& value_in, const LevelLayout& layout,
                                                const torch::Tensor& mask) {
  const auto H = config_.heads;
  const auto Lv = config_.levels;
  const auto P = config_.points;
  const auto d = config_.model_dim;
  const auto dh = d / H;
  if (layout.num_levels() != Lv) {
    throw ValidationError("value sequence has " + std::to_string(layout.num_levels()) + " levels, attention expects " +
                          std::to_string(Lv));
  }
  if (value_in.size(0) != layout.total) throw ValidationError("value length does not match its level layout");
  {
    torch::NoGradGuard no_grad;
    if (reference.numel() > 0 &&
        (reference.min().item<double>() < 0.0 || reference.max().item<double>() > 1.0)) {
      throw ValidationError("reference points must lie in [0, 1]");
    }
  }

  const auto n = query.size(0);
  const auto Tv = value_in.size(0);
  const auto fopts = torch::TensorOptions().dtype(query.scalar_type());
  const auto lopts = torch::TensorOptions().dtype(torch::kLong);

  auto value = value_proj_(value_in).view({Tv, H, dh});
  auto offsets = offsets_(query).view({n, H, Lv, P});
  auto logits = weights_(query).view({n, H, Lv * P});

  auto lengths = torch::tensor(layout.lengths, lopts).view({1, 1, Lv, 1});
  auto starts = torch::tensor(layout.offsets, lopts).view({1, 1, Lv, 1});
  auto lengths_f = lengths.to(fopts);

  // Continuous position -> index space with frame centres at integers.
  auto positions = reference.view({n, 1, 1, 1}) * lengths_f + offsets;
  auto x = torch::max(torch::min(positions - 0.5, lengths_f - 1.0), torch::zeros({}, fopts));
  auto lo = torch::floor(x).detach();
  auto w_hi = x - lo;
  auto w_lo = 1.0 - w_hi;
  auto lo_i = lo.to(torch::kLong);
  auto hi_i = torch::min(lo_i + 1, lengths - 1);

  auto head = torch::arange(H, lopts).view({1, H, 1, 1});
  auto g_lo = starts + lo_i;
  auto g_hi = starts + hi_i;
  auto flat = value.reshape({Tv * H, dh});
  auto v_lo = flat.index_select(0, (g_lo * H + head).flatten()).view({n, H, Lv, P, dh});
  auto v_hi = flat.index_select(0, (g_hi * H + head).flatten()).view({n, H, Lv, P, dh});

  torch::Tensor sample;
  torch::Tensor valid;
  if (mask.defined()) {
    auto mf = mask.to(fopts);
    auto m_lo = mf.index_select(0, g_lo.flatten()).view({n, H, Lv, P});
    auto m_hi = mf.index_select(0, g_hi.flatten()).view({n, H, Lv, P});
    auto a = w_lo * m_lo;
    auto b = w_hi * m_hi;
    auto denom = a + b;
    valid = denom > 0;
    auto safe = torch::where(valid, denom, torch::ones_like(denom));
    sample = (a / safe).unsqueeze(-1) * v_lo + (b / safe).unsqueeze(-1) * v_hi;
    valid = valid.view({n, H, Lv * P});
    logits = logits.masked_fill(~valid, -1e30);
  } else {
    sample = w_lo.unsqueeze(-1) * v_lo + w_hi.unsqueeze(-1) * v_hi;
  }

  auto attn = torch::softmax(logits, -1);
  if (valid.defined()) attn = attn * valid.to(fopts);  // all-invalid heads contribute nothing

  auto out = (attn.unsqueeze(-1) * sample.view({n, H, Lv * P, dh})).sum(2).reshape({n, d});
  return {output_proj_(out), attn, positions};
}

torch::Tensor frame_reference_points(const LevelLayout& layout, torch::Dtype dtype) {
  std::vector<torch::Tensor> parts;
  for (auto len : layout.lengths) {
    parts.push_back((torch::arange(len, torch::kDouble) + 0.5) / static_cast<double>(len));
  }
  return torch::cat(parts).to(dtype);
}

EncoderLayerImpl::EncoderLayerImpl(DeformableAttentionConfig config, std::int64_t ffn_dim) {
  attn_ = register_module("self_attn", MSDeformAttn(config));
  norm1_ = register_module("norm1", torch::nn::LayerNorm(torch::nn::LayerNormOptions({config.model_dim})));
  norm2_ = register_module("norm2", torch::nn::LayerNorm(torch::nn::LayerNormOptions({config.model_dim})));
  ffn1_ = register_module("ffn1", torch::nn::Linear(config.model_dim, ffn_dim));
  ffn2_ = register_module("ffn2", torch::nn::Linear(ffn_dim, config.model_dim));
}

torch::Tensor EncoderLayerImpl::forward(const torch::Tensor& src, const torch::Tensor& pos,
                                        const torch::Tensor& reference, const LevelLayout& layout,
                                        const torch::Tensor& mask) {
  auto x = norm1_(src + attn_(src + pos, reference, src, layout, mask));
  return norm2_(x + ffn2_(torch::relu(ffn1_(x))));
}

DeformableEncoderImpl::DeformableEncoderImpl(DeformableAttentionConfig config, std::int64_t num_layers,
                                             std::int64_t ffn_dim) {
  layers_ = register_module("layers", torch::nn::ModuleList());
  for (std::int64_t i = 0; i < num_layers; ++i) layers_->push_back(EncoderLayer(config, ffn_dim));
}

torch::Tensor DeformableEncoderImpl::forward(const torch::Tensor& src, const torch::Tensor& pos,
                                             const LevelLayout& layout, const torch::Tensor& mask) {
  auto reference = frame_reference_points(layout, src.scalar_type());
  auto x = src;
  for (const auto& layer : *layers_) x = layer->as<EncoderLayer>()->forward(x, pos, reference, layout, mask);
  return x;
}

DecoderLayerImpl::DecoderLayerImpl(DeformableAttentionConfig config, std::int64_t ffn_dim) {
  const auto d = config.model_dim;
  self_attn_ = register_module(
      "self_attn", torch::nn::MultiheadAttention(torch::nn::MultiheadAttentionOptions(d, config.heads).dropout(0.0)));
  cross_attn_ = register_module("cross_attn", MSDeformAttn(config));
  norm1_ = register_module("norm1", torch::nn::LayerNorm(torch::nn::LayerNormOptions({d})));
  norm2_ = register_module("norm2", torch::nn::LayerNorm(torch::nn::LayerNormOptions({d})));
  norm3_ = register_module("norm3", torch::nn::LayerNorm(torch::nn::LayerNormOptions({d})));
  ffn1_ = register_module("ffn1", torch::nn::Linear(d, ffn_dim));
  ffn2_ = register_module("ffn2", torch::nn::Linear(ffn_dim, d));
  refine1_ = register_module("refine1", torch::nn::Linear(d, d));
  refine2_ = register_module("refine2", torch::nn::Linear(d, 1));
  torch::NoGradGuard no_grad;
  refine2_->weight.zero_();
  refine2_->bias.zero_();
}

DecoderOutput DecoderLayerImpl::forward(const torch::Tensor& queries, const torch::Tensor& reference,
                                        const torch::Tensor& memory, const LevelLayout& layout,
                                        const torch::Tensor& mask) {
  auto q3 = queries.unsqueeze(1);  // (N, 1, d)
  auto self = std::get<0>(self_attn_->forward(q3, q3, q3)).squeeze(1);
  auto x = norm1_(queries + self);
  x = norm2_(x + cross_attn_(x, reference, memory, layout, mask));
  x = norm3_(x + ffn2_(torch::relu(ffn1_(x))));
  constexpr double kEps = 1e-5;
  auto r = reference.clamp(kEps, 1.0 - kEps);
  auto logit = torch::log(r / (1.0 - r));
  auto refined = torch::sigmoid(logit + refine2_(torch::relu(refine1_(x))).squeeze(-1));
  return {x, refined};
}

DeformableDecoderImpl::DeformableDecoderImpl(DeformableAttentionConfig config, std::int64_t num_layers,
                                             std::int64_t ffn_dim) {
  reference_head_ = register_module("reference_head", torch::nn::Linear(config.model_dim, 1));
  layers_ = register_module("layers", torch::nn::ModuleList());
  for (std::int64_t i = 0; i < num_layers; ++i) layers_->push_back(DecoderLayer(config, ffn_dim));
}

torch::Tensor DeformableDecoderImpl::initial_reference(const torch::Tensor& query_embeddings) {
  return torch::sigmoid(reference_head_(query_embeddings)).squeeze(-1);
}

DecoderOutput DeformableDecoderImpl::forward(const EventQuerySet& queries, const torch::Tensor& memory,
                                             const LevelLayout& layout, const torch::Tensor& mask) {
  DecoderOutput out{queries.embeddings, queries.reference};
  for (const auto& layer : *layers_) {
    out = layer->as<DecoderLayer>()->forward(out.events, out.reference, memory, layout, mask);
  }
  return out;
}

}  // namespace semdvc::model
