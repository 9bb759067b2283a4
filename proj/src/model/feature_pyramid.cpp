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

#include "semdvc/model/feature_pyramid.h"

#include <cmath>
#include <numbers>

#include "semdvc/errors.h"

namespace semdvc::model {
namespace F = torch::nn::functional;

LevelLayout LevelLayout::for_length(std::int64_t frames, std::int64_t levels) {
  LevelLayout out;
  std::int64_t len = frames;
  for (std::int64_t l = 0; l <= levels; ++l) {
    out.offsets.push_back(out.total);
    out.lengths.push_back(len);
    out.total += len;
    len = (len + 1) / 2;  // ceil(len / 2) == ceil(T / 2^(l+1))
  }
  return out;
}

std::int64_t pyramid_length(std::int64_t frames, std::int64_t levels) {
  return LevelLayout::for_length(frames, levels).total;
}

torch::Tensor pyramid_mask(const torch::Tensor& mask, std::int64_t levels) {
  std::vector<torch::Tensor> parts{mask.to(torch::kBool)};
  auto cur = mask.to(torch::kFloat).view({1, 1, -1});
  for (std::int64_t l = 1; l <= levels; ++l) {
    cur = F::max_pool1d(cur, F::MaxPool1dFuncOptions(3).stride(2).padding(1));
    parts.push_back(cur.flatten() > 0.5);
  }
  return torch::cat(parts);
}

TemporalPyramidImpl::TemporalPyramidImpl(std::int64_t input_dim, std::int64_t output_dim, std::int64_t levels)
    : levels_(levels) {
  project_ = register_module("project", torch::nn::Linear(input_dim, output_dim));
  convs_ = register_module("convs", torch::nn::ModuleList());
  norms_ = register_module("norms", torch::nn::ModuleList());
  for (std::int64_t l = 0; l < levels; ++l) {
    convs_->push_back(torch::nn::Conv1d(torch::nn::Conv1dOptions(output_dim, output_dim, 3).stride(2).padding(1)));
    norms_->push_back(torch::nn::LayerNorm(torch::nn::LayerNormOptions({output_dim})));
  }
}

torch::Tensor TemporalPyramidImpl::forward(const torch::Tensor& x) {
  std::vector<torch::Tensor> levels;
  auto cur = project_(x);  // (T, d)
  levels.push_back(cur);
  for (std::int64_t l = 0; l < levels_; ++l) {
    auto y = convs_[l]->as<torch::nn::Conv1d>()->forward(cur.t().unsqueeze(0));  // (1, d, ceil(T/2))
    y = y.squeeze(0).t();
    y = torch::relu(norms_[l]->as<torch::nn::LayerNorm>()->forward(y));
    levels.push_back(y);
    cur = y;
  }
  return torch::cat(levels, 0);
}

FusionMode parse_fusion_mode(const std::string& name) {
  if (name == "early") return FusionMode::kEarly;
  if (name == "late") return FusionMode::kLate;
  throw ConfigError("fusion.mode must be early or late, got '" + name + "'");
}

FeatureFusionImpl::FeatureFusionImpl(FusionConfig config) : config_(std::move(config)) {
  if (config_.modality_dims.empty()) throw ValidationError("fusion needs at least one modality");
  std::vector<std::int64_t> channels = config_.modality_dims;
  if (config_.concept_dim > 0) channels.push_back(config_.concept_dim);
  const auto width = static_cast<std::int64_t>(channels.size()) * config_.projection_dim;

  if (config_.mode == FusionMode::kLate) {
    for (std::size_t c = 0; c < channels.size(); ++c) {
      pyramids_.push_back(register_module("pyramid" + std::to_string(c),
                                          TemporalPyramid(channels[c], config_.projection_dim, config_.levels)));
    }
  } else {
    for (std::size_t c = 0; c < channels.size(); ++c) {
      frame_projections_.push_back(
          register_module("frame_proj" + std::to_string(c), torch::nn::Linear(channels[c], config_.projection_dim)));
    }
    pyramids_.push_back(register_module("pyramid", TemporalPyramid(width, width, config_.levels)));
  }
  output_ = register_module("output", torch::nn::Linear(width, config_.model_dim));
}

MultiScaleFeature FeatureFusionImpl::forward(const std::vector<torch::Tensor>& modalities,
                                             const torch::Tensor& concepts, const torch::Tensor& mask) {
  if (modalities.size() != config_.modality_dims.size()) {
    throw ValidationError("fusion expects " + std::to_string(config_.modality_dims.size()) + " modalities");
  }
  std::vector<torch::Tensor> channels(modalities.begin(), modalities.end());
  if (config_.concept_dim > 0) {
    if (!concepts.defined()) throw ValidationError("fusion expects a concept sequence");
    channels.push_back(concepts);
  }
  const std::int64_t frames = channels.front().size(0);
  for (const auto& c : channels) {
    if (c.size(0) != frames) throw ValidationError("fusion inputs differ in time length");
  }
  if (mask.defined() && mask.size(0) != frames) throw ValidationError("fusion mask length mismatch");

  torch::Tensor fused;
  if (config_.mode == FusionMode::kLate) {
    std::vector<torch::Tensor> outs;
    for (std::size_t c = 0; c < channels.size(); ++c) outs.push_back(pyramids_[c]->forward(channels[c]));
    fused = torch::cat(outs, 1);
  } else {
    std::vector<torch::Tensor> projected;
    for (std::size_t c = 0; c < channels.size(); ++c) projected.push_back(frame_projections_[c]->forward(channels[c]));
    fused = pyramids_.front()->forward(torch::cat(projected, 1));
  }

  MultiScaleFeature out;
  out.layout = LevelLayout::for_length(frames, config_.levels);
  out.data = output_(fused);
  auto m = mask.defined() ? mask : torch::ones({frames}, torch::kBool);
  out.mask = pyramid_mask(m, config_.levels);
  return out;
}

torch::Tensor sinusoidal_level_encoding(const LevelLayout& layout, std::int64_t dim, torch::Dtype dtype) {
  auto opts = torch::TensorOptions().dtype(torch::kDouble);
  std::vector<torch::Tensor> pos;
  for (auto len : layout.lengths) pos.push_back(torch::arange(len, opts) / static_cast<double>(len));
  auto p = torch::cat(pos).unsqueeze(1) * (2.0 * std::numbers::pi);  // (T', 1)
  auto i = torch::arange(dim, opts);
  auto freq = torch::pow(10000.0, 2.0 * torch::floor(i / 2.0) / static_cast<double>(dim));
  auto angle = p / freq;  // (T', dim)
  auto even = (torch::remainder(i, 2) == 0).unsqueeze(0);
  return torch::where(even, torch::sin(angle), torch::cos(angle)).to(dtype);
}

PositionalLevelEncodingImpl::PositionalLevelEncodingImpl(std::int64_t max_levels, std::int64_t dim) : dim_(dim) {
  level_embed_ = register_module("level_embed", torch::nn::Embedding(max_levels, dim));
  torch::nn::init::normal_(level_embed_->weight, 0.0, 0.02);
}

torch::Tensor PositionalLevelEncodingImpl::forward(const LevelLayout& layout) {
  std::vector<torch::Tensor> ids;
  for (std::int64_t l = 0; l < layout.num_levels(); ++l) {
    ids.push_back(torch::full({layout.lengths[static_cast<std::size_t>(l)]}, l, torch::kLong));
  }
  auto levels = level_embed_(torch::cat(ids));
  return sinusoidal_level_encoding(layout, dim_, levels.scalar_type()) + levels;
}

}  // namespace semdvc::model
