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

#include "semdvc/model/heads.h"

#include "semdvc/errors.h"
#include "semdvc/text.h"

namespace semdvc::model {

LocalizationHeadImpl::LocalizationHeadImpl(std::int64_t dim) {
  fc1_ = register_module("fc1", torch::nn::Linear(dim, dim));
  fc2_ = register_module("fc2", torch::nn::Linear(dim, 2));
}

torch::Tensor LocalizationHeadImpl::intervals_from_raw(const torch::Tensor& raw) {
  auto cw = torch::sigmoid(raw);
  auto center = cw.select(-1, 0);
  auto half = cw.select(-1, 1) * 0.5;
  return torch::stack({(center - half).clamp(0.0, 1.0), (center + half).clamp(0.0, 1.0)}, -1);
}

torch::Tensor LocalizationHeadImpl::forward(const torch::Tensor& events) {
  return intervals_from_raw(fc2_(torch::relu(fc1_(events))));
}

CaptionHeadImpl::CaptionHeadImpl(std::int64_t event_dim, std::int64_t vocab_size, std::int64_t embed_dim,
                                 std::int64_t hidden_dim)
    : vocab_size_(vocab_size) {
  embed_ = register_module("embed", torch::nn::Embedding(vocab_size, embed_dim));
  cell_ = register_module("cell", torch::nn::LSTMCell(embed_dim + event_dim, hidden_dim));
  out_ = register_module("out", torch::nn::Linear(hidden_dim, vocab_size));
}

torch::Tensor CaptionHeadImpl::teacher_forcing(const torch::Tensor& events, const torch::Tensor& targets) {
  {
    torch::NoGradGuard no_grad;
    if (targets.numel() > 0 && (targets.min().item<std::int64_t>() < 0 ||
                                targets.max().item<std::int64_t>() >= vocab_size_)) {
      throw ValidationError("caption target contains a token index outside the vocabulary");
    }
  }
  const auto batch = events.size(0);
  const auto steps = targets.size(1);
  auto prev = torch::full({batch}, TextVocabulary::kBegin, torch::kLong);
  std::optional<std::tuple<torch::Tensor, torch::Tensor>> state;
  std::vector<torch::Tensor> outputs;
  for (std::int64_t s = 0; s < steps; ++s) {
    auto input = torch::cat({embed_(prev), events}, 1);
    state = cell_(input, state);
    outputs.push_back(torch::log_softmax(out_(std::get<0>(*state)), -1));
    prev = targets.select(1, s);
  }
  return torch::stack(outputs, 1);
}

std::vector<GreedyCaption> CaptionHeadImpl::greedy(const torch::Tensor& events, std::int64_t max_len) {
  torch::NoGradGuard no_grad;
  const auto batch = events.size(0);
  std::vector<GreedyCaption> out(static_cast<std::size_t>(batch));
  std::vector<bool> done(static_cast<std::size_t>(batch), false);
  auto prev = torch::full({batch}, TextVocabulary::kBegin, torch::kLong);
  std::optional<std::tuple<torch::Tensor, torch::Tensor>> state;
  for (std::int64_t s = 0; s < max_len; ++s) {
    auto input = torch::cat({embed_(prev), events}, 1);
    state = cell_(input, state);
    auto logp = torch::log_softmax(out_(std::get<0>(*state)), -1);
    auto [best, idx] = logp.max(-1);
    // Ties resolve to the lowest index inside max().
    auto best_c = best.to(torch::kDouble).contiguous();
    auto idx_c = idx.contiguous();
    auto best_a = best_c.accessor<double, 1>();
    auto idx_a = idx_c.accessor<std::int64_t, 1>();
    bool all_done = true;
    for (std::int64_t b = 0; b < batch; ++b) {
      const auto i = static_cast<std::size_t>(b);
      if (done[i]) continue;
      const auto tok = idx_a[b];
      out[i].logprobs.push_back(best_a[b]);
      if (tok == TextVocabulary::kEnd) {
        done[i] = true;
      } else {
        out[i].tokens.push_back(tok);
        all_done = false;
      }
    }
    if (all_done) break;
    prev = idx;
  }
  return out;
}

ClassificationHeadImpl::ClassificationHeadImpl(std::int64_t dim, std::int64_t num_labels) {
  fc1_ = register_module("fc1", torch::nn::Linear(dim, dim));
  fc2_ = register_module("fc2", torch::nn::Linear(dim, num_labels));
}

torch::Tensor ClassificationHeadImpl::forward(const torch::Tensor& events) {
  return torch::sigmoid(fc2_(torch::relu(fc1_(events))));
}

EventCounterImpl::EventCounterImpl(std::int64_t dim, std::int64_t max_events) : max_events_(max_events) {
  fc_ = register_module("fc", torch::nn::Linear(dim, max_events + 1));
}

torch::Tensor EventCounterImpl::logits(const torch::Tensor& events) {
  if (events.size(0) < 1) throw ValidationError("event counter needs at least one query");
  return fc_(std::get<0>(events.max(0)));
}

torch::Tensor EventCounterImpl::forward(const torch::Tensor& events) { return torch::softmax(logits(events), -1); }

}  // namespace semdvc::model
