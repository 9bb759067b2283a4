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

#include <torch/torch.h>

namespace semdvc::model {

// MLP -> sigmoid (center, width) -> [clamp(c - w/2), clamp(c + w/2)].
class LocalizationHeadImpl : public torch::nn::Module {
 public:
  explicit LocalizationHeadImpl(std::int64_t dim);
  torch::Tensor forward(const torch::Tensor& events);  // (N, 2) normalized [start, end]

  // Maps raw MLP outputs (N, 2) to intervals.
  static torch::Tensor intervals_from_raw(const torch::Tensor& raw);

 private:
  torch::nn::Linear fc1_{nullptr}, fc2_{nullptr};
};
TORCH_MODULE(LocalizationHead);

struct GreedyCaption {
  std::vector<std::int64_t> tokens;  // excludes the end token
  std::vector<double> logprobs;      // one per emitted step, end token included when reached
};

// LSTM captioner. Every step consumes concat(previous word embedding, q~_i);
// a fully-connected layer maps the hidden state to word logits.
class CaptionHeadImpl : public torch::nn::Module {
 public:
  CaptionHeadImpl(std::int64_t event_dim, std::int64_t vocab_size, std::int64_t embed_dim, std::int64_t hidden_dim);

  // events: (B, d); targets: (B, S) token ids ending in the end token,
  // right-padded with pad. Returns per-step log-probabilities (B, S, V).
  torch::Tensor teacher_forcing(const torch::Tensor& events, const torch::Tensor& targets);

  // Deterministic argmax decoding until the end token or max_len steps.
  std::vector<GreedyCaption> greedy(const torch::Tensor& events, std::int64_t max_len);

  std::int64_t vocab_size() const { return vocab_size_; }

 private:
  std::int64_t vocab_size_;
  torch::nn::Embedding embed_{nullptr};
  torch::nn::LSTMCell cell_{nullptr};
  torch::nn::Linear out_{nullptr};
};
TORCH_MODULE(CaptionHead);

// MLP -> per-label sigmoid (multi-label).
class ClassificationHeadImpl : public torch::nn::Module {
 public:
  ClassificationHeadImpl(std::int64_t dim, std::int64_t num_labels);
  torch::Tensor forward(const torch::Tensor& events);  // (N, C) in [0, 1]

  torch::nn::Linear& output_layer() { return fc2_; }
  torch::nn::Linear& hidden_layer() { return fc1_; }

 private:
  torch::nn::Linear fc1_{nullptr}, fc2_{nullptr};
};
TORCH_MODULE(ClassificationHead);

// Max-pool over queries -> fully-connected -> softmax over 0..maxEvents.
class EventCounterImpl : public torch::nn::Module {
 public:
  EventCounterImpl(std::int64_t dim, std::int64_t max_events);
  torch::Tensor forward(const torch::Tensor& events);  // (maxEvents + 1) probabilities
  torch::Tensor logits(const torch::Tensor& events);

  std::int64_t max_events() const { return max_events_; }

 private:
  std::int64_t max_events_;
  torch::nn::Linear fc_{nullptr};
};
TORCH_MODULE(EventCounter);

}  // namespace semdvc::model
