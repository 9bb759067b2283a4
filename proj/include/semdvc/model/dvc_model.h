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

#include "semdvc/config.h"
#include "semdvc/model/deformable_attention.h"
#include "semdvc/model/feature_pyramid.h"
#include "semdvc/model/heads.h"

namespace semdvc::model {

// Data-dependent sizes that complete a RunConfig into a model shape.
struct ModelDims {
  std::vector<std::int64_t> modality_dims;
  std::int64_t num_concepts = 0;  // 0 when the concept channel is disabled
  std::int64_t vocab_size = 0;
  std::int64_t num_labels = 0;
};

// One video, resized to the fixed length and ready for the network.
struct VideoTensors {
  std::string id;
  double duration = 0.0;
  double span = 0.0;  // seconds covered by the fixed-length sequence
  std::vector<torch::Tensor> modalities;  // (T, d_m)
  torch::Tensor concepts;                 // (T, N_c) or undefined
  torch::Tensor mask;                     // (T) bool
};

struct HeadOutputs {
  torch::Tensor events;          // (N, d)
  torch::Tensor reference;       // (N)
  torch::Tensor intervals;       // (N, 2) normalized [start, end]
  torch::Tensor label_probs;     // (N, C) or undefined when classification is off
  torch::Tensor counter_logits;  // (maxEvents + 1)
};

class DVCModelImpl : public torch::nn::Module {
 public:
  DVCModelImpl(const RunConfig& config, ModelDims dims);

  // Encoder, decoder and the three non-recurrent heads. Captions are decoded
  // separately through caption_head().
  HeadOutputs forward(const VideoTensors& video);

  MultiScaleFeature encode(const VideoTensors& video);

  const ModelDims& dims() const { return dims_; }
  bool has_classification() const { return !classification_.is_empty(); }
  std::int64_t max_events() const { return counter_->max_events(); }

  FeatureFusion& fusion() { return fusion_; }
  DeformableDecoder& decoder() { return decoder_; }
  CaptionHead& caption_head() { return caption_; }
  LocalizationHead& localization_head() { return localization_; }
  ClassificationHead& classification_head() { return classification_; }
  EventCounter& counter() { return counter_; }
  torch::Tensor& query_embeddings() { return queries_; }

 private:
  ModelDims dims_;
  FeatureFusion fusion_{nullptr};
  PositionalLevelEncoding positional_{nullptr};
  DeformableEncoder encoder_{nullptr};
  torch::Tensor queries_;
  DeformableDecoder decoder_{nullptr};
  LocalizationHead localization_{nullptr};
  CaptionHead caption_{nullptr};
  ClassificationHead classification_{nullptr};
  EventCounter counter_{nullptr};
};
TORCH_MODULE(DVCModel);

}  // namespace semdvc::model
