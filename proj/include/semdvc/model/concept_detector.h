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
#include <filesystem>
#include <vector>

#include <torch/torch.h>

#include "semdvc/concepts.h"

namespace semdvc::model {

// Frame feature -> N_c concept logits.
class ConceptDetectorImpl : public torch::nn::Module {
 public:
  ConceptDetectorImpl(std::int64_t input_dim, std::int64_t num_concepts, std::int64_t hidden = 256);

  torch::Tensor forward(const torch::Tensor& frames);  // logits, (T, N_c)

  std::int64_t input_dim() const { return input_dim_; }
  std::int64_t num_concepts() const { return num_concepts_; }
  std::int64_t hidden() const { return hidden_; }

 private:
  std::int64_t input_dim_, num_concepts_, hidden_;
  torch::nn::Linear fc1_{nullptr}, fc2_{nullptr};
};
TORCH_MODULE(ConceptDetector);

struct DetectorTrainOptions {
  double gamma = 2.0;
  double alpha = 0.25;
  std::int64_t epochs = 50;
  double learning_rate = 1e-3;
  std::int64_t batch_size = 256;
  std::uint64_t seed = 0;
};

struct DetectorTrainResult {
  std::vector<double> loss_curve;  // mean focal loss per epoch
};

// Trains on frames with mask = 1 only. frames: (T, d); targets: (T, N_c);
// mask: (T) bool.
DetectorTrainResult train_concept_detector(ConceptDetector& detector, const torch::Tensor& frames,
                                           const torch::Tensor& targets, const torch::Tensor& mask,
                                           const DetectorTrainOptions& options);

// Sigmoid probabilities for every frame, (T, N_c).
torch::Tensor detect_concepts(ConceptDetector& detector, const torch::Tensor& frames);

// Micro-averaged F1 over all (frame, concept) decisions at `threshold`.
double micro_f1(const torch::Tensor& probs, const torch::Tensor& targets, double threshold = 0.5);

// Stacks per-video frames/targets/masks of `modality` for detector training.
struct DetectorDataset {
  torch::Tensor frames, targets, mask;
};
DetectorDataset build_detector_dataset(const std::vector<VideoRecord>& records, const ConceptVocabulary& vocab,
                                       std::size_t modality);

void save_detector(const std::filesystem::path& dir, ConceptDetector& detector, const ConceptVocabulary& vocab);
struct LoadedDetector {
  ConceptDetector detector{nullptr};
  ConceptVocabulary vocab;
};
LoadedDetector load_detector(const std::filesystem::path& dir);

}  // namespace semdvc::model
