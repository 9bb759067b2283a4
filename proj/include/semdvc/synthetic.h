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
#include <string>
#include <vector>

#include "semdvc/dataset.h"

namespace semdvc {

struct SyntheticOptions {
  std::uint64_t seed = 0;
  std::size_t num_videos = 20;
  std::size_t max_events = 5;  // <= 10
  std::size_t feature_dim = 32;
  std::size_t modalities = 2;
  double fps = 1.0;
  double noise_sigma = 0.1;
};

struct SyntheticDataset {
  std::vector<VideoRecord> records;
  PosLexicon lexicon;
  std::vector<std::string> label_names;  // label index = region index
};

// Makeup-style template corpus: "<verb> <product> on <region> with <tool>".
// Event frames carry the sum of per-word prototype vectors plus Gaussian
// noise; other frames carry a background prototype plus noise. Each modality
// uses its own prototypes.
SyntheticDataset generate_synthetic_dataset(const SyntheticOptions& options);

// Writes manifest.json, features/, pos_lexicon.json and label_space.json.
void save_synthetic_dataset(const std::filesystem::path& dir, const SyntheticDataset& dataset);

std::vector<std::string> load_label_space(const std::filesystem::path& path);

}  // namespace semdvc
