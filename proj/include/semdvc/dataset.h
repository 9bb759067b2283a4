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

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "semdvc/tensor_file.h"
#include "semdvc/text.h"

namespace semdvc {

// Seconds.
struct TimeStamp {
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
  bool operator==(const TimeStamp&) const = default;
};

struct GroundTruthEvent {
  TimeStamp timestamp;
  Tokens caption;
  std::vector<int> labels;

  bool operator==(const GroundTruthEvent&) const = default;
};

struct VideoRecord {
  std::string id;
  double duration = 0.0;
  // Declared modality order; features[m] is T_raw x d_m.
  std::vector<std::string> modality_names;
  std::vector<Matrix> features;
  std::vector<GroundTruthEvent> events;

  std::size_t frame_count() const { return features.empty() ? 0 : features.front().rows; }
  double fps() const { return duration > 0.0 ? static_cast<double>(frame_count()) / duration : 0.0; }

  bool operator==(const VideoRecord&) const = default;
};

enum class PartOfSpeech { kNoun, kVerb, kOther };

using PosLexicon = std::map<std::string, PartOfSpeech>;

PosLexicon load_pos_lexicon(const std::filesystem::path& path);
void save_pos_lexicon(const std::filesystem::path& path, const PosLexicon& lexicon);

// Checks every record invariant; throws ValidationError naming the video and
// event on failure. `label_space_size == 0` skips the label range check.
void validate_record(const VideoRecord& record, std::size_t label_space_size = 0);

// Loads the manifest JSON and every referenced TensorFile. Feature paths are
// resolved relative to the manifest's directory. Events are sorted by start.
std::vector<VideoRecord> load_dataset(const std::filesystem::path& manifest_path,
                                      std::size_t label_space_size = 0);

// Writes `<dir>/manifest.json` and one TensorFile per (video, modality) under
// `<dir>/features/`. Output is byte-stable for identical input.
void save_dataset(const std::filesystem::path& dir, const std::vector<VideoRecord>& records);

// Ground-truth-only view (no features) used by the evaluator.
struct GroundTruthVideo {
  std::string id;
  double duration = 0.0;
  std::vector<GroundTruthEvent> events;
};
std::vector<GroundTruthVideo> load_ground_truth(const std::filesystem::path& manifest_path);

}  // namespace semdvc
