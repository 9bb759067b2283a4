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
#include <unordered_map>
#include <vector>

#include "semdvc/dataset.h"

namespace semdvc {

// Ordered list of the N_c most frequent noun/verb caption words.
class ConceptVocabulary {
 public:
  ConceptVocabulary() = default;
  explicit ConceptVocabulary(std::vector<std::string> concepts);

  std::size_t size() const { return concepts_.size(); }
  const std::vector<std::string>& concepts() const { return concepts_; }
  // -1 when the word is not a concept.
  int index_of(const std::string& word) const;

  void save(const std::filesystem::path& path) const;
  static ConceptVocabulary load(const std::filesystem::path& path);

  bool operator==(const ConceptVocabulary& o) const { return concepts_ == o.concepts_; }

 private:
  std::vector<std::string> concepts_;
  std::unordered_map<std::string, int> index_;
};

ConceptVocabulary build_concept_vocabulary(const std::vector<VideoRecord>& records, const PosLexicon& lexicon,
                                           std::size_t num_concepts);

// Per-frame binary concept targets. Frames outside every event have
// mask = 0 and an all-zero target row.
struct ConceptTargets {
  Matrix targets;             // T_raw x N_c, entries in {0, 1}
  std::vector<std::uint8_t> mask;  // T_raw

  std::size_t masked_count() const;
};

// Frame t covers [t/fps, (t+1)/fps) and belongs to an event when its midpoint
// lies in the closed event interval. Overlapping events contribute the union
// of their concepts.
ConceptTargets assign_concept_targets(const VideoRecord& record, const ConceptVocabulary& vocab, double fps);

}  // namespace semdvc
