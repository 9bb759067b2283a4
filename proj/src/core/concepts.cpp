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

#include "semdvc/concepts.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>

#include <json.hpp>

#include "semdvc/errors.h"

namespace semdvc {

ConceptVocabulary::ConceptVocabulary(std::vector<std::string> concepts) : concepts_(std::move(concepts)) {
  for (std::size_t i = 0; i < concepts_.size(); ++i) {
    if (!index_.emplace(concepts_[i], static_cast<int>(i)).second) {
      throw ValidationError("duplicate concept: " + concepts_[i]);
    }
  }
}

int ConceptVocabulary::index_of(const std::string& word) const {
  auto it = index_.find(word);
  return it == index_.end() ? -1 : it->second;
}

void ConceptVocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << nlohmann::json(concepts_).dump(2) << "\n";
}

ConceptVocabulary ConceptVocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return ConceptVocabulary(nlohmann::json::parse(in).get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception&) {
    throw FormatError("concept vocabulary must be a JSON list of strings: " + path.string());
  }
}

ConceptVocabulary build_concept_vocabulary(const std::vector<VideoRecord>& records, const PosLexicon& lexicon,
                                           std::size_t num_concepts) {
  std::map<std::string, std::size_t> freq;
  for (const auto& r : records) {
    for (const auto& e : r.events) {
      for (const auto& tok : e.caption) {
        auto it = lexicon.find(tok);
        if (it != lexicon.end() && it->second != PartOfSpeech::kOther) ++freq[tok];
      }
    }
  }
  if (freq.size() < num_concepts) {
    throw ValidationError("requested " + std::to_string(num_concepts) + " concepts but the corpus has only " +
                          std::to_string(freq.size()) + " distinct nouns/verbs");
  }
  std::vector<std::pair<std::string, std::size_t>> entries(freq.begin(), freq.end());
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> words;
  for (std::size_t i = 0; i < num_concepts; ++i) words.push_back(entries[i].first);
  return ConceptVocabulary(std::move(words));
}

std::size_t ConceptTargets::masked_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

ConceptTargets assign_concept_targets(const VideoRecord& record, const ConceptVocabulary& vocab, double fps) {
  if (!(fps > 0.0)) throw ValidationError("fps must be positive");
  const std::size_t frames = record.frame_count();
  ConceptTargets out{Matrix(frames, vocab.size()), std::vector<std::uint8_t>(frames, 0)};

  // Concept indices per event depend only on caption tokens.
  std::vector<std::vector<int>> event_concepts;
  for (const auto& e : record.events) {
    std::vector<int> idx;
    for (const auto& tok : e.caption) {
      if (int i = vocab.index_of(tok); i >= 0) idx.push_back(i);
    }
    event_concepts.push_back(std::move(idx));
  }

  for (std::size_t t = 0; t < frames; ++t) {
    const double mid = (static_cast<double>(t) + 0.5) / fps;
    for (std::size_t e = 0; e < record.events.size(); ++e) {
      const auto& ts = record.events[e].timestamp;
      if (mid < ts.start || mid > ts.end) continue;
      out.mask[t] = 1;
      for (int i : event_concepts[e]) out.targets(t, static_cast<std::size_t>(i)) = 1.0f;
    }
  }
  return out;
}

}  // namespace semdvc
