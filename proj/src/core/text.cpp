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

#include "semdvc/text.h"

#include <algorithm>
#include <cctype>
#include <map>

#include "semdvc/dataset.h"
#include "semdvc/errors.h"

namespace semdvc {

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      flush();
    } else if (std::ispunct(c)) {
      flush();
      out.emplace_back(1, static_cast<char>(c));
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush();
  return out;
}

std::string detokenize(const Tokens& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

TextVocabulary::TextVocabulary() : TextVocabulary(std::vector<std::string>{}) {}

TextVocabulary::TextVocabulary(const std::vector<std::string>& words) {
  tokens_ = {"<pad>", "<bos>", "<eos>", "<unk>"};
  for (const auto& w : words) {
    if (std::find(tokens_.begin(), tokens_.end(), w) != tokens_.end()) {
      throw ValidationError("duplicate vocabulary token: " + w);
    }
    tokens_.push_back(w);
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], static_cast<std::int64_t>(i));
}

std::int64_t TextVocabulary::index_of(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnknown : it->second;
}

const std::string& TextVocabulary::token_at(std::int64_t index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= tokens_.size()) {
    throw ValidationError("token index out of range: " + std::to_string(index));
  }
  return tokens_[static_cast<std::size_t>(index)];
}

std::vector<std::int64_t> TextVocabulary::encode(const Tokens& caption, std::size_t max_len) const {
  std::vector<std::int64_t> ids;
  const std::size_t body = std::min(caption.size(), max_len > 0 ? max_len - 1 : 0);
  ids.reserve(body + 1);
  for (std::size_t i = 0; i < body; ++i) ids.push_back(index_of(caption[i]));
  ids.push_back(kEnd);
  return ids;
}

Tokens TextVocabulary::decode(const std::vector<std::int64_t>& ids) const {
  Tokens out;
  for (auto id : ids) {
    if (id == kEnd) break;
    if (id == kPad || id == kBegin) continue;
    out.push_back(token_at(id));
  }
  return out;
}

TextVocabulary build_text_vocabulary(const std::vector<VideoRecord>& records, std::size_t min_freq) {
  if (min_freq < 1) throw ValidationError("text vocabulary min frequency must be >= 1");
  std::map<std::string, std::size_t> freq;
  for (const auto& r : records) {
    for (const auto& e : r.events) {
      for (const auto& t : e.caption) ++freq[t];
    }
  }
  if (freq.empty()) throw ValidationError("cannot build text vocabulary from an empty corpus");

  std::vector<std::pair<std::string, std::size_t>> entries;
  for (const auto& [word, count] : freq) {
    if (count >= min_freq) entries.emplace_back(word, count);
  }
  // std::map iteration is already lexicographic; stable sort keeps that as tie-break.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> words;
  words.reserve(entries.size());
  for (auto& [w, _] : entries) words.push_back(w);
  return TextVocabulary(words);
}

}  // namespace semdvc
