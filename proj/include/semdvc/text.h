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
#include <string_view>
#include <unordered_map>
#include <vector>

namespace semdvc {

using Tokens = std::vector<std::string>;

// Lowercases, splits on whitespace, and emits each ASCII punctuation character
// as its own token. No stemming.
Tokens tokenize(std::string_view text);

// Joins with single spaces.
std::string detokenize(const Tokens& tokens);

// Maximum caption length in tokens, including the end token.
inline constexpr std::size_t kMaxCaptionLength = 20;

class TextVocabulary {
 public:
  static constexpr std::int64_t kPad = 0;
  static constexpr std::int64_t kBegin = 1;
  static constexpr std::int64_t kEnd = 2;
  static constexpr std::int64_t kUnknown = 3;
  static constexpr std::size_t kNumReserved = 4;

  TextVocabulary();
  // `words` excludes the reserved tokens; they are prepended in fixed order.
  explicit TextVocabulary(const std::vector<std::string>& words);

  std::size_t size() const { return tokens_.size(); }
  std::int64_t index_of(const std::string& token) const;  // kUnknown if absent
  bool contains(const std::string& token) const { return index_.contains(token); }
  const std::string& token_at(std::int64_t index) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Encodes a caption as [tokens..., end], truncated to `max_len` entries.
  std::vector<std::int64_t> encode(const Tokens& caption, std::size_t max_len = kMaxCaptionLength) const;
  // Stops at the end token; skips pad/begin.
  Tokens decode(const std::vector<std::int64_t>& ids) const;

  bool operator==(const TextVocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int64_t> index_;
};

struct VideoRecord;

// Every caption token with frequency >= min_freq, ordered by frequency
// descending then lexicographically.
TextVocabulary build_text_vocabulary(const std::vector<VideoRecord>& records, std::size_t min_freq);

}  // namespace semdvc
