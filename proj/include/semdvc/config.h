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

namespace semdvc {

// Flat run configuration. Keys are dotted names ("fusion.mode"); defaults are
// the full-scale operating point (35 queries, 11-way counter, 100 concepts).
struct RunConfig {
  std::string data_manifest;
  std::string data_val_manifest;
  std::string data_lexicon;
  std::string data_labels;
  std::string out_dir = "runs/default";

  std::int64_t seed = 0;
  std::int64_t epochs = 30;
  double lr = 1e-4;
  double grad_clip_norm = 0.0;
  std::string lr_schedule = "constant";
  std::int64_t threads = 1;

  std::int64_t text_min_freq = 1;

  bool concepts_enabled = true;
  std::int64_t concepts_count = 100;
  std::int64_t concepts_modality = 0;
  std::int64_t concepts_hidden = 256;
  std::int64_t concepts_epochs = 50;
  double concepts_lr = 1e-3;
  std::string concepts_checkpoint;
  double focal_gamma = 2.0;
  double focal_alpha = 0.25;

  std::int64_t resize_length = 1024;
  std::int64_t pyramid_levels = 3;
  std::string fusion_mode = "late";
  std::int64_t fusion_proj_dim = 128;
  std::int64_t model_dim = 256;

  std::int64_t encoder_layers = 2;
  std::int64_t decoder_layers = 2;
  std::int64_t attention_heads = 8;
  std::int64_t attention_points = 4;
  std::int64_t queries_count = 35;

  std::int64_t caption_max_len = 20;
  std::int64_t caption_embed_dim = 128;
  std::int64_t caption_hidden_dim = 256;

  std::int64_t labels_size = 25;
  bool classification_enabled = true;
  std::int64_t counter_max_events = 10;

  double loss_caption = 1.0;
  double loss_loc = 2.0;
  double loss_cls = 1.0;
  double loss_counter = 0.5;
  double match_loc = 2.0;
  double match_cls = 1.0;

  // Throws ConfigError listing every unknown key and every type error.
  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_file(const std::filesystem::path& path);

  // Applies "key=value" overrides; value is parsed according to the key's type.
  void apply_overrides(const std::vector<std::string>& assignments);
  void set(const std::string& key, const std::string& value);

  // Throws ConfigError listing every offending key.
  void validate() const;

  std::string to_json_text() const;
  void save(const std::filesystem::path& path) const;
  // FNV-1a over the canonical JSON dump, hex encoded.
  std::string hash() const;

  // "key (type, default): description" lines for --help.
  static std::string describe_keys();
  static std::vector<std::string> keys();
};

}  // namespace semdvc
