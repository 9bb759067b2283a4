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

#include "semdvc/config.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "semdvc/errors.h"

namespace semdvc {
namespace {

using nlohmann::json;
using Member = std::variant<std::string RunConfig::*, std::int64_t RunConfig::*, double RunConfig::*,
                            bool RunConfig::*>;

struct Field {
  const char* key;
  Member member;
  const char* help;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      {"data.manifest", &RunConfig::data_manifest, "training manifest JSON"},
      {"data.val_manifest", &RunConfig::data_val_manifest, "validation manifest JSON (split=val)"},
      {"data.lexicon", &RunConfig::data_lexicon, "POS lexicon JSON {word: noun|verb|other}"},
      {"data.labels", &RunConfig::data_labels, "optional label-space JSON list; must hold labels.size names"},
      {"out.dir", &RunConfig::out_dir, "run output directory"},
      {"seed", &RunConfig::seed, "random seed (env DVC_SEED overrides)"},
      {"epochs", &RunConfig::epochs, "captioning model epochs"},
      {"lr", &RunConfig::lr, "Adam learning rate"},
      {"grad.clip_norm", &RunConfig::grad_clip_norm, "max gradient L2 norm per step, 0 disables"},
      {"lr.schedule", &RunConfig::lr_schedule, "constant | cosine (decays to zero over the run)"},
      {"threads", &RunConfig::threads, "intra-op threads"},
      {"text.min_freq", &RunConfig::text_min_freq, "minimum caption token frequency"},
      {"concepts.enabled", &RunConfig::concepts_enabled, "use the concept channel"},
      {"concepts.count", &RunConfig::concepts_count, "number of concepts N_c"},
      {"concepts.modality", &RunConfig::concepts_modality, "modality index fed to the concept detector"},
      {"concepts.hidden", &RunConfig::concepts_hidden, "concept detector hidden width"},
      {"concepts.epochs", &RunConfig::concepts_epochs, "concept detector epochs"},
      {"concepts.lr", &RunConfig::concepts_lr, "concept detector learning rate"},
      {"concepts.checkpoint", &RunConfig::concepts_checkpoint, "concept detector directory (default <out.dir>/concepts)"},
      {"focal.gamma", &RunConfig::focal_gamma, "focal loss gamma"},
      {"focal.alpha", &RunConfig::focal_alpha, "focal loss alpha"},
      {"resize.length", &RunConfig::resize_length, "fixed temporal length T"},
      {"pyramid.levels", &RunConfig::pyramid_levels, "temporal convolution levels L"},
      {"fusion.mode", &RunConfig::fusion_mode, "early | late"},
      {"fusion.proj_dim", &RunConfig::fusion_proj_dim, "per-channel projection width"},
      {"model.dim", &RunConfig::model_dim, "transformer width d_model"},
      {"encoder.layers", &RunConfig::encoder_layers, "encoder layers"},
      {"decoder.layers", &RunConfig::decoder_layers, "decoder layers"},
      {"attention.heads", &RunConfig::attention_heads, "deformable attention heads"},
      {"attention.points", &RunConfig::attention_points, "sampling points per head and level"},
      {"queries.count", &RunConfig::queries_count, "event queries N"},
      {"caption.max_len", &RunConfig::caption_max_len, "caption length including end token"},
      {"caption.embed_dim", &RunConfig::caption_embed_dim, "word embedding width"},
      {"caption.hidden_dim", &RunConfig::caption_hidden_dim, "LSTM hidden width"},
      {"labels.size", &RunConfig::labels_size, "label space size"},
      {"classification.enabled", &RunConfig::classification_enabled, "use the classification head"},
      {"counter.max_events", &RunConfig::counter_max_events, "expected max events (counter has this + 1 classes)"},
      {"loss.caption", &RunConfig::loss_caption, "captioning loss weight"},
      {"loss.loc", &RunConfig::loss_loc, "localization loss weight"},
      {"loss.cls", &RunConfig::loss_cls, "classification loss weight"},
      {"loss.counter", &RunConfig::loss_counter, "counter loss weight"},
      {"match.loc", &RunConfig::match_loc, "matching cost weight for 1 - gIoU"},
      {"match.cls", &RunConfig::match_cls, "matching cost weight for label focal cost"},
  };
  return kFields;
}

const Field* find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (key == f.key) return &f;
  }
  return nullptr;
}

json get_value(const RunConfig& cfg, const Field& f) {
  return std::visit([&](auto member) { return json(cfg.*member); }, f.member);
}

// Returns an error message, empty on success.
std::string set_value(RunConfig& cfg, const Field& f, const json& v) {
  return std::visit(
      [&](auto member) -> std::string {
        using T = std::remove_reference_t<decltype(cfg.*member)>;
        if constexpr (std::is_same_v<T, std::string>) {
          if (!v.is_string()) return "expected string";
        } else if constexpr (std::is_same_v<T, bool>) {
          if (!v.is_boolean()) return "expected boolean";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          if (!v.is_number_integer()) return "expected integer";
        } else {
          if (!v.is_number()) return "expected number";
        }
        cfg.*member = v.get<T>();
        return {};
      },
      f.member);
}

json parse_scalar(const Field& f, const std::string& text) {
  return std::visit(
      [&](auto member) -> json {
        using T = std::remove_reference_t<decltype(RunConfig{}.*member)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return text;
        } else {
          try {
            return json::parse(text);
          } catch (const json::parse_error&) {
            return text;  // type check reports it
          }
        }
      },
      f.member);
}

std::string type_name(const Member& m) {
  switch (m.index()) {
    case 0: return "string";
    case 1: return "int";
    case 2: return "float";
    default: return "bool";
  }
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a flat JSON object");
  RunConfig cfg;
  std::vector<std::string> problems;
  for (const auto& [key, value] : j.items()) {
    const Field* f = find_field(key);
    if (!f) {
      problems.push_back(key + ": unknown key");
      continue;
    }
    if (auto err = set_value(cfg, *f, value); !err.empty()) problems.push_back(key + ": " + err);
  }
  if (!problems.empty()) {
    std::string msg = "invalid config keys:";
    for (const auto& p : problems) msg += " [" + p + "]";
    throw ConfigError(msg);
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

void RunConfig::set(const std::string& key, const std::string& value) { apply_overrides({key + "=" + value}); }

void RunConfig::apply_overrides(const std::vector<std::string>& assignments) {
  std::vector<std::string> problems;
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) {
      problems.push_back(a + ": expected key=value");
      continue;
    }
    const std::string key = a.substr(0, eq);
    const Field* f = find_field(key);
    if (!f) {
      problems.push_back(key + ": unknown key");
      continue;
    }
    if (auto err = set_value(*this, *f, parse_scalar(*f, a.substr(eq + 1))); !err.empty()) {
      problems.push_back(key + ": " + err);
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid overrides:";
    for (const auto& p : problems) msg += " [" + p + "]";
    throw ConfigError(msg);
  }
}

void RunConfig::validate() const {
  std::vector<std::string> bad;
  auto require = [&](bool ok, const char* key, const char* why) {
    if (!ok) bad.push_back(std::string(key) + ": " + why);
  };
  require(epochs >= 0, "epochs", "must be >= 0");
  require(lr > 0.0, "lr", "must be > 0");
  require(grad_clip_norm >= 0.0, "grad.clip_norm", "must be >= 0");
  require(lr_schedule == "constant" || lr_schedule == "cosine", "lr.schedule", "must be constant or cosine");
  require(threads >= 1, "threads", "must be >= 1");
  require(text_min_freq >= 1, "text.min_freq", "must be >= 1");
  require(concepts_count >= 1, "concepts.count", "must be >= 1");
  require(concepts_modality >= 0, "concepts.modality", "must be >= 0");
  require(concepts_hidden >= 1, "concepts.hidden", "must be >= 1");
  require(concepts_epochs >= 0, "concepts.epochs", "must be >= 0");
  require(concepts_lr > 0.0, "concepts.lr", "must be > 0");
  require(focal_gamma >= 0.0, "focal.gamma", "must be >= 0");
  require(focal_alpha >= 0.0 && focal_alpha <= 1.0, "focal.alpha", "must be in [0, 1]");
  require(resize_length >= 1, "resize.length", "must be >= 1");
  require(pyramid_levels >= 0 && pyramid_levels <= 12, "pyramid.levels", "must be in [0, 12]");
  require(fusion_mode == "early" || fusion_mode == "late", "fusion.mode", "must be early or late");
  require(fusion_proj_dim >= 1, "fusion.proj_dim", "must be >= 1");
  require(model_dim >= 1, "model.dim", "must be >= 1");
  require(attention_heads >= 1 && model_dim % std::max<std::int64_t>(attention_heads, 1) == 0, "attention.heads",
          "must divide model.dim");
  require(attention_points >= 1, "attention.points", "must be >= 1");
  require(encoder_layers >= 0, "encoder.layers", "must be >= 0");
  require(decoder_layers >= 0, "decoder.layers", "must be >= 0");
  require(queries_count >= 1, "queries.count", "must be >= 1");
  require(caption_max_len >= 1, "caption.max_len", "must be >= 1");
  require(caption_embed_dim >= 1, "caption.embed_dim", "must be >= 1");
  require(caption_hidden_dim >= 1, "caption.hidden_dim", "must be >= 1");
  require(labels_size >= 1, "labels.size", "must be >= 1");
  require(counter_max_events >= 1, "counter.max_events", "must be >= 1");
  require(loss_caption >= 0, "loss.caption", "must be >= 0");
  require(loss_loc >= 0, "loss.loc", "must be >= 0");
  require(loss_cls >= 0, "loss.cls", "must be >= 0");
  require(loss_counter >= 0, "loss.counter", "must be >= 0");
  require(loss_caption + loss_loc + loss_cls + loss_counter > 0, "loss.*", "weights must not all be zero");
  require(match_loc >= 0, "match.loc", "must be >= 0");
  require(match_cls >= 0, "match.cls", "must be >= 0");
  if (!bad.empty()) {
    std::string msg = "invalid config values:";
    for (const auto& b : bad) msg += " [" + b + "]";
    throw ConfigError(msg);
  }
}

std::string RunConfig::to_json_text() const {
  json j = json::object();
  for (const auto& f : fields()) j[f.key] = get_value(*this, f);
  return j.dump(2) + "\n";
}

void RunConfig::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write config snapshot " + path.string());
  out << to_json_text();
}

std::string RunConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : to_json_text()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunConfig::describe_keys() {
  const RunConfig defaults;
  std::ostringstream os;
  for (const auto& f : fields()) {
    os << "  " << f.key << " (" << type_name(f.member) << ", default " << get_value(defaults, f).dump()
       << "): " << f.help << "\n";
  }
  return os.str();
}

std::vector<std::string> RunConfig::keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.emplace_back(f.key);
  return out;
}

}  // namespace semdvc
