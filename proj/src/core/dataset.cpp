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

#include "semdvc/dataset.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "semdvc/errors.h"

namespace semdvc {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
}

std::string event_ref(const std::string& id, std::size_t index) {
  return "video '" + id + "' event " + std::to_string(index);
}

// Parses the annotation part of one manifest entry.
GroundTruthVideo parse_annotations(const std::string& id, const json& entry) {
  GroundTruthVideo v;
  v.id = id;
  try {
    v.duration = entry.at("duration").get<double>();
    const auto& stamps = entry.at("timestamps");
    const auto& sentences = entry.at("sentences");
    const json labels = entry.contains("labels") ? entry.at("labels") : json::array();
    if (stamps.size() != sentences.size()) {
      throw ValidationError("video '" + id + "': timestamps and sentences differ in length");
    }
    if (!labels.empty() && labels.size() != stamps.size()) {
      throw ValidationError("video '" + id + "': labels and timestamps differ in length");
    }
    for (std::size_t i = 0; i < stamps.size(); ++i) {
      GroundTruthEvent e;
      if (stamps[i].size() != 2) throw ValidationError(event_ref(id, i) + ": timestamp must be [start, end]");
      e.timestamp = {stamps[i][0].get<double>(), stamps[i][1].get<double>()};
      e.caption = tokenize(sentences[i].get<std::string>());
      if (!labels.empty()) e.labels = labels[i].get<std::vector<int>>();
      v.events.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw FormatError("video '" + id + "': malformed manifest entry: " + e.what());
  }
  return v;
}

void validate_events(const std::string& id, double duration, const std::vector<GroundTruthEvent>& events,
                     std::size_t label_space_size) {
  if (!(duration > 0.0)) throw ValidationError("video '" + id + "': duration must be positive");
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (e.timestamp.start > e.timestamp.end) {
      throw ValidationError(event_ref(id, i) + ": start > end");
    }
    if (e.timestamp.start < 0.0 || e.timestamp.end > duration) {
      throw ValidationError(event_ref(id, i) + ": timestamp outside [0, duration]");
    }
    if (e.caption.empty()) throw ValidationError(event_ref(id, i) + ": empty caption");
    for (int label : e.labels) {
      if (label < 0 || (label_space_size > 0 && static_cast<std::size_t>(label) >= label_space_size)) {
        throw ValidationError(event_ref(id, i) + ": label " + std::to_string(label) + " out of range");
      }
    }
  }
}

void sort_events(std::vector<GroundTruthEvent>& events) {
  std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    return a.timestamp.start < b.timestamp.start;
  });
}

}  // namespace

PosLexicon load_pos_lexicon(const fs::path& path) {
  const json j = read_json(path);
  if (!j.is_object()) throw FormatError("POS lexicon must be a JSON object: " + path.string());
  PosLexicon lex;
  for (const auto& [word, tag] : j.items()) {
    const auto s = tag.get<std::string>();
    if (s == "noun") {
      lex[word] = PartOfSpeech::kNoun;
    } else if (s == "verb") {
      lex[word] = PartOfSpeech::kVerb;
    } else if (s == "other") {
      lex[word] = PartOfSpeech::kOther;
    } else {
      throw FormatError("POS lexicon: unknown tag '" + s + "' for word '" + word + "'");
    }
  }
  return lex;
}

void save_pos_lexicon(const fs::path& path, const PosLexicon& lexicon) {
  json j = json::object();
  for (const auto& [word, pos] : lexicon) {
    j[word] = pos == PartOfSpeech::kNoun ? "noun" : pos == PartOfSpeech::kVerb ? "verb" : "other";
  }
  write_text(path, j.dump(2) + "\n");
}

void validate_record(const VideoRecord& record, std::size_t label_space_size) {
  if (record.features.empty()) throw ValidationError("video '" + record.id + "': no modalities");
  if (record.modality_names.size() != record.features.size()) {
    throw ValidationError("video '" + record.id + "': modality names do not match feature count");
  }
  const std::size_t frames = record.features.front().rows;
  for (const auto& m : record.features) {
    if (m.rows != frames) throw ValidationError("video '" + record.id + "': modality frame counts differ");
    if (m.cols == 0) throw ValidationError("video '" + record.id + "': zero feature dimension");
  }
  if (frames == 0) throw ValidationError("video '" + record.id + "': no frames");
  validate_events(record.id, record.duration, record.events, label_space_size);
}

std::vector<VideoRecord> load_dataset(const fs::path& manifest_path, std::size_t label_space_size) {
  const json manifest = read_json(manifest_path);
  if (!manifest.is_object()) throw FormatError("manifest must be a JSON object: " + manifest_path.string());
  const fs::path base = manifest_path.parent_path();

  std::vector<VideoRecord> records;
  for (const auto& [id, entry] : manifest.items()) {
    GroundTruthVideo ann = parse_annotations(id, entry);
    VideoRecord r;
    r.id = id;
    r.duration = ann.duration;
    r.events = std::move(ann.events);
    if (!entry.contains("features") || !entry["features"].is_object()) {
      throw FormatError("video '" + id + "': missing features object");
    }
    for (const auto& [name, rel] : entry["features"].items()) {
      const fs::path p = base / rel.get<std::string>();
      if (!fs::exists(p)) throw IoError("video '" + id + "': missing feature file " + p.string());
      r.modality_names.push_back(name);
      r.features.push_back(read_matrix(p));
    }
    validate_record(r, label_space_size);
    sort_events(r.events);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<GroundTruthVideo> load_ground_truth(const fs::path& manifest_path) {
  const json manifest = read_json(manifest_path);
  if (!manifest.is_object()) throw FormatError("manifest must be a JSON object: " + manifest_path.string());
  std::vector<GroundTruthVideo> out;
  for (const auto& [id, entry] : manifest.items()) {
    GroundTruthVideo v = parse_annotations(id, entry);
    validate_events(v.id, v.duration, v.events, 0);
    sort_events(v.events);
    out.push_back(std::move(v));
  }
  return out;
}

void save_dataset(const fs::path& dir, const std::vector<VideoRecord>& records) {
  fs::create_directories(dir / "features");
  json manifest = json::object();
  for (const auto& r : records) {
    json entry;
    entry["duration"] = r.duration;
    json stamps = json::array();
    json sentences = json::array();
    json labels = json::array();
    for (const auto& e : r.events) {
      stamps.push_back({e.timestamp.start, e.timestamp.end});
      sentences.push_back(detokenize(e.caption));
      labels.push_back(e.labels);
    }
    entry["timestamps"] = std::move(stamps);
    entry["sentences"] = std::move(sentences);
    entry["labels"] = std::move(labels);
    json feats = json::object();
    for (std::size_t m = 0; m < r.features.size(); ++m) {
      const std::string rel = "features/" + r.id + "." + r.modality_names[m] + ".dvct";
      write_matrix(dir / rel, r.features[m]);
      feats[r.modality_names[m]] = rel;
    }
    entry["features"] = std::move(feats);
    manifest[r.id] = std::move(entry);
  }
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace semdvc
