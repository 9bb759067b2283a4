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

#include "semdvc/ranking.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>

#include <json.hpp>

#include "semdvc/errors.h"

namespace semdvc {
using nlohmann::json;

std::size_t counter_argmax(const std::vector<double>& probs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return best;
}

double classification_confidence(const QueryDecode& q) {
  if (q.label_probs.empty()) return 0.0;
  return *std::max_element(q.label_probs.begin(), q.label_probs.end());
}

double captioning_confidence(const QueryDecode& q) {
  if (q.token_logprobs.empty()) return 0.0;
  const double sum = std::accumulate(q.token_logprobs.begin(), q.token_logprobs.end(), 0.0);
  return std::exp(sum / static_cast<double>(q.token_logprobs.size()));
}

DVCResult rank_and_select(const std::string& video_id, const std::vector<QueryDecode>& queries,
                          const CounterOutput& counter, double duration, double span) {
  if (span <= 0.0) span = duration;
  std::vector<double> conf(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    conf[i] = classification_confidence(queries[i]) + captioning_confidence(queries[i]);
  }
  std::vector<std::size_t> order(queries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return conf[a] > conf[b]; });

  std::size_t k = counter.count;
  if (k > queries.size()) {
    std::cerr << "warning: counter predicted " << k << " events but only " << queries.size()
              << " queries exist; clamping\n";
    k = queries.size();
  }

  DVCResult out;
  out.video_id = video_id;
  out.count = k;
  for (std::size_t r = 0; r < k; ++r) {
    const QueryDecode& q = queries[order[r]];
    EventPrediction e;
    e.query_index = order[r];
    const double s = std::clamp(std::clamp(q.start_norm, 0.0, 1.0) * span, 0.0, duration);
    const double t = std::clamp(std::clamp(q.end_norm, 0.0, 1.0) * span, 0.0, duration);
    e.timestamp = {std::min(s, t), std::max(s, t)};
    e.caption = q.caption;
    e.label_probs = q.label_probs;
    for (std::size_t l = 0; l < q.label_probs.size(); ++l) {
      if (q.label_probs[l] >= 0.5f) e.labels.push_back(static_cast<int>(l));
    }
    e.confidence = conf[order[r]];
    out.events.push_back(std::move(e));
  }
  return out;
}

std::string predictions_to_json(const std::vector<DVCResult>& results) {
  json j = json::object();
  for (const auto& r : results) {
    json list = json::array();
    for (const auto& e : r.events) {
      list.push_back({{"sentence", detokenize(e.caption)},
                      {"timestamp", {e.timestamp.start, e.timestamp.end}},
                      {"labels", e.labels},
                      {"score", e.confidence}});
    }
    j[r.video_id] = std::move(list);
  }
  return j.dump(2) + "\n";
}

void write_predictions(const std::filesystem::path& path, const std::vector<DVCResult>& results) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << predictions_to_json(results);
}

std::vector<DVCResult> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<DVCResult> out;
  try {
    const json j = json::parse(in);
    for (const auto& [id, list] : j.items()) {
      DVCResult r;
      r.video_id = id;
      for (const auto& item : list) {
        EventPrediction e;
        const auto& ts = item.at("timestamp");
        e.timestamp = {ts.at(0).get<double>(), ts.at(1).get<double>()};
        if (e.timestamp.start > e.timestamp.end) std::swap(e.timestamp.start, e.timestamp.end);
        e.caption = tokenize(item.at("sentence").get<std::string>());
        if (item.contains("labels")) e.labels = item["labels"].get<std::vector<int>>();
        e.confidence = item.value("score", 0.0);
        r.events.push_back(std::move(e));
      }
      r.count = r.events.size();
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw FormatError("malformed prediction file " + path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace semdvc
