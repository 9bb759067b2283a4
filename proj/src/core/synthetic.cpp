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

#include "semdvc/synthetic.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include <json.hpp>

#include "semdvc/errors.h"

namespace semdvc {
namespace {

const std::vector<std::string> kVerbs = {"apply", "blend", "dab"};
const std::vector<std::string> kProducts = {"blush",      "concealer",   "eyeliner", "eyeshadow",
                                            "foundation", "highlighter", "lipstick", "mascara"};
const std::vector<std::string> kRegions = {"cheeks",   "chin",    "eyebrows", "eyelids",
                                           "forehead", "jawline", "lips",     "nose"};
const std::vector<std::string> kTools = {"brush", "finger", "pencil", "puff", "sponge"};

double round_to(double v, double step) { return std::round(v / step) * step; }

struct Prototypes {
  std::vector<std::vector<float>> verbs, products, regions, tools;
  std::vector<float> background;
};

std::vector<float> gaussian_vector(std::mt19937_64& rng, std::size_t dim, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  std::vector<float> v(dim);
  for (auto& x : v) x = static_cast<float>(n(rng));
  return v;
}

Prototypes make_prototypes(std::mt19937_64& rng, std::size_t dim) {
  // Four components sum to unit per-entry variance on event frames.
  auto pool = [&](std::size_t n) {
    std::vector<std::vector<float>> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(gaussian_vector(rng, dim, 0.5));
    return out;
  };
  Prototypes p;
  p.verbs = pool(kVerbs.size());
  p.products = pool(kProducts.size());
  p.regions = pool(kRegions.size());
  p.tools = pool(kTools.size());
  p.background = gaussian_vector(rng, dim, 1.0);
  return p;
}

}  // namespace

SyntheticDataset generate_synthetic_dataset(const SyntheticOptions& opt) {
  if (opt.max_events < 1 || opt.max_events > 10) {
    throw ValidationError("synthetic max events must be in [1, 10]");
  }
  if (opt.num_videos < 1 || opt.feature_dim < 1 || opt.modalities < 1 || !(opt.fps > 0.0)) {
    throw ValidationError("synthetic dataset needs videos, feature dim, modalities and fps > 0");
  }

  std::mt19937_64 rng(opt.seed);
  std::vector<Prototypes> protos;
  for (std::size_t m = 0; m < opt.modalities; ++m) protos.push_back(make_prototypes(rng, opt.feature_dim));

  SyntheticDataset ds;
  ds.label_names = kRegions;
  for (const auto& w : kVerbs) ds.lexicon[w] = PartOfSpeech::kVerb;
  for (const auto* pool : {&kProducts, &kRegions, &kTools}) {
    for (const auto& w : *pool) ds.lexicon[w] = PartOfSpeech::kNoun;
  }
  ds.lexicon["on"] = PartOfSpeech::kOther;
  ds.lexicon["with"] = PartOfSpeech::kOther;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, opt.noise_sigma);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)); };

  for (std::size_t v = 0; v < opt.num_videos; ++v) {
    VideoRecord r;
    char id[32];
    std::snprintf(id, sizeof(id), "video_%04zu", v);
    r.id = id;
    r.duration = round_to(60.0 + 240.0 * unit(rng), 0.1);
    const auto frames = static_cast<std::size_t>(std::max(1.0, std::round(r.duration * opt.fps)));

    const std::size_t k = 1 + pick(opt.max_events);
    struct Choice {
      std::size_t verb, product, region, tool;
    };
    std::vector<Choice> choices;
    const double slot = r.duration / static_cast<double>(k);
    for (std::size_t e = 0; e < k; ++e) {
      // Keep 5% of each slot free on both sides so rounded events never touch.
      const double usable = 0.9 * slot;
      const double len = usable * (0.45 + 0.55 * unit(rng));
      const double start = e * slot + 0.05 * slot + (usable - len) * unit(rng);
      GroundTruthEvent ev;
      ev.timestamp = {round_to(start, 0.01), std::min(r.duration, round_to(start + len, 0.01))};
      Choice c{pick(kVerbs.size()), pick(kProducts.size()), pick(kRegions.size()), pick(kTools.size())};
      ev.caption = {kVerbs[c.verb], kProducts[c.product], "on", kRegions[c.region], "with", kTools[c.tool]};
      ev.labels = {static_cast<int>(c.region)};
      r.events.push_back(std::move(ev));
      choices.push_back(c);
    }

    for (std::size_t m = 0; m < opt.modalities; ++m) {
      const Prototypes& p = protos[m];
      Matrix feat(frames, opt.feature_dim);
      for (std::size_t t = 0; t < frames; ++t) {
        const double mid = (static_cast<double>(t) + 0.5) / opt.fps;
        const Choice* active = nullptr;
        for (std::size_t e = 0; e < k; ++e) {
          const auto& ts = r.events[e].timestamp;
          if (mid >= ts.start && mid <= ts.end) active = &choices[e];
        }
        for (std::size_t d = 0; d < opt.feature_dim; ++d) {
          const double base = active ? p.verbs[active->verb][d] + p.products[active->product][d] +
                                           p.regions[active->region][d] + p.tools[active->tool][d]
                                     : p.background[d];
          feat(t, d) = static_cast<float>(base + noise(rng));
        }
      }
      char name[32];
      std::snprintf(name, sizeof(name), "modality_%02zu", m);
      r.modality_names.push_back(name);
      r.features.push_back(std::move(feat));
    }
    ds.records.push_back(std::move(r));
  }
  return ds;
}

void save_synthetic_dataset(const std::filesystem::path& dir, const SyntheticDataset& dataset) {
  save_dataset(dir, dataset.records);
  save_pos_lexicon(dir / "pos_lexicon.json", dataset.lexicon);
  std::ofstream out(dir / "label_space.json", std::ios::trunc);
  if (!out) throw IoError("cannot write label space in " + dir.string());
  out << nlohmann::json(dataset.label_names).dump(2) << "\n";
}

std::vector<std::string> load_label_space(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in).get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("label space must be a JSON list of strings: " + path.string());
  }
}

}  // namespace semdvc
