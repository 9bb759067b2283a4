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

#include "semdvc/model/concept_detector.h"

#include "semdvc/errors.h"
#include "semdvc/model/checkpoint.h"
#include "semdvc/model/losses.h"

namespace semdvc::model {

ConceptDetectorImpl::ConceptDetectorImpl(std::int64_t input_dim, std::int64_t num_concepts, std::int64_t hidden)
    : input_dim_(input_dim), num_concepts_(num_concepts), hidden_(hidden) {
  fc1_ = register_module("fc1", torch::nn::Linear(input_dim, hidden));
  fc2_ = register_module("fc2", torch::nn::Linear(hidden, num_concepts));
}

torch::Tensor ConceptDetectorImpl::forward(const torch::Tensor& frames) {
  if (frames.dim() != 2 || frames.size(1) != input_dim_) {
    throw ValidationError("concept detector expects (T, " + std::to_string(input_dim_) + ") frames");
  }
  return fc2_(torch::relu(fc1_(frames)));
}

DetectorTrainResult train_concept_detector(ConceptDetector& detector, const torch::Tensor& frames,
                                           const torch::Tensor& targets, const torch::Tensor& mask,
                                           const DetectorTrainOptions& opt) {
  auto idx = torch::nonzero(mask.to(torch::kBool)).flatten();
  if (idx.numel() == 0) throw ValidationError("concept detector training needs at least one event frame");
  auto x = frames.index_select(0, idx);
  auto y = targets.index_select(0, idx).to(x.dtype());

  detector->train();
  torch::optim::Adam optim(detector->parameters(), torch::optim::AdamOptions(opt.learning_rate));
  auto gen = at::make_generator<at::CPUGeneratorImpl>(opt.seed);
  const std::int64_t n = x.size(0);
  const std::int64_t bs = std::max<std::int64_t>(1, opt.batch_size);

  DetectorTrainResult result;
  for (std::int64_t epoch = 0; epoch < opt.epochs; ++epoch) {
    auto perm = torch::randperm(n, gen, torch::kLong);
    double sum = 0.0;
    for (std::int64_t start = 0; start < n; start += bs) {
      auto b = perm.slice(0, start, std::min(n, start + bs));
      auto probs = torch::sigmoid(detector->forward(x.index_select(0, b)));
      auto loss = focal_loss(probs, y.index_select(0, b), opt.gamma, opt.alpha);
      optim.zero_grad();
      loss.backward();
      optim.step();
      sum += loss.item<double>() * static_cast<double>(b.size(0));
    }
    result.loss_curve.push_back(sum / static_cast<double>(n));
  }
  detector->eval();
  return result;
}

torch::Tensor detect_concepts(ConceptDetector& detector, const torch::Tensor& frames) {
  torch::NoGradGuard no_grad;
  return torch::sigmoid(detector->forward(frames));
}

double micro_f1(const torch::Tensor& probs, const torch::Tensor& targets, double threshold) {
  auto pred = probs >= threshold;
  auto truth = targets > 0.5;
  const double tp = (pred & truth).sum().item<double>();
  const double fp = (pred & ~truth).sum().item<double>();
  const double fn = (~pred & truth).sum().item<double>();
  if (tp + fp + fn == 0.0) return 1.0;
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

DetectorDataset build_detector_dataset(const std::vector<VideoRecord>& records, const ConceptVocabulary& vocab,
                                       std::size_t modality) {
  std::vector<torch::Tensor> xs, ys, ms;
  for (const auto& r : records) {
    if (modality >= r.features.size()) {
      throw ValidationError("video '" + r.id + "' has no modality " + std::to_string(modality));
    }
    const Matrix& f = r.features[modality];
    const ConceptTargets t = assign_concept_targets(r, vocab, r.fps());
    xs.push_back(torch::from_blob(const_cast<float*>(f.data.data()),
                                  {static_cast<std::int64_t>(f.rows), static_cast<std::int64_t>(f.cols)},
                                  torch::kFloat)
                     .clone());
    ys.push_back(torch::from_blob(const_cast<float*>(t.targets.data.data()),
                                  {static_cast<std::int64_t>(t.targets.rows),
                                   static_cast<std::int64_t>(t.targets.cols)},
                                  torch::kFloat)
                     .clone());
    ms.push_back(torch::from_blob(const_cast<std::uint8_t*>(t.mask.data()),
                                  {static_cast<std::int64_t>(t.mask.size())}, torch::kUInt8)
                     .clone()
                     .to(torch::kBool));
  }
  return {torch::cat(xs), torch::cat(ys), torch::cat(ms)};
}

void save_detector(const std::filesystem::path& dir, ConceptDetector& detector, const ConceptVocabulary& vocab) {
  nlohmann::json extra;
  extra["kind"] = "concept_detector";
  extra["input_dim"] = detector->input_dim();
  extra["num_concepts"] = detector->num_concepts();
  extra["hidden"] = detector->hidden();
  save_module(dir, *detector, extra);
  vocab.save(dir / "concept_vocab.json");
}

LoadedDetector load_detector(const std::filesystem::path& dir) {
  const auto manifest = read_manifest(dir);
  if (manifest.value("kind", "") != "concept_detector") {
    throw FormatError("not a concept detector checkpoint: " + dir.string());
  }
  LoadedDetector out;
  out.vocab = ConceptVocabulary::load(dir / "concept_vocab.json");
  out.detector = ConceptDetector(manifest.at("input_dim").get<std::int64_t>(),
                                 manifest.at("num_concepts").get<std::int64_t>(),
                                 manifest.at("hidden").get<std::int64_t>());
  load_module(dir, *out.detector);
  out.detector->eval();
  return out;
}

}  // namespace semdvc::model
