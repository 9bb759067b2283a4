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

#include "doctest_torch.h"

#include <random>

#include <torch/torch.h>

#include "oracles.h"
#include "semdvc/errors.h"
#include "semdvc/model/concept_detector.h"
#include "semdvc/model/losses.h"
#include "semdvc/model/training.h"

using namespace semdvc;
using namespace semdvc::model;

namespace {

RunConfig tiny_config() {
  RunConfig c;
  c.resize_length = 16;
  c.pyramid_levels = 2;
  c.fusion_proj_dim = 8;
  c.model_dim = 16;
  c.encoder_layers = 1;
  c.decoder_layers = 1;
  c.attention_heads = 2;
  c.attention_points = 2;
  c.queries_count = 3;
  c.caption_embed_dim = 8;
  c.caption_hidden_dim = 16;
  c.labels_size = 4;
  c.counter_max_events = 10;
  return c;
}

ModelDims tiny_dims() { return {{5}, 0, 9, 4}; }

VideoTensors tiny_video(const std::string& id) {
  VideoTensors v;
  v.id = id;
  v.duration = 16.0;
  v.span = 16.0;
  v.modalities = {torch::randn({16, 5})};
  v.mask = torch::ones({16}, torch::kBool);
  return v;
}

VideoTargets tiny_targets() {
  VideoTargets t;
  t.intervals = torch::tensor({{0.1f, 0.4f}, {0.5f, 0.9f}});
  t.labels = torch::tensor({{1.f, 0.f, 0.f, 0.f}, {0.f, 0.f, 1.f, 1.f}});
  t.captions = {{4, 5, TextVocabulary::kEnd}, {6, 7, 8, TextVocabulary::kEnd}};
  return t;
}

std::vector<double> flat(const torch::Tensor& t) {
  auto c = t.to(torch::kDouble).contiguous();
  return {c.data_ptr<double>(), c.data_ptr<double>() + c.numel()};
}

}  // namespace

TEST_SUITE("training") {
  TEST_CASE("tensor giou agrees with the interval oracle") {
    std::mt19937_64 rng(0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p, g;
    for (int i = 0; i < 200; ++i) {
      double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
      p.insert(p.end(), {std::min(a, b), std::max(a, b)});
      g.insert(g.end(), {std::min(c, d), std::max(c, d)});
    }
    auto pt = torch::tensor(p, torch::kDouble).view({-1, 2}), gt = torch::tensor(g, torch::kDouble).view({-1, 2});
    const auto got = flat(giou_1d(pt, gt));
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i] == doctest::Approx(oracle::interval_giou(p[2 * i], p[2 * i + 1], g[2 * i], g[2 * i + 1])).epsilon(1e-12));
      CHECK(got[i] == doctest::Approx(flat(giou_1d(gt, pt))[i]));
    }
    const auto fixed = giou_1d(torch::tensor({{0.0, 0.2}, {0.0, 10.0 / 30}}, torch::kDouble),
                               torch::tensor({{0.8, 1.0}, {5.0 / 30, 15.0 / 30}}, torch::kDouble));
    CHECK(fixed[0].item<double>() == doctest::Approx(-0.6).epsilon(1e-12));
    CHECK(fixed[1].item<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }

  TEST_CASE("gradient of one minus giou matches finite differences") {
    torch::manual_seed(1);
    auto gt = torch::tensor({{0.2, 0.5}, {0.1, 0.9}, {0.6, 0.7}}, torch::kDouble);
    auto p0 = torch::tensor({{0.25, 0.6}, {0.3, 0.5}, {0.1, 0.3}}, torch::kDouble);
    auto p = p0.clone().requires_grad_(true);
    (1.0 - giou_1d(p, gt)).sum().backward();
    const auto numeric = oracle::numeric_gradient(
        [&](const std::vector<double>& x) {
          return (1.0 - giou_1d(torch::tensor(x, torch::kDouble).view({3, 2}), gt)).sum().item<double>();
        },
        flat(p0), 1e-6);
    CHECK(oracle::max_relative_error(flat(p.grad()), numeric) < 1e-4);
  }

  TEST_CASE("tensor focal loss fixtures and gradient") {
    auto f = [](double p, double y, double g, double a) {
      return focal_loss(torch::tensor({p}, torch::kDouble), torch::tensor({y}, torch::kDouble), g, a).item<double>();
    };
    CHECK(f(0.9, 1, 2, 0.25) == doctest::Approx(2.634e-4).epsilon(1e-3));
    CHECK(f(0.5, 1, 2, 0.25) == doctest::Approx(0.04332).epsilon(1e-3));
    CHECK(std::abs(f(0.3, 1, 0, 0.5) - 0.5 * oracle::bce(0.3, 1)) < 1e-9);
    CHECK(std::abs(f(0.3, 0, 0, 0.5) - 0.5 * oracle::bce(0.3, 0)) < 1e-9);
    CHECK(std::isfinite(f(0.0, 1, 2, 0.25)));
    // perfect predictions drive the loss towards zero
    CHECK(f(1e-9, 0, 2, 0.25) < 0.01);
    CHECK(f(1.0, 1, 2, 0.25) < 0.01);

    auto y = torch::tensor({1.0, 0.0, 1.0, 0.0, 1.0}, torch::kDouble);
    auto p0 = torch::tensor({0.2, 0.7, 0.55, 0.1, 0.95}, torch::kDouble);
    auto p = p0.clone().requires_grad_(true);
    focal_loss(p, y, 2.0, 0.25).backward();
    const auto numeric = oracle::numeric_gradient(
        [&](const std::vector<double>& x) {
          return focal_loss(torch::tensor(x, torch::kDouble), y, 2.0, 0.25).item<double>();
        },
        flat(p0), 1e-6);
    CHECK(oracle::max_relative_error(flat(p.grad()), numeric) < 1e-4);
  }

  TEST_CASE("matching cost bounds and perfect match") {
    const auto t = tiny_targets();
    auto probs = torch::tensor({{1.f, 0.f, 0.f, 0.f}, {0.f, 0.f, 1.f, 1.f}, {0.5f, 0.5f, 0.5f, 0.5f}});
    auto iv = torch::cat({t.intervals, torch::tensor({{0.0f, 1.0f}})});
    const auto c = matching_cost(iv, probs, t, {}, {});
    CHECK(c.rows == 3);
    CHECK(c.cols == 2);
    CHECK(c(0, 0) < 1e-6);
    CHECK(c(1, 1) < 1e-6);
    for (double v : c.values) CHECK(v >= 0.0);
    const auto m = hungarian_match(c);
    CHECK(m.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}});
  }

  TEST_CASE("scaling both matching weights keeps the assignment") {
    torch::manual_seed(2);
    const auto t = tiny_targets();
    for (int trial = 0; trial < 20; ++trial) {
      auto a = torch::rand({3, 2}), probs = torch::rand({3, 4});
      auto iv = torch::stack({a.amin(1), a.amax(1)}, 1);
      const auto m1 = hungarian_match(matching_cost(iv, probs, t, {2.0, 1.0}, {}));
      const auto m2 = hungarian_match(matching_cost(iv, probs, t, {7.0, 3.5}, {}));
      CHECK(m1.pairs == m2.pairs);
    }
  }

  TEST_CASE("loss terms equal a hand computed weighted sum") {
    torch::manual_seed(3);
    DVCModel model(tiny_config(), tiny_dims());
    HeadOutputs out;
    out.events = torch::randn({3, 16});
    out.intervals = torch::tensor({{0.1f, 0.5f}, {0.0f, 1.0f}, {0.45f, 0.8f}});
    out.label_probs = torch::tensor({{0.9f, 0.1f, 0.2f, 0.3f}, {0.5f, 0.5f, 0.5f, 0.5f}, {0.1f, 0.2f, 0.7f, 0.6f}});
    out.counter_logits = torch::linspace(-1.0, 1.0, 11);
    const auto t = tiny_targets();
    MatchResult m;
    m.pairs = {{0, 0}, {2, 1}};
    m.unmatched_queries = {1};
    const LossWeights w{1.0, 2.0, 1.0, 0.5};
    const auto terms = compute_losses(model, out, m, t, w, {2.0, 0.25});

    // localization
    const double loc = ((1.0 - oracle::interval_giou(0.1, 0.5, 0.1, 0.4)) +
                        (1.0 - oracle::interval_giou(0.45, 0.8, 0.5, 0.9))) / 2.0;
    // classification over every query and label
    const double targets[3][4] = {{1, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 1, 1}};
    double cls = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) cls += oracle::focal_term(out.label_probs[i][j].item<double>(), targets[i][j], 2.0, 0.25);
    cls /= 12.0;
    // counter: 2 events
    const auto lg = flat(out.counter_logits);
    double z = 0.0;
    for (double v : lg) z += std::exp(v);
    const double counter = -(lg[2] - std::log(z));
    // caption: token-mean negative log likelihood of the teacher-forced targets
    torch::NoGradGuard g;
    auto tok = torch::tensor({{4, 5, 2, 0}, {6, 7, 8, 2}});
    auto logp = model->caption_head()->teacher_forcing(out.events.index_select(0, torch::tensor({0, 2})), tok);
    double nll = 0.0;
    int count = 0;
    for (int r = 0; r < 2; ++r)
      for (int s = 0; s < 4; ++s) {
        const auto id = tok[r][s].item<std::int64_t>();
        if (id == TextVocabulary::kPad) continue;
        nll -= logp[r][s][id].item<double>();
        ++count;
      }
    nll /= count;

    CHECK(terms.loc.item<double>() == doctest::Approx(loc).epsilon(1e-6));
    CHECK(terms.cls.item<double>() == doctest::Approx(cls).epsilon(1e-6));
    CHECK(terms.counter.item<double>() == doctest::Approx(counter).epsilon(1e-6));
    CHECK(terms.caption.item<double>() == doctest::Approx(nll).epsilon(1e-5));
    CHECK(terms.total.item<double>() ==
          doctest::Approx(nll + 2.0 * loc + cls + 0.5 * counter).epsilon(1e-5));
  }

  TEST_CASE("zero ground truth contributes only labels and counter") {
    torch::manual_seed(4);
    DVCModel model(tiny_config(), tiny_dims());
    auto v = tiny_video("empty");
    auto out = model->forward(v);
    VideoTargets none;
    none.intervals = torch::zeros({0, 2});
    none.labels = torch::zeros({0, 4});
    const auto m = hungarian_match(matching_cost(out.intervals, out.label_probs, none, {}, {}));
    const auto terms = compute_losses(model, out, m, none, {}, {});
    CHECK(terms.caption.item<double>() == 0.0);
    CHECK(terms.loc.item<double>() == 0.0);
    CHECK(terms.cls.item<double>() > 0.0);
    const auto lsm = torch::log_softmax(out.counter_logits, -1);
    CHECK(terms.counter.item<double>() == doctest::Approx(-lsm[0].item<double>()));
  }

  TEST_CASE("more events than the counter range train towards the last class") {
    torch::manual_seed(5);
    auto cfg = tiny_config();
    cfg.queries_count = 12;
    DVCModel model(cfg, tiny_dims());
    auto out = model->forward(tiny_video("many"));
    VideoTargets t;
    std::vector<float> iv;
    for (int i = 0; i < 12; ++i) iv.insert(iv.end(), {i / 12.f, (i + 0.5f) / 12.f});
    t.intervals = torch::tensor(iv).view({12, 2});
    t.labels = torch::zeros({12, 4});
    for (int i = 0; i < 12; ++i) t.captions.push_back({4, TextVocabulary::kEnd});
    const auto m = hungarian_match(matching_cost(out.intervals, out.label_probs, t, {}, {}));
    const auto terms = compute_losses(model, out, m, t, {}, {});
    const auto lsm = torch::log_softmax(out.counter_logits, -1);
    CHECK(terms.counter.item<double>() == doctest::Approx(-lsm[10].item<double>()));
  }

  TEST_CASE("ground truth without matched pairs is an error") {
    torch::manual_seed(6);
    DVCModel model(tiny_config(), tiny_dims());
    auto out = model->forward(tiny_video("x"));
    CHECK_THROWS_AS(compute_losses(model, out, MatchResult{}, tiny_targets(), {}, {}), ValidationError);
  }

  TEST_CASE("training is deterministic for a fixed seed and lowers the loss") {
    auto run = [] {
      torch::manual_seed(7);
      std::vector<VideoTensors> videos = {tiny_video("a"), tiny_video("b")};
      DVCModel model(tiny_config(), tiny_dims());
      TrainOptions o;
      o.epochs = 15;
      o.learning_rate = 1e-3;
      o.seed = 3;
      return train_model(model, videos, {tiny_targets(), tiny_targets()}, o);
    };
    const auto a = run(), b = run();
    REQUIRE(a.epochs.size() == 15);
    for (std::size_t e = 0; e < a.epochs.size(); ++e) CHECK(std::abs(a.epochs[e].total - b.epochs[e].total) < 1e-6);
    CHECK(a.epochs.back().total < a.epochs.front().total);
  }

  TEST_CASE("prediction returns the counter's number of ranked events") {
    torch::manual_seed(8);
    DVCModel model(tiny_config(), tiny_dims());
    const TextVocabulary vocab({"a", "b", "c", "d", "e"});
    auto v = tiny_video("p");
    v.duration = 12.0;
    const auto r = predict_video(model, v, vocab, 20);
    CHECK(r.video_id == "p");
    CHECK(r.events.size() == r.count);
    CHECK(r.count <= 3);
    for (std::size_t i = 1; i < r.events.size(); ++i) CHECK(r.events[i - 1].confidence >= r.events[i].confidence);
    for (const auto& e : r.events) {
      CHECK(e.timestamp.start >= 0.0);
      CHECK(e.timestamp.end <= 12.0);
      CHECK(e.timestamp.start <= e.timestamp.end);
    }
  }
}

TEST_SUITE("concept_bank") {
  TEST_CASE("detector output shape and range") {
    torch::manual_seed(0);
    ConceptDetector det(6, 4, 8);
    const auto p = detect_concepts(det, torch::randn({100, 6}) * 5.0);
    CHECK(p.sizes() == torch::IntArrayRef({100, 4}));
    CHECK(p.min().item<float>() >= 0.0f);
    CHECK(p.max().item<float>() <= 1.0f);
    CHECK_THROWS_AS(detect_concepts(det, torch::randn({3, 5})), ValidationError);
  }

  TEST_CASE("zero frames map to the sigmoid of the network bias") {
    torch::manual_seed(1);
    ConceptDetector det(6, 4, 8);
    const auto p = detect_concepts(det, torch::zeros({5, 6}));
    for (std::int64_t i = 1; i < 5; ++i) CHECK(torch::equal(p[i], p[0]));
    auto fc1 = std::dynamic_pointer_cast<torch::nn::LinearImpl>(det->named_children()["fc1"]);
    auto fc2 = std::dynamic_pointer_cast<torch::nn::LinearImpl>(det->named_children()["fc2"]);
    torch::NoGradGuard g;
    const auto expect = torch::sigmoid(fc2->forward(torch::relu(fc1->bias)));
    CHECK(torch::allclose(p[0], expect));
  }

  TEST_CASE("focal loss with alpha one ignores negatives") {
    auto p = torch::tensor({0.3, 0.8, 1e-9});
    CHECK(focal_loss(p, torch::zeros({3}), 2.0, 1.0).item<double>() == 0.0);
    CHECK(focal_loss(torch::full({3}, 1e-9), torch::zeros({3}), 2.0, 0.25).item<double>() < 1e-12);
  }

  TEST_CASE("training without event frames is an error") {
    ConceptDetector det(3, 2, 4);
    CHECK_THROWS_AS(train_concept_detector(det, torch::randn({4, 3}), torch::zeros({4, 2}), torch::zeros({4}, torch::kBool),
                                           {}),
                    ValidationError);
  }

  TEST_CASE("micro f1 counts decisions") {
    auto probs = torch::tensor({{0.9f, 0.1f}, {0.6f, 0.7f}});
    auto targets = torch::tensor({{1.f, 0.f}, {0.f, 1.f}});
    // tp 2, fp 1, fn 0
    CHECK(micro_f1(probs, targets) == doctest::Approx(2.0 * 2 / (2.0 * 2 + 1 + 0)));
  }

  TEST_CASE("detector learns separable concepts and round trips to disk") {
    torch::manual_seed(2);
    auto protos = torch::randn({3, 6});
    std::vector<torch::Tensor> frames, targets;
    for (int i = 0; i < 300; ++i) {
      const int a = i % 3, b = (i / 3) % 3;
      auto t = torch::zeros({3});
      t[a] = 1;
      t[b] = 1;
      frames.push_back(protos[a] + protos[b] + 0.05 * torch::randn({6}));
      targets.push_back(t);
    }
    auto x = torch::stack(frames), y = torch::stack(targets);
    ConceptDetector det(6, 3, 32);
    DetectorTrainOptions o;
    o.epochs = 50;
    o.batch_size = 32;
    const auto res = train_concept_detector(det, x, y, torch::ones({300}, torch::kBool), o);
    CHECK(res.loss_curve.size() == 50);
    CHECK(res.loss_curve.back() < res.loss_curve.front());
    CHECK(micro_f1(detect_concepts(det, x), y) >= 0.9);

    const auto dir = oracle::scratch_dir("det");
    save_detector(dir, det, ConceptVocabulary({"apply", "blush", "lipstick"}));
    auto loaded = load_detector(dir);
    CHECK(loaded.vocab.concepts() == std::vector<std::string>{"apply", "blush", "lipstick"});
    CHECK(torch::equal(detect_concepts(loaded.detector, x), detect_concepts(det, x)));
    std::filesystem::remove_all(dir);
  }
}
