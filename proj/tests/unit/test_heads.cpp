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

#include <torch/torch.h>

#include "semdvc/errors.h"
#include "semdvc/model/heads.h"
#include "semdvc/text.h"

using namespace semdvc;
using namespace semdvc::model;

TEST_SUITE("prediction_heads") {
  TEST_CASE("raw zeros give the centred half interval") {
    const auto iv = LocalizationHead::Impl::intervals_from_raw(torch::zeros({1, 2}));
    CHECK(iv[0][0].item<float>() == doctest::Approx(0.25f));
    CHECK(iv[0][1].item<float>() == doctest::Approx(0.75f));
  }

  TEST_CASE("start is clamped at zero") {
    // centre 0.05, width 0.5
    const double c = std::log(0.05 / 0.95), w = 0.0;
    const auto iv = LocalizationHead::Impl::intervals_from_raw(torch::tensor({{c, w}}));
    CHECK(iv[0][0].item<double>() == 0.0);
    CHECK(iv[0][1].item<double>() == doctest::Approx(0.30));
  }

  TEST_CASE("start never exceeds end over random parameter draws") {
    torch::manual_seed(0);
    LocalizationHead head(16);
    torch::NoGradGuard g;
    for (int draw = 0; draw < 1000; ++draw) {
      for (auto& p : head->parameters()) p.normal_(0.0, 3.0);
      const auto iv = head->forward(torch::randn({8, 16}) * 3.0);
      CHECK((iv.select(1, 0) <= iv.select(1, 1)).all().item<bool>());
      CHECK(iv.min().item<float>() >= 0.0f);
      CHECK(iv.max().item<float>() <= 1.0f);
    }
  }

  TEST_CASE("teacher forcing gives finite non positive log probabilities") {
    torch::manual_seed(1);
    CaptionHead head(8, 12, 6, 10);
    // 2 is the end token, 0 padding
    auto targets = torch::tensor({{5, 6, 2, 0}, {7, 8, 9, 2}}, torch::kLong);
    const auto logp = head->teacher_forcing(torch::randn({2, 8}), targets);
    CHECK(logp.sizes() == torch::IntArrayRef({2, 4, 12}));
    CHECK(torch::isfinite(logp).all().item<bool>());
    CHECK((logp <= 0).all().item<bool>());
    CHECK(torch::allclose(logp.exp().sum(-1), torch::ones({2, 4}), 1e-5, 1e-5));
  }

  TEST_CASE("unknown token index in teacher forcing is an error") {
    CaptionHead head(8, 12, 6, 10);
    CHECK_THROWS_AS(head->teacher_forcing(torch::randn({1, 8}), torch::tensor({{3, 12}})), ValidationError);
    CHECK_THROWS_AS(head->teacher_forcing(torch::randn({1, 8}), torch::tensor({{-1}})), ValidationError);
  }

  TEST_CASE("greedy decoding is deterministic and records the end step") {
    torch::manual_seed(2);
    CaptionHead head(8, 12, 6, 10);
    auto ev = torch::randn({3, 8});
    const auto a = head->greedy(ev, 20), b = head->greedy(ev, 20);
    REQUIRE(a.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(a[i].tokens == b[i].tokens);
      CHECK(a[i].logprobs == b[i].logprobs);
      CHECK(a[i].logprobs.size() >= a[i].tokens.size());
      CHECK(a[i].logprobs.size() <= a[i].tokens.size() + 1);
      CHECK(a[i].logprobs.size() <= 20);
    }
  }

  TEST_CASE("an overfit captioner reproduces its caption") {
    torch::manual_seed(3);
    CaptionHead head(8, 10, 8, 16);
    auto ev = torch::randn({1, 8});
    auto target = torch::tensor({{4, 7, 5, 9, 2}}, torch::kLong);
    torch::optim::Adam opt(head->parameters(), torch::optim::AdamOptions(1e-2));
    for (int step = 0; step < 200; ++step) {
      auto logp = head->teacher_forcing(ev, target);
      auto loss = torch::nll_loss(logp.view({-1, 10}), target.view({-1}));
      opt.zero_grad();
      loss.backward();
      opt.step();
    }
    const auto out = head->greedy(ev, 20);
    CHECK(out[0].tokens == std::vector<std::int64_t>{4, 7, 5, 9});
    CHECK(out[0].logprobs.size() == 5);
  }

  TEST_CASE("zero classification weights give one half everywhere") {
    ClassificationHead head(8, 25);
    {
      torch::NoGradGuard g;
      for (auto& p : head->parameters()) p.zero_();
    }
    const auto y = head->forward(torch::randn({35, 8}));
    CHECK(y.sizes() == torch::IntArrayRef({35, 25}));
    CHECK(torch::allclose(y, torch::full({35, 25}, 0.5)));
  }

  TEST_CASE("classification outputs are independent probabilities") {
    torch::manual_seed(4);
    ClassificationHead head(8, 25);
    torch::NoGradGuard g;
    for (auto& p : head->parameters()) p.normal_(0.0, 2.0);
    const auto y = head->forward(torch::randn({35, 8}) * 4.0);
    CHECK(y.min().item<float>() >= 0.0f);
    CHECK(y.max().item<float>() <= 1.0f);
    CHECK_FALSE(torch::allclose(y.sum(-1), torch::ones({35})));
  }

  TEST_CASE("counter length and permutation invariance") {
    torch::manual_seed(5);
    EventCounter counter(8, 10);
    auto ev = torch::randn({35, 8});
    torch::NoGradGuard g;
    const auto k = counter->forward(ev);
    CHECK(k.size(0) == 11);
    CHECK(k.sum().item<float>() == doctest::Approx(1.0f));
    CHECK(torch::allclose(counter->forward(ev.index_select(0, torch::randperm(35))), k));
    CHECK_THROWS_AS(counter->forward(torch::zeros({0, 8})), ValidationError);
  }
}
