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

#include <doctest.h>

#include <random>
#include <set>

#include "oracles.h"
#include "semdvc/errors.h"
#include "semdvc/matching.h"

using namespace semdvc;

namespace {

CostMatrix square(std::initializer_list<std::initializer_list<double>> rows) {
  CostMatrix c(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (double v : r) c(i, j++) = v;
    ++i;
  }
  return c;
}

double summed(const CostMatrix& c, const MatchResult& m) {
  double s = 0.0;
  for (auto [q, g] : m.pairs) s += c(q, g);
  return s;
}

}  // namespace

TEST_SUITE("training") {
  TEST_CASE("zero diagonal is matched on the diagonal") {
    const auto m = hungarian_match(square({{0, 1}, {1, 0}}));
    CHECK(m.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}});
    CHECK(m.total_cost == 0.0);
  }

  TEST_CASE("anti diagonal wins when cheaper") {
    const auto m = hungarian_match(square({{4, 1}, {2, 3}}));
    // pairs are (query, gt) sorted by gt
    CHECK(m.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{1, 0}, {0, 1}});
    CHECK(m.total_cost == doctest::Approx(3.0));
  }

  TEST_CASE("random rectangular matrices agree with brute force") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 1 + rng() % 6;
      const std::size_t g = 1 + rng() % n;
      CostMatrix c(n, g);
      for (auto& v : c.values) v = u(rng);
      const auto m = hungarian_match(c);
      CHECK(m.pairs.size() == g);
      CHECK(m.unmatched_queries.size() == n - g);
      std::set<std::size_t> used;
      for (auto [q, gt] : m.pairs) used.insert(q);
      CHECK(used.size() == g);
      CHECK(summed(c, m) == doctest::Approx(oracle::brute_force_assignment(c.values, n, g)).epsilon(1e-12));
    }
  }

  TEST_CASE("integer costs match brute force exactly") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      CostMatrix c(6, 6);
      for (auto& v : c.values) v = static_cast<double>(rng() % 20);
      CHECK(summed(c, hungarian_match(c)) == oracle::brute_force_assignment(c.values, 6, 6));
    }
  }

  TEST_CASE("more ground truths than queries is an error") {
    CHECK_THROWS_AS(hungarian_match(CostMatrix(2, 3)), ValidationError);
  }

  TEST_CASE("non finite cost is an error") {
    CostMatrix c(2, 2);
    c(0, 1) = std::nan("");
    CHECK_THROWS_AS(hungarian_match(c), ValidationError);
  }

  TEST_CASE("no ground truth leaves every query unmatched") {
    const auto m = hungarian_match(CostMatrix(3, 0));
    CHECK(m.pairs.empty());
    CHECK(m.unmatched_queries.size() == 3);
  }
}
