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

// Reference computations used only by the tests. Each one is written directly
// from the definition, independent of the library code.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace oracle {

// Minimum over all injective maps gt -> query of the summed cost.
// cost is rows = queries, cols = ground truths, row-major.
inline double brute_force_assignment(const std::vector<double>& cost, std::size_t rows, std::size_t cols) {
  std::vector<std::size_t> perm(rows);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t g = 0; g < cols; ++g) s += cost[perm[g] * cols + g];
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline double interval_iou(double a0, double a1, double b0, double b1) {
  const double inter = std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
  const double uni = (a1 - a0) + (b1 - b0) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

inline double interval_giou(double a0, double a1, double b0, double b1) {
  const double inter = std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
  const double uni = (a1 - a0) + (b1 - b0) - inter;
  const double hull = std::max(a1, b1) - std::min(a0, b0);
  if (hull <= 0.0) return (a0 == b0 && a1 == b1) ? 1.0 : 0.0;
  return inter / uni - (hull - uni) / hull;
}

inline double focal_term(double p, double y, double gamma, double alpha) {
  p = std::clamp(p, 1e-7, 1.0 - 1e-7);
  return -alpha * y * std::pow(1.0 - p, gamma) * std::log(p) -
         (1.0 - alpha) * (1.0 - y) * std::pow(p, gamma) * std::log(1.0 - p);
}

inline double bce(double p, double y) {
  p = std::clamp(p, 1e-7, 1.0 - 1e-7);
  return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

// Single-reference BLEU-4 from clipped n-gram counts, no smoothing.
inline double bleu4(const std::vector<std::string>& c, const std::vector<std::string>& r) {
  if (c.empty()) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    std::map<std::vector<std::string>, int> rc, cc;
    for (std::size_t i = 0; i + n <= r.size(); ++i) ++rc[{r.begin() + i, r.begin() + i + n}];
    for (std::size_t i = 0; i + n <= c.size(); ++i) ++cc[{c.begin() + i, c.begin() + i + n}];
    int hit = 0, tot = 0;
    for (auto& [g, k] : cc) {
      tot += k;
      hit += std::min(k, rc.count(g) ? rc[g] : 0);
    }
    if (tot == 0 || hit == 0) return 0.0;
    log_sum += std::log(static_cast<double>(hit) / tot) / 4.0;
  }
  const double bp = c.size() >= r.size() ? 1.0 : std::exp(1.0 - static_cast<double>(r.size()) / c.size());
  return bp * std::exp(log_sum);
}

// Central finite differences of a scalar function of a flat parameter vector.
inline std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// max |a - b| / max(|a|, |b|, floor)
inline double max_relative_error(const std::vector<double>& a, const std::vector<double>& b, double floor = 1e-6) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("semdvc_test_" + name + "_" + std::to_string(std::random_device{}()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace oracle
