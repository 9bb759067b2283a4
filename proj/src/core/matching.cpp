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

#include "semdvc/matching.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "semdvc/errors.h"

namespace semdvc {

// Shortest augmenting path with row/column potentials (Kuhn-Munkres,
// O(G^2 N)). Ground truths play the role of rows so that every one of them is
// assigned; queries are the (possibly larger) column set.
MatchResult hungarian_match(const CostMatrix& cost) {
  const std::size_t n_gt = cost.cols;
  const std::size_t n_q = cost.rows;
  if (n_gt > n_q) {
    throw ValidationError("cannot match " + std::to_string(n_gt) + " ground truths to " + std::to_string(n_q) +
                          " queries");
  }
  for (double v : cost.values) {
    if (!std::isfinite(v)) throw ValidationError("matching cost must be finite");
  }

  MatchResult result;
  if (n_gt == 0) {
    for (std::size_t q = 0; q < n_q; ++q) result.unmatched_queries.push_back(q);
    return result;
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  auto c = [&](std::size_t gt, std::size_t q) { return cost(q - 1, gt - 1); };  // 1-based

  std::vector<double> u(n_gt + 1, 0.0), v(n_q + 1, 0.0);
  std::vector<std::size_t> owner(n_q + 1, 0), way(n_q + 1, 0);  // owner[q] = gt assigned to q

  for (std::size_t gt = 1; gt <= n_gt; ++gt) {
    owner[0] = gt;
    std::size_t q0 = 0;
    std::vector<double> minv(n_q + 1, kInf);
    std::vector<char> used(n_q + 1, 0);
    do {
      used[q0] = 1;
      const std::size_t g0 = owner[q0];
      double delta = kInf;
      std::size_t q1 = 0;
      for (std::size_t q = 1; q <= n_q; ++q) {
        if (used[q]) continue;
        const double cur = c(g0, q) - u[g0] - v[q];
        if (cur < minv[q]) {
          minv[q] = cur;
          way[q] = q0;
        }
        if (minv[q] < delta) {
          delta = minv[q];
          q1 = q;
        }
      }
      for (std::size_t q = 0; q <= n_q; ++q) {
        if (used[q]) {
          u[owner[q]] += delta;
          v[q] -= delta;
        } else {
          minv[q] -= delta;
        }
      }
      q0 = q1;
    } while (owner[q0] != 0);
    do {
      const std::size_t q1 = way[q0];
      owner[q0] = owner[q1];
      q0 = q1;
    } while (q0 != 0);
  }

  std::vector<std::size_t> query_of_gt(n_gt, 0);
  for (std::size_t q = 1; q <= n_q; ++q) {
    if (owner[q] != 0) {
      query_of_gt[owner[q] - 1] = q - 1;
    } else {
      result.unmatched_queries.push_back(q - 1);
    }
  }
  for (std::size_t g = 0; g < n_gt; ++g) {
    result.pairs.emplace_back(query_of_gt[g], g);
    result.total_cost += cost(query_of_gt[g], g);
  }
  return result;
}

}  // namespace semdvc
