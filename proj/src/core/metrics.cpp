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

#include "semdvc/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "semdvc/errors.h"

namespace semdvc {
namespace {

using NgramCounts = std::map<Tokens, int>;

NgramCounts ngrams(const Tokens& tokens, std::size_t n) {
  NgramCounts out;
  if (tokens.size() < n) return out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++out[Tokens(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                 tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return out;
}

std::map<std::string, const GroundTruthVideo*> index_ground_truth(const std::vector<GroundTruthVideo>& gt) {
  std::map<std::string, const GroundTruthVideo*> out;
  for (const auto& v : gt) out[v.id] = &v;
  return out;
}

}  // namespace

double tiou(const TimeStamp& a, const TimeStamp& b) {
  const double inter = std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
  const double union_len = a.length() + b.length() - inter;
  if (union_len <= 0.0) return 0.0;
  return inter / union_len;
}

double giou_1d(const TimeStamp& pred, const TimeStamp& gt) {
  const double inter = std::max(0.0, std::min(pred.end, gt.end) - std::max(pred.start, gt.start));
  const double union_len = pred.length() + gt.length() - inter;
  const double hull = std::max(pred.end, gt.end) - std::min(pred.start, gt.start);
  if (hull <= 0.0) return pred == gt ? 1.0 : 0.0;
  const double iou = union_len > 0.0 ? inter / union_len : 0.0;
  return iou - (hull - union_len) / hull;
}

double focal_loss(std::span<const double> probs, std::span<const double> targets, double gamma, double alpha) {
  if (probs.size() != targets.size()) throw ValidationError("focal loss: size mismatch");
  if (probs.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], kFocalEpsilon, 1.0 - kFocalEpsilon);
    const double y = targets[i];
    sum += -alpha * y * std::pow(1.0 - p, gamma) * std::log(p) -
           (1.0 - alpha) * (1.0 - y) * std::pow(p, gamma) * std::log(1.0 - p);
  }
  return sum / static_cast<double>(probs.size());
}

double bleu4(const Tokens& candidate, const Tokens& reference) {
  if (candidate.empty()) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const NgramCounts c = ngrams(candidate, n);
    const NgramCounts r = ngrams(reference, n);
    int total = 0;
    int clipped = 0;
    for (const auto& [g, cnt] : c) {
      total += cnt;
      auto it = r.find(g);
      if (it != r.end()) clipped += std::min(cnt, it->second);
    }
    if (total == 0 || clipped == 0) return 0.0;
    log_sum += std::log(static_cast<double>(clipped) / total);
  }
  const double c_len = static_cast<double>(candidate.size());
  const double r_len = static_cast<double>(reference.size());
  const double bp = c_len > r_len ? 1.0 : std::exp(1.0 - r_len / c_len);
  return bp * std::exp(log_sum / 4.0);
}

double meteor_exact(const Tokens& candidate, const Tokens& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  std::vector<char> used(reference.size(), 0);
  std::vector<long> aligned(candidate.size(), -1);  // reference position per candidate token
  std::size_t matches = 0;
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    for (std::size_t j = 0; j < reference.size(); ++j) {
      if (!used[j] && reference[j] == candidate[i]) {
        used[j] = 1;
        aligned[i] = static_cast<long>(j);
        ++matches;
        break;
      }
    }
  }
  if (matches == 0) return 0.0;

  std::size_t chunks = 0;
  long prev = -2;
  bool in_chunk = false;
  for (long a : aligned) {
    if (a < 0) {
      in_chunk = false;
      continue;
    }
    if (!in_chunk || a != prev + 1) ++chunks;
    in_chunk = true;
    prev = a;
  }

  const double p = static_cast<double>(matches) / static_cast<double>(candidate.size());
  const double r = static_cast<double>(matches) / static_cast<double>(reference.size());
  const double fmean = 10.0 * p * r / (r + 9.0 * p);
  const double frag = static_cast<double>(chunks) / static_cast<double>(matches);
  const double penalty = 0.5 * frag * frag * frag;
  return fmean * (1.0 - penalty);
}

std::vector<double> cider_scores(const std::vector<Tokens>& candidates, const std::vector<Tokens>& references) {
  if (candidates.size() != references.size()) throw ValidationError("cider: corpus size mismatch");
  const std::size_t docs = references.size();
  std::vector<double> scores(docs, 0.0);
  if (docs == 0) return scores;
  const double log_docs = std::log(static_cast<double>(docs));

  for (std::size_t n = 1; n <= 4; ++n) {
    std::vector<NgramCounts> ref_counts(docs), cand_counts(docs);
    std::map<Tokens, int> df;
    for (std::size_t i = 0; i < docs; ++i) {
      ref_counts[i] = ngrams(references[i], n);
      cand_counts[i] = ngrams(candidates[i], n);
      for (const auto& [g, _] : ref_counts[i]) ++df[g];
    }
    auto weight = [&](const Tokens& g) {
      auto it = df.find(g);
      const double d = it == df.end() ? 1.0 : static_cast<double>(std::max(1, it->second));
      return log_docs - std::log(d);
    };
    auto vectorize = [&](const NgramCounts& counts) {
      std::map<Tokens, double> vec;
      double total = 0.0;
      for (const auto& [_, c] : counts) total += c;
      for (const auto& [g, c] : counts) vec[g] = (c / total) * weight(g);
      return vec;
    };
    for (std::size_t i = 0; i < docs; ++i) {
      if (cand_counts[i].empty() || ref_counts[i].empty()) continue;
      const auto vc = vectorize(cand_counts[i]);
      const auto vr = vectorize(ref_counts[i]);
      double dot = 0.0, nc = 0.0, nr = 0.0;
      for (const auto& [g, w] : vc) {
        nc += w * w;
        auto it = vr.find(g);
        if (it != vr.end()) dot += w * it->second;
      }
      for (const auto& [_, w] : vr) nr += w * w;
      if (nc > 0.0 && nr > 0.0) scores[i] += dot / (std::sqrt(nc) * std::sqrt(nr));
    }
  }
  for (double& s : scores) s = s / 4.0 * 10.0;
  return scores;
}

double cider(const std::vector<Tokens>& candidates, const std::vector<Tokens>& references) {
  const auto s = cider_scores(candidates, references);
  if (s.empty()) return 0.0;
  double sum = 0.0;
  for (double v : s) sum += v;
  return sum / static_cast<double>(s.size());
}

PrecisionRecall localization_pr(const std::vector<DVCResult>& results, const std::vector<GroundTruthVideo>& ground_truth,
                                const std::vector<double>& thresholds) {
  std::map<std::string, const DVCResult*> by_id;
  for (const auto& r : results) by_id[r.video_id] = &r;

  PrecisionRecall total;
  std::size_t videos = 0;
  for (const auto& gt : ground_truth) {
    if (gt.events.empty() || thresholds.empty()) continue;
    ++videos;
    auto it = by_id.find(gt.id);
    if (it == by_id.end() || it->second->events.empty()) continue;
    const auto& preds = it->second->events;
    double p_sum = 0.0, r_sum = 0.0;
    for (double t : thresholds) {
      std::size_t hit_gt = 0;
      for (const auto& g : gt.events) {
        for (const auto& p : preds) {
          if (tiou(p.timestamp, g.timestamp) >= t) {
            ++hit_gt;
            break;
          }
        }
      }
      std::size_t hit_pred = 0;
      for (const auto& p : preds) {
        for (const auto& g : gt.events) {
          if (tiou(p.timestamp, g.timestamp) >= t) {
            ++hit_pred;
            break;
          }
        }
      }
      r_sum += static_cast<double>(hit_gt) / static_cast<double>(gt.events.size());
      p_sum += static_cast<double>(hit_pred) / static_cast<double>(preds.size());
    }
    total.precision += p_sum / static_cast<double>(thresholds.size());
    total.recall += r_sum / static_cast<double>(thresholds.size());
  }
  if (videos > 0) {
    total.precision /= static_cast<double>(videos);
    total.recall /= static_cast<double>(videos);
  }
  return total;
}

EvalReport evaluate_dvc(const std::vector<DVCResult>& results, const std::vector<GroundTruthVideo>& ground_truth,
                        const std::vector<double>& thresholds) {
  EvalReport report;
  const auto gt_index = index_ground_truth(ground_truth);

  std::size_t total_preds = 0;
  for (const auto& r : results) {
    if (gt_index.contains(r.video_id)) total_preds += r.events.size();
  }

  for (double t : thresholds) {
    ThresholdScores ts;
    ts.threshold = t;
    const PrecisionRecall pr = localization_pr(results, ground_truth, {t});
    ts.precision = pr.precision;
    ts.recall = pr.recall;

    std::vector<Tokens> cands, refs;
    double bleu_sum = 0.0, meteor_sum = 0.0;
    for (const auto& r : results) {
      auto it = gt_index.find(r.video_id);
      if (it == gt_index.end()) continue;
      const auto& gts = it->second->events;
      for (const auto& p : r.events) {
        double best = -1.0;
        const GroundTruthEvent* best_gt = nullptr;
        for (const auto& g : gts) {
          const double v = tiou(p.timestamp, g.timestamp);
          if (v > best) {
            best = v;
            best_gt = &g;
          }
        }
        if (best_gt == nullptr || best < t) continue;
        cands.push_back(p.caption);
        refs.push_back(best_gt->caption);
        bleu_sum += bleu4(p.caption, best_gt->caption);
        meteor_sum += meteor_exact(p.caption, best_gt->caption);
      }
    }
    ts.matched_pairs = cands.size();
    if (total_preds > 0) {
      double cider_sum = 0.0;
      for (double s : cider_scores(cands, refs)) cider_sum += s;
      const double denom = static_cast<double>(total_preds);
      ts.bleu4 = bleu_sum / denom;
      ts.meteor_exact = meteor_sum / denom;
      ts.cider = cider_sum / denom;
    }
    report.per_threshold.push_back(ts);
  }

  if (!thresholds.empty()) {
    const double k = static_cast<double>(thresholds.size());
    for (const auto& ts : report.per_threshold) {
      report.precision += ts.precision / k;
      report.recall += ts.recall / k;
      report.bleu4 += ts.bleu4 / k;
      report.meteor_exact += ts.meteor_exact / k;
      report.cider += ts.cider / k;
    }
  }
  return report;
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["precision"] = precision;
  j["recall"] = recall;
  j["bleu4"] = bleu4;
  j["meteor_exact"] = meteor_exact;
  j["cider"] = cider;
  nlohmann::json per = nlohmann::json::array();
  for (const auto& ts : per_threshold) {
    per.push_back({{"tiou", ts.threshold},
                   {"precision", ts.precision},
                   {"recall", ts.recall},
                   {"bleu4", ts.bleu4},
                   {"meteor_exact", ts.meteor_exact},
                   {"cider", ts.cider},
                   {"matched_pairs", ts.matched_pairs}});
  }
  j["per_threshold"] = std::move(per);
  return j.dump(2) + "\n";
}

std::string EvalReport::to_table() const {
  // Percent scale for P/R/B4/M, CIDEr x100 as in the usual DVC tables.
  char line[256];
  std::ostringstream os;
  std::snprintf(line, sizeof(line), "%-8s %8s %8s %8s %9s %8s\n", "tIoU", "P", "R", "B4", "M-exact", "C");
  os << line;
  for (const auto& ts : per_threshold) {
    std::snprintf(line, sizeof(line), "%-8.2f %8.2f %8.2f %8.2f %9.2f %8.2f\n", ts.threshold, 100 * ts.precision,
                  100 * ts.recall, 100 * ts.bleu4, 100 * ts.meteor_exact, 100 * ts.cider);
    os << line;
  }
  std::snprintf(line, sizeof(line), "%-8s %8.2f %8.2f %8.2f %9.2f %8.2f\n", "avg", 100 * precision, 100 * recall,
                100 * bleu4, 100 * meteor_exact, 100 * cider);
  os << line;
  return os.str();
}

}  // namespace semdvc
