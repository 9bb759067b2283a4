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

#include "semdvc/model/training.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "semdvc/errors.h"
#include "semdvc/model/losses.h"

namespace semdvc::model {

CostMatrix matching_cost(const torch::Tensor& intervals, const torch::Tensor& label_probs,
                         const VideoTargets& targets, const MatchWeights& weights, const FocalParams& focal) {
  torch::NoGradGuard no_grad;
  const auto n = intervals.size(0);
  const auto g = targets.count();
  CostMatrix cost(static_cast<std::size_t>(n), static_cast<std::size_t>(g));
  if (g == 0) return cost;

  auto pred = intervals.to(torch::kDouble).unsqueeze(1).expand({n, g, 2});
  auto gt = targets.intervals.to(torch::kDouble).unsqueeze(0).expand({n, g, 2});
  auto c = weights.loc * (1.0 - giou_1d(pred, gt));
  if (label_probs.defined() && weights.cls > 0.0) {
    auto y = label_probs.to(torch::kDouble).unsqueeze(1).expand({n, g, label_probs.size(1)});
    auto t = targets.labels.to(torch::kDouble).unsqueeze(0).expand({n, g, label_probs.size(1)});
    c = c + weights.cls * focal_loss_elementwise(y, t, focal.gamma, focal.alpha).mean(-1);
  }
  c = c.contiguous();
  std::copy(c.data_ptr<double>(), c.data_ptr<double>() + c.numel(), cost.values.begin());
  return cost;
}

LossBreakdown LossTerms::values() const {
  return {caption.item<double>(), loc.item<double>(), cls.item<double>(), counter.item<double>(),
          total.item<double>()};
}

LossTerms compute_losses(DVCModel& model, const HeadOutputs& out, const MatchResult& match,
                         const VideoTargets& targets, const LossWeights& weights, const FocalParams& focal) {
  const auto opts = torch::TensorOptions().dtype(out.intervals.scalar_type());
  const auto g = targets.count();
  if (g > 0 && match.pairs.empty()) throw ValidationError("loss computation needs matched pairs");

  LossTerms terms;
  terms.caption = torch::zeros({}, opts);
  terms.loc = torch::zeros({}, opts);
  terms.cls = torch::zeros({}, opts);

  std::vector<std::int64_t> q_idx, g_idx;
  for (const auto& [q, gt] : match.pairs) {
    q_idx.push_back(static_cast<std::int64_t>(q));
    g_idx.push_back(static_cast<std::int64_t>(gt));
  }
  auto qi = torch::tensor(q_idx, torch::kLong);
  auto gi = torch::tensor(g_idx, torch::kLong);

  if (!match.pairs.empty()) {
    auto pred = out.intervals.index_select(0, qi);
    auto gt = targets.intervals.to(opts).index_select(0, gi);
    terms.loc = (1.0 - giou_1d(pred, gt)).mean();

    std::size_t steps = 0;
    for (auto j : g_idx) steps = std::max(steps, targets.captions[static_cast<std::size_t>(j)].size());
    auto tokens = torch::full({static_cast<std::int64_t>(g_idx.size()), static_cast<std::int64_t>(steps)},
                              TextVocabulary::kPad, torch::kLong);
    for (std::size_t r = 0; r < g_idx.size(); ++r) {
      const auto& cap = targets.captions[static_cast<std::size_t>(g_idx[r])];
      for (std::size_t s = 0; s < cap.size(); ++s) {
        tokens[static_cast<std::int64_t>(r)][static_cast<std::int64_t>(s)] = cap[s];
      }
    }
    auto logp = model->caption_head()->teacher_forcing(out.events.index_select(0, qi), tokens);
    terms.caption = torch::nll_loss(logp.reshape({-1, logp.size(-1)}), tokens.reshape({-1}), {},
                                    at::Reduction::Mean, TextVocabulary::kPad);
  }

  if (out.label_probs.defined()) {
    auto label_targets = torch::zeros_like(out.label_probs);
    if (!match.pairs.empty()) {
      label_targets.index_copy_(0, qi, targets.labels.to(opts).index_select(0, gi));
    }
    terms.cls = focal_loss(out.label_probs, label_targets, focal.gamma, focal.alpha);
  }

  const auto counter_target = std::min<std::int64_t>(g, model->max_events());
  auto logsm = torch::log_softmax(out.counter_logits, -1);
  terms.counter = -logsm[counter_target];

  terms.total = weights.caption * terms.caption + weights.loc * terms.loc + weights.cls * terms.cls +
                weights.counter * terms.counter;
  return terms;
}

namespace {

void check_finite(const LossTerms& t, const std::string& video) {
  const std::pair<const char*, const torch::Tensor*> parts[] = {
      {"caption", &t.caption}, {"localization", &t.loc}, {"classification", &t.cls}, {"counter", &t.counter}};
  for (const auto& [name, tensor] : parts) {
    if (!std::isfinite(tensor->item<double>())) {
      throw NumericalError(std::string("non-finite ") + name + " loss on video '" + video + "'");
    }
  }
}

}  // namespace

TrainHistory train_model(DVCModel& model, const std::vector<VideoTensors>& videos,
                         const std::vector<VideoTargets>& targets, const TrainOptions& opt,
                         const EpochCallback& on_epoch) {
  if (videos.size() != targets.size()) throw ValidationError("videos and targets differ in count");
  model->train();
  torch::optim::Adam optim(model->parameters(), torch::optim::AdamOptions(opt.learning_rate));
  std::mt19937_64 rng(opt.seed);
  std::vector<std::size_t> order(videos.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainHistory history;
  for (std::int64_t epoch = 0; epoch < opt.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    if (opt.cosine_schedule) {
      const double lr = opt.learning_rate * 0.5 *
                        (1.0 + std::cos(std::numbers::pi * static_cast<double>(epoch) / static_cast<double>(opt.epochs)));
      for (auto& group : optim.param_groups()) static_cast<torch::optim::AdamOptions&>(group.options()).lr(lr);
    }
    LossBreakdown sum;
    for (std::size_t i : order) {
      HeadOutputs out = model->forward(videos[i]);
      const MatchResult match =
          hungarian_match(matching_cost(out.intervals, out.label_probs, targets[i], opt.match, opt.focal));
      LossTerms terms = compute_losses(model, out, match, targets[i], opt.loss, opt.focal);
      check_finite(terms, videos[i].id);
      optim.zero_grad();
      terms.total.backward();
      if (opt.clip_norm > 0.0) torch::nn::utils::clip_grad_norm_(model->parameters(), opt.clip_norm);
      optim.step();
      const LossBreakdown v = terms.values();
      sum.caption += v.caption;
      sum.loc += v.loc;
      sum.cls += v.cls;
      sum.counter += v.counter;
      sum.total += v.total;
    }
    const double k = videos.empty() ? 1.0 : static_cast<double>(videos.size());
    LossBreakdown mean{sum.caption / k, sum.loc / k, sum.cls / k, sum.counter / k, sum.total / k};
    history.epochs.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  model->eval();
  return history;
}

DVCResult predict_video(DVCModel& model, const VideoTensors& video, const TextVocabulary& vocab,
                        std::int64_t max_caption_len) {
  torch::NoGradGuard no_grad;
  model->eval();
  HeadOutputs out = model->forward(video);
  auto captions = model->caption_head()->greedy(out.events, max_caption_len);

  auto intervals = out.intervals.to(torch::kDouble).contiguous();
  auto iv = intervals.accessor<double, 2>();
  torch::Tensor probs;
  if (out.label_probs.defined()) probs = out.label_probs.to(torch::kFloat).contiguous();

  std::vector<QueryDecode> queries(captions.size());
  for (std::size_t i = 0; i < captions.size(); ++i) {
    auto& q = queries[i];
    q.start_norm = iv[static_cast<std::int64_t>(i)][0];
    q.end_norm = iv[static_cast<std::int64_t>(i)][1];
    q.caption = vocab.decode(captions[i].tokens);
    q.token_logprobs = captions[i].logprobs;
    if (probs.defined()) {
      auto row = probs[static_cast<std::int64_t>(i)];
      q.label_probs.assign(row.data_ptr<float>(), row.data_ptr<float>() + row.numel());
    }
  }

  CounterOutput counter;
  auto cp = torch::softmax(out.counter_logits, -1).to(torch::kDouble).contiguous();
  counter.probs.assign(cp.data_ptr<double>(), cp.data_ptr<double>() + cp.numel());
  counter.count = counter_argmax(counter.probs);
  return rank_and_select(video.id, queries, counter, video.duration, video.span);
}

}  // namespace semdvc::model
