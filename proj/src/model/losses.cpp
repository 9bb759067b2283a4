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

#include "semdvc/model/losses.h"

namespace semdvc::model {

torch::Tensor giou_1d(const torch::Tensor& pred, const torch::Tensor& gt) {
  auto ps = pred.select(-1, 0), pe = pred.select(-1, 1);
  auto gs = gt.select(-1, 0), ge = gt.select(-1, 1);
  auto inter = (torch::min(pe, ge) - torch::max(ps, gs)).clamp_min(0);
  auto uni = (pe - ps) + (ge - gs) - inter;
  auto hull = torch::max(pe, ge) - torch::min(ps, gs);
  constexpr double kEps = 1e-12;
  auto iou = inter / uni.clamp_min(kEps);
  return iou - (hull - uni) / hull.clamp_min(kEps);
}

torch::Tensor focal_loss_elementwise(const torch::Tensor& probs, const torch::Tensor& targets, double gamma,
                                     double alpha) {
  constexpr double kEps = 1e-7;
  auto p = probs.clamp(kEps, 1.0 - kEps);
  auto pos = -alpha * targets * torch::pow(1.0 - p, gamma) * torch::log(p);
  auto neg = -(1.0 - alpha) * (1.0 - targets) * torch::pow(p, gamma) * torch::log(1.0 - p);
  return pos + neg;
}

torch::Tensor focal_loss(const torch::Tensor& probs, const torch::Tensor& targets, double gamma, double alpha) {
  return focal_loss_elementwise(probs, targets, gamma, alpha).mean();
}

}  // namespace semdvc::model
