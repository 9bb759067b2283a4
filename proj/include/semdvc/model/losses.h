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

#include <torch/torch.h>

namespace semdvc::model {

// Generalized IoU of ordered 1-D intervals, row-wise. pred, gt: (n, 2) as
// [start, end]. Returns (n).
torch::Tensor giou_1d(const torch::Tensor& pred, const torch::Tensor& gt);

// Element-mean focal loss on probabilities; probabilities are clamped to
// [1e-7, 1 - 1e-7].
torch::Tensor focal_loss(const torch::Tensor& probs, const torch::Tensor& targets, double gamma, double alpha);

// Per-element focal loss (no reduction).
torch::Tensor focal_loss_elementwise(const torch::Tensor& probs, const torch::Tensor& targets, double gamma,
                                     double alpha);

}  // namespace semdvc::model
