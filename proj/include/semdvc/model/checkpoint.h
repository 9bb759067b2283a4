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

#include <filesystem>
#include <string>

#include <json.hpp>
#include <torch/torch.h>

#include "semdvc/tensor_file.h"

namespace semdvc::model {

TensorData to_tensor_data(const torch::Tensor& t);
torch::Tensor from_tensor_data(const TensorData& data);

// Writes every parameter and buffer of `module` as a TensorFile under
// `<dir>/params/` plus `<dir>/manifest.json` holding shapes and `extra`.
void save_module(const std::filesystem::path& dir, const torch::nn::Module& module, const nlohmann::json& extra);

// Reads `<dir>/manifest.json`.
nlohmann::json read_manifest(const std::filesystem::path& dir);

// Loads parameters into an already-constructed module; shapes must match.
void load_module(const std::filesystem::path& dir, torch::nn::Module& module);

}  // namespace semdvc::model
