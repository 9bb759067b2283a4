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

#include "semdvc/model/checkpoint.h"

#include <fstream>

#include "semdvc/errors.h"

namespace semdvc::model {
namespace fs = std::filesystem;
using nlohmann::json;

TensorData to_tensor_data(const torch::Tensor& t) {
  auto c = t.detach().to(torch::kCPU, torch::kFloat).contiguous();
  TensorData out;
  for (auto s : c.sizes()) out.dims.push_back(static_cast<std::uint32_t>(s));
  out.values.assign(c.data_ptr<float>(), c.data_ptr<float>() + c.numel());
  return out;
}

torch::Tensor from_tensor_data(const TensorData& data) {
  std::vector<std::int64_t> sizes(data.dims.begin(), data.dims.end());
  auto t = torch::empty(sizes, torch::kFloat);
  std::copy(data.values.begin(), data.values.end(), t.data_ptr<float>());
  return t;
}

void save_module(const fs::path& dir, const torch::nn::Module& module, const json& extra) {
  fs::create_directories(dir / "params");
  json shapes = json::object();
  auto write = [&](const std::string& name, const torch::Tensor& t) {
    write_tensor(dir / "params" / (name + ".dvct"), to_tensor_data(t));
    shapes[name] = t.sizes().vec();
  };
  for (const auto& item : module.named_parameters()) write(item.key(), item.value());
  for (const auto& item : module.named_buffers()) write(item.key(), item.value());

  json manifest = extra;
  manifest["params"] = std::move(shapes);
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint manifest in " + dir.string());
  out << manifest.dump(2) << "\n";
}

json read_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("missing checkpoint manifest in " + dir.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("corrupt checkpoint manifest in " + dir.string());
  }
}

void load_module(const fs::path& dir, torch::nn::Module& module) {
  torch::NoGradGuard no_grad;
  auto assign = [&](const std::string& name, torch::Tensor& dst) {
    const auto path = dir / "params" / (name + ".dvct");
    if (!fs::exists(path)) throw IoError("checkpoint is missing tensor " + path.string());
    auto src = from_tensor_data(read_tensor(path));
    if (src.sizes() != dst.sizes()) {
      throw FormatError("checkpoint tensor " + name + " has an incompatible shape");
    }
    dst.copy_(src.to(dst.dtype()));
  };
  for (auto& item : module.named_parameters()) assign(item.key(), item.value());
  for (auto& item : module.named_buffers()) assign(item.key(), item.value());
}

}  // namespace semdvc::model
