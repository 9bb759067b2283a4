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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "semdvc/config.h"
#include "semdvc/errors.h"
#include "semdvc/metrics.h"
#include "semdvc/model/pipeline.h"
#include "semdvc/synthetic.h"
#include "semdvc/text.h"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace semdvc;

namespace {

std::string as_config_value(const py::handle& v) {
  if (py::isinstance<py::bool_>(v)) return v.cast<bool>() ? "true" : "false";
  if (py::isinstance<py::str>(v)) return v.cast<std::string>();
  return py::str(v).cast<std::string>();
}

RunConfig build_config(const std::string& path, const py::dict& overrides) {
  RunConfig cfg = path.empty() ? RunConfig{} : RunConfig::from_file(path);
  for (auto [k, v] : overrides) cfg.set(py::str(k).cast<std::string>(), as_config_value(v));
  cfg.validate();
  return cfg;
}

py::dict loss_dict(const model::LossBreakdown& l) {
  py::dict d;
  d["caption"] = l.caption;
  d["loc"] = l.loc;
  d["cls"] = l.cls;
  d["counter"] = l.counter;
  d["total"] = l.total;
  return d;
}

py::object report_dict(const EvalReport& r) { return py::module_::import("json").attr("loads")(r.to_json()); }

}  // namespace

PYBIND11_MODULE(_semdvc, m) {
  m.doc() = "Semantic-assisted dense video captioning: training, prediction and evaluation.";

  static py::exception<UserError> user_error(m, "UserError", PyExc_ValueError);
  static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const UserError& e) {
      user_error(e.what());
    } catch (const NumericalError& e) {
      numerical_error(e.what());
    }
  });

  m.def(
      "make_synthetic",
      [](const fs::path& out, std::uint64_t seed, std::size_t videos, std::size_t max_events, std::size_t feature_dim,
         std::size_t modalities) {
        SyntheticOptions o;
        o.seed = seed;
        o.num_videos = videos;
        o.max_events = max_events;
        o.feature_dim = feature_dim;
        o.modalities = modalities;
        const auto ds = generate_synthetic_dataset(o);
        save_synthetic_dataset(out, ds);
        return ds.records.size();
      },
      py::arg("out"), py::arg("seed") = 0, py::arg("videos") = 20, py::arg("max_events") = 5,
      py::arg("feature_dim") = 32, py::arg("modalities") = 2, "Write a synthetic dataset; returns the video count.");

  m.def(
      "load_config",
      [](const std::string& path, const py::dict& overrides) {
        return py::module_::import("json").attr("loads")(build_config(path, overrides).to_json_text());
      },
      py::arg("path") = "", py::arg("overrides") = py::dict(), "Resolved configuration as a dict.");

  m.def(
      "train_concepts",
      [](const std::string& config, const py::dict& overrides) {
        const RunConfig cfg = build_config(config, overrides);
        model::ConceptRun run;
        {
          py::gil_scoped_release release;
          run = model::run_train_concepts(cfg);
        }
        py::dict d;
        d["checkpoint"] = run.checkpoint;
        d["loss_curve"] = run.loss_curve;
        d["train_micro_f1"] = run.train_micro_f1;
        return d;
      },
      py::arg("config") = "", py::arg("overrides") = py::dict(), "Train the frame concept detector.");

  m.def(
      "train",
      [](const std::string& config, const py::dict& overrides) {
        const RunConfig cfg = build_config(config, overrides);
        model::TrainRun run;
        {
          py::gil_scoped_release release;
          run = model::run_train(cfg);
        }
        py::list curve;
        for (const auto& e : run.history.epochs) curve.append(loss_dict(e));
        py::dict d;
        d["checkpoint"] = run.checkpoint;
        d["loss_curve"] = curve;
        return d;
      },
      py::arg("config") = "", py::arg("overrides") = py::dict(), "Train the captioning model.");

  m.def(
      "predict",
      [](const fs::path& checkpoint, const fs::path& manifest, const fs::path& output) {
        {
          py::gil_scoped_release release;
          model::run_predict(checkpoint, manifest, output);
        }
        return py::module_::import("json").attr("loads")(
            py::module_::import("pathlib").attr("Path")(output).attr("read_text")());
      },
      py::arg("checkpoint"), py::arg("manifest"), py::arg("output"),
      "Predict a manifest; writes and returns the prediction JSON.");

  m.def(
      "evaluate",
      [](const fs::path& predictions, const fs::path& ground_truth, const fs::path& report) {
        return report_dict(model::run_evaluate(predictions, ground_truth, report));
      },
      py::arg("predictions"), py::arg("ground_truth"), py::arg("report") = fs::path(),
      "Score predictions against a ground-truth manifest.");

  m.def("tokenize", [](const std::string& s) { return tokenize(s); }, py::arg("text"));
  m.def(
      "tiou", [](double s0, double e0, double s1, double e1) { return tiou({s0, e0}, {s1, e1}); }, py::arg("a_start"),
      py::arg("a_end"), py::arg("b_start"), py::arg("b_end"));
  m.def(
      "giou", [](double s0, double e0, double s1, double e1) { return giou_1d({s0, e0}, {s1, e1}); },
      py::arg("pred_start"), py::arg("pred_end"), py::arg("gt_start"), py::arg("gt_end"));
  m.def(
      "bleu4", [](const std::string& c, const std::string& r) { return bleu4(tokenize(c), tokenize(r)); },
      py::arg("candidate"), py::arg("reference"));
  m.def(
      "cider",
      [](const std::vector<std::string>& cands, const std::vector<std::string>& refs) {
        std::vector<Tokens> c, r;
        for (const auto& s : cands) c.push_back(tokenize(s));
        for (const auto& s : refs) r.push_back(tokenize(s));
        return cider(c, r);
      },
      py::arg("candidates"), py::arg("references"));
}
