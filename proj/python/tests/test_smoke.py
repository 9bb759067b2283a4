# Copyright 2026 The semdvc Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math

import pytest

semdvc = pytest.importorskip("semdvc")

TINY = {
    "epochs": 2,
    "concepts.count": 10,
    "concepts.hidden": 16,
    "concepts.epochs": 2,
    "resize.length": 32,
    "pyramid.levels": 2,
    "model.dim": 32,
    "fusion.proj_dim": 16,
    "attention.heads": 2,
    "attention.points": 2,
    "queries.count": 5,
    "caption.embed_dim": 16,
    "caption.hidden_dim": 32,
    "labels.size": 8,
}


def test_metrics():
    assert semdvc.tiou(0, 10, 5, 15) == pytest.approx(1 / 3, abs=1e-12)
    assert semdvc.giou(0.0, 0.2, 0.8, 1.0) == pytest.approx(-0.6, abs=1e-12)
    assert semdvc.bleu4("a b c d", "a b c d e") == pytest.approx(math.exp(1 - 5 / 4), abs=1e-12)
    refs = ["apply lipstick on lips", "blend blush on cheeks"]
    assert semdvc.cider(refs, refs) == pytest.approx(10.0)
    assert semdvc.tokenize("Apply Lipstick, now") == ["apply", "lipstick", ",", "now"]


def test_config_errors():
    cfg = semdvc.load_config(overrides={"model.dim": 64, "classification.enabled": False})
    assert cfg["model.dim"] == 64
    assert cfg["classification.enabled"] is False
    with pytest.raises(ValueError):
        semdvc.load_config(overrides={"no.such.key": 1})
    with pytest.raises(semdvc.UserError):
        semdvc.evaluate("/nonexistent/p.json", "/nonexistent/m.json")


def test_pipeline(tmp_path):
    data = tmp_path / "data"
    assert semdvc.make_synthetic(data, seed=1, videos=3, feature_dim=8) == 3
    cfg = dict(TINY)
    cfg.update({
        "data.manifest": str(data / "manifest.json"),
        "data.lexicon": str(data / "pos_lexicon.json"),
        "data.labels": str(data / "label_space.json"),
        "out.dir": str(tmp_path / "run"),
    })
    det = semdvc.train_concepts(overrides=cfg)
    assert 0.0 <= det["train_micro_f1"] <= 1.0
    assert len(det["loss_curve"]) == 2

    run = semdvc.train(overrides=cfg)
    assert len(run["loss_curve"]) == 2
    assert all(math.isfinite(e["total"]) for e in run["loss_curve"])

    pred = semdvc.predict(run["checkpoint"], data / "manifest.json", tmp_path / "pred.json")
    assert set(pred) == set(json.loads((data / "manifest.json").read_text()))

    report = semdvc.evaluate(tmp_path / "pred.json", data / "manifest.json", tmp_path / "report.json")
    assert len(report["per_threshold"]) == 4
    assert (tmp_path / "report.json").exists()
