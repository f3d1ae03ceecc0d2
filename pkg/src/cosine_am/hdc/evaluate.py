"""Accuracy tables over dimensions and metrics."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from ..device import VariationSpec
from ..pipeline import SearchChain
from .datasets import Dataset
from .encoding import Encoder, encode
from .model import AM_FAILURE, infer_encoded, inject_winner_errors, train_single_pass
from .similarity import cosine_matrix

METRICS = ("cosine", "hamming")
_BACKEND = {"cosine": "oracle_cosine", "hamming": "oracle_hamming"}


@dataclass
class AccuracyRow:
    dim: int
    metric: str
    seed: int
    accuracy: float
    failures: int = 0


@dataclass
class AccuracyTable:
    dataset: dict
    rows: list = field(default_factory=list)

    def mean(self, dim: int, metric: str) -> float:
        vals = [r.accuracy for r in self.rows if r.dim == dim and r.metric == metric]
        if not vals:
            raise KeyError((dim, metric))
        return float(np.mean(vals))

    def summary(self) -> list:
        keys = sorted({(r.dim, r.metric) for r in self.rows})
        return [{"dim": d, "metric": m, "accuracy": self.mean(d, m)} for d, m in keys]

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "summary": self.summary(),
            "runs": [vars(r) for r in self.rows],
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["dim", "metric", "accuracy"])
            for s in self.summary():
                w.writerow([s["dim"], s["metric"], f"{s['accuracy']:.6f}"])

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")


def _predict(metric, hvs, model, chain, spec, seed, error_rate, error_mode):
    if metric in _BACKEND:
        return infer_encoded(hvs, model, _BACKEND[metric])
    if metric == "am":
        return infer_encoded(hvs, model, "simulated_am", chain=chain, spec=spec, seed=seed)
    if metric == "cosine_injected":
        pred = infer_encoded(hvs, model, "oracle_cosine")
        cos_sq = cosine_matrix(hvs, model.classes, squared=True)
        rng = np.random.default_rng([seed, 1])
        return inject_winner_errors(pred, cos_sq, error_rate, rng, error_mode)
    raise ValueError(f"unknown metric {metric!r}")


def evaluate(data: Dataset, dims=(256, 512, 1024), metrics=METRICS, seeds=(0,),
             quantization: int = 0, chain: SearchChain | None = None,
             spec: VariationSpec | None = None, error_rate: float = 0.1,
             error_mode: str = "contested") -> AccuracyTable:
    """Train and test once per (seed, dim); score each metric on the same model.

    Metrics: ``cosine`` and ``hamming`` (software oracles), ``am`` (the
    simulated search chain) and ``cosine_injected`` (cosine winners passed
    through :func:`inject_winner_errors`). The seed sets the projection;
    AM failures count as wrong answers.
    """
    table = AccuracyTable(data.summary())
    for seed in seeds:
        for dim in dims:
            enc = Encoder(seed, data.n_features, dim, quantization)
            model = train_single_pass(data.x_train, data.y_train, enc, data.n_classes)
            hvs = encode(data.x_test, model.encoder)
            for metric in metrics:
                pred = _predict(metric, hvs, model, chain, spec, seed, error_rate, error_mode)
                acc = float(np.mean(pred == data.y_test))
                table.rows.append(AccuracyRow(dim, metric, seed, acc, int(np.sum(pred == AM_FAILURE))))
    return table
