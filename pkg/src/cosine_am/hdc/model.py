"""Single-pass HDC training and inference backends."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..array import bits_to_str, as_bits
from ..device import VariationSpec
from ..pipeline import SearchChain
from .encoding import Encoder, encode
from .similarity import cosine_matrix, hamming_matrix

MODEL_FORMAT = "cosine_am.hdc_model"
MODEL_VERSION = 1
BACKENDS = ("oracle_cosine", "oracle_hamming", "simulated_am")
AM_FAILURE = -1


@dataclass(eq=False)
class HdcModel:
    classes: np.ndarray  # (K, D) uint8
    encoder: Encoder
    train_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.classes = np.atleast_2d(self.classes).astype(np.uint8)
        if self.classes.shape[0] < 2:
            raise ValueError("a model needs at least two classes")
        if self.classes.shape[1] != self.encoder.dim:
            raise ValueError("class vector length differs from encoder dim")

    @property
    def n_classes(self) -> int:
        return self.classes.shape[0]

    def to_json(self) -> str:
        return json.dumps({
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "encoder": self.encoder.to_dict(),
            "classes": [bits_to_str(c) for c in self.classes],
            "train_meta": self.train_meta,
        }, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "HdcModel":
        d = json.loads(text)
        if d.get("format") != MODEL_FORMAT:
            raise ValueError(f"not an HDC model file (format={d.get('format')!r})")
        if d.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version {d.get('version')}")
        classes = np.vstack([as_bits(s) for s in d["classes"]])
        return cls(classes, Encoder.from_dict(d["encoder"]), d.get("train_meta", {}))


def bundle_majority(hvs) -> np.ndarray:
    """Bitwise majority of the rows of ``hvs``; ties go to 1."""
    hvs = np.atleast_2d(hvs)
    return (2 * hvs.sum(axis=0, dtype=np.int64) >= hvs.shape[0]).astype(np.uint8)


def train_single_pass(features, labels, enc: Encoder, n_classes: int | None = None,
                      fit: bool = True) -> HdcModel:
    """One class hypervector per label, by majority over encoded samples.

    ``fit`` refits the encoder's standardization on these features first.
    """
    labels = np.asarray(labels)
    if n_classes is None:
        n_classes = int(labels.max()) + 1
    if fit:
        enc = enc.fit(features)
    hvs = encode(features, enc)
    counts = np.bincount(labels, minlength=n_classes)
    empty = [int(k) for k in np.flatnonzero(counts == 0)]
    if empty:
        raise ValueError(f"no training samples for classes {empty}")
    classes = np.vstack([bundle_majority(hvs[labels == k]) for k in range(n_classes)])
    return HdcModel(classes, enc, {"counts": counts.tolist()})


def _first_argmax(scores):
    return np.argmax(scores, axis=1)  # numpy returns the lowest index on ties


def infer_encoded(hvs, model: HdcModel, backend: str = "oracle_cosine",
                  chain: SearchChain | None = None, spec: VariationSpec | None = None,
                  seed: int = 0) -> np.ndarray:
    """Predicted class per encoded query row; AM failures come back as -1."""
    hvs = np.atleast_2d(hvs)
    if backend == "oracle_cosine":
        return _first_argmax(cosine_matrix(hvs, model.classes, squared=True))
    if backend == "oracle_hamming":
        return np.argmin(hamming_matrix(hvs, model.classes), axis=1)
    if backend == "simulated_am":
        chain = chain if chain is not None else SearchChain()
        die = chain.build(model.classes, spec, np.random.default_rng(seed))
        out = np.empty(hvs.shape[0], dtype=np.int64)
        for i, q in enumerate(hvs):
            res = die.search(q)
            out[i] = res.winner if res.converged else AM_FAILURE
        return out
    raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")


def infer(features, model: HdcModel, backend: str = "oracle_cosine", **kw):
    """Classify raw feature rows (or one row) with the chosen backend."""
    x = np.asarray(features, dtype=float)
    single = x.ndim == 1
    pred = infer_encoded(encode(np.atleast_2d(x), model.encoder), model, backend, **kw)
    return int(pred[0]) if single else pred


def top_two(cos_sq: np.ndarray):
    """Best and runner-up class index per row, lowest index first on ties."""
    order = np.argsort(-cos_sq, axis=1, kind="stable")
    return order[:, 0], order[:, 1]


def inject_winner_errors(pred, cos_sq, rate: float, rng, mode: str = "contested",
                         band: float = 0.8) -> np.ndarray:
    """Replace AM winners by the runner-up with probability ``rate``.

    ``mode="contested"`` confines flips to searches whose runner-up squared
    similarity is within ``band`` of the best (0.8 is the 1/5 : 1/4 worst-case
    ratio); ``mode="uniform"`` exposes every search.
    """
    if not 0 <= rate <= 1:
        raise ValueError("rate must lie in [0, 1]")
    pred = np.asarray(pred).copy()
    best, second = top_two(cos_sq)
    rows = np.arange(len(pred))
    if mode == "contested":
        top = cos_sq[rows, best]
        with np.errstate(divide="ignore", invalid="ignore"):
            exposed = np.where(top > 0, cos_sq[rows, second] / top, 1.0) >= band
    elif mode == "uniform":
        exposed = np.ones(len(pred), dtype=bool)
    else:
        raise ValueError(f"unknown injection mode {mode!r}")
    flip = exposed & (rng.random(len(pred)) < rate)
    pred[flip] = np.where(pred[flip] == best[flip], second[flip], best[flip])
    return pred
