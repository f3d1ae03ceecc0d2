"""Datasets: CSV loading, stratified splits and synthetic stand-ins.

Named datasets are read from ``<data_dir>/<name>_train.csv`` and
``<name>_test.csv`` when present (``data_dir`` defaults to the
``COSINE_AM_DATA`` environment variable). Otherwise a synthetic surrogate
with the same feature count, class count and split sizes is generated, and
``Dataset.synthetic`` is set so reports can say so.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DATA_ENV = "COSINE_AM_DATA"


@dataclass(frozen=True)
class SurrogateSpec:
    n_features: int
    n_classes: int
    n_train: int
    n_test: int
    class_weights: tuple | None = None  # None: balanced
    latent_dim: int = 24
    separation: float = 0.8
    modes_per_class: int = 3


SURROGATES = {
    "isolet": SurrogateSpec(617, 26, 6238, 1559),
    "ucihar": SurrogateSpec(561, 12, 6213, 1554),
    # the full training split has 522,441 rows; 20k keeps runs short
    "face": SurrogateSpec(608, 2, 20000, 2494, class_weights=(0.8, 0.2), modes_per_class=6),
}


@dataclass(frozen=True, eq=False)
class Dataset:
    name: str
    x_train: np.ndarray
    y_train: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray
    n_classes: int
    synthetic: bool = False

    def __post_init__(self):
        for x, y in ((self.x_train, self.y_train), (self.x_test, self.y_test)):
            if x.ndim != 2 or len(x) != len(y):
                raise ValueError("features must be N x n with one label per row")
            if len(y) and (y.min() < 0 or y.max() >= self.n_classes):
                raise ValueError(f"labels must lie in [0, {self.n_classes})")
        if self.x_train.shape[1] != self.x_test.shape[1]:
            raise ValueError("train and test feature counts differ")

    @property
    def n_features(self) -> int:
        return self.x_train.shape[1]

    def summary(self) -> dict:
        return {
            "name": self.name,
            "n_features": self.n_features,
            "n_classes": self.n_classes,
            "n_train": len(self.y_train),
            "n_test": len(self.y_test),
            "synthetic": self.synthetic,
        }


def load_csv(path, label_map: dict | None = None):
    """Read a header + rows CSV with the label in the last column.

    Labels that are all integers are used as-is; otherwise they are mapped
    to indices in sorted order (or through ``label_map``). Returns
    ``(features, labels, label_map)``.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        rows, raw = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                rows.append([float(v) for v in row[:-1]])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            raw.append(row[-1].strip())
    if not rows:
        raise ValueError(f"{path}: no samples")
    if label_map is None:
        try:
            label_map = {s: int(s) for s in set(raw)}
        except ValueError:
            label_map = {s: i for i, s in enumerate(sorted(set(raw)))}
    try:
        labels = np.array([label_map[s] for s in raw], dtype=np.int64)
    except KeyError as exc:
        raise ValueError(f"{path}: unknown label {exc.args[0]!r}") from None
    return np.asarray(rows, dtype=float), labels, label_map


def write_csv(path, features, labels) -> None:
    features = np.asarray(features, dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"f{i}" for i in range(features.shape[1])] + ["label"])
        for x, y in zip(features, labels):
            w.writerow([repr(float(v)) for v in x] + [int(y)])


def stratified_split(features, labels, test_fraction: float = 0.2, seed: int = 0):
    """Per-class shuffled split; every class keeps at least one training row."""
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must lie in (0, 1)")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    test = []
    for k in np.unique(labels):
        idx = rng.permutation(np.flatnonzero(labels == k))
        n_test = min(int(round(test_fraction * len(idx))), len(idx) - 1)
        test.extend(idx[:n_test])
    mask = np.zeros(len(labels), dtype=bool)
    mask[test] = True
    x = np.asarray(features, dtype=float)
    return x[~mask], labels[~mask], x[mask], labels[mask]


def make_surrogate(name: str, seed: int = 0, spec: SurrogateSpec | None = None) -> Dataset:
    """Class-structured synthetic data with a named dataset's shape.

    Each class is a mixture of a few anisotropic Gaussian modes in a
    low-dimensional latent space; a random nonlinear map lifts the latent
    point to the feature space and adds independent noise.
    """
    spec = spec if spec is not None else SURROGATES[name]
    rng = np.random.default_rng(seed)
    d, k = spec.latent_dim, spec.n_classes

    centers = rng.normal(scale=spec.separation, size=(k, d))
    mode_shift = rng.normal(scale=0.5 * spec.separation, size=(k, spec.modes_per_class, d))
    mode_shape = rng.normal(scale=1.0 / np.sqrt(d), size=(k, spec.modes_per_class, d, d))
    lift = rng.normal(size=(d, spec.n_features)) / np.sqrt(d)
    bias = rng.normal(scale=0.3, size=spec.n_features)
    gain = rng.lognormal(sigma=0.5, size=spec.n_features)

    w = np.full(k, 1.0 / k) if spec.class_weights is None else np.asarray(spec.class_weights)

    def draw(n):
        y = rng.choice(k, size=n, p=w / w.sum())
        m = rng.integers(0, spec.modes_per_class, size=n)
        eps = rng.normal(size=(n, d))
        z = centers[y] + mode_shift[y, m] + np.einsum("nij,nj->ni", mode_shape[y, m], eps)
        x = np.tanh(z @ lift + bias) * gain + rng.normal(scale=0.2, size=(n, spec.n_features))
        return x, y

    x_tr, y_tr = draw(spec.n_train)
    x_te, y_te = draw(spec.n_test)
    return Dataset(name, x_tr, y_tr, x_te, y_te, k, synthetic=True)


def load_named(name: str, data_dir=None, seed: int = 0) -> Dataset:
    """Real split files when available, else the synthetic surrogate."""
    name = name.lower()
    if name not in SURROGATES:
        raise ValueError(f"unknown dataset {name!r}; choose from {sorted(SURROGATES)}")
    data_dir = data_dir if data_dir is not None else os.environ.get(DATA_ENV)
    if data_dir:
        tr = Path(data_dir) / f"{name}_train.csv"
        te = Path(data_dir) / f"{name}_test.csv"
        if tr.exists() and te.exists():
            x_tr, y_tr, labels = load_csv(tr)
            x_te, y_te, _ = load_csv(te, labels)
            k = int(max(y_tr.max(), y_te.max())) + 1
            return Dataset(name, x_tr, y_tr, x_te, y_te, k)
    return make_surrogate(name, seed)


def load_path(path, test_path=None, test_fraction: float = 0.2, seed: int = 0) -> Dataset:
    """A user CSV, split here unless a separate test file is given."""
    x, y, labels = load_csv(path)
    if test_path is not None:
        x_te, y_te, _ = load_csv(test_path, labels)
        x_tr, y_tr = x, y
    else:
        x_tr, y_tr, x_te, y_te = stratified_split(x, y, test_fraction, seed)
    k = int(max(y_tr.max(), y_te.max() if len(y_te) else 0)) + 1
    return Dataset(Path(path).stem, x_tr, y_tr, x_te, y_te, k)
