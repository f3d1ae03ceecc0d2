"""Sign-of-random-projection encoder."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

QUANT_RANGE = 3.0


@dataclass(frozen=True, eq=False)
class Encoder:
    """Maps a real feature vector to a D-bit hypervector.

    Features are standardized with training-split statistics (``fit``), then
    optionally snapped to ``quantization`` symmetric levels on [-3, 3], then
    projected on D pseudo-random +/-1 vectors; bit d is 1 iff projection d
    is >= 0. The projection rows are drawn row by row from
    ``projection_seed``, so a smaller D uses a prefix of a larger D's rows.
    """

    projection_seed: int
    n_features: int
    dim: int
    quantization: int = 0
    mean: np.ndarray | None = None
    std: np.ndarray | None = None

    def __post_init__(self):
        if self.n_features < 1 or self.dim < 1:
            raise ValueError("n_features and dim must be >= 1")
        if self.quantization == 1 or self.quantization < 0:
            raise ValueError("quantization must be 0 (off) or >= 2 levels")

    def fit(self, features) -> "Encoder":
        x = np.asarray(features, dtype=float)
        self._check(x)
        std = x.std(axis=0)
        std[std == 0] = 1.0
        return replace(self, mean=x.mean(axis=0), std=std)

    def projection(self) -> np.ndarray:
        rng = np.random.default_rng(self.projection_seed)
        return rng.integers(0, 2, size=(self.dim, self.n_features), dtype=np.int8) * 2 - 1

    def standardize(self, features) -> np.ndarray:
        x = np.asarray(features, dtype=float)
        self._check(x)
        if self.mean is not None:
            x = (x - self.mean) / self.std
        if self.quantization:
            levels = np.linspace(-QUANT_RANGE, QUANT_RANGE, self.quantization)
            step = levels[1] - levels[0]
            idx = np.rint((np.clip(x, -QUANT_RANGE, QUANT_RANGE) + QUANT_RANGE) / step)
            x = levels[idx.astype(int)]
        return x

    def encode_standardized(self, z) -> np.ndarray:
        proj = np.asarray(z, dtype=float) @ self.projection().T.astype(float)
        return (proj >= 0).astype(np.uint8)

    def _check(self, x):
        if x.shape[-1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {x.shape[-1]}")

    def to_dict(self) -> dict:
        return {
            "projection_seed": self.projection_seed,
            "n_features": self.n_features,
            "dim": self.dim,
            "quantization": self.quantization,
            "mean": None if self.mean is None else self.mean.tolist(),
            "std": None if self.std is None else self.std.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Encoder":
        mean = None if d.get("mean") is None else np.asarray(d["mean"], dtype=float)
        std = None if d.get("std") is None else np.asarray(d["std"], dtype=float)
        return cls(int(d["projection_seed"]), int(d["n_features"]), int(d["dim"]),
                   int(d.get("quantization", 0)), mean, std)


def encode(features, enc: Encoder) -> np.ndarray:
    """Encode one sample (1-D) or a batch (2-D) to uint8 bits."""
    return enc.encode_standardized(enc.standardize(features))
