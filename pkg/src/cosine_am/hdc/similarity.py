"""Software similarity oracles on binary vectors."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def _pair(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"length mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    return a.astype(np.int64), b.astype(np.int64)


def dot(a, b) -> int:
    a, b = _pair(a, b)
    return int(a @ b)


def hamming(a, b) -> int:
    a, b = _pair(a, b)
    return int(np.count_nonzero(a != b))


def cosine_squared_exact(a, b) -> Fraction:
    """dot**2 / (|a| * |b|) as an exact rational; 0 if either vector is zero."""
    a, b = _pair(a, b)
    na, nb = int(a.sum()), int(b.sum())
    if na == 0 or nb == 0:
        return Fraction(0)
    return Fraction(int(a @ b) ** 2, na * nb)


def exact_cosine(a, b, squared: bool = False):
    """Cosine similarity of two binary vectors.

    Returns ``(value, defined)``. A zero vector has no direction, so the
    similarity is reported as 0 with ``defined=False``.
    """
    a, b = _pair(a, b)
    na, nb = int(a.sum()), int(b.sum())
    if na == 0 or nb == 0:
        return 0.0, False
    d = int(a @ b)
    if squared:
        return d * d / (na * nb), True
    return d / math.sqrt(na * nb), True


def cosine_matrix(queries, classes, squared: bool = False) -> np.ndarray:
    """Pairwise cosine (or squared cosine) between query rows and class rows."""
    q, c = _pair(np.atleast_2d(queries), np.atleast_2d(classes))
    dots = (q @ c.T).astype(float)
    nq = q.sum(axis=1).astype(float)[:, None]
    nc = c.sum(axis=1).astype(float)[None, :]
    denom = nq * nc
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(denom > 0, dots * dots / denom, 0.0)
    return out if squared else np.sqrt(out)


def hamming_matrix(queries, classes) -> np.ndarray:
    q, c = _pair(np.atleast_2d(queries), np.atleast_2d(classes))
    dots = q @ c.T
    return q.sum(axis=1)[:, None] + c.sum(axis=1)[None, :] - 2 * dots
