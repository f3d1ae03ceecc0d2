"""Monte Carlo search accuracy under device variation."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .device import VariationSpec
from .hdc.similarity import cosine_squared_exact, hamming
from .pipeline import SearchChain

WORST_CASE_SQ = (Fraction(1, 4), Fraction(1, 5))
DEFAULT_SWEEP_NORMS = (5, 6, 7, 8, 9, 10, 11)


@dataclass(frozen=True)
class WorstCaseShape:
    query_ones: int
    dot_a: int
    ones_a: int
    dot_b: int
    ones_b: int

    @property
    def denominator_only(self) -> bool:
        return self.dot_a == self.dot_b


def worst_case_candidates(max_query_ones: int = 24, max_word_ones: int = 64) -> list[WorstCaseShape]:
    """Every small integer shape with squared cosines 1/4 and 1/5 one bit apart.

    A single bit flip either toggles a stored bit under a query '1' (dot and
    popcount move together) or under a query '0' (popcount only).
    """
    out = []
    for q in range(1, max_query_ones + 1):
        for x in range(0, q + 1):
            for y in range(max(x, 1), max_word_ones + 1):
                if Fraction(x * x, q * y) != WORST_CASE_SQ[0]:
                    continue
                for dx, dy in ((1, 1), (-1, -1), (0, 1), (0, -1)):
                    xb, yb = x + dx, y + dy
                    if yb < 1 or xb < 0 or xb > q or xb > yb:
                        continue
                    if dx == 0 and dy == -1 and y - x < 1:
                        continue
                    if Fraction(xb * xb, q * yb) == WORST_CASE_SQ[1]:
                        out.append(WorstCaseShape(q, x, y, xb, yb))
    return out


def _word(dim: int, query_ones: int, dot: int, ones: int) -> np.ndarray:
    """Ones on the first ``dot`` query positions, the rest just after the query."""
    w = np.zeros(dim, dtype=np.uint8)
    w[:dot] = 1
    w[query_ones:query_ones + ones - dot] = 1
    return w


def worst_case_scenario(dim: int = 1024, dot: int = 2):
    """Two stored words one bit apart with squared cosines exactly 1/4 and 1/5.

    Only shapes where the flipped bit sits under a query '0' (so the words
    differ in the norm alone) are used; ``dot`` selects among them.
    Returns ``(stored, query)`` with the cos^2 = 1/4 word in row 0.
    """
    shapes = [s for s in worst_case_candidates() if s.denominator_only and s.dot_a == dot]
    if not shapes:
        raise ValueError(f"no worst-case shape with dot product {dot}")
    s = min(shapes, key=lambda s: s.query_ones)
    need = s.query_ones + s.ones_b - s.dot_b
    if dim < need:
        raise ValueError(f"dim {dim} too small for the worst-case pair (needs {need})")
    query = np.zeros(dim, dtype=np.uint8)
    query[:s.query_ones] = 1
    a = _word(dim, s.query_ones, s.dot_a, s.ones_a)
    b = _word(dim, s.query_ones, s.dot_b, s.ones_b)
    stored = np.vstack([a, b])
    if (cosine_squared_exact(query, a), cosine_squared_exact(query, b)) != WORST_CASE_SQ:
        raise AssertionError("worst-case construction failed its exact check")
    if hamming(a, b) != 1:
        raise AssertionError("worst-case words must differ in exactly one bit")
    return stored, query


def sweep_scenario(dim: int, competitor_ones: int, dot: int = 2):
    """Reference word at cos = 1/2 against a competitor with more ones.

    The competitor keeps the reference's overlap with the query and adds
    ``competitor_ones - ones_ref`` bits outside it, so its cosine is
    ``dot / sqrt(query_ones * competitor_ones)``.
    """
    stored, query = worst_case_scenario(dim, dot)
    q = int(query.sum())
    ref = stored[0]
    if competitor_ones <= int(ref.sum()):
        raise ValueError("competitor must have more ones than the reference word")
    if q + competitor_ones - dot > dim:
        raise ValueError(f"dim {dim} too small for {competitor_ones} competitor ones")
    comp = _word(dim, q, dot, competitor_ones)
    return np.vstack([ref, comp]), query


def competitor_cos(competitor_ones: int, dot: int = 2) -> float:
    q = dot * dot
    return dot / math.sqrt(q * competitor_ones)


def norms_for_cos(targets, dot: int = 2) -> tuple[int, ...]:
    """Nearest realizable competitor popcounts for requested cosine values."""
    q = dot * dot
    out = []
    for c in targets:
        if not 0 < c < 0.5:
            raise ValueError(f"competitor cos must lie in (0, 0.5), got {c}")
        y = max(round(dot * dot / (q * c * c)), 5)
        out.append(int(y))
    return tuple(sorted(set(out)))


@dataclass(frozen=True)
class McExperiment:
    trials: int = 1000
    spec: VariationSpec = field(default_factory=VariationSpec)
    scenario: str = "worst_case_pair"
    dim: int = 1024
    master_seed: int = 0
    chain: SearchChain = field(default_factory=SearchChain)
    worst_case_dot: int = 2
    sweep_norms: tuple = DEFAULT_SWEEP_NORMS
    stored: np.ndarray | None = None
    query: np.ndarray | None = None
    expected_winner: int | None = None
    keep_log: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.scenario not in ("worst_case_pair", "similarity_sweep", "custom"):
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.scenario == "custom" and (self.stored is None or self.query is None):
            raise ValueError("custom scenario needs stored words and a query")


@dataclass
class McBin:
    competitor_cos: float
    competitor_cos_sq: float
    trials: int
    errors: int
    nonconverged: int
    unresolved: int

    @property
    def error_rate(self) -> float:
        return self.errors / self.trials


@dataclass
class McResult:
    accuracy: float
    bins: list
    trial_log: list | None = None

    @property
    def error_rate_by_bin(self) -> dict:
        return {b.competitor_cos: b.error_rate for b in self.bins}

    @property
    def trials(self) -> int:
        return sum(b.trials for b in self.bins)

    def to_dict(self) -> dict:
        d = {
            "accuracy": self.accuracy,
            "trials": self.trials,
            "bins": [
                {
                    "competitor_cos": b.competitor_cos,
                    "competitor_cos_sq": b.competitor_cos_sq,
                    "trials": b.trials,
                    "errors": b.errors,
                    "error_rate": b.error_rate,
                    "nonconverged": b.nonconverged,
                    "unresolved": b.unresolved,
                }
                for b in self.bins
            ],
        }
        if self.trial_log is not None:
            d["trial_log"] = self.trial_log
        return d

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["competitor_cos", "error_rate", "trials"])
            for b in self.bins:
                w.writerow([f"{b.competitor_cos:.6f}", f"{b.error_rate:.6f}", b.trials])


def _trial(args):
    chain, stored, query, expected, spec, seed_seq, index = args
    rng = np.random.default_rng(seed_seq)
    res = chain.search(stored, query, spec, rng)
    correct = res.converged and res.resolvable and res.winner == expected
    return {
        "trial": index,
        "winner": int(res.winner),
        "correct": bool(correct),
        "converged": bool(res.converged),
        "resolvable": bool(res.resolvable),
        "iz_margin": float(res.solution.margin),
    }


def _run_trials(chain, stored, query, expected, spec, seeds, workers):
    jobs = [(chain, stored, query, expected, spec, s, i) for i, s in enumerate(seeds)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(_trial, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [_trial(j) for j in jobs]


def _bin(records, cos_value, cos_sq):
    return McBin(
        competitor_cos=cos_value,
        competitor_cos_sq=cos_sq,
        trials=len(records),
        errors=sum(not r["correct"] for r in records),
        nonconverged=sum(not r["converged"] for r in records),
        unresolved=sum(r["converged"] and not r["resolvable"] for r in records),
    )


def run_mc(exp: McExperiment) -> McResult:
    """Run every trial of ``exp``.

    Trial t of bin j draws from ``SeedSequence(master_seed).spawn(...)[j]
    .spawn(trials)[t]``, so results do not depend on worker count or order.
    A trial is correct when the WTA converges, resolves, and picks the
    expected row; everything else counts as an error.
    """
    root = np.random.SeedSequence(exp.master_seed)
    if exp.scenario == "similarity_sweep":
        cases = []
        for y in exp.sweep_norms:
            stored, query = sweep_scenario(exp.dim, y, exp.worst_case_dot)
            cases.append((stored, query, 0, competitor_cos(y, exp.worst_case_dot)))
    elif exp.scenario == "worst_case_pair":
        stored, query = worst_case_scenario(exp.dim, exp.worst_case_dot)
        cases = [(stored, query, 0, competitor_cos(5, exp.worst_case_dot))]
    else:
        stored = np.atleast_2d(exp.stored)
        query = np.asarray(exp.query)
        cos_sq = [float(cosine_squared_exact(query, w)) for w in stored]
        expected = exp.expected_winner
        if expected is None:
            expected = int(np.argmax(cos_sq))
        runner = max((c for i, c in enumerate(cos_sq) if i != expected), default=0.0)
        cases = [(stored, query, expected, math.sqrt(runner))]

    bins = []
    log = [] if exp.keep_log else None
    correct_total = 0
    for bin_seq, (stored, query, expected, cos_value) in zip(root.spawn(len(cases)), cases):
        records = _run_trials(exp.chain, stored, query, expected, exp.spec,
                              bin_seq.spawn(exp.trials), exp.workers)
        bins.append(_bin(records, cos_value, cos_value * cos_value))
        correct_total += sum(r["correct"] for r in records)
        if log is not None:
            log.extend(dict(r, competitor_cos=cos_value) for r in records)
    total = sum(b.trials for b in bins)
    return McResult(correct_total / total, bins, log)
