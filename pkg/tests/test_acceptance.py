"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]``/``[FAIL]`` line with the measured
value and the tolerance; the lines are repeated in the pytest summary.
Criteria the model cannot meet are marked ``xfail(strict=True)``: they
still run and print FAIL, and start erroring if they ever pass.
"""

import time

import numpy as np
import pytest

from cosine_am.array import ArrayGeometry, program, row_currents, widen_words
from cosine_am.cost import compare_to_baselines, load_baselines, reference_entry, sweep_dims, sweep_rows
from cosine_am.device import CellParams, VariationSpec
from cosine_am.hdc.datasets import load_named
from cosine_am.hdc.encoding import Encoder, encode
from cosine_am.hdc.evaluate import evaluate
from cosine_am.hdc.model import infer_encoded, top_two, train_single_pass
from cosine_am.hdc.similarity import cosine_matrix
from cosine_am.translinear import TranslinearConfig, certify_rows, row_similarities
from cosine_am.variation import McExperiment, run_mc
from cosine_am.wta import WtaConfig, equal_input_slopes, resolve_winner, verify_sensitivities

from conftest import ACCEPTANCE_LINES

SEEDS = (0, 1, 2, 3, 4)


def report(n, name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:>2} {name}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


@pytest.fixture(scope="module")
def hdc_tables():
    return {name: evaluate(load_named(name), dims=(256, 512, 1024),
                           metrics=("cosine", "hamming", "cosine_injected"), seeds=SEEDS)
            for name in ("isolet", "ucihar")}


def test_c01_translinear_exactness():
    t = time.perf_counter()
    cfg = TranslinearConfig()
    lo, hi = cfg.current_window
    rng = np.random.default_rng(1)
    ix = np.exp(rng.uniform(np.log(lo), np.log(hi), 40_000))
    iy = ix * np.exp(rng.uniform(0, np.log(hi / lo), ix.size))
    iz, ok, residual, _ = certify_rows(ix, iy, cfg)
    ix, iy, iz, residual = ix[ok][:10_000], iy[ok][:10_000], iz[ok][:10_000], residual[ok][:10_000]
    rel = np.abs(iz * iy - ix * ix) / (ix * ix)
    dt = time.perf_counter() - t
    report(1, "translinear exactness", ix.size == 10_000 and rel.max() < 1e-12
           and np.abs(residual).max() < 1e-9 and dt < 1.0,
           f"n={ix.size} max rel {rel.max():.1e} (<1e-12), max loop residual "
           f"{np.abs(residual).max():.1e} V (<1e-9), {dt:.2f} s (<1 s)")


def test_c02_scaling_invariance():
    t = time.perf_counter()
    rng = np.random.default_rng(2)
    stored = rng.integers(0, 2, (16, 256)).astype(np.uint8)
    query = rng.integers(0, 2, 256).astype(np.uint8)
    base = program(stored, cell=CellParams())
    iz0, _ = row_similarities(*row_currents(base, query))
    worst = 0.0
    for k in (2, 4, 8):
        wide = program(widen_words(stored, k), ArrayGeometry(16, 256 * k, k), CellParams())
        izk, _ = row_similarities(*row_currents(wide, widen_words(query, k)[0]))
        worst = max(worst, float(np.max(np.abs(izk - iz0) / iz0)))
    dt = time.perf_counter() - t
    report(2, "scaling invariance", worst < 1e-9 and dt < 1.0,
           f"k in (2, 4, 8) max rel Iz change {worst:.1e} (<1e-9), {dt:.2f} s (<1 s)")


def test_c03_wta_small_signal():
    t = time.perf_counter()
    cfg = WtaConfig()
    assert cfg.mosfet.v_a / cfg.mosfet.v_t > 100
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(100):
        # interior: inputs within 2% of each other so |V_i| << V_A; perturb the winner
        m = int(rng.integers(2, 17))
        iz = rng.uniform(20e-9, 1e-6) * (1 - rng.uniform(0, 0.02, m))
        worst = max(worst, verify_sensitivities(iz, cfg, perturbed_rail=int(np.argmax(iz)))["max_rel_dev"])
    eq = {}
    for m in (2, 4, 8, 16):
        fd = verify_sensitivities(np.full(m, 200e-9), cfg, h=1e-5)["fd"][0]
        eq[m] = abs(fd / equal_input_slopes(m, 200e-9, cfg.mosfet.v_a)[0] - 1)
    two = equal_input_slopes(2, 200e-9, cfg.mosfet.v_a)[0] == cfg.mosfet.v_a / (2 * 200e-9)
    dt = time.perf_counter() - t
    report(3, "WTA small-signal", worst < 0.05 and max(eq.values()) < 0.02 and two and dt < 10,
           f"interior max dev {worst:.3f} (<0.05), equal-input dev "
           + ", ".join(f"M={m}: {v:.4f}" for m, v in eq.items())
           + f" (<0.02), M=2 slope V_A/2Iz {two}, {dt:.2f} s (<10 s)")


def test_c04_wta_resolution():
    t = time.perf_counter()
    rng = np.random.default_rng(4)
    correct = 0
    for _ in range(1000):
        m = int(rng.integers(2, 33))
        margin = rng.uniform(0.01, 0.5)
        top = np.exp(rng.uniform(np.log(20e-9), np.log(1e-6)))
        iz = rng.uniform(0.05, 1 - margin, m) * top
        iz[0], iz[1] = top, top * (1 - margin)
        iz = rng.permutation(iz)
        w, ok = resolve_winner(iz)
        correct += ok and iz[w] == top
    dt = time.perf_counter() - t
    report(4, "WTA resolution", correct == 1000 and dt < 30,
           f"{correct}/1000 correct at margins >= 1% (need 1000), {dt:.1f} s (<30 s)")


def test_c05_mc_worst_case():
    t = time.perf_counter()
    res = run_mc(McExperiment(trials=1000, spec=VariationSpec()))
    dt = time.perf_counter() - t
    report(5, "MC worst case", 0.85 <= res.accuracy <= 0.95 and dt < 300,
           f"accuracy {res.accuracy:.3f} over {res.trials} trials (in [0.85, 0.95]), {dt:.1f} s (<300 s)")


def test_c06_error_rate_trend():
    t = time.perf_counter()
    res = run_mc(McExperiment(trials=1000, scenario="similarity_sweep"))
    rates = [b.error_rate for b in sorted(res.bins, key=lambda b: -b.competitor_cos)]
    rises = sum(b > a for a, b in zip(rates, rates[1:]))
    dt = time.perf_counter() - t
    report(6, "error-rate trend", rises <= 1 and max(rates) <= 0.15 and dt < 600,
           "error by competitor cos "
           + ", ".join(f"{b.competitor_cos:.3f}: {b.error_rate:.3f}"
                       for b in sorted(res.bins, key=lambda b: -b.competitor_cos))
           + f"; rises {rises} (<=1), max {max(rates):.3f} (<=0.15), {dt:.1f} s (<600 s)")


def test_c07_cost_ratios():
    t = time.perf_counter()
    table = {r["name"]: r for r in compare_to_baselines(reference_entry(), load_baselines())}
    e = table["Approx. Cosine"]["energy_ratio"]
    lat = table["Approx. Cosine"]["latency_ratio"]
    rows = sweep_rows([4, 8, 16, 32, 64, 128, 256])
    dims = sweep_dims([64, 128, 256, 512, 1024])
    linear = all(r.energy == rows[0].energy * r.rows / rows[0].rows for r in rows)
    flat = len({r.latency for r in rows + dims}) == 1 and len({r.energy for r in dims}) == 1
    dt = time.perf_counter() - t
    report(7, "cost ratios", abs(e / 90.5 - 1) < 0.01 and abs(lat / 333 - 1) < 0.01
           and linear and flat and dt < 1,
           f"energy x{e:.2f} (90.5 +-1%), latency x{lat:.1f} (333 +-1%), energy linear in rows "
           f"{linear}, latency/energy flat in dims {flat}, {dt:.3f} s (<1 s)")


@pytest.mark.xfail(strict=True, reason="sign-projection class vectors have near-equal norms; "
                   "Hamming ranks as well as cosine on these datasets")
def test_c08a_cosine_beats_hamming(hdc_tables):
    gaps = {n: t.mean(1024, "cosine") - t.mean(1024, "hamming") for n, t in hdc_tables.items()}
    report("8a", "cosine >= Hamming at D=1024", all(g > 0 for g in gaps.values()),
           ", ".join(f"{n} gap {100 * g:+.2f} pt" for n, g in gaps.items())
           + " (need > 0, mean of 5 seeds)")


def test_c08b_dimension_trend(hdc_tables):
    acc = {n: [t.mean(d, "cosine") for d in (1024, 512, 256)] for n, t in hdc_tables.items()}
    ok = all(a[0] >= a[1] >= a[2] for a in acc.values())
    report("8b", "accuracy D=1024 >= 512 >= 256", ok,
           ", ".join(f"{n} " + "/".join(f"{v:.4f}" for v in a) for n, a in acc.items())
           + " (mean of 5 seeds)")


def test_c09_backend_equivalence():
    t = time.perf_counter()
    data = load_named("isolet")
    model = train_single_pass(data.x_train, data.y_train, Encoder(0, data.n_features, 512),
                              data.n_classes)
    hvs = encode(data.x_test, model.encoder)
    cs = cosine_matrix(hvs, model.classes, squared=True)
    best, second = top_two(cs)
    rows = np.arange(len(best))
    gated = (cs[rows, best] - cs[rows, second]) / cs[rows, best] >= 0.01
    am = infer_encoded(hvs, model, "simulated_am", spec=VariationSpec.none())
    agree = float(np.mean(am[gated] == best[gated]))
    dt = time.perf_counter() - t
    report(9, "backend equivalence", agree >= 0.99 and dt < 900,
           f"agreement {agree:.4f} on {int(gated.sum())}/{len(best)} queries with top-2 gap >= 1% "
           f"(>= 0.99), {dt:.1f} s (<900 s)")


@pytest.mark.xfail(strict=True, reason="about 34% of correct ISOLET queries have a runner-up within "
                   "the 0.8 worst-case ratio, so 10% flips there cost about 3 points")
def test_c10_error_tolerance(hdc_tables):
    t = hdc_tables["isolet"]
    drop = t.mean(1024, "cosine") - t.mean(1024, "cosine_injected")
    report(10, "10% winner flips cost < 2 pt", drop < 0.02,
           f"ISOLET D=1024 drop {100 * drop:.2f} pt (contested flips, need < 2)")
