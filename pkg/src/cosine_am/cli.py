"""Command-line entry point: ``cosine-am <command> [options]``.

Exit codes: 0 success, 1 usage, 2 bad input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import config as config_mod
from .array import ArrayGeometry, WordFormatError, read_words
from .cost import compare_to_baselines, estimate, load_baselines, reference_entry, sweep_dims, sweep_rows
from .device import VariationSpec
from .hdc.datasets import load_named, load_path
from .hdc.encoding import Encoder
from .hdc.evaluate import evaluate
from .hdc.model import HdcModel, infer, train_single_pass
from .hdc.similarity import cosine_matrix
from .variation import run_mc
from .wta import WtaConvergenceError, solve_static

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
log = logging.getLogger("cosine_am")


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _emit(args, payload: dict) -> None:
    if not args.quiet:
        print(json.dumps(payload, indent=1, sort_keys=True))


# commands

def cmd_search(cfg, args, out: Path) -> dict:
    stored = read_words(args.stored)
    query = read_words(args.query)[args.query_index]
    if query.size != stored.shape[1]:
        raise WordFormatError(args.query, args.query_index + 1,
                              f"query length {query.size} != stored word length {stored.shape[1]}")
    spec = cfg.variation if args.vary else VariationSpec.none()
    res = cfg.chain().search(stored, query, spec, np.random.default_rng(cfg.master_seed))
    cos_sq = cosine_matrix(query[None, :], stored, squared=True)[0]
    oracle = int(np.argmax(cos_sq))
    report = res.to_dict(verbose=args.verbose)
    report.update(oracle_cos_sq=cos_sq.tolist(), oracle_winner=oracle,
                  oracle_agrees=bool(res.winner == oracle), variation=bool(args.vary))
    _write_json(out / "search.json", report)
    if not res.converged:
        raise NumericalFailure("WTA did not converge")
    return {"winner": res.winner, "oracle_winner": oracle, "resolvable": res.resolvable,
            "oracle_agrees": report["oracle_agrees"]}


def cmd_mc(cfg, args, out: Path) -> dict:
    kw = {}
    if args.scenario:
        kw["scenario"] = args.scenario
    exp = cfg.experiment(**kw)
    log.info("running %d trials of %s", exp.trials, exp.scenario)
    res = run_mc(exp)
    _write_json(out / "mc.json", res.to_dict())
    res.write_csv(out / "mc.csv")
    return {"scenario": exp.scenario, "accuracy": res.accuracy, "trials": res.trials,
            "error_rate_by_bin": {f"{k:.6f}": v for k, v in res.error_rate_by_bin.items()}}


def _margin_sweep(cfg):
    sw = cfg.sweep
    wta = replace(cfg.wta, mosfet=cfg.device.mosfet)
    rows = []
    for j, margin in enumerate(sw.margins):
        rng = np.random.default_rng([cfg.master_seed, j])
        correct = 0
        for _ in range(sw.margin_trials):
            top = rng.uniform(50e-9, 600e-9)
            iz = rng.uniform(0.05, 1.0 - margin, sw.margin_rails) * top
            iz[0], iz[1] = top, top * (1.0 - margin)
            iz = rng.permutation(iz)
            sol = solve_static(iz, wta)
            correct += sol.converged and sol.is_resolvable(wta.dominance) and iz[sol.winner] == top
        rows.append((margin, correct / sw.margin_trials))
    return rows


def cmd_sweep(cfg, args, out: Path) -> dict:
    sw = cfg.sweep
    if args.axis == "margin":
        rows = _margin_sweep(cfg)
        header = ["margin", "correct_fraction"]
    else:
        reports = (sweep_rows(sw.rows, cfg.mc.dim, cfg.cost) if args.axis == "rows"
                   else sweep_dims(sw.dims, sw.rows[-1], cfg.cost))
        header = ["rows", "dim", "energy_J", "latency_s", "area_m2"]
        rows = [(r.rows, r.dim, r.energy, r.latency, r.area) for r in reports]
    _write_rows(out / f"sweep_{args.axis}.csv", header, rows)
    table = [dict(zip(header, r)) for r in rows]
    _write_json(out / f"sweep_{args.axis}.json", {"axis": args.axis, "rows": table})
    return {"axis": args.axis, "rows": table}


def cmd_cost(cfg, args, out: Path) -> dict:
    geom = ArrayGeometry(args.rows or cfg.cost.area_rows_ref, args.dim or cfg.cost.area_dim_ref)
    report = estimate(geom, cfg.cost)
    # ratios use the calibrated table row, not the per-bit cost at this geometry
    ratios = compare_to_baselines(reference_entry(cfg.cost), load_baselines(args.baselines))
    _write_json(out / "cost.json", {"report": report.to_dict(), "baselines": ratios})
    _write_rows(out / "cost_baselines.csv", ["name", "metric", "energy_ratio", "latency_ratio", "area_ratio"],
                [(r["name"], r["metric"], r["energy_ratio"], r["latency_ratio"], r["area_ratio"])
                 for r in ratios])
    return {"report": report.to_dict(), "baselines": ratios}


def _dataset(cfg, args):
    h = cfg.hdc
    if args.data:
        return load_path(args.data, args.test_data, h.test_fraction, cfg.master_seed)
    return load_named(h.dataset, h.data_dir, cfg.master_seed)


def cmd_hdc(cfg, args, out: Path) -> dict:
    h = cfg.hdc
    data = _dataset(cfg, args)
    if args.action == "train":
        dim = args.dim or max(h.dims)
        enc = Encoder(cfg.master_seed, data.n_features, dim, h.quantization)
        model = train_single_pass(data.x_train, data.y_train, enc, data.n_classes)
        path = Path(args.model) if args.model else out / "model.json"
        path.write_text(model.to_json() + "\n")
        acc = float(np.mean(infer(data.x_test, model) == data.y_test))
        res = {"model": str(path), "dim": dim, "dataset": data.summary(), "test_accuracy_cosine": acc}
        _write_json(out / "hdc_train.json", res)
        return res
    if args.model:
        model = HdcModel.from_json(Path(args.model).read_text())
        pred = infer(data.x_test, model, args.backend, chain=cfg.chain(),
                     spec=cfg.variation if args.vary else VariationSpec.none(), seed=cfg.master_seed)
        res = {"dataset": data.summary(), "backend": args.backend,
               "accuracy": float(np.mean(pred == data.y_test)), "failures": int(np.sum(pred < 0))}
        _write_json(out / "hdc_eval.json", res)
        return res
    table = evaluate(data, h.dims, h.metrics, h.seeds, h.quantization, chain=cfg.chain(),
                     spec=cfg.variation if args.vary else VariationSpec.none(),
                     error_rate=h.error_rate, error_mode=h.error_mode)
    table.write_csv(out / "hdc_accuracy.csv")
    table.write_json(out / "hdc_accuracy.json")
    return {"dataset": table.dataset, "summary": table.summary()}


COMMANDS = {"search": cmd_search, "mc": cmd_mc, "sweep": cmd_sweep, "cost": cmd_cost, "hdc": cmd_hdc}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"YAML run config (default: ${config_mod.CONFIG_ENV})")
    common.add_argument("--seed", type=int, help="override master_seed")
    common.add_argument("--out", help="output directory (overrides output_dir)")
    common.add_argument("--trials", type=int, help="override mc.trials")
    v = common.add_mutually_exclusive_group()
    v.add_argument("--quiet", action="store_true")
    v.add_argument("--verbose", action="store_true")

    p = _Parser(prog="cosine-am", description="Cosine-similarity associative memory models.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("search", parents=[common], help="one end-to-end search")
    s.add_argument("--stored", required=True, help="word file, one 0/1 word per line")
    s.add_argument("--query", required=True, help="word file holding the query")
    s.add_argument("--query-index", type=int, default=0)
    s.add_argument("--vary", action="store_true", help="sample device variation")

    m = sub.add_parser("mc", parents=[common], help="Monte Carlo accuracy")
    m.add_argument("--scenario", choices=("worst_case_pair", "similarity_sweep"))

    w = sub.add_parser("sweep", parents=[common], help="metric versus one axis")
    w.add_argument("--axis", required=True, choices=("rows", "dims", "margin"))

    c = sub.add_parser("cost", parents=[common], help="cost report and baseline ratios")
    c.add_argument("--rows", type=int)
    c.add_argument("--dim", type=int)
    c.add_argument("--baselines", help="baseline CSV (default: bundled table)")

    h = sub.add_parser("hdc", parents=[common], help="HDC training and evaluation")
    h.add_argument("action", choices=("train", "eval"))
    h.add_argument("--data", help="CSV with header, label in last column")
    h.add_argument("--test-data", help="separate test CSV")
    h.add_argument("--model", help="model file to write (train) or read (eval)")
    h.add_argument("--dim", type=int)
    h.add_argument("--backend", default="oracle_cosine",
                   choices=("oracle_cosine", "oracle_hamming", "simulated_am"))
    h.add_argument("--vary", action="store_true", help="sample device variation (simulated_am)")
    return p


def _resolve(args) -> config_mod.RunConfig:
    path = config_mod.find_config(args.config)
    if path is None:
        raise UsageError(f"no config given: pass --config or set ${config_mod.CONFIG_ENV}")
    cfg = config_mod.load(path)
    over = {}
    if args.seed is not None:
        over["master_seed"] = args.seed
    if args.out:
        over["output_dir"] = args.out
    if args.quiet:
        over["verbosity"] = "quiet"
    elif args.verbose:
        over["verbosity"] = "verbose"
    if args.trials is not None:
        if args.trials < 1:
            raise UsageError("--trials must be >= 1")
        over["mc"] = replace(cfg.mc, trials=args.trials)
    return replace(cfg, **over)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve(args)
        args.quiet = cfg.verbosity == "quiet"
        args.verbose = cfg.verbosity == "verbose"
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.resolved.yaml").write_text(config_mod.dump(cfg))
        _emit(args, COMMANDS[args.command](cfg, args, out))
    except UsageError as exc:
        print(f"cosine-am: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalFailure, WtaConvergenceError, FloatingPointError) as exc:
        print(f"cosine-am: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (config_mod.ConfigError, WordFormatError, OSError, KeyError, ValueError) as exc:
        print(f"cosine-am: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
