"""One-time sweep of the free Monte Carlo knobs against the 90% worst-case target.

Knobs: FeFET V_TH leakage through the resistor clamp (``fefet_attenuation``),
WTA bias current and the dominance factor used to call a winner resolvable.
Every other spread stays at its default. Prints one CSV row per setting and
the setting closest to 0.90; the shipped defaults are the ones it picks.

    python scripts/calibrate.py --trials 1000 > calibration.csv
"""

from __future__ import annotations

import argparse
import itertools
import sys
from dataclasses import replace

from cosine_am.device import VariationSpec
from cosine_am.pipeline import SearchChain
from cosine_am.variation import McExperiment, run_mc

TARGET = 0.90


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--attenuation", type=float, nargs="+", default=[0.0, 0.01, 0.05, 0.1])
    ap.add_argument("--i-bias", type=float, nargs="+", default=[50e-9, 100e-9, 200e-9])
    ap.add_argument("--dominance", type=float, nargs="+", default=[1.5, 2.0, 4.0])
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)

    base = SearchChain()
    results = []
    print("fefet_attenuation,i_bias,dominance,accuracy")
    for k, ib, dom in itertools.product(args.attenuation, args.i_bias, args.dominance):
        chain = replace(base, wta=replace(base.wta, i_bias=ib, dominance=dom))
        exp = McExperiment(trials=args.trials, spec=VariationSpec(fefet_attenuation=k),
                           master_seed=args.seed, chain=chain, workers=args.workers)
        acc = run_mc(exp).accuracy
        print(f"{k},{ib:.3e},{dom},{acc:.4f}", flush=True)
        results.append((abs(acc - TARGET), k, ib, dom, acc))
    best = min(r[0] for r in results)
    # several settings can tie exactly when a knob has no effect; list them all
    for _, k, ib, dom, acc in (r for r in results if r[0] == best):
        print(f"# closest to {TARGET}: fefet_attenuation={k} i_bias={ib:.3e} "
              f"dominance={dom} accuracy={acc:.4f}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
