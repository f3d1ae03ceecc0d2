"""Convert the public ISOLET and UCI-HAR distributions to the package CSV layout.

Writes ``<name>_train.csv`` and ``<name>_test.csv`` (header row, features,
integer label last, labels starting at 0) into OUT_DIR. Point
``COSINE_AM_DATA`` (or ``hdc.data_dir`` in the run config) at OUT_DIR to use
them in place of the synthetic stand-ins.

    python scripts/prepare_uci.py isolet  --src isolet/        --out data/
    python scripts/prepare_uci.py ucihar  --src "UCI HAR Dataset/" --out data/

Expected inputs: ISOLET as ``isolet1+2+3+4.data`` and ``isolet5.data``
(comma separated, label 1..26 last); UCI-HAR as the original
``train/X_train.txt``, ``train/y_train.txt`` and the matching test files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from cosine_am.hdc.datasets import write_csv


def _isolet(src: Path):
    def read(name):
        raw = np.loadtxt(src / name, delimiter=",")
        return raw[:, :-1], raw[:, -1].astype(int) - 1
    return read("isolet1+2+3+4.data") + read("isolet5.data")


def _ucihar(src: Path):
    def read(split):
        x = np.loadtxt(src / split / f"X_{split}.txt")
        y = np.loadtxt(src / split / f"y_{split}.txt").astype(int)
        return x, y - y.min()
    return read("train") + read("test")


READERS = {"isolet": _isolet, "ucihar": _ucihar}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("name", choices=sorted(READERS))
    ap.add_argument("--src", required=True, type=Path)
    ap.add_argument("--out", required=True, type=Path)
    args = ap.parse_args(argv)
    x_tr, y_tr, x_te, y_te = READERS[args.name](args.src)
    args.out.mkdir(parents=True, exist_ok=True)
    write_csv(args.out / f"{args.name}_train.csv", x_tr, y_tr)
    write_csv(args.out / f"{args.name}_test.csv", x_te, y_te)
    print(f"{args.name}: {x_tr.shape[0]} train, {x_te.shape[0]} test, "
          f"{x_tr.shape[1]} features, {int(max(y_tr.max(), y_te.max())) + 1} classes")
    return 0


if __name__ == "__main__":
    sys.exit(main())
