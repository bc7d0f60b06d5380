"""Time the compiled and pure-Python Schur kernels on random complex matrices.

Usage::

    python benchmarks/bench_schur.py [--sizes 4 8 16 32] [--repeat 20] [--json out.json]
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from distvar.numkernel import _qr_py

try:
    from distvar.numkernel import _qr
except ImportError:  # extension not built
    _qr = None


def _run(mod, a: np.ndarray) -> float:
    n = a.shape[0]
    h = np.ascontiguousarray(a.copy())
    q = np.eye(n, dtype=np.complex128)
    start = time.perf_counter()
    if mod.schur_inplace(h, q, 30 * max(n, 1)) < 0:
        raise RuntimeError("QR iteration did not converge")
    elapsed = time.perf_counter() - start
    resid = np.linalg.norm(q @ np.triu(h) @ q.conj().T - a, 2) / max(1.0, np.linalg.norm(a, 2))
    if resid > 1e-10:
        raise RuntimeError(f"residual {resid:.2e} too large")
    return elapsed


def bench(sizes, repeat: int, seed: int) -> list[dict]:
    rng = np.random.default_rng(seed)
    rows = []
    backends = [("python", _qr_py)] + ([("cython", _qr)] if _qr is not None else [])
    for n in sizes:
        mats = [rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for _ in range(repeat)]
        row = {"n": n}
        for name, mod in backends:
            times = [_run(mod, a) for a in mats]
            row[name] = float(np.median(times))
        if "cython" in row:
            row["speedup"] = row["python"] / row["cython"]
        rows.append(row)
    return rows


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32, 64])
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--json", type=Path)
    args = parser.parse_args(argv)

    rows = bench(args.sizes, args.repeat, args.seed)
    print(f"{'n':>4} {'python (ms)':>12} {'cython (ms)':>12} {'speedup':>8}")
    for r in rows:
        cy = f"{1e3 * r['cython']:12.3f}" if "cython" in r else f"{'n/a':>12}"
        sp = f"{r['speedup']:8.1f}" if "speedup" in r else f"{'':>8}"
        print(f"{r['n']:4d} {1e3 * r['python']:12.3f} {cy} {sp}")
    if args.json:
        args.json.write_text(json.dumps(rows, indent=1) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
