"""Compiled kernels against the numpy fallback.

    python benchmarks/bench_core.py [--repeat 5] [--json]

Each row times one kernel on a fixed random input under both backends and
checks that the two agree before reporting the speed-up.
"""

from __future__ import annotations

import argparse
import json
import timeit

import numpy as np

from mfreqlab import _backend


def cases(rng):
    walk = np.cumsum(rng.standard_normal((400, 1)), axis=0).astype(complex)
    vec = (rng.standard_normal((200, 3)) + 1j * rng.standard_normal((200, 3)))
    rows = rng.standard_normal((256, 16, 1)).astype(complex)
    return [
        ("variation_power T=400 scalar", "variation_power", (walk, 2.5)),
        ("variation_power T=200 dim=3", "variation_power", (vec, 3.0)),
        ("variation_batch 256 x T=16", "variation_batch", (rows, 2.5)),
        ("greedy_jump_count T=400", "greedy_jump_count", (walk, 1.0)),
        ("max_jump_count T=400", "max_jump_count", (walk, 1.0)),
        ("gauss_residue_counts q=997 n=1", "gauss_residue_counts",
         (3, np.array([5], dtype=np.int64), 997, 1)),
        ("gauss_residue_counts q=61 n=2 d=2", "gauss_residue_counts",
         (7, np.array([1, 2], dtype=np.int64), 61, 2)),
    ]


def bench(repeat: int, seed: int = 0) -> list[dict]:
    try:
        compiled = _backend.get("cython")
    except ImportError:
        compiled = None
    fallback = _backend.get("python")
    out = []
    for label, name, args in cases(np.random.default_rng(seed)):
        row = {"case": label}
        ref = getattr(fallback, name)(*args)
        row["python_s"] = min(timeit.repeat(lambda: getattr(fallback, name)(*args), number=1, repeat=repeat))
        if compiled is not None:
            got = getattr(compiled, name)(*args)
            row["agree"] = bool(np.allclose(np.asarray(got), np.asarray(ref), rtol=1e-12, atol=1e-12))
            row["cython_s"] = min(timeit.repeat(lambda: getattr(compiled, name)(*args), number=1,
                                                repeat=repeat))
            row["speedup"] = row["python_s"] / row["cython_s"] if row["cython_s"] > 0 else float("inf")
        out.append(row)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    rows = bench(args.repeat)
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'case':36s} {'python (s)':>11s} {'cython (s)':>11s} {'speedup':>8s} agree")
    for r in rows:
        if "cython_s" in r:
            print(f"{r['case']:36s} {r['python_s']:11.5f} {r['cython_s']:11.5f} {r['speedup']:8.1f} {r['agree']}")
        else:
            print(f"{r['case']:36s} {r['python_s']:11.5f} {'n/a':>11s}")


if __name__ == "__main__":
    main()
