"""Compiled kernels versus the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each row reports the best wall time per backend and the speedup; results are
checked for equality before timing is trusted.
"""

import argparse
import time

import numpy as np

from qsrlab import _fallback
from qsrlab.kernels import available_backends


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def cases(quick):
    g = np.random.default_rng(0)
    herm = {}
    for dim in (8, 16, 32) if quick else (8, 16, 32, 64):
        a = g.normal(size=(dim, dim)) + 1j * g.normal(size=(dim, dim))
        herm[dim] = (a + a.conj().T) / 2
    out = [
        ("rank_counts n=4 t=4", lambda k: k.rank_counts(4, 4)),
        ("rank_counts n=5 t=4", lambda k: k.rank_counts(5, 4)),
        ("gamma_counts m=2 n=3 t=3", lambda k: k.gamma_counts(2, 3, 3, [1, 2, 3])),
        ("gamma_counts m=3 n=3 t=3", lambda k: k.gamma_counts(3, 3, 3, [1, 2, 3])),
    ]
    if not quick:
        out += [
            ("rank_counts n=6 t=4", lambda k: k.rank_counts(6, 4)),
            ("gamma_counts m=3 n=4 t=3", lambda k: k.gamma_counts(3, 4, 3, [1, 2, 3])),
        ]
    for dim, h in herm.items():
        out.append((f"jacobi_eigvalsh dim={dim}", lambda k, h=h: k.jacobi_eigvalsh(h)))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="skip the largest cases")
    args = ap.parse_args()

    mods = available_backends()
    compiled = [m for m in mods if m is not _fallback]
    if not compiled:
        print("compiled extension not importable; only the fallback is available")
    print(f"{'kernel':<28} {'python':>10} {'cython':>10} {'speedup':>8}")
    for name, fn in cases(args.quick):
        t_py, ref = best_of(lambda: fn(_fallback), args.repeat)
        if compiled:
            t_c, got = best_of(lambda: fn(compiled[0]), args.repeat)
            same = np.allclose(np.asarray(got), np.asarray(ref), atol=1e-10)
            flag = "" if same else "  MISMATCH"
            print(f"{name:<28} {t_py:>9.4f}s {t_c:>9.4f}s {t_py / t_c:>7.1f}x{flag}")
        else:
            print(f"{name:<28} {t_py:>9.4f}s {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
