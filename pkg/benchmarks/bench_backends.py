"""Time the numba and numpy flavours of each inner loop on the same inputs.

    python3 benchmarks/bench_backends.py [--N 200] [--reps 2000] [--repeat 5]

Prints best-of-``repeat`` wall time per kernel and the max relative
difference between the two outputs.
"""
import argparse
import time

import numpy as np

from diffassoc import _hot


def best_of(fn, args, repeat):
    fn(*args)  # warm-up (and JIT compile)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def rel_diff(a, b):
    a, b = np.asarray(a), np.asarray(b)
    ok = np.isfinite(a) & np.isfinite(b)
    return float(np.max(np.abs(a[ok] - b[ok])) / max(np.max(np.abs(a[ok])), 1e-300))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--N", type=int, default=200, help="pooled sample count (split evenly)")
    ap.add_argument("--d", type=int, default=50, help="data dimension")
    ap.add_argument("--reps", type=int, default=2000, help="relabelings")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not _hot.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(args.seed)
    N, m = args.N, args.N // 2
    X = rng.standard_normal((N, args.d))
    Y = rng.standard_normal((N, args.d))
    P = rng.standard_normal((N, N))
    P = P + P.T
    np.fill_diagonal(P, 0.0)
    idx_a, idx_b = _hot.random_relabelings(rng, N, m, args.reps)
    Dx = np.sqrt(_hot.sq_distances_numpy(X))
    Dy = np.sqrt(_hot.sq_distances_numpy(Y))

    cases = [
        ("sq_distances", _hot.sq_distances_numpy, _hot.sq_distances_jit, (X,)),
        ("relabel_sums", _hot.relabel_sums_numpy, _hot.relabel_sums_jit, (P, idx_a, idx_b)),
        ("dcoxs_relabel", _hot.dcoxs_relabel_numpy, _hot.dcoxs_relabel_jit, (Dx, Dy, idx_a, idx_b)),
    ]
    print(f"N={N} d={args.d} reps={args.reps}, best of {args.repeat}")
    print(f"{'kernel':<15}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}{'max rel diff':>15}")
    for name, f_np, f_jit, fargs in cases:
        t_np, o_np = best_of(f_np, fargs, args.repeat)
        t_jit, o_jit = best_of(f_jit, fargs, args.repeat)
        print(f"{name:<15}{1e3 * t_np:>12.2f}{1e3 * t_jit:>12.2f}{t_np / t_jit:>10.2f}{rel_diff(o_np, o_jit):>15.1e}")


if __name__ == "__main__":
    main()
