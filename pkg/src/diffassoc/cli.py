"""Command-line interface: ``diffassoc {test,simulate,bench,qq}``.

Exit codes: 0 success, 2 invalid input or parameters, 3 dimension mismatch,
4 degenerate data.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, _hot
from .bench import estimates_to_csv, power_curve, qq_data, worker_cap
from .errors import DegenerateData, DegenerateError, DimensionError, InputError
from .inference import (
    PairedDataset,
    cauchy_combine,
    monte_carlo_permutation_pvalue,
    pooled_product_for,
    run_test,
)
from .simgen import SETTINGS, SimConfig, case4_dependent, generate

SCHEMA_VERSION = 1
EXIT_INPUT, EXIT_DIMENSION, EXIT_DEGENERATE = 2, 3, 4
DATA_FILES = ("XA", "YA", "XB", "YB")


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_matrix(path) -> np.ndarray:
    """Read a numeric CSV (rows = samples). A first row whose first cell is
    non-numeric is taken as a header and skipped."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from exc
    except UnicodeDecodeError as exc:
        raise InputError(f"{path}: not valid UTF-8") from exc
    start = 1 if rows and not _is_number(rows[0][0].strip()) else 0
    body = rows[start:]
    if not body:
        raise InputError(f"{path}: no data rows")
    width = len(body[0])
    values = np.empty((len(body), width))
    for i, row in enumerate(body):
        line = i + start + 1
        if len(row) != width:
            raise InputError(f"{path}: row {line} has {len(row)} columns, expected {width}")
        for j, cell in enumerate(row):
            cell = cell.strip()
            try:
                v = float(cell)
            except ValueError:
                raise InputError(f"{path}: row {line}, column {j + 1}: non-numeric value {cell!r}") from None
            if not math.isfinite(v):
                raise InputError(f"{path}: row {line}, column {j + 1}: non-finite value {cell!r}")
            values[i, j] = v
    return values


def write_matrix(path, values: np.ndarray, prefix: str) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"{prefix}{j + 1}" for j in range(values.shape[1])])
        for row in values:
            w.writerow([repr(float(v)) for v in row])


def _standardize(A: np.ndarray, B: np.ndarray, label: str):
    # Pooled column moments keep the transform independent of condition labels.
    pooled = np.vstack([A, B])
    mu = pooled.mean(axis=0)
    sd = pooled.std(axis=0, ddof=1)
    zero = np.flatnonzero(sd == 0)
    if zero.size:
        raise DegenerateData(f"{label}: column {zero[0] + 1} is constant; cannot standardize")
    return (A - mu) / sd, (B - mu) / sd


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _data_paths(args) -> list[Path]:
    if args.dir:
        if args.files:
            raise InputError("give either four CSV files or --dir, not both")
        return [Path(args.dir) / f"{name}.csv" for name in DATA_FILES]
    if len(args.files) != 4:
        raise InputError("expected four CSV files: XA YA XB YB (or --dir)")
    return [Path(f) for f in args.files]


def cmd_test(args) -> int:
    paths = _data_paths(args)
    mats = [read_matrix(p) for p in paths]
    try:
        ds = PairedDataset(*mats, {"files": [str(p) for p in paths]})
    except DimensionError as exc:
        names = ", ".join(f"{k}={p}" for k, p in zip(DATA_FILES, paths))
        raise type(exc)(f"{exc} ({names})") from None
    if args.standardize:
        ds.XA, ds.XB = _standardize(ds.XA, ds.XB, "X")
        ds.YA, ds.YB = _standardize(ds.YA, ds.YB, "Y")
    res = run_test(ds, args.bandwidth_x, args.bandwidth_y)
    kernels = {}
    for kind in ("gaussian", "linear"):
        kr = getattr(res, kind)
        kernels[kind] = {"statistic": kr.t_tilde, "variance": kr.variance, "z": kr.z, "p": kr.p}
    report = {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "m": ds.m,
        "n": ds.n,
        "p": ds.XA.shape[1],
        "q": ds.YA.shape[1],
        "alpha": args.alpha,
        "standardized": bool(args.standardize),
        "kernels": kernels,
        "p_omnibus": res.p_omnibus,
        "decision": "reject" if res.p_omnibus <= args.alpha else "fail to reject",
        "bandwidths": res.bandwidths,
        "hsic": res.hsic_report,
        "files": [str(p) for p in paths],
    }
    if args.perm:
        perm_p = {}
        for i, kind in enumerate(("gaussian", "linear")):
            P = pooled_product_for(ds, kind, args.bandwidth_x, args.bandwidth_y)[0]
            perm_p[kind] = monte_carlo_permutation_pvalue(P, args.perm, [args.seed, i])
        report["permutation"] = {
            "replicates": args.perm,
            "seed": args.seed,
            "p": perm_p,
            "p_omnibus": cauchy_combine(perm_p["gaussian"], perm_p["linear"]),
        }
    _emit(json.dumps(report, indent=2) + "\n", args.output)
    return 0


def _sim_config(args, rho=None) -> SimConfig:
    return SimConfig(
        setting=args.setting,
        rho=args.rho if rho is None else rho,
        m=args.m,
        n=args.n,
        p=args.p,
        q=args.q,
        seed=args.seed,
    )


def cmd_simulate(args) -> int:
    cfg = _sim_config(args)
    ds = generate(cfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, mat, prefix in zip(DATA_FILES, (ds.XA, ds.YA, ds.XB, ds.YB), "xyxy"):
        write_matrix(out / f"{name}.csv", mat, prefix)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "config": cfg.to_dict(),
        "rng": "numpy PCG64 via SeedSequence(seed), ziggurat normals",
        "files": {name: f"{name}.csv" for name in DATA_FILES},
    }
    if cfg.setting == "s2-case4":
        a, b = case4_dependent(cfg.rho)
        manifest["dependent_coordinates"] = {"YA": a, "YB": b}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return 0


def _parse_grid(text: str) -> list[float]:
    try:
        grid = [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise InputError(f"invalid rho grid {text!r}") from None
    if not grid:
        raise InputError("rho grid is empty")
    return grid


def cmd_bench(args) -> int:
    grid = _parse_grid(args.rho_grid)
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    cfg = _sim_config(args, rho=grid[0])
    t0 = time.perf_counter()
    estimates = power_curve(
        cfg, grid, args.replicates, args.alpha, methods, args.jobs, args.dcoxs_perms
    )
    _emit(estimates_to_csv(estimates), args.output)
    if args.manifest:
        manifest = {
            "schema_version": SCHEMA_VERSION,
            "version": __version__,
            "config": cfg.to_dict(),
            "rho_grid": grid,
            "replicates": args.replicates,
            "alpha": args.alpha,
            "methods": list(methods),
            "dcoxs_perms": args.dcoxs_perms,
            "workers": worker_cap(args.jobs),
            "backend": _hot.backend(),
            "wall_time": time.perf_counter() - t0,
            "wall_time_per_rho": {repr(e.rho): e.wall_time for e in estimates},
        }
        Path(args.manifest).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_qq(args) -> int:
    if args.n < 4:
        raise InputError("--n must be >= 4")
    m = args.n // 2
    cfg = SimConfig(setting=args.setting, rho=0.0, m=m, n=args.n - m, p=args.p, q=args.q, seed=args.seed)
    theo, z = qq_data(cfg, args.perms, args.kernel)
    lines = ["theoretical,observed\n"]
    lines += [f"{t!r},{o!r}\n" for t, o in zip(theo.tolist(), z.tolist())]
    _emit("".join(lines), args.output)
    return 0


def _positive(text: str) -> float:
    v = float(text)
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text}")
    return v


def _probability(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"must be in [0, 1], got {text}")
    return v


def _count(minimum: int):
    def parse(text: str) -> int:
        v = int(text)
        if v < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {text}")
        return v

    return parse


def _add_sim_args(p: argparse.ArgumentParser, rho: bool = True) -> None:
    p.add_argument("--setting", choices=SETTINGS, default="s1-normal")
    if rho:
        p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--m", type=_count(2), default=100, help="condition-A sample count")
    p.add_argument("--n", type=_count(2), default=100, help="condition-B sample count")
    p.add_argument("--p", type=_count(1), default=50, help="X dimension")
    p.add_argument("--q", type=_count(1), default=50, help="Y dimension")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diffassoc",
        description="Kernel test for differential association of X and Y between two conditions.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="run the test on four CSV files (XA YA XB YB)")
    t.add_argument("files", nargs="*", help="XA.csv YA.csv XB.csv YB.csv")
    t.add_argument("--dir", help="directory holding XA.csv, YA.csv, XB.csv, YB.csv")
    t.add_argument("--alpha", type=_probability, default=0.05)
    t.add_argument("--bandwidth-x", type=_positive, default=None)
    t.add_argument("--bandwidth-y", type=_positive, default=None)
    t.add_argument("--standardize", action="store_true", help="z-score columns on pooled data")
    t.add_argument("--perm", type=_count(1), default=None, metavar="B",
                   help="also report Monte Carlo permutation p-values from B relabelings")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("-o", "--output", help="write JSON here instead of stdout")
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("simulate", help="write a simulated dataset")
    _add_sim_args(s)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bench", help="Monte Carlo size/power table")
    _add_sim_args(b, rho=False)
    b.add_argument("--rho-grid", required=True, help="comma-separated rho values")
    b.add_argument("--replicates", type=_count(1), default=1000)
    b.add_argument("--alpha", type=_probability, default=0.05)
    b.add_argument("--methods", default="new,dcoxs")
    b.add_argument("--dcoxs-perms", type=_count(1), default=999)
    b.add_argument("--jobs", type=int, default=0, help="worker processes (0 = all cores)")
    b.add_argument("-o", "--output", help="write CSV here instead of stdout")
    b.add_argument("--manifest", help="write a JSON run manifest here")
    b.set_defaults(func=cmd_bench)

    q = sub.add_parser("qq", help="Q-Q pairs of permutation z-scores under the null")
    q.add_argument("--setting", choices=SETTINGS, default="s1-normal")
    q.add_argument("--n", type=int, default=200, help="total sample count, split evenly")
    q.add_argument("--p", type=_count(1), default=50)
    q.add_argument("--q", type=_count(1), default=50)
    q.add_argument("--perms", type=_count(100), default=10_000)
    q.add_argument("--kernel", choices=("gaussian", "linear"), default="gaussian")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("-o", "--output", help="write CSV here instead of stdout")
    q.set_defaults(func=cmd_qq)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DimensionError as exc:
        print(f"dimension mismatch: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except DegenerateError as exc:
        print(f"degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
