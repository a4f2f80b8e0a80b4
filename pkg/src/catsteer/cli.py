"""``catsteer`` command line: distribution tables, figure data, witnesses, scans, sampling.

Exit codes: 0 success, 2 usage error, 3 numerical-validity error (grid too
coarse for the fringes, no signature to locate).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .analytic_cat import (
    CatState,
    ElementOfRealityState,
    QuadratureGrid,
    check_fringe_resolution,
    cond_density,
    default_p_grid,
    default_x_grid,
    element_of_reality_predictions,
    fig2_density_grid,
    fig2_grids,
    steering_report,
)
from .coarse_grain import coarse_inference_variances, critical_delta, critical_delta_closed_form
from .errors import GridResolutionError, NoSignatureError
from .ghz_sim import ghz_steering_witness
from .mc_sampler import (
    COHERENT_PLAN,
    SampleConfig,
    estimate_witness,
    ghz_plan,
    sample_coherent_cat,
    sample_ghz,
)
from .steering import QUADRATURE_BOUND, falsifiability_2b, product_witness

EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


def fmt(value) -> str:
    """Round-trip decimal text, locale independent."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _json_default(o):
    if dataclasses.is_dataclass(o):
        return dataclasses.asdict(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(type(o))


def to_json(obj) -> str:
    return json.dumps(obj, default=_json_default, indent=2, sort_keys=False) + "\n"


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def manifest(args: argparse.Namespace, seed=None) -> dict:
    params = {k: v for k, v in vars(args).items() if k not in ("func",)}
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    ts = datetime.fromtimestamp(int(epoch) if epoch else time.time(), tz=timezone.utc)
    return {
        "command": args.command,
        "parameters": params,
        "seed": seed,
        "tool_version": __version__,
        "timestamp": ts.isoformat(),
    }


def emit(args, text: str, out: str | None, seed=None) -> None:
    """Write ``text`` to ``out`` with a sidecar manifest, or to stdout."""
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    write_atomic(path, text)
    write_atomic(path.with_name(path.name + ".manifest.json"), to_json(manifest(args, seed)))


def _threads() -> int | None:
    raw = os.environ.get("CATSTEER_THREADS")
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"CATSTEER_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("CATSTEER_THREADS must be >= 1")
    return n


def _parse_outcome(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"outcome must be +1 or -1, got {text!r}") from None
    if v not in (1, -1):
        raise argparse.ArgumentTypeError(f"outcome must be +1 or -1, got {text!r}")
    return v


def _parse_grid(text: str) -> QuadratureGrid:
    try:
        return QuadratureGrid.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
    return v


def _nonneg_float(text: str) -> float:
    v = float(text)
    if not (math.isfinite(v) and v >= 0):
        raise argparse.ArgumentTypeError(f"must be a non-negative number, got {text!r}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text!r}")
    return v


def _alphas(text: str) -> list[float]:
    try:
        vals = [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad alpha list {text!r}") from None
    if not vals or any(v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("alphas must be positive")
    return vals


# -- commands ---------------------------------------------------------------


def cmd_dist(args) -> None:
    cat = CatState(args.alpha)
    setting, basis = args.setting.upper(), args.basis.upper()
    if args.grid is not None:
        grid = args.grid
    else:
        grid = default_p_grid(cat) if basis == "P" else default_x_grid(cat)
    if (setting, basis) == ("X", "P"):
        check_fringe_resolution(grid, cat.alpha)
    coord = grid.points
    dens = np.atleast_1d(cond_density(cat, setting, args.outcome, basis, coord))
    name = basis.lower()
    if args.format == "json":
        text = to_json({
            "alpha": cat.alpha, "setting": setting, "outcome": args.outcome, "basis": basis,
            name: coord.tolist(), "density": dens.tolist(),
        })
    else:
        text = to_csv([name, "density"], zip(coord, dens))
    emit(args, text, args.out)


def cmd_fig1(args) -> None:
    cat = CatState(args.alpha)
    outdir = Path(args.out)
    for eor in ElementOfRealityState.all():
        dx, dp = element_of_reality_predictions(cat, eor)
        tag = f"lz{eor.lambda_z:+d}_lx{eor.lambda_x:+d}"
        for d, name in ((dx, "x"), (dp, "p")):
            emit(args, to_csv([name, "density"], zip(d.points, d.densities)),
                 str(outdir / f"fig1_alpha{fmt(cat.alpha)}_{tag}_{name}.csv"))


def cmd_fig2(args) -> None:
    outdir = Path(args.out)
    eor = ElementOfRealityState(args.lambda_z, args.lambda_x)
    for a in args.alphas:
        cat = CatState(a)
        gx, gp = fig2_grids(cat, eor)
        mat = fig2_density_grid(cat, eor, gx, gp)
        header = ["x\\p"] + [fmt(p) for p in gp.points]
        rows = ([x, *row] for x, row in zip(gx.points, mat))
        emit(args, to_csv(header, rows), str(outdir / f"fig2_alpha{fmt(a)}.csv"))


def cmd_steer(args) -> None:
    if args.realisation == "coherent":
        if args.alpha is None:
            raise UsageError("--alpha is required for the coherent realisation")
        report = steering_report(CatState(args.alpha))
    else:
        if args.n is None:
            raise UsageError("--n is required for the ghz realisation")
        if not 3 <= args.n <= 24:
            raise UsageError("--n must be in [3, 24]")
        report = ghz_steering_witness(args.n)
    d = report.to_dict()
    text = to_json(d) if args.format == "json" else to_csv(list(d), [list(d.values())])
    emit(args, text, args.out)


def cmd_delta_scan(args) -> None:
    cat = CatState(args.alpha)
    if args.find_critical:
        delta = critical_delta(cat, tol=args.tol)
        text = to_json({
            "alpha": cat.alpha,
            "critical_delta": delta,
            "closed_form": critical_delta_closed_form(cat.alpha),
            "tol": args.tol,
        })
        emit(args, text, args.out)
        return
    if args.delta is None:
        raise UsageError("give --delta min:max:step or --find-critical")
    deltas = [d for d in args.delta.points if d > 0]
    if not deltas:
        raise UsageError("delta range contains no positive widths")

    def row(d):
        v = coarse_inference_variances(cat, d)
        r = product_witness(v.var_inf_x, v.var_inf_p, QUADRATURE_BOUND)
        return d, v.var_inf_p, r.lhs, r.violated

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = list(pool.map(row, deltas))
    emit(args, to_csv(["delta", "var_inf_p", "product", "violated"], rows), args.out)


def cmd_falsifiability(args) -> None:
    ok = falsifiability_2b(args.Delta, args.delta, args.c)
    emit(args, to_json({"Delta": args.Delta, "delta": args.delta, "c": args.c, "signifiable": ok}),
         args.out)


def cmd_sample(args) -> None:
    if args.realisation == "coherent":
        if args.alpha is None:
            raise UsageError("--alpha is required for the coherent realisation")
        cfg = SampleConfig(args.shots, args.seed, COHERENT_PLAN)
        records = sample_coherent_cat(CatState(args.alpha), cfg)
        n_bob = None
    else:
        if args.n is None or not 3 <= args.n <= 24:
            raise UsageError("--n in [3, 24] is required for the ghz realisation")
        cfg = SampleConfig(args.shots, args.seed, ghz_plan(args.n))
        records = sample_ghz(args.n, cfg)
        n_bob = args.n - 1
    text = to_csv(
        ["alice_setting", "alice_outcome", "bob_observable", "bob_value"],
        ((r.alice_setting, r.alice_outcome, r.bob_observable, r.bob_value) for r in records),
    )
    report = to_json(estimate_witness(records, resamples=args.resamples, seed=args.seed,
                                      n_bob=n_bob).to_dict())
    if args.out is None:
        sys.stdout.write(text)
        sys.stdout.write(report)
        return
    emit(args, text, args.out, seed=args.seed)
    out = Path(args.out)
    emit(args, report, str(out.with_name(out.stem + ".estimate.json")), seed=args.seed)


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="catsteer", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dist", help="tabulate a conditional quadrature density")
    d.add_argument("--alpha", type=_nonneg_float, required=True)
    d.add_argument("--setting", choices=["z", "x"], required=True, help="Alice's spin setting")
    d.add_argument("--outcome", type=_parse_outcome, required=True)
    d.add_argument("--basis", choices=["x", "p"], required=True, help="Bob's quadrature")
    d.add_argument("--grid", type=_parse_grid, help="min:max:step (default: spans the density)")
    d.add_argument("--out")
    d.add_argument("--format", choices=["csv", "json"], default="csv")
    d.set_defaults(func=cmd_dist)

    f1 = sub.add_parser("fig1", help="X and P predictions of the four element-of-reality states")
    f1.add_argument("--alpha", type=_positive_float, default=2.0)
    f1.add_argument("--out", required=True, help="output directory")
    f1.set_defaults(func=cmd_fig1)

    f2 = sub.add_parser("fig2", help="joint X-P prediction matrices for one hidden state")
    f2.add_argument("--alphas", type=_alphas, default=[2.0, 10.0, 100.0])
    f2.add_argument("--lambda-z", type=_parse_outcome, default=1)
    f2.add_argument("--lambda-x", type=_parse_outcome, default=1)
    f2.add_argument("--out", required=True, help="output directory")
    f2.set_defaults(func=cmd_fig2)

    s = sub.add_parser("steer", help="evaluate a steering witness")
    s.add_argument("--realisation", choices=["coherent", "ghz"], required=True)
    s.add_argument("--alpha", type=_nonneg_float)
    s.add_argument("--n", type=int)
    s.add_argument("--out")
    s.add_argument("--format", choices=["json", "csv"], default="json")
    s.set_defaults(func=cmd_steer)

    ds = sub.add_parser("delta-scan", help="witness under P smearing, or the critical width")
    ds.add_argument("--alpha", type=_positive_float, required=True)
    ds.add_argument("--delta", type=_parse_grid, help="min:max:step of smearing widths")
    ds.add_argument("--find-critical", action="store_true")
    ds.add_argument("--tol", type=_positive_float, default=1e-10)
    ds.add_argument("--out")
    ds.set_defaults(func=cmd_delta_scan)

    fa = sub.add_parser("falsifiability", help="can the paradox be signified given Delta, delta, c")
    fa.add_argument("--Delta", type=_positive_float, required=True)
    fa.add_argument("--delta", type=_positive_float, required=True)
    fa.add_argument("--c", type=_positive_float, default=QUADRATURE_BOUND)
    fa.add_argument("--out")
    fa.set_defaults(func=cmd_falsifiability)

    sm = sub.add_parser("sample", help="simulate shots and estimate the witness")
    sm.add_argument("--realisation", choices=["coherent", "ghz"], required=True)
    sm.add_argument("--alpha", type=_nonneg_float)
    sm.add_argument("--n", type=int)
    sm.add_argument("--shots", type=_positive_int, required=True)
    sm.add_argument("--seed", type=int, default=0)
    sm.add_argument("--resamples", type=_positive_int, default=200)
    sm.add_argument("--out")
    sm.set_defaults(func=cmd_sample)
    return p


_VALUE_FLAGS = ("--grid", "--delta", "--alphas")


def _glue_values(argv: list[str]) -> list[str]:
    """Let ``--grid -5:5:0.01`` through; argparse would read ``-5:...`` as a flag."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _glue_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except (GridResolutionError, NoSignatureError) as exc:
        print(f"catsteer: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ValueError) as exc:
        print(f"catsteer: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
