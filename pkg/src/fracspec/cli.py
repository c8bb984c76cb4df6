"""Command-line front end: ``fracspec <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import math
import re
import sys
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import oracle as _oracle
from .grids import Family, make_grid
from .jacobi import JacobiParams
from .matrices import Kind, OperatorSpec, operator_matrix
from .radius import DEFAULT_ALPHAS, DEFAULT_AB_PAIRS, DEFAULT_N_LIST, Variant, radius_sweep, ratio_series
from .solvers import (
    FORCING_RULES,
    bagley_torvik_example,
    diffusion_example,
    example_grid,
    solve_bagley_torvik,
    solve_fractional_diffusion,
)


class UsageError(ValueError):
    pass


# ----------------------------------------------------------------------------
# output helpers


def fmt(v) -> str:
    """Shortest round-trip text for floats, plain text otherwise."""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def emit_table(header: Sequence[str], rows: Iterable[Sequence], out=None, delimiter: str = ",") -> str:
    """Write a header row plus data rows; the header is written even with no rows."""
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if out is not None:
        Path(out).write_text(text, encoding="utf-8")
    return text


def matrix_to_csv(dm, delimiter: str = ",") -> str:
    g = dm.grid
    meta = (
        f"# kind={dm.spec.kind.value} alpha={fmt(float(dm.spec.alpha))} a={fmt(float(g.params.a))} "
        f"b={fmt(float(g.params.b))} N={g.N} x_a={fmt(float(g.x_a))} x_b={fmt(float(g.x_b))}\n"
    )
    lines = [delimiter.join(f"{v:.17g}" for v in row) for row in dm.entries]
    return meta + "\n".join(lines) + "\n"


def read_matrix_csv(text: str, delimiter: str = ",") -> tuple[dict, np.ndarray]:
    first, *rest = text.splitlines()
    if not first.startswith("#"):
        raise ValueError("missing matrix header line")
    meta = dict(item.split("=", 1) for item in first[1:].split())
    rows = [[float(v) for v in line.split(delimiter)] for line in rest if line]
    return meta, np.array(rows)


# ----------------------------------------------------------------------------
# flag parsing


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _pair(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return vals[0], vals[1]


def _pairs(text: str) -> list[tuple[float, float]]:
    return [_pair(chunk) for chunk in text.split(";") if chunk.strip()]


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise UsageError(message)


def _check_ab(ab: tuple[float, float]) -> None:
    _require(ab[0] > -1 and ab[1] > -1, f"--ab needs a > -1 and b > -1, got {ab}")


def _delimiter(args) -> str:
    return "\t" if getattr(args, "format", "csv") == "tsv" else ","


def _write(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------------
# subcommands


def _validate_operator(args) -> OperatorSpec:
    _check_ab(args.ab)
    _require(args.n >= 2, f"--n must be at least 2, got {args.n}")
    _require(args.interval[1] > args.interval[0], f"--interval needs x_a < x_b, got {args.interval}")
    try:
        return OperatorSpec(Kind(args.kind), args.alpha)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_matrix(args) -> int:
    spec = _validate_operator(args)
    grid = make_grid(JacobiParams(*args.ab), args.n, Family(args.family), tuple(args.interval))
    _write(matrix_to_csv(operator_matrix(grid, spec), _delimiter(args)), args.out)
    return 0


def cmd_apply(args) -> int:
    spec = _validate_operator(args)
    try:
        f = _oracle.named_function(args.function)
    except KeyError as exc:
        raise UsageError(str(exc)) from exc
    grid = make_grid(JacobiParams(*args.ab), args.n, Family(args.family), tuple(args.interval))
    dm = operator_matrix(grid, spec)
    x = grid.physical_nodes
    vals = dm.apply(f(x))
    rows_idx = dm.valid_rows
    header = ["x", "value"]
    ref = None
    if args.oracle:
        # Riemann-Liouville values are infinite at the lower limits
        singular = spec.kind in (Kind.RL_L, Kind.RL_R, Kind.RIESZ)
        inside = [i for i in rows_idx if not singular or grid.x_a < x[i] < grid.x_b]
        rows_idx = np.array(inside, dtype=int)
        req = _oracle.OracleRequest(spec, f, tuple(args.interval), x[rows_idx])
        ref = _oracle.oracle_eval(req)
        header += ["oracle", "abs_error"]
    rows = []
    for n, i in enumerate(rows_idx):
        row = [float(x[i]), float(vals[i])]
        if ref is not None:
            row += [float(ref[n]), abs(float(vals[i]) - float(ref[n]))]
        rows.append(row)
    _write(emit_table(header, rows, delimiter=_delimiter(args)), args.out)
    return 0


def cmd_radius(args) -> int:
    for v in args.variants:
        _require(v in Variant.__members__, f"unknown variant {v!r}; choose from {list(Variant.__members__)}")
    for al in args.alphas:
        _require(0 < al <= 2, f"--alphas entries must lie in (0, 2], got {al}")
    for ab in args.ab_pairs:
        _check_ab(ab)
    for N in args.n_list:
        _require(N >= 3, f"--n-list entries must be at least 3, got {N}")
    records = radius_sweep(args.variants, args.alphas, args.ab_pairs, args.n_list, threads=args.threads)
    header = ["variant", "alpha", "a", "b", "N", "rho", "ratio"]
    _write(emit_table(header, [r.row() for r in records], delimiter=_delimiter(args)), args.out)
    for r in records:
        if r.error:
            print(f"warning: {r.variant} alpha={r.alpha} ab=({r.a},{r.b}) N={r.N}: {r.error}", file=sys.stderr)
    return 0


def _bt_validate(args) -> None:
    _require(1 < args.alpha < 2, f"--alpha must lie in (1, 2), got {args.alpha}")
    _check_ab(args.ab)
    _require(args.n >= 4, f"--n must be at least 4, got {args.n}")


def cmd_bagley_torvik(args) -> int:
    _bt_validate(args)
    p = bagley_torvik_example(args.w, args.alpha, args.mode)
    rep = solve_bagley_torvik(p, example_grid(*args.ab, args.n))
    exact = p.exact(rep.x)
    rows = [[float(xi), float(ui), float(ei), abs(float(ui - ei))] for xi, ui, ei in zip(rep.x, rep.u, exact)]
    if args.out:
        emit_table(["x", "u", "exact", "abs_error"], rows, args.out, _delimiter(args))
    print(f"N={args.n} alpha={fmt(args.alpha)} w={fmt(args.w)} mode={args.mode} max_abs_error={rep.error:.4e}")
    return 0


def cmd_diffusion(args) -> int:
    _require(1 < args.alpha < 2, f"--alpha must lie in (1, 2), got {args.alpha}")
    _check_ab(args.ab)
    _require(args.n >= 2, f"--n must be at least 2, got {args.n}")
    _require(args.tau > 0, f"--tau must be positive, got {args.tau}")
    _require(args.t_final > 0, f"--t-final must be positive, got {args.t_final}")
    p = diffusion_example(args.alpha, args.tau, args.t_final, forcing=args.forcing)
    rep = solve_fractional_diffusion(p, example_grid(*args.ab, args.n))
    exact = p.exact(rep.x, args.t_final)
    rows = [[float(xi), float(ui), float(ei), abs(float(ui - ei))] for xi, ui, ei in zip(rep.x, rep.u, exact)]
    if args.out:
        emit_table(["x", "u", "exact", "abs_error"], rows, args.out, _delimiter(args))
    print(f"N={args.n} alpha={fmt(args.alpha)} t={fmt(args.t_final)} max_abs_error={rep.error:.4e}")
    return 0


# ----------------------------------------------------------------------------
# table and figure reproduction

IVP_N = (4, 8, 16, 32, 48, 64)
BVP_N = (8, 12, 16, 20, 24, 28)
BVP_ALPHAS = (1.1, 1.25, 1.4, 1.6, 1.75, 1.9)
DIFFUSION_ALPHAS = (1.1, 1.3, 1.5, 1.7, 1.9)
FIGURE_AB = {"fig1": (0.0, 0.0), "fig2": (-0.5, -0.5), "fig3": (-0.5, 0.5)}


def table_ivp(ab: tuple[float, float]) -> tuple[list[str], list[list]]:
    header = ["N", "error_w=1", "error_w=4pi"]
    rows = []
    for N in IVP_N:
        errs = [solve_bagley_torvik(bagley_torvik_example(w, 1.5, "ivp"), example_grid(*ab, N)).error for w in (1.0, 4 * math.pi)]
        rows.append([N, *errs])
    return header, rows


def table_bvp(ab: tuple[float, float]) -> tuple[list[str], list[list]]:
    header = ["N"] + [f"alpha={al}" for al in BVP_ALPHAS]
    rows = []
    for N in BVP_N:
        grid = example_grid(*ab, N)
        rows.append([N] + [solve_bagley_torvik(bagley_torvik_example(4 * math.pi, al, "bvp"), grid).error for al in BVP_ALPHAS])
    return header, rows


def table_diffusion(forcing: str = "midpoint", tau: float = 1e-2, T: float = 10.0) -> tuple[list[str], list[list]]:
    header = ["a", "b"] + [f"alpha={al}" for al in DIFFUSION_ALPHAS]
    rows = []
    for ab in DEFAULT_AB_PAIRS:
        grid = example_grid(*ab, 4)
        errs = [solve_fractional_diffusion(diffusion_example(al, tau, T, forcing=forcing), grid).error for al in DIFFUSION_ALPHAS]
        rows.append([*ab, *errs])
    return header, rows


TABLES = {
    "tb1-1": lambda: table_ivp((0.0, 0.0)),
    "tb1-2": lambda: table_ivp((-0.5, -0.5)),
    "tb1-3": lambda: table_bvp((0.0, 0.0)),
    "tb1-4": lambda: table_bvp((-0.5, -0.5)),
    "tb2-1": table_diffusion,
}


def figure_data(ab: tuple[float, float], n_list=DEFAULT_N_LIST, threads: int | None = None):
    records = radius_sweep(tuple(Variant), DEFAULT_ALPHAS, [ab], n_list, threads=threads)
    rows = []
    for (variant, alpha, _a, _b), series in ratio_series(records).items():
        rows += [[variant, alpha, N, ratio] for N, ratio in series]
    return ["variant", "alpha", "N", "ratio"], rows


GNUPLOT_TEMPLATE = """set datafile separator ','
set logscale x
set xlabel 'N'
set ylabel 'rho / N^(2 alpha)'
set key outside
do for [v in "CL CR RLL RLR RC RZ"] {{
  set title sprintf('%s  (a,b)=({a},{b})', v)
  plot for [al in "1.1 1.3 1.5 1.7 1.9"] '{data}' using ((strcol(1) eq v && strcol(2) eq al) ? $3 : 1/0):4 with linespoints title 'alpha='.al
  pause -1
}}
"""


def cmd_reproduce(args) -> int:
    only = args.only or list(TABLES)
    for name in only:
        _require(name in TABLES or name in FIGURE_AB, f"unknown table {name!r}; choose from {list(TABLES) + list(FIGURE_AB)}")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in only:
        if name in TABLES:
            header, rows = TABLES[name]()
            emit_table(header, rows, out_dir / f"{name}.csv", _delimiter(args))
            print(f"wrote {out_dir / (name + '.csv')}")
    figures = [n for n in only if n in FIGURE_AB]
    if args.figure_data:
        figures = list(FIGURE_AB)
    for name in figures:
        ab = FIGURE_AB[name]
        header, rows = figure_data(ab, threads=args.threads)
        path = out_dir / f"{name}.csv"
        emit_table(header, rows, path, _delimiter(args))
        print(f"wrote {path}")
        if args.gnuplot:
            (out_dir / f"{name}.gp").write_text(GNUPLOT_TEMPLATE.format(a=ab[0], b=ab[1], data=path.name), encoding="utf-8")
    return 0


# ----------------------------------------------------------------------------


def _operator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", required=True, choices=[k.value for k in Kind])
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--ab", type=_pair, default=(0.0, 0.0), help="Jacobi exponents a,b")
    p.add_argument("--n", type=int, required=True, help="polynomial degree N")
    p.add_argument("--interval", type=_pair, default=(-1.0, 1.0), help="x_a,x_b")
    p.add_argument("--family", choices=[f.value for f in Family], default=Family.LOBATTO.value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracspec", description="Fractional spectral collocation toolkit")
    parser.add_argument("--format", choices=("csv", "tsv"), default="csv")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("matrix", help="export an operator matrix")
    _operator_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("apply", help="apply an operator matrix to a named function")
    _operator_flags(p)
    p.add_argument("--function", default="x+1", help="one, x, x+1, 1-x, sin, sin4pi, bump, sin:<w>, poly:<c0>,<c1>,...")
    p.add_argument("--oracle", action="store_true", help="also print reference values")
    p.add_argument("--out")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("radius", help="spectral radius sweep")
    p.add_argument("--variants", type=lambda s: [v.strip() for v in s.split(",") if v.strip()], default=[v.value for v in Variant])
    p.add_argument("--alphas", type=_floats, default=list(DEFAULT_ALPHAS))
    p.add_argument("--ab-pairs", type=_pairs, default=list(DEFAULT_AB_PAIRS), help="a,b;a,b;...")
    p.add_argument("--n-list", type=_ints, default=list(DEFAULT_N_LIST))
    p.add_argument("--threads", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_radius)

    p = sub.add_parser("bagley-torvik", help="solve the manufactured Bagley-Torvik problem")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--w", type=float, default=1.0)
    p.add_argument("--ab", type=_pair, default=(0.0, 0.0))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=("ivp", "bvp"), default="ivp")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bagley_torvik)

    p = sub.add_parser("diffusion", help="solve the manufactured Riesz diffusion problem")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--ab", type=_pair, default=(0.0, 0.0))
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--tau", type=float, default=1e-2)
    p.add_argument("--t-final", type=float, default=10.0)
    p.add_argument("--forcing", choices=FORCING_RULES, default="trapezoidal")
    p.add_argument("--out")
    p.set_defaults(func=cmd_diffusion)

    p = sub.add_parser("reproduce", help="regenerate the error tables and figure data")
    p.add_argument("--out-dir", default="reproduction")
    p.add_argument("--only", type=lambda s: [v.strip() for v in s.split(",") if v.strip()])
    p.add_argument("--figure-data", action="store_true", help="also emit radius series for all figures")
    p.add_argument("--gnuplot", action="store_true", help="write a gnuplot script next to each figure file")
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_reproduce)
    return parser


_NEGATIVE_VALUE = re.compile(r"^-[0-9.]")


def _join_negative_values(argv: Sequence[str]) -> list[str]:
    """Turn ``--ab -0.5,0.5`` into ``--ab=-0.5,0.5`` so argparse does not read it as a flag."""
    out: list[str] = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NEGATIVE_VALUE.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = _join_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "threads", None) is not None and args.threads < 1:
        print("error: --threads must be a positive integer", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
