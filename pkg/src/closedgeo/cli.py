"""Command line front end: build class tables and run the experiments on them.

Exit codes: 0 success, 1 computation or I/O error, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from pathlib import Path
from typing import List, Optional

from . import kernels
from .enumerator import (
    DEFAULT_CAP,
    DEFAULT_SLACK,
    build_class_table,
    default_B,
    enumerate_ball,
    load_table,
    save_table,
)
from .errors import GeodesicError
from .periods import (
    A1_series,
    A2_series,
    E_derivative,
    E_series,
    HarmonicForm,
    partial_product_log_derivative,
    zeta_log_deriv_direct,
    zeta_partial_product,
)
from .statistics import (
    HIST_BINS,
    N_MAX,
    distribution_report,
    dumps_json,
    export_class_csv,
    export_histogram_csv,
    effective_norm_sq,
    pgt_check,
    stats_report,
)
from .surface import bolza

CACHE_ENV = "GEODESIC_CACHE_DIR"


class UsageError(Exception):
    pass


def cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "closedgeo"


def default_table_path(group: str = "bolza") -> Path:
    return cache_dir() / f"classes-{group}.csv"


def parse_grid_token(tok: str) -> float:
    """'e10' means e^10; anything else is a literal float."""
    tok = tok.strip()
    try:
        if tok[:1] in ("e", "E"):
            return math.exp(float(tok[1:]))
        return float(tok)
    except ValueError:
        raise UsageError(f"bad grid token {tok!r}") from None


def parse_grid(text: str) -> List[float]:
    vals = [parse_grid_token(t) for t in text.split(",") if t.strip()]
    if not vals:
        raise UsageError("empty grid")
    return vals


def parse_form(text: str, genus: int = 2) -> HarmonicForm:
    try:
        p = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"bad --form {text!r}") from None
    if len(p) != 2 * genus:
        raise UsageError(f"--form needs {2 * genus} periods, got {len(p)}")
    try:
        return HarmonicForm(p)
    except ValueError as exc:
        raise UsageError(f"--form rejected: {exc}") from None


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"bad --s {text!r}") from None


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return v
    return conv


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(args):
    path = args.classes or default_table_path(args.group)
    table = load_table(path)
    if table.group_name != args.group:
        raise UsageError(f"{path} holds group {table.group_name!r}, not {args.group!r}")
    return table


# -- commands --------------------------------------------------------------------

def cmd_build(args) -> int:
    if args.group != "bolza":
        raise UsageError(f"unknown group {args.group!r}")
    out = Path(args.out) if args.out else default_table_path(args.group)
    t0 = time.perf_counter()
    group = bolza()
    slack = DEFAULT_SLACK if args.slack is None else args.slack
    elems = enumerate_ball(group, args.x_max, default_B(group, slack), args.cap)
    table = build_class_table(elems, args.x_max, slack)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_table(table, out)
    wall = time.perf_counter() - t0
    if not table.classes:
        print(f"warning: x_max = {args.x_max:g} is below the systole "
              f"{group.systole:.6f}; the class list is empty", file=sys.stderr)
    prim = len(table.primitives())
    print(f"elements      {len(elems)}")
    print(f"classes       {len(table)} ({prim} primitive)")
    print(f"min length    {table.min_length():.10f}")
    print(f"wall time     {wall:.2f} s  [{kernels.BACKEND} kernels]")
    print(f"written       {out}")
    return 0


def cmd_stats(args) -> int:
    f = parse_form(args.form)
    table = _load(args)
    grid = parse_grid(args.grid) if args.grid else _default_T_grid(table.x_max)
    for T in grid:
        if not T > 1:
            raise UsageError(f"grid value {T!r} must exceed 1")
    if args.n_max < 2:
        raise UsageError("--n-max must be at least 2")
    if args.norm_sq is not None and not args.norm_sq > 0:
        raise UsageError("--norm-sq must be positive")
    primitive_only = not args.all_classes
    rep = stats_report(table, f, grid, args.n_max, args.bins, primitive_only, args.norm_sq)
    rep["effective_norm_sq"] = effective_norm_sq(table, f, max(grid))
    rep["threads"] = args.threads
    _emit(dumps_json(rep), args.out)
    if args.out:
        base = Path(args.out).with_suffix("")
        dist = distribution_report(table, f, grid, args.bins, primitive_only, args.norm_sq)
        export_histogram_csv(dist, f"{base}.histogram.csv")
        export_class_csv(table, f, f"{base}.classes.csv",
                         args.norm_sq or rep["moments"]["norm_sq"])
    return 0


def _default_T_grid(x_max: float) -> List[float]:
    top = math.floor(x_max)
    return [math.exp(k) for k in sorted({min(8, top), min(10, top), top})]


def _series(v):
    d = v.to_dict()
    if v.divergent:
        d["error"] = "DivergentRegion"
    return d


def cmd_zeta(args) -> int:
    f = parse_form(args.form)
    table = _load(args)
    s = parse_complex(args.s)
    eps = args.eps
    n_top = 4 if args.deriv is None else args.deriv
    if n_top < 0:
        raise UsageError("--deriv must be non-negative")
    if args.m_max < 1 or args.terms_k < 0:
        raise UsageError("--m-max must be positive and --terms-k non-negative")
    E = E_series(s, eps, table, f)
    A1 = A1_series(s, eps, table, f)
    A2 = A2_series(s, eps, table, f)
    direct = zeta_log_deriv_direct(s, eps, table, f, args.m_max)
    prod = zeta_partial_product(s, eps, table, f, args.terms_k)
    rep = {
        "group": table.group_name,
        "x_max": table.x_max,
        "form": {"periods": list(f.periods)},
        "s": {"re": s.real, "im": s.imag},
        "eps": eps,
        "E": _series(E),
        "E_derivatives": {str(n): _series(E_derivative(n, s, table, f))
                          for n in range(n_top + 1)},
        "A1": _series(A1),
        "A2": _series(A2),
        "log_derivative_direct": _series(direct),
        "partial_product": _series(prod),
    }
    if not (E.divergent or A1.divergent or A2.divergent or direct.divergent):
        res = abs(E.value + A1.value + A2.value - direct.value)
        num = partial_product_log_derivative(s, eps, table, f, args.terms_k)
        rep["splitting_residual"] = res
        rep["product_log_derivative"] = {"re": num.real, "im": num.imag,
                                         "abs_diff": abs(num - direct.value)}
    else:
        rep["splitting_residual"] = None
    _emit(dumps_json(rep), args.out)
    return 0


def cmd_pgt(args) -> int:
    table = _load(args)
    grid = [float(v) for v in parse_grid(args.grid)] if args.grid else \
        [float(k) for k in sorted({min(8, int(table.x_max)), min(10, int(table.x_max)),
                                   int(table.x_max)})]
    rows = pgt_check(table, grid)
    print(f"{'x':>8} {'pi(x)':>10} {'e^x/x':>14} {'ratio':>8}")
    for x, pi, li, r in rows:
        print(f"{x:8.3f} {pi:10d} {li:14.3f} {r:8.4f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("x,pi,li,ratio\n")
            for x, pi, li, r in rows:
                fh.write(f"{x:.17g},{pi},{li:.17g},{r:.17g}\n")
    return 0


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="closedgeo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--group", default="bolza", choices=["bolza"])
        sp.add_argument("--threads", type=_positive(int), default=os.cpu_count() or 1,
                        help="accepted for compatibility; kernels run sequentially")

    b = sub.add_parser("build", help="enumerate classes with l <= x_max and save them")
    common(b)
    b.add_argument("--x-max", type=_positive(float), required=True)
    b.add_argument("--slack", type=float, default=None,
                   help=f"added to the octagon circumradius (default {DEFAULT_SLACK})")
    b.add_argument("--cap", type=_positive(int), default=DEFAULT_CAP)
    b.add_argument("--out", help=f"table path (default ${CACHE_ENV}/classes-<group>.csv)")
    b.set_defaults(func=cmd_build)

    s = sub.add_parser("stats", help="moments, KS distances and PGT counts as JSON")
    common(s)
    s.add_argument("--classes")
    s.add_argument("--form", required=True, help="periods, e.g. 1,0.3,-0.7,0.2")
    s.add_argument("--grid", help="T values; eK means e^K (default e8,e10,e<x_max>)")
    s.add_argument("--n-max", type=int, default=N_MAX)
    s.add_argument("--bins", type=_positive(int), default=HIST_BINS)
    s.add_argument("--all-classes", action="store_true",
                   help="sum over all classes instead of primitive ones")
    s.add_argument("--norm-sq", type=float, default=None,
                   help="|alpha|^2 (default: calibrated from the table)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_stats)

    z = sub.add_parser("zeta", help="twisted Selberg zeta series at (s, eps)")
    common(z)
    z.add_argument("--classes")
    z.add_argument("--form", required=True)
    z.add_argument("--s", default="2")
    z.add_argument("--eps", type=float, default=0.0)
    z.add_argument("--deriv", type=int, default=None, help="highest E derivative (default 4)")
    z.add_argument("--terms-k", type=int, default=60, help="k range of the partial product")
    z.add_argument("--m-max", type=int, default=30, help="power range of the direct sum")
    z.add_argument("--out")
    z.set_defaults(func=cmd_zeta)

    g = sub.add_parser("pgt", help="prime geodesic counts against e^x/x")
    common(g)
    g.add_argument("--classes")
    g.add_argument("--grid", help="x values (default 8,10,x_max)")
    g.add_argument("--out", help="CSV output")
    g.set_defaults(func=cmd_pgt)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GeodesicError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
