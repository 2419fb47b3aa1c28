"""Command-line front end: ``fracspec <subcommand> [flags]``.

Every numeric flag accepts pi literals (``pi``, ``2pi``, ``pi/2``, ``3*pi/4``).
``--config FILE`` reads ``key = value`` lines with the same names as the flags;
flags given on the command line win.  ``FRACSPEC_THREADS`` sets the default
worker count.  Exit status: 0 success, 1 failed verification, 2 bad input.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import re
import sys

import numpy as np

from . import __version__
from .errors import ConvergenceError, DomainError, IncompleteSpectrumError, ResourceLimitError
from .spectrum import CSV_VERSION, SpectralParams, counting_function, eigenvalue_sum, enumerate_below, enumerate_smallest

_PI_RE = re.compile(r"^\s*([+-]?)\s*((?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


def parse_number(text) -> float:
    """Float parser that also understands ``pi`` multiples and fractions."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _PI_RE.match(str(text))
    if m:
        sign, coef, den = m.groups()
        val = float(sign + (coef or "1")) * math.pi
        if den:
            val /= float(den)
        return val
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def parse_list(text):
    """``a,b,c`` or ``geom:lo:hi:n`` / ``lin:lo:hi:n``."""
    text = str(text).strip()
    if text.startswith(("geom:", "lin:")):
        kind, lo, hi, n = text.split(":")
        lo, hi, n = parse_number(lo), parse_number(hi), int(n)
        if n < 1:
            raise argparse.ArgumentTypeError("grid needs at least one point")
        f = np.geomspace if kind == "geom" else np.linspace
        return [float(x) for x in f(lo, hi, n)]
    return [parse_number(x) for x in text.split(",") if x.strip()]


def _default_workers():
    env = os.environ.get("FRACSPEC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# output helpers


def _emit(args, text: str):
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _rows_out(args, kind, header, rows):
    if args.format == "json":
        recs = [dict(zip(header, r)) for r in rows]
        return json.dumps({"format": CSV_VERSION, "kind": kind, "rows": recs},
                          indent=1, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write(f"# {CSV_VERSION} {kind}\n")
    buf.write(",".join(header) + "\n")
    for r in rows:
        buf.write(",".join(x if isinstance(x, str) else repr(x) for x in r) + "\n")
    return buf.getvalue()


def _params(args) -> SpectralParams:
    return SpectralParams(args.d, args.s, L=args.L, D2s=args.D2s, strict=args.strict,
                          include_zero=args.include_zero)


# ---------------------------------------------------------------------------
# subcommands


def cmd_spectrum(args):
    p = _params(args)
    if (args.k is None) == (args.E is None):
        raise DomainError("give exactly one of --k and --E")
    spec = enumerate_smallest(p, args.k, method=args.method) if args.k is not None else enumerate_below(p, args.E)
    _emit(args, spec.to_json() + "\n" if args.format == "json" else spec.to_csv())
    return 0


def cmd_count(args):
    n = counting_function(_params(args), args.E, workers=args.workers)
    _emit(args, json.dumps({"E": args.E, "count": n}) + "\n" if args.format == "json" else f"{n}\n")
    return 0


def cmd_sum(args):
    v = eigenvalue_sum(_params(args), args.N)
    _emit(args, json.dumps({"N": args.N, "sum": v}) + "\n" if args.format == "json" else f"{v!r}\n")
    return 0


def cmd_bounds_scan(args):
    from .bounds import scan_bounds

    reps = scan_bounds(_params(args), args.n_max, args.E_grid or ())
    header = ("quantity", "param_point", "exact", "bound", "margin", "satisfied")
    rows = [(r.quantity, r.param_point, r.exact, r.bound, r.margin, int(r.satisfied)) for r in reps]
    _emit(args, _rows_out(args, "bounds-scan", header, rows))
    bad = sum(not r.satisfied for r in reps)
    if bad:
        print(f"{bad} bound violations", file=sys.stderr)
    return 1 if bad else 0


def cmd_riesz(args):
    from .smoothed import RIESZ_HEADER, RieszQuery, riesz_table

    RieszQuery(args.rho, 1.0)  # validates rho before any work
    rows = riesz_table(_params(args), args.E, args.rho, workers=args.workers)
    rows = [tuple("" if isinstance(x, float) and math.isnan(x) else x for x in r) for r in rows]
    _emit(args, _rows_out(args, "riesz", RIESZ_HEADER, rows))
    return 0


def cmd_heat(args):
    from .smoothed import HEAT_HEADER, heat_table

    rows = heat_table(_params(args), args.t, tol=args.tol, workers=args.workers)
    _emit(args, _rows_out(args, "heat", HEAT_HEADER, rows))
    return 0


def _well(args):
    from .semiclassical import PotentialSpec, load_potential_grid

    if args.well == "box":
        return PotentialSpec.box_well(args.depth, [args.width] * args.d, args.s, args.gamma)
    if args.well == "gaussian":
        return PotentialSpec.gaussian_well(args.depth, args.width, args.d, args.s, args.gamma)
    if args.well == "bump":
        return PotentialSpec.bump_product(args.depth, args.width, args.d, args.s, args.gamma)
    if not args.grid_file:
        raise DomainError("--well grid needs --grid-file")
    vals, spacing, origin = load_potential_grid(args.grid_file)
    return PotentialSpec.from_grid(vals, spacing, origin, args.s, args.gamma)


def cmd_semiclassical(args):
    from . import semiclassical as sc
    from .bounds import DomainSpec

    q = args.quantity
    dom = DomainSpec(args.L ** args.d, args.d)
    out = {"quantity": q, "d": args.d, "s": args.s}
    if q == "phase-volume":
        if args.E is None:
            raise DomainError("phase-volume needs --E")
        pq = sc.PhaseSpaceQuery(dom, args.s, E_max=args.E)
        out["value"] = sc.phase_space_volume(pq)
        if args.mc_samples:
            if args.seed is None:
                raise DomainError("Monte Carlo needs --seed")
            est, err = sc.phase_space_volume_mc(pq, args.mc_samples, args.seed)
            out.update(mc_estimate=est, mc_stderr=err)
    elif q == "free-sum":
        if args.N is None:
            raise DomainError("free-sum needs --N")
        out["value"] = sc.classical_free_sum(sc.PhaseSpaceQuery(dom, args.s, N=args.N))
    elif q == "scale-factor":
        lam, ratio = sc.polya_weyl_scale_factor(args.d, args.s)
        out.update(value=lam, sum_ratio=ratio)
    elif q == "radial-moment":
        out.update(value=sc.radial_moment_integral(args.d, args.s, args.gamma),
                   quadrature=sc.radial_moment_quadrature(args.d, args.s, args.gamma))
    elif q == "moment-sum":
        out["value"] = sc.bound_state_moment_sum(_well(args))
        out["well"] = args.well
    elif q == "sphere-volume":
        out.update(value=sc.deformed_sphere_volume(args.d, args.s, args.R))
    elif q == "gamma-one":
        c = sc.gamma_one_coefficients(args.d, args.s)
        out.update(reduced=c.reduced, unreduced=c.unreduced, quadrature=c.quadrature, matches=c.matches)
    if args.format == "json":
        text = json.dumps(out, sort_keys=True) + "\n"
    else:
        keys = sorted(out)
        text = ",".join(keys) + "\n" + ",".join(
            repr(out[k]) if isinstance(out[k], float) else str(out[k]) for k in keys) + "\n"
    _emit(args, text)
    return 0


def cmd_coherent(args):
    from .coherent import semiclassical_limit_check

    k = args.k if len(args.k) > 1 else args.k * args.d
    rep = semiclassical_limit_check(args.s, k, d=args.d, hbars=args.hbar, y=args.y)
    rows = [(h, e, rep.limit, g) for h, e, g in zip(rep.hbar, rep.expectation, rep.gap)]
    if args.format == "json":
        text = json.dumps({"rows": [dict(zip(("hbar", "expectation", "limit", "gap"), r)) for r in rows],
                           "decreasing": rep.decreasing, "final_relative_gap": rep.final_relative_gap,
                           "converged": rep.converged}, indent=1, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        rep.write_csv(buf)
        text = buf.getvalue()
    _emit(args, text)
    if not rep.converged:
        print("semiclassical limit not reached on this grid", file=sys.stderr)
    return 0


def cmd_verify_all(args):
    from .acceptance import format_result, run_all

    only = [int(x) for x in args.only.split(",")] if args.only else None
    results = run_all(args.profile, only)
    text = "".join(format_result(r) for r in results)
    n_ok = sum(r.passed for r in results)
    text += f"{n_ok}/{len(results)} criteria passed ({args.profile} profile)\n"
    _emit(args, text)
    return 0 if n_ok == len(results) else 1


# ---------------------------------------------------------------------------
# parser


def _common(p, spectral=True):
    p.add_argument("--config", help="key = value file with default flag values")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")
    p.add_argument("--workers", type=int, default=_default_workers())
    p.add_argument("--seed", type=int, default=None)
    if spectral:
        p.add_argument("--d", type=int, required=True)
        p.add_argument("--s", type=parse_number, required=True)
        p.add_argument("--L", type=parse_number, default=1.0)
        p.add_argument("--D2s", type=parse_number, default=1.0)
        p.add_argument("--strict", action="store_true", help="require s in (1/2, 1]")
        p.add_argument("--include-zero", action="store_true", help="allow zero index components")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracspec", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"fracspec {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="list eigenvalues")
    _common(p)
    p.add_argument("--k", type=int, help="the k smallest eigenvalues")
    p.add_argument("--E", type=parse_number, help="all eigenvalues <= E")
    p.add_argument("--method", choices=("threshold", "frontier"), default="threshold")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("count", help="counting function N(E)")
    _common(p)
    p.add_argument("--E", type=parse_number, required=True)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("sum", help="sum of the N smallest eigenvalues")
    _common(p)
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=cmd_sum)

    p = sub.add_parser("bounds-scan", help="exact spectrum against the spectral bounds")
    _common(p)
    p.add_argument("--n-max", type=int, default=1000)
    p.add_argument("--E-grid", type=parse_list, default=None)
    p.set_defaults(func=cmd_bounds_scan)

    p = sub.add_parser("riesz", help="Riesz means on an energy grid")
    _common(p)
    p.add_argument("--rho", type=parse_number, required=True)
    p.add_argument("--E", type=parse_list, required=True)
    p.set_defaults(func=cmd_riesz)

    p = sub.add_parser("heat", help="heat trace on a time grid")
    _common(p)
    p.add_argument("--t", type=parse_list, required=True)
    p.add_argument("--tol", type=parse_number, default=1e-10)
    p.set_defaults(func=cmd_heat)

    p = sub.add_parser("semiclassical", help="phase-space integrals")
    _common(p, spectral=False)
    p.add_argument("--quantity", required=True,
                   choices=("phase-volume", "free-sum", "scale-factor", "radial-moment",
                            "moment-sum", "sphere-volume", "gamma-one"))
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--s", type=parse_number, required=True)
    p.add_argument("--L", type=parse_number, default=1.0)
    p.add_argument("--E", type=parse_number)
    p.add_argument("--N", type=parse_number)
    p.add_argument("--R", type=parse_number, default=1.0)
    p.add_argument("--gamma", type=parse_number, default=1.0)
    p.add_argument("--well", choices=("box", "gaussian", "bump", "grid"), default="gaussian")
    p.add_argument("--depth", type=parse_number, default=1.0)
    p.add_argument("--width", type=parse_number, default=1.0)
    p.add_argument("--grid-file")
    p.add_argument("--mc-samples", type=int, default=0)
    p.set_defaults(func=cmd_semiclassical)

    p = sub.add_parser("coherent", help="coherent-state kinetic energy along an hbar grid")
    _common(p, spectral=False)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--s", type=parse_number, required=True)
    p.add_argument("--k", type=parse_list, default=[1.0])
    p.add_argument("--y", type=parse_list, default=None)
    p.add_argument("--hbar", type=parse_list, default=[0.5, 0.2, 0.1, 0.05, 0.02])
    p.set_defaults(func=cmd_coherent)

    p = sub.add_parser("verify-all", help="run the acceptance suite")
    _common(p, spectral=False)
    p.add_argument("--profile", choices=("quick", "full"), default="full")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.set_defaults(func=cmd_verify_all)
    return ap


def read_config(path) -> list:
    """Turn a ``key = value`` file into command-line tokens."""
    tokens = []
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise DomainError(f"{path}:{ln}: expected key = value")
            key, val = key.strip().replace("_", "-"), val.strip()
            flag = "--" + key
            if val.lower() in ("true", "yes", "on"):
                tokens.append(flag)
            elif val.lower() in ("false", "no", "off"):
                continue
            else:
                tokens += [flag, val]
    return tokens


def _expand_config(argv):
    if not argv or "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        return argv
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2:]
    # config values go right after the subcommand so explicit flags override them
    return rest[:1] + read_config(path) + rest[1:]


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_expand_config(argv))
        return args.func(args)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else 2
    except (DomainError, IncompleteSpectrumError, argparse.ArgumentTypeError, OSError) as e:
        print(f"fracspec: error: {e}", file=sys.stderr)
        return 2
    except (ResourceLimitError, ConvergenceError) as e:
        print(f"fracspec: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
