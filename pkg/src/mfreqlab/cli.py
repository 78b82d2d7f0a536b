"""Command-line front end: ``mfreqlab <subcommand> [flags]``.

Results go to stdout as JSON. Failures print one JSON object on stderr and
exit 1 (bad parameters) or 2 (budget, resolution or invariant failures).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import circle, experiments, gauss, grid, multifreq, rationals, variation
from .bumps import BumpSpec, phi_from_bump
from .config import RunConfig, load_config
from .errors import MfreqError, ParameterError
from .records import RecordStore, write_report

RANDOMIZED = {"a1", "multifreq", "lemma21", "experiment"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParameterError(message)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ParameterError(f"not a comma-separated list of numbers: {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ParameterError(f"not a comma-separated list of integers: {text!r}") from exc


def _series(args) -> variation.TimeSeries:
    """From --series FILE (JSON) or --samples '0,1,0' (vectors as '0:1,1:0')."""
    if args.series:
        with open(args.series) as fh:
            return variation.TimeSeries.from_json(json.load(fh))
    if args.samples is None:
        raise ParameterError("give --samples or --series")
    try:
        rows = [[complex(c.replace(" ", "")) for c in item.split(":")] for item in args.samples.split(",")]
    except ValueError as exc:
        raise ParameterError(f"bad --samples {args.samples!r}") from exc
    if len({len(r) for r in rows}) != 1:
        raise ParameterError("every sample needs the same number of components")
    times = _floats(args.times) if args.times else None
    return variation.TimeSeries.from_samples(np.array(rows), times)


def _complex_list(vals) -> list:
    return [[float(v.real), float(v.imag)] for v in np.atleast_1d(vals)]


def _pipeline(cfg: RunConfig) -> circle.PipelineParams:
    return circle.PipelineParams(kernel=circle.riesz_kernel(cfg.n, cfg.d), eps1=cfg.eps1,
                                 kappa=cfg.kappa, j_max=cfg.j_max, budget=cfg.budget)


def _xi_points(args, cfg):
    vals = np.array(_floats(args.xi))
    if cfg.n > 1:
        if vals.size % cfg.n:
            raise ParameterError(f"--xi needs a multiple of n={cfg.n} coordinates")
        return vals.reshape(-1, cfg.n).T
    return vals


# -- handlers --------------------------------------------------------------

def cmd_variation(args, cfg):
    ser = _series(args)
    if args.exhaustive:
        return variation.variation_seminorm_exhaustive(ser, cfg.r)
    return variation.variation_seminorm(ser, cfg.r, backend=cfg.backend)


def cmd_jumps(args, cfg):
    ser = _series(args)
    if args.method == "greedy":
        return variation.greedy_jump_count(ser, args.lam, backend=cfg.backend)
    if args.method == "max":
        return variation.max_jump_count(ser, args.lam, backend=cfg.backend)
    return variation.max_jump_count_exhaustive(ser, args.lam)


def cmd_dft(args, cfg):
    if args.inverse:
        F = grid.read_signal(args.input, grid.Multiplier)
        out = grid.inverse_dft(F)
    else:
        out = grid.forward_dft(grid.read_signal(args.input))
    if args.output:
        grid.write_signal(out, args.output)
        return {"written": args.output}
    return grid.signal_to_json(out)


def cmd_gauss_sum(args, cfg):
    b = _ints(args.b)
    S = gauss.gauss_sum(args.a, args.modulus, b, cfg.d, n=cfg.n, budget=cfg.budget)
    return {"re": S.real, "im": S.imag}


def cmd_arcs(args, cfg):
    p = rationals.MajorArcParams(cfg.eps1 if cfg.eps1 is not None else 1.0 / (10 * cfg.d), args.j, cfg.d)
    if args.table:
        rationals.write_csv(rationals.arc_table(p), args.table)
    if args.lam is None:
        return {"written": args.table} if args.table else rationals.arc_table(p)
    hit = rationals.major_arc_membership(args.lam, p)
    return None if hit is None else hit.to_json()


def cmd_enumerate_rs(args, cfg):
    pts = rationals.enumerate_Rs(cfg.s, cfg.n, cfg.budget)
    if args.count:
        return {"count": len(pts), "alphas": len(rationals.A_s(pts))}
    return [p.to_json() for p in pts]


def cmd_multiplier(args, cfg):
    vals = circle.multiplier_m(args.j, args.lam, _xi_points(args, cfg), circle.riesz_kernel(cfg.n, cfg.d),
                               cfg.budget)
    return _complex_list(vals)


def cmd_phi(args, cfg):
    P = _pipeline(cfg)
    if cfg.n == 1:
        vals = circle.phi_continuous(args.j, args.lam, _xi_points(args, cfg), P.kernel, P.quad_order)
    else:
        vals = circle.phi_lattice_proxy(args.j, args.lam, _xi_points(args, cfg), P.kernel, budget=cfg.budget)
    return _complex_list(vals)


def cmd_assemble_ls(args, cfg):
    return _complex_list(circle.assemble_Ls(cfg.s, args.lam, _xi_points(args, cfg), _pipeline(cfg), j=args.j))


def cmd_error_term(args, cfg):
    return _complex_list(circle.error_term_E(args.j, args.lam, _xi_points(args, cfg), _pipeline(cfg)))


def cmd_carleson(args, cfg):
    f = grid.read_signal(args.input)
    P = _pipeline(cfg)
    lams = circle.lambda_grid(args.level, P if args.refine_j is not None else None, args.refine_j)
    out = circle.carleson_operator(f, lams, cfg.j_max, P.kernel, cfg.budget)
    if args.output:
        grid.write_signal(out, args.output)
    return {"l2": out.l2_norm(), "max": float(np.abs(out.values).max()), "lambda_grid_size": int(lams.size),
            "bound": "lower", "written": args.output}


def _coefficients(args, cfg, spec):
    if args.model == "classical":
        step = max(1, int(round(2 * 2.0 ** (-cfg.kappa * cfg.s) * cfg.N)))
        return multifreq.classical_coefficients([[k * step] for k in range(cfg.size_xi)], spec)
    return multifreq.random_unimodular_coefficients(cfg.size_xi, spec, cfg.seed, cfg.period)


def cmd_a1(args, cfg):
    if cfg.n != 1:
        raise ParameterError("the a1 command builds one-dimensional fields")
    spec = grid.GridSpec(1, cfg.N)
    U = BumpSpec.chi_s(cfg.s, cfg.kappa)
    g = _coefficients(args, cfg, spec)
    val, x, vec = multifreq.a1_constant(g, phi_from_bump(U, spec), U.measure, method=args.method,
                                        return_argmax=True)
    return {"A1": val, "argmax_x": [int(v) for v in x] if x is not None else None, "size_xi": g.size}


def cmd_multifreq(args, cfg):
    times = np.geomspace(0.25, 1.0, args.times)
    A1, lhs, fnorm, _ = experiments._thm1_instance(cfg.size_xi, cfg.N, cfg.s, cfg.kappa, cfg.q, times,
                                                   cfg.period, args.model, cfg.seed, 0, 16)
    return {"lhs": lhs, "A1": A1, "fnorm": fnorm, "ratio": lhs / (A1 * fnorm) if A1 * fnorm else 0.0,
            "rhs": multifreq.theorem1_rhs(cfg.q, cfg.size_xi, A1, cfg.eta, fnorm)}


def cmd_lemma21(args, cfg):
    rng = np.random.default_rng(cfg.seed)
    g = rng.standard_normal((args.Y, cfg.size_xi)) + 1j * rng.standard_normal((args.Y, cfg.size_xi))
    c = rng.standard_normal((args.T, cfg.size_xi)) + 1j * rng.standard_normal((args.T, cfg.size_xi))
    lhs, rhs, ratio = multifreq.lemma21_check(g, c, cfg.q, cfg.r, backend=cfg.backend)
    return {"lhs": lhs, "rhs": rhs, "ratio": ratio}


def cmd_experiment(args, cfg):
    if args.which == "thm1":
        sizes = _ints(args.sizes) if args.sizes else (2, 4, 8, 16)
        rec = experiments.thm1_scaling_experiment(
            sizes=sizes, N=cfg.N, s=cfg.s, kappa=cfg.kappa, q=cfg.q, eta=cfg.eta, trials=cfg.trials,
            period=cfg.period, coefficients=args.model, seed=cfg.seed, check_doubling=not args.no_doubling)
    elif args.which == "a1-reduction":
        c = None
        if args.c:
            c = np.array([complex(v) for v in args.c.split(",")])
        rec = experiments.a1_reduction_experiment(
            s=cfg.s, x=args.x, c=c, alpha=Fraction(args.alpha) if args.alpha else None, N=cfg.N,
            kappa=cfg.kappa, d=cfg.d, period=cfg.period, lambda_mode=args.lambda_mode, seed=cfg.seed,
            check_doubling=not args.no_doubling)
    else:
        params = {"d": cfg.d}
        if args.kind in ("minor_arc", "error_term") and cfg.eps1 is not None:
            params["eps1"] = cfg.eps1
        if args.kind == "error_term":
            params["kappa"] = cfg.kappa
        sweep = _ints(args.sweep) if args.sweep else None
        rec = experiments.decay_experiments(args.kind, sweep, params, seed=cfg.seed,
                                            check_doubling=not args.no_doubling)
    RecordStore(cfg.records).append(rec)
    return rec.to_json()


def cmd_report(args, cfg):
    return write_report(RecordStore(cfg.records).load(), cfg.out)


def cmd_defaults(args, cfg):
    return RunConfig.documented_defaults()


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    def common(exclude=()):
        parent = _Parser(add_help=False)
        parent.add_argument("--config", help="key=value configuration file")
        for key in RunConfig.keys():
            if key not in exclude:
                parent.add_argument("--" + key.replace("_", "-"), dest=f"cfg_{key}", default=None,
                                    metavar=key.upper())
        return parent

    p = _Parser(prog="mfreqlab", description="Multi-frequency variation and circle-method toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_, exclude=()):
        sp = sub.add_parser(name, parents=[common(exclude)], help=help_)
        sp.set_defaults(func=func)
        return sp

    def series_flags(sp):
        sp.add_argument("--samples", help="comma-separated samples; vector components joined by ':'")
        sp.add_argument("--times", help="comma-separated increasing times (default 0, 1, ...)")
        sp.add_argument("--series", help="time series JSON file")

    sp = add("variation", cmd_variation, "r-variation seminorm of a time series")
    series_flags(sp)
    sp.add_argument("--exhaustive", action="store_true", help="use the subset-enumeration oracle")

    sp = add("jumps", cmd_jumps, "lambda-jump counts of a time series")
    series_flags(sp)
    sp.add_argument("--lam", type=float, required=True)
    sp.add_argument("--method", choices=("greedy", "max", "exhaustive"), default="greedy")

    sp = add("dft", cmd_dft, "forward or inverse transform of a stored signal")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output")
    sp.add_argument("--inverse", action="store_true")

    sp = add("gauss-sum", cmd_gauss_sum, "complete Gauss sum S(a/q, b/q)", exclude=("q",))
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--q", dest="modulus", type=int, required=True)
    sp.add_argument("--b", default="0", help="comma-separated numerators of beta")

    sp = add("arcs", cmd_arcs, "major-arc membership or the arc table")
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.add_argument("--j", type=int, required=True)
    sp.add_argument("--table", help="write the arc table as CSV")

    sp = add("enumerate-rs", cmd_enumerate_rs, "rational frequency points of level s")
    sp.add_argument("--count", action="store_true")

    for name, func, help_ in (("multiplier", cmd_multiplier, "m_{j,lambda}(xi) by lattice summation"),
                              ("phi", cmd_phi, "continuous symbol Phi_{j,lambda}(xi)"),
                              ("assemble-ls", cmd_assemble_ls, "major-arc approximant L^s at xi"),
                              ("error-term", cmd_error_term, "E_{j,lambda}(xi)")):
        sp = add(name, func, help_)
        sp.add_argument("--j", type=int, required=name != "assemble-ls")
        sp.add_argument("--lam", "--lambda", dest="lam", type=float, required=True)
        sp.add_argument("--xi", required=True, help="comma-separated frequencies (n coordinates each)")

    sp = add("carleson", cmd_carleson, "maximal modulated operator on a stored signal")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output")
    sp.add_argument("--level", type=int, default=6, help="dyadic lambda grid 2^-level")
    sp.add_argument("--refine-j", type=int, help="refine the grid near major arcs of this scale")

    sp = add("a1", cmd_a1, "almost-orthogonality constant of a coefficient model")
    sp.add_argument("--model", choices=("random", "classical"), default="random")
    sp.add_argument("--method", choices=("fft", "direct", "windowed"), default="fft")

    sp = add("multifreq", cmd_multifreq, "one instance of the multi-frequency estimate")
    sp.add_argument("--model", choices=("random", "classical"), default="random")
    sp.add_argument("--times", type=int, default=8)

    sp = add("lemma21", cmd_lemma21, "both sides of the V^q to V^r transfer bound")
    sp.add_argument("--T", type=int, default=8)
    sp.add_argument("--Y", type=int, default=16)

    sp = add("experiment", cmd_experiment, "run an experiment and append its record")
    sp.add_argument("which", choices=("thm1", "a1-reduction", "decay"))
    sp.add_argument("--kind", choices=("gauss_sum", "minor_arc", "error_term"), default="gauss_sum")
    sp.add_argument("--sweep", help="comma-separated sweep values")
    sp.add_argument("--sizes", help="comma-separated |Xi| values (thm1)")
    sp.add_argument("--model", choices=("random", "classical"), default="random")
    sp.add_argument("--x", type=int, default=0)
    sp.add_argument("--c", help="comma-separated complex coefficients (a1-reduction)")
    sp.add_argument("--alpha", help="alpha as a fraction, e.g. 1/2 (a1-reduction)")
    sp.add_argument("--lambda-mode", choices=("random", "missing"), default="random")
    sp.add_argument("--no-doubling", action="store_true", help="skip the N -> 2N recomputation")

    add("report", cmd_report, "CSV tables and a text summary of the record store")
    add("defaults", cmd_defaults, "documented configuration defaults")
    return p


def _resolve(args) -> RunConfig:
    flags = {k[4:]: v for k, v in vars(args).items() if k.startswith("cfg_")}
    cfg = load_config(args.config, flags=flags)
    if args.command in RANDOMIZED and cfg.seed is None:
        if not (args.command == "a1" and args.model == "classical"):
            raise ParameterError(f"{args.command} is randomized: --seed is required")
    if cfg.cache:
        gauss.set_default_cache(gauss.GaussSumCache(cfg.cache))
    return cfg


def run(argv=None) -> object:
    """Parse ``argv`` and return the command's result (raises on failure)."""
    args = build_parser().parse_args(argv)
    return args.func(args, _resolve(args))


def _default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"not serializable: {type(obj).__name__}")


def main(argv=None) -> int:
    try:
        result = run(argv)
    except MfreqError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}),
              file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": 1}), file=sys.stderr)
        return 1
    print(json.dumps(result, default=_default))
    return 0


if __name__ == "__main__":
    sys.exit(main())
