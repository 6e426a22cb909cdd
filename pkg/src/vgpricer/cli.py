"""Batch command-line frontend.

Verbs:
    price     one option price by lattice, finite differences, or quadrature
    table     the standard European / American comparison tables as CSV
    p3-curve  centre-probability comparison curve as CSV
    fit       method-of-moments fit of a return series, JSON report

Results go to stdout (JSON for price/fit, CSV for the others); diagnostics
and wall times go to stderr so identical invocations produce byte-identical
stdout.  Exit codes: 0 success, 2 invalid flags or parameters, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import (
    EstimationError,
    EvaluationError,
    InstabilityError,
    NegativeProbabilityError,
    ParameterError,
    UnsupportedStyleError,
    VgPricerError,
)
from .estimation import (
    ReturnSeries,
    density_overlay_table,
    fit_normal,
    fit_vg_moments,
    sample_moments,
)
from .errors import NotVgFittableError
from .lattice import (
    LatticeConfig,
    OptionSpec,
    binomial_bs_price,
    price_lattice,
    step_scale,
    transition_probabilities,
    up_down_factors,
)
from .pide_fd import GridConfig, default_grid, fd_coefficients, p3_curve, price_fd
from .reference import QuadratureConfig, black_scholes_price, quadrature_european_price
from .vg_model import VgParams, cumulants, martingale_correction

# Paper-style defaults: r = 0.06, theta = -0.1, sigma = 0.2, kappa = 0.2.
_DEFAULT_RATE = 0.06
_DEFAULT_THETA = -0.1
_DEFAULT_SIGMA = 0.2
_DEFAULT_KAPPA = 0.2

_TABLE_SPOTS = (36.0, 38.0, 40.0, 42.0, 44.0)
_TABLE_STRIKE = 40.0
_TABLE_MATURITIES = (1.0, 2.0)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rate", type=float, default=_DEFAULT_RATE, help="risk-free rate")
    parser.add_argument("--theta", type=float, default=_DEFAULT_THETA, help="VG drift")
    parser.add_argument("--sigma", type=float, default=_DEFAULT_SIGMA, help="VG volatility")
    parser.add_argument("--kappa", type=float, default=_DEFAULT_KAPPA, help="VG variance rate")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vgpricer",
        description="Variance-Gamma option pricing: pentanomial lattice, explicit "
        "finite differences, quadrature oracle, and moment fitting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_price = sub.add_parser("price", help="price a single option")
    p_price.add_argument("--method", choices=("tree", "fd", "quad"), required=True)
    p_price.add_argument("--style", choices=("eu", "am"), required=True)
    p_price.add_argument("--type", choices=("call", "put"), dest="kind", required=True)
    p_price.add_argument("--s0", type=float, required=True, help="spot price")
    p_price.add_argument("--strike", type=float, required=True)
    p_price.add_argument("--maturity", type=float, required=True, help="years")
    _add_model_flags(p_price)
    p_price.add_argument("--steps", type=int, default=2000,
                         help="time steps (tree and fd methods)")
    p_price.add_argument("--fd-h", type=float, default=None,
                         help="fd spatial step override (default 2*alpha(dt))")
    p_price.add_argument("--x-min", type=float, default=None, help="fd grid override")
    p_price.add_argument("--x-max", type=float, default=None, help="fd grid override")
    p_price.add_argument("--n-space", type=int, default=None, help="fd grid override")
    p_price.add_argument("--quad-half-width", type=float, default=12.0,
                         help="quadrature truncation in stdev units")
    p_price.add_argument("--quad-tol", type=float, default=1e-8,
                         help="quadrature absolute tolerance")

    p_table = sub.add_parser("table", help="European or American comparison table (CSV)")
    p_table.add_argument("--which", choices=("european", "american"), required=True)
    p_table.add_argument("--steps", type=int, default=2000)
    _add_model_flags(p_table)
    p_table.add_argument("--threads", type=int, default=1,
                         help="row workers; output is identical for any value")
    p_table.add_argument("--output", type=str, default=None,
                         help="write CSV to this path instead of stdout")

    p_curve = sub.add_parser("p3-curve", help="centre probabilities vs excess kurtosis (CSV)")
    p_curve.add_argument("--kbar-min", type=float, required=True)
    p_curve.add_argument("--kbar-max", type=float, required=True)
    p_curve.add_argument("--points", type=int, default=50)
    p_curve.add_argument("--dt", type=float, default=1.0 / 2000.0)
    p_curve.add_argument("--c2", type=float, default=0.042,
                         help="per-unit-time variance (default from the standard parameter set)")

    p_fit = sub.add_parser("fit", help="method-of-moments fit of a return series (JSON)")
    p_fit.add_argument("--input", type=str, required=True, help="CSV file")
    p_fit.add_argument("--column", type=str, default="0",
                       help="column name or 0-based index (default first column)")
    group = p_fit.add_mutually_exclusive_group(required=True)
    group.add_argument("--prices", action="store_true",
                       help="input column holds prices; convert to log-returns")
    group.add_argument("--returns", action="store_true",
                       help="input column already holds log-returns")
    p_fit.add_argument("--bins", type=int, default=50)
    p_fit.add_argument("--density-out", type=str, default=None,
                       help="also write the density overlay table to this CSV path")
    return parser


def _vg_params(args: argparse.Namespace) -> VgParams:
    return VgParams(theta=args.theta, sigma=args.sigma, kappa=args.kappa, r=args.rate)


def _emit_json(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, indent=2))
    sys.stdout.write("\n")


def _cmd_price(args: argparse.Namespace) -> int:
    params = _vg_params(args)
    style = "european" if args.style == "eu" else "american"
    spec = OptionSpec(strike=args.strike, maturity=args.maturity,
                      kind=args.kind, style=style, spot=args.s0)
    started = time.perf_counter()
    omega = martingale_correction(params)

    if args.method == "tree":
        cfg = LatticeConfig(n_steps=args.steps, T=args.maturity)
        price = price_lattice(spec, params, cfg)
        c_step = cumulants(params, cfg.dt)
        alpha = step_scale(c_step)
        probs = transition_probabilities(c_step)
        step = up_down_factors(params.r + omega + params.theta, cfg.dt, alpha)
        metadata = {
            "n_steps": args.steps,
            "dt": cfg.dt,
            "alpha": alpha,
            "omega": omega,
            "b": params.r + omega + params.theta,
            "u": step.u,
            "d": step.d,
            "probabilities": list(probs.as_array()),
        }
    elif args.method == "fd":
        overrides = (args.x_min, args.x_max, args.n_space)
        if any(v is not None for v in overrides):
            if any(v is None for v in overrides):
                raise ParameterError("--x-min, --x-max and --n-space must be given together")
            grid = GridConfig(x_min=args.x_min, x_max=args.x_max,
                              n_space=args.n_space, n_time=args.steps)
        else:
            grid = default_grid(spec, params, n_time=args.steps, h=args.fd_h)
        price = price_fd(spec, params, grid)
        dt = args.maturity / grid.n_time
        coeffs = fd_coefficients(params, dt, grid.h)
        metadata = {
            "grid": {
                "x_min": grid.x_min,
                "x_max": grid.x_max,
                "n_space": grid.n_space,
                "n_time": grid.n_time,
                "h": grid.h,
                "dt": dt,
            },
            "omega": omega,
            "coefficients": {
                "p_plus_2h": coeffs.p_plus_2h,
                "p_plus_h": coeffs.p_plus_h,
                "p_0": coeffs.p_0,
                "p_minus_h": coeffs.p_minus_h,
                "p_minus_2h": coeffs.p_minus_2h,
                "r_factor": coeffs.r_factor,
            },
            "negative_weights": coeffs.negative_weights(),
        }
    else:
        config = QuadratureConfig(half_width_stdev=args.quad_half_width,
                                  tolerance=args.quad_tol)
        price = quadrature_european_price(spec, params, config)
        metadata = {
            "omega": omega,
            "half_width_stdev": config.half_width_stdev,
            "tolerance": config.tolerance,
            "split_at_zero": config.split_at_zero,
        }

    elapsed = time.perf_counter() - started
    _emit_json({
        "command": "price",
        "method": args.method,
        "inputs": {
            "s0": args.s0,
            "strike": args.strike,
            "maturity": args.maturity,
            "rate": args.rate,
            "theta": args.theta,
            "sigma": args.sigma,
            "kappa": args.kappa,
            "style": style,
            "type": args.kind,
        },
        "price": price,
        "metadata": metadata,
    })
    print(f"wall_time_s={elapsed:.3f}", file=sys.stderr)
    return EXIT_OK


def _european_row(s0: float, params: VgParams, steps: int) -> list[str]:
    def spec(kind: str) -> OptionSpec:
        return OptionSpec(strike=_TABLE_STRIKE, maturity=1.0, kind=kind,
                          style="european", spot=s0)

    cfg = LatticeConfig(n_steps=steps, T=1.0)
    quad_call = quadrature_european_price(spec("call"), params)
    tree_call = price_lattice(spec("call"), params, cfg)
    quad_put = quadrature_european_price(spec("put"), params)
    tree_put = price_lattice(spec("put"), params, cfg)
    return [f"{s0:g}"] + [f"{v:.4f}" for v in (quad_call, tree_call, quad_put, tree_put)]


def _american_row(s0: float, maturity: float, params: VgParams, steps: int) -> list[str]:
    def spec(style: str) -> OptionSpec:
        return OptionSpec(strike=_TABLE_STRIKE, maturity=maturity, kind="put",
                          style=style, spot=s0)

    cfg = LatticeConfig(n_steps=steps, T=maturity)
    bs_eu = binomial_bs_price(spec("european"), _DEFAULT_SIGMA, params.r, steps)
    vg_eu = price_lattice(spec("european"), params, cfg)
    bs_am = binomial_bs_price(spec("american"), _DEFAULT_SIGMA, params.r, steps)
    vg_am = price_lattice(spec("american"), params, cfg)
    return [f"{s0:g}", f"{maturity:g}"] + [
        f"{v:.4f}" for v in (bs_eu, vg_eu, bs_am, vg_am)
    ]


def _cmd_table(args: argparse.Namespace) -> int:
    params = _vg_params(args)
    started = time.perf_counter()
    if args.which == "european":
        header = ["S0", "quad_call", "tree_call", "quad_put", "tree_put"]
        tasks = [(s0,) for s0 in _TABLE_SPOTS]
        row_fn = lambda task: _european_row(task[0], params, args.steps)  # noqa: E731
    else:
        header = ["S0", "T", "bs_eu_put", "vg_eu_put", "bs_am_put", "vg_am_put"]
        tasks = [(s0, t) for s0 in _TABLE_SPOTS for t in _TABLE_MATURITIES]
        row_fn = lambda task: _american_row(task[0], task[1], params, args.steps)  # noqa: E731

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(row_fn, tasks))
    else:
        rows = [row_fn(task) for task in tasks]

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(buffer.getvalue())
    else:
        sys.stdout.write(buffer.getvalue())
    print(f"wall_time_s={time.perf_counter() - started:.3f}", file=sys.stderr)
    return EXIT_OK


def _cmd_p3_curve(args: argparse.Namespace) -> int:
    if args.kbar_min <= 0.0 or args.kbar_max <= 0.0:
        raise ParameterError("kbar bounds must be > 0")
    if args.kbar_max < args.kbar_min:
        raise ParameterError("need kbar-max >= kbar-min")
    if args.points < 1:
        raise ParameterError("points must be >= 1")
    grid = np.linspace(args.kbar_min, args.kbar_max, args.points)
    points = p3_curve(grid, c2=args.c2, dt=args.dt)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["kbar", "p3_mm", "p3_pde"])
    for point in points:
        writer.writerow([f"{point.kbar:.10g}", f"{point.p3_mm:.10g}", f"{point.p3_pde:.10g}"])
    return EXIT_OK


def _read_series(path: str, column: str, as_prices: bool) -> ReturnSeries:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            rows = [row for row in reader if row]
    except OSError as exc:
        raise EstimationError(f"cannot read input file: {exc}") from exc
    if not rows:
        raise EstimationError("input file is empty")
    header, data = rows[0], rows[1:]
    if column.lstrip("-").isdigit():
        idx = int(column)
        if not 0 <= idx < len(header):
            raise EstimationError(f"column index {idx} out of range")
    else:
        try:
            idx = header.index(column)
        except ValueError:
            raise EstimationError(f"column {column!r} not found in header {header}") from None
    try:
        values = [float(row[idx]) for row in data]
    except (ValueError, IndexError) as exc:
        raise EstimationError(f"non-numeric or missing value in column {column!r}: {exc}") from exc
    if as_prices:
        if any(v <= 0.0 for v in values):
            raise EstimationError("prices must be positive to take log-returns")
        values = list(np.diff(np.log(values)))
    return ReturnSeries(values=tuple(values))


def _cmd_fit(args: argparse.Namespace) -> int:
    series = _read_series(args.input, args.column, as_prices=args.prices)
    if len(series) < 30:
        raise EstimationError(f"series too short: {len(series)} observations (need >= 30)")
    moments = sample_moments(series)
    mu, sd = fit_normal(moments)
    payload: dict = {
        "command": "fit",
        "input": args.input,
        "moments": {
            "mean": moments.mean,
            "variance": moments.variance,
            "skewness": moments.skewness,
            "kurtosis": moments.kurtosis,
            "n": moments.n,
        },
        "normal": {"mu": mu, "sigma": sd},
    }
    try:
        fit = fit_vg_moments(moments)
        payload["model"] = "vg"
        payload["vg"] = {
            "theta": fit.theta,
            "sigma": fit.sigma,
            "kappa": fit.kappa,
            "drift": fit.drift,
            "residuals": {
                "model_variance": fit.residuals.model_variance,
                "model_skewness": fit.residuals.model_skewness,
                "model_kurtosis": fit.residuals.model_kurtosis,
                "variance_error": fit.residuals.variance_error,
                "skewness_error": fit.residuals.skewness_error,
                "kurtosis_error": fit.residuals.kurtosis_error,
            },
        }
        payload["fallback_reason"] = None
    except NotVgFittableError as exc:
        payload["model"] = "normal"
        payload["vg"] = None
        payload["fallback_reason"] = str(exc)

    if args.density_out:
        rows = density_overlay_table(series, bins=args.bins)
        with open(args.density_out, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["bin_center", "hist_density", "vg_density", "normal_density"])
            for row in rows:
                writer.writerow([
                    f"{row.bin_center:.10g}",
                    f"{row.hist_density:.10g}",
                    "" if row.vg_density is None else f"{row.vg_density:.10g}",
                    f"{row.normal_density:.10g}",
                ])
        payload["density_out"] = args.density_out

    _emit_json(payload)
    return EXIT_OK


_DISPATCH = {
    "price": _cmd_price,
    "table": _cmd_table,
    "p3-curve": _cmd_p3_curve,
    "fit": _cmd_fit,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return _DISPATCH[args.command](args)
    except (ParameterError, UnsupportedStyleError, EstimationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NegativeProbabilityError, InstabilityError, EvaluationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except VgPricerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
