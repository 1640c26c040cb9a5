"""Command-line front end.

Each input file holds one state as ``{"beta", "energies", "probabilities"}``;
omitting ``probabilities`` (or passing ``--thermal``) gives the thermal state.
Exit codes: 0 feasible or success, 2 infeasible, 3 inconclusive, 1 error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .asymptotics import (
    SCHEDULES,
    aep_bounds,
    convergence_csv,
    convergence_table,
    corollary1_delta,
    find_n_star,
)
from .core import TOL_NORM, load_state
from .curves import DOMINANCE_TOL, state_curve
from .divergences import AlphaGrid, divergence_profile, format_alpha, smoothed_divergence_conventional
from .errors import ThermoflowError
from .smoothing import flattest_state, steep_state, steepest_state_small_eps
from .transitions import check_exact_second_laws, check_theorem1, check_to_exact

EXIT_ERROR = 1
NATS_PER_BIT = math.log(2.0)


def _eps(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"epsilon must lie in [0, 1], got {value}")
    return value


def _ns(text: str) -> list:
    values = [int(t) for t in text.split(",") if t.strip()]
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("n must be a positive integer or a comma list of them")
    return values


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="normalization and dominance tolerance")
    common.add_argument("--grid", default=None, help="comma-separated alphas, 'inf' allowed, 'default' adds the default grid")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", "-o", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--bits", action="store_true", help="report divergences in bits")
    common.add_argument("--thermal", action="store_true", help="replace the (last) input state by its thermal state")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="thermoflow", description="Smoothed free energies and thermo-majorization.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("smooth", parents=[common], help="flattest, steep or steepest state in the epsilon-ball")
    p.add_argument("state")
    p.add_argument("--kind", choices=("flattest", "steep", "steepest"), required=True)
    p.add_argument("--eps", type=_eps, required=True)

    p = sub.add_parser("curve", parents=[common], help="thermo-majorization curve kinks")
    p.add_argument("state")
    p.add_argument("--band", type=_eps, default=None, help="add y -+ band columns")

    p = sub.add_parser("divergence", parents=[common], help="Renyi divergences and free energies over an alpha grid")
    p.add_argument("state")
    p.add_argument("--eps", type=_eps, default=None, help="smoothing radius (new smoothing)")
    p.add_argument("--conventional", action="store_true", help="conventional smoothing (sampled lower bound for alpha <= 1)")
    p.add_argument("--budget", type=int, default=1000, help="random ball probes for --conventional")
    p.add_argument("--vertices", action="store_true", help="also evaluate every ball vertex for --conventional")

    p = sub.add_parser("check", parents=[common], help="transition feasibility")
    p.add_argument("mode", choices=("exact", "to", "theorem1", "finite-n"))
    p.add_argument("rho")
    p.add_argument("sigma")
    p.add_argument("--eps1", type=_eps, default=0.0)
    p.add_argument("--eps2", type=_eps, default=0.0)
    p.add_argument("--eps", type=_eps, default=None)
    p.add_argument("--n", type=int, default=None)

    p = sub.add_parser("aep", parents=[common], help="finite-n sandwich bounds and convergence table")
    p.add_argument("state")
    p.add_argument("--n", type=_ns, required=True, help="copy count or comma list")
    p.add_argument("--eps", type=_eps, required=True)

    p = sub.add_parser("nstar", parents=[common], help="copy count at which the finite-n condition first holds")
    p.add_argument("rho")
    p.add_argument("sigma")
    p.add_argument("--schedule", choices=sorted(SCHEDULES), default="cuberoot")
    return parser


def _load(path, args, thermal=False):
    state, context = load_state(path, args.tol if args.tol is not None else TOL_NORM)
    if thermal:
        state = context.thermal_state()
    return state, context


def _emit(args, payload) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _grid(args):
    return AlphaGrid.parse(args.grid) if args.grid else AlphaGrid.default()


def cmd_smooth(args) -> int:
    state, ctx = _load(args.state, args, args.thermal)
    if args.kind == "flattest":
        result = flattest_state(state, ctx, args.eps)
    elif args.kind == "steep":
        result = steep_state(state, ctx, args.eps)
    else:
        result = steepest_state_small_eps(state, ctx, args.eps)
    if args.format == "csv":
        rows = ["index,probability"] + [f"{i},{v:.17g}" for i, v in enumerate(result.result_state.probabilities)]
        _emit(args, "\n".join(rows) + "\n")
    else:
        _emit(args, result.to_dict(ctx))
    return 0


def cmd_curve(args) -> int:
    state, ctx = _load(args.state, args, args.thermal)
    curve = state_curve(state, ctx)
    if args.format == "json":
        out = {"x": curve.x.tolist(), "y": curve.y.tolist()}
        if args.band is not None:
            out["y_lo"] = (curve.y - args.band).tolist()
            out["y_hi"] = (curve.y + args.band).tolist()
        _emit(args, out)
    else:
        _emit(args, curve.to_csv(args.band))
    return 0


def cmd_divergence(args) -> int:
    state, ctx = _load(args.state, args, args.thermal)
    grid = _grid(args)
    scale = 1.0 / NATS_PER_BIT if args.bits else 1.0
    unit = "bits" if args.bits else "nats"
    if args.conventional:
        eps = args.eps or 0.0
        rng = np.random.default_rng(args.seed)
        rows = []
        for a in grid:
            sv = smoothed_divergence_conventional(state, ctx, a, eps, args.budget, rng, args.vertices)
            rows.append((a, sv.value, sv.exact, sv.candidates))
        if args.format == "csv":
            lines = [f"alpha,D_{unit},exact,candidates"]
            lines += [f"{format_alpha(a)},{v * scale:.17g},{int(ex)},{c}" for a, v, ex, c in rows]
            _emit(args, "\n".join(lines) + "\n")
        else:
            _emit(args, {
                "epsilon": eps,
                "unit": unit,
                "values": [{"alpha": format_alpha(a), "D": v * scale, "exact": ex, "candidates": c} for a, v, ex, c in rows],
            })
        return 0
    profile = divergence_profile(state, ctx, grid, args.eps)
    if args.format == "csv":
        _emit(args, profile.to_csv(bits=args.bits))
    else:
        out = profile.to_dict()
        if args.bits:
            out["D_bits"] = [v * scale for v in out.pop("D_nats")]
        _emit(args, out)
    return 0


def cmd_check(args) -> int:
    rho, ctx = _load(args.rho, args)
    sigma, ctx_s = _load(args.sigma, args, args.thermal)
    if ctx_s != ctx:
        raise ThermoflowError("rho and sigma must share energies and beta")
    grid = _grid(args)
    if args.mode == "exact":
        report = check_exact_second_laws(rho, sigma, ctx, grid)
    elif args.mode == "to":
        report = check_to_exact(rho, sigma, ctx, args.tol if args.tol is not None else DOMINANCE_TOL)
    elif args.mode == "theorem1":
        report = check_theorem1(rho, sigma, ctx, args.eps1, args.eps2, grid)
    else:
        if args.n is None or args.eps is None:
            raise ThermoflowError("check finite-n needs --n and --eps")
        rep = corollary1_delta(rho, sigma, ctx, args.n, args.eps)
        _emit(args, rep.to_dict())
        # the condition is sufficient only; failing it proves nothing
        return 0 if rep.condition_holds else 3
    _emit(args, report.to_dict())
    return report.exit_code


def cmd_aep(args) -> int:
    state, ctx = _load(args.state, args, args.thermal)
    if args.format == "csv":
        rows = convergence_table(state, ctx, args.n, list(_grid(args)), args.eps)
        _emit(args, convergence_csv(rows))
    else:
        _emit(args, [aep_bounds(state, ctx, n, args.eps).to_dict() for n in args.n])
    return 0


def cmd_nstar(args) -> int:
    rho, ctx = _load(args.rho, args)
    sigma, ctx_s = _load(args.sigma, args, args.thermal)
    if ctx_s != ctx:
        raise ThermoflowError("rho and sigma must share energies and beta")
    schedule = SCHEDULES[args.schedule]
    result = find_n_star(rho, sigma, ctx, schedule)
    out = {"n_star": result.n_star, "schedule": args.schedule, "note": result.note}
    if result.n_star is not None:
        out["report"] = corollary1_delta(rho, sigma, ctx, result.n_star, schedule(result.n_star)).to_dict()
    _emit(args, out)
    return 0 if result.n_star is not None else 3


COMMANDS = {
    "smooth": cmd_smooth,
    "curve": cmd_curve,
    "divergence": cmd_divergence,
    "check": cmd_check,
    "aep": cmd_aep,
    "nstar": cmd_nstar,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ThermoflowError, OSError, json.JSONDecodeError) as exc:
        print(f"thermoflow: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
