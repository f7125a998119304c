"""Command-line entry points.

Five subcommands: ``shortrun`` (market-clearing tables at fixed h),
``equilibria`` (rest points of the migration dynamics), ``thresholds``
(closed-form and detected stability thresholds), ``sweep`` (equilibrium
branches along phi or mu), and ``figure`` (canonical figure artifacts).

Options resolve as flags > config file (``--config``, JSON) > built-in
defaults.  Results land in ``--out`` as CSV (12 significant digits),
JSON (config echo, results, shadow-check report), and SVG, selected via
``--format``.  Exit codes: 0 success, 2 configuration error, 3 solver
failure, 4 i/o failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .equilibria import (
    GRID_EDGE,
    Branch,
    delta_V,
    dispersion_threshold,
    find_equilibria,
    mu_d,
    mu_p,
    phi_b,
    sweep,
    threshold_phi_crossings,
)
from .model import (
    ModelParams,
    SingularityError,
    SolverError,
    price_indices,
    solve_wage,
    wage_share,
)
from .output import PALETTE, Series, branch_chart, line_chart, write_csv, write_json
from .penalty import LOGIT, PenaltySpec, delta_t, delta_t_prime
from .welfare import ddelta_u_dh_closed, delta_u, dispersion_slope

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4

FIGURES = ("fig1", "fig2", "fig5", "fig6-left", "fig6-right")

_MODEL_DEFAULTS = {
    "sigma": None, "phi": None, "tau": None, "theta": 1.0,
    "alpha": None, "beta": None, "eta": 1.0,
}
_PENALTY_DEFAULTS = {"penalty": "logit", "mu": 0.2}
_OUTPUT_DEFAULTS = {"out": "out", "format": "csv,json", "workers": 1}

_DEFAULTS = {
    "shortrun": _MODEL_DEFAULTS | {"grid": 512} | _OUTPUT_DEFAULTS,
    "equilibria": _MODEL_DEFAULTS | _PENALTY_DEFAULTS
    | {"grid_points": 2048} | _OUTPUT_DEFAULTS,
    "thresholds": _MODEL_DEFAULTS | {"mu": None} | _OUTPUT_DEFAULTS,
    "sweep": _MODEL_DEFAULTS | _PENALTY_DEFAULTS
    | {"param": None, "min": None, "max": None, "steps": 101, "grid_points": 2048}
    | _OUTPUT_DEFAULTS,
    "figure": {"name": None, "grid": None, "steps": None, "out": "out",
               "format": "csv,json,svg", "workers": 1},
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geoeq",
        description="Equilibrium toolkit for a two-region economy with "
                    "mobile, location-attached consumers.",
    )
    parser.add_argument("--config", metavar="FILE",
                        help="JSON file with option defaults; flags win")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add_model(sp):
        sp.add_argument("--sigma", type=float, help="elasticity of substitution (> 1)")
        sp.add_argument("--phi", type=float, help="freeness of trade in (0, 1)")
        sp.add_argument("--tau", type=float, help="iceberg trade cost (> 1); alternative to --phi")
        sp.add_argument("--theta", type=float, help="utility curvature (default 1)")
        sp.add_argument("--alpha", type=float, help="fixed input requirement")
        sp.add_argument("--beta", type=float, help="variable input requirement")
        sp.add_argument("--eta", type=float, help="utility scale (default 1)")

    def add_penalty(sp):
        sp.add_argument("--penalty", choices=("logit", "linear"),
                        help="congestion-penalty family (default logit)")
        sp.add_argument("--mu", type=float, help="penalty weight (default 0.2)")

    def add_output(sp, formats="csv,json"):
        sp.add_argument("--out", metavar="DIR", help="output directory (default ./out)")
        sp.add_argument("--format", metavar="LIST",
                        help=f"comma-separated subset of csv,json,svg (default {formats})")
        sp.add_argument("--workers", type=int, help="worker processes (default 1)")

    sp = sub.add_parser("shortrun", help="market-clearing wages, prices and "
                                         "consumption over a grid of shares")
    add_model(sp)
    sp.add_argument("--grid", type=int, help="number of grid points (default 512)")
    add_output(sp)

    sp = sub.add_parser("equilibria", help="rest points of the migration dynamics")
    add_model(sp)
    add_penalty(sp)
    sp.add_argument("--grid-points", type=int, dest="grid_points",
                    help="scan resolution for root bracketing (default 2048)")
    add_output(sp)

    sp = sub.add_parser("thresholds", help="stability thresholds of the symmetric point")
    add_model(sp)
    sp.add_argument("--mu", type=float, help="penalty weight to invert for the "
                                             "freeness threshold")
    add_output(sp)

    sp = sub.add_parser("sweep", help="trace equilibria along phi or mu")
    sp.add_argument("--param", choices=("phi", "mu"), help="parameter to sweep")
    sp.add_argument("--min", type=float, help="lower end of the sweep range")
    sp.add_argument("--max", type=float, help="upper end of the sweep range")
    sp.add_argument("--steps", type=int, help="number of samples (default 101)")
    add_model(sp)
    add_penalty(sp)
    sp.add_argument("--grid-points", type=int, dest="grid_points",
                    help="scan resolution per step (default 2048)")
    add_output(sp)

    sp = sub.add_parser("figure", help="emit a canonical figure as data + rendering")
    sp.add_argument("name", choices=FIGURES, help="which figure to produce")
    sp.add_argument("--grid", type=int, help="override the share-grid density")
    sp.add_argument("--steps", type=int, help="override the sweep step count")
    add_output(sp, formats="csv,json,svg")

    return parser


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValueError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return data


def resolve_options(args: argparse.Namespace) -> dict:
    defaults = dict(_DEFAULTS[args.command])
    merged = dict(defaults)
    if args.config:
        config = _load_config(args.config)
        unknown = sorted(set(config) - set(defaults))
        if unknown:
            raise ValueError(
                f"unknown config keys for {args.command}: {', '.join(unknown)}")
        merged.update(config)
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    merged["command"] = args.command
    return merged


def _params_from(opts: dict) -> ModelParams:
    if opts.get("sigma") is None:
        raise ValueError("--sigma is required (or set sigma in the config file)")
    return ModelParams(sigma=opts["sigma"], phi=opts.get("phi"), tau=opts.get("tau"),
                       theta=opts.get("theta", 1.0),
                       alpha=opts.get("alpha"), beta=opts.get("beta"),
                       eta=opts.get("eta", 1.0))


def _penalty_from(opts: dict) -> PenaltySpec:
    return PenaltySpec(kind=opts["penalty"], mu=opts["mu"])


def _formats_from(opts: dict) -> list[str]:
    raw = [f.strip() for f in str(opts["format"]).split(",") if f.strip()]
    bad = sorted(set(raw) - {"csv", "json", "svg"})
    if bad:
        raise ValueError(f"unknown output formats: {', '.join(bad)}")
    if not raw:
        raise ValueError("--format must name at least one of csv, json, svg")
    return [f for f in ("csv", "json", "svg") if f in raw]


def _echo(opts: dict, params: ModelParams | None = None,
          spec: PenaltySpec | None = None) -> dict:
    echo = {k: v for k, v in opts.items() if k != "command"}
    if params is not None:
        echo["effective_model"] = {
            "sigma": params.sigma, "phi": params.phi, "tau": params.tau,
            "theta": params.theta, "alpha": params.alpha, "beta": params.beta,
            "eta": params.eta,
        }
    if spec is not None:
        echo["effective_penalty"] = {"kind": spec.kind, "mu": spec.mu}
    return echo


def _emit(opts: dict, name: str, *, header=None, rows=None, document=None,
          svg=None) -> list[Path]:
    formats = _formats_from(opts)
    out = Path(opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats and rows is not None:
        path = out / f"{name}.csv"
        write_csv(path, header, rows)
        written.append(path)
    if "json" in formats and document is not None:
        path = out / f"{name}.json"
        write_json(path, document)
        written.append(path)
    if "svg" in formats and svg is not None:
        path = out / f"{name}.svg"
        path.write_text(svg, encoding="utf-8", newline="\n")
        written.append(path)
    for path in written:
        print(f"wrote {path}")
    return written


def _sign_change_count(values: np.ndarray) -> int:
    signs = np.sign(values)
    signs = signs[signs != 0.0]
    return int(np.sum(signs[1:] * signs[:-1] < 0.0))


# ---------------------------------------------------------------------------
# Commands


def run_shortrun(opts: dict) -> int:
    params = _params_from(opts)
    grid = int(opts["grid"])
    if grid < 2:
        raise ValueError(f"--grid must be at least 2, got {grid}")
    h = np.linspace(0.0, 1.0, grid)
    w = solve_wage(h, params)
    P_L, P_R = price_indices(h, w, params)
    C_L, C_R = w / P_L, 1.0 / P_R
    scale = 1.0 / (params.sigma * params.alpha)
    n_L, n_R = h * scale, (1.0 - h) * scale

    lo, hi = params.wage_bracket
    shadow = {
        "roundtrip_max_err": float(np.max(np.abs(wage_share(w, params) - h))),
        "reciprocal_max_err": float(np.max(np.abs(w * w[::-1] - 1.0))),
        "wage_monotone": bool(np.all(np.diff(w) > 0.0)),
        "endpoint_err": {
            "empty": abs(solve_wage(0.0, params) - lo),
            "half": abs(solve_wage(0.5, params) - 1.0),
            "full": abs(solve_wage(1.0, params) - hi),
        },
    }
    doc = {
        "command": "shortrun",
        "config": _echo(opts, params),
        "results": {"wage_bracket": [lo, hi], "grid_points": grid},
        "shadow_checks": shadow,
    }
    svg = line_chart(
        "Market clearing at a fixed spatial distribution",
        "resident share of region L", "level",
        [Series("relative wage", list(zip(h.tolist(), w.tolist())), PALETTE[0]),
         Series("price index L", list(zip(h.tolist(), P_L.tolist())), PALETTE[1]),
         Series("price index R", list(zip(h.tolist(), P_R.tolist())), PALETTE[2])],
    )
    rows = zip(h.tolist(), w.tolist(), P_L.tolist(), P_R.tolist(),
               C_L.tolist(), C_R.tolist(), n_L.tolist(), n_R.tolist())
    _emit(opts, "shortrun", header=["h", "w", "P_L", "P_R", "C_L", "C_R", "n_L", "n_R"],
          rows=rows, document=doc, svg=svg)
    print(f"wage bracket [{lo:.12g}, {hi:.12g}] over {grid} grid points")
    return EXIT_OK


def run_equilibria(opts: dict) -> int:
    params = _params_from(opts)
    spec = _penalty_from(opts)
    eqs = find_equilibria(params, spec, grid_points=int(opts["grid_points"]))

    checks = []
    for eq in eqs:
        if eq.kind == "boundary_agglomeration" or not 0.0 < eq.h_star < 1.0:
            continue
        closed = ddelta_u_dh_closed(eq.h_star, params) - delta_t_prime(eq.h_star, spec)
        checks.append({"h_star": eq.h_star, "fd_slope": eq.slope,
                       "closed_form_slope": closed,
                       "abs_gap": abs(closed - eq.slope)})
    convention = {
        "utility_slope_at_half": ddelta_u_dh_closed(0.5, params),
        "symmetric_display_form": dispersion_slope(params),
        "ratio": ddelta_u_dh_closed(0.5, params) / dispersion_slope(params),
    }
    doc = {
        "command": "equilibria",
        "config": _echo(opts, params, spec),
        "results": {"equilibria": eqs, "count": len(eqs)},
        "shadow_checks": {"slope_cross_checks": checks,
                          "symmetric_slope_convention": convention},
    }

    h_grid = np.linspace(GRID_EDGE, 1.0 - GRID_EDGE, 513)
    with np.errstate(divide="ignore"):
        v_grid = np.asarray(delta_V(h_grid, params, spec), dtype=float)
    svg = line_chart(
        "Net migration incentive and its rest points",
        "resident share of region L", "net incentive toward L",
        [Series("incentive", list(zip(h_grid.tolist(), v_grid.tolist())), PALETTE[0])],
        annotations=[(eq.h_star, 0.0, eq.stability) for eq in eqs],
    )
    rows = [(eq.h_star, eq.w, eq.kind, eq.stability, eq.slope, eq.residual)
            for eq in eqs]
    _emit(opts, "equilibria",
          header=["h_star", "w", "kind", "stability", "slope", "residual"],
          rows=rows, document=doc, svg=svg)

    print(f"{'h_star':>12}  {'w':>12}  {'kind':<24}{'stability':<10}"
          f"{'slope':>14}  {'residual':>10}")
    for eq in eqs:
        print(f"{eq.h_star:12.9f}  {eq.w:12.9f}  {eq.kind:<24}{eq.stability:<10}"
              f"{eq.slope:14.6g}  {eq.residual:10.3e}")
    return EXIT_OK


def run_thresholds(opts: dict) -> int:
    params = _params_from(opts)
    sigma, phi = params.sigma, params.phi
    closed_mu_d = mu_d(sigma, phi)
    adjusted = dispersion_threshold(params)
    slope_display = dispersion_slope(params)
    slope_true = ddelta_u_dh_closed(0.5, params)
    detected_mu = 0.25 * slope_true

    results = {
        "mu_d": closed_mu_d,
        "dispersion_threshold": adjusted,
        "dispersion_slope_display": slope_display,
        "utility_slope_at_half": slope_true,
        "mu_pitchfork_detected": detected_mu,
        "mu_p_at_unit_wage": mu_p(1.0, sigma, phi),
    }
    mu = opts.get("mu")
    crossings: list[float] = []
    if mu is not None:
        results["mu"] = mu
        results["phi_b"] = phi_b(sigma, mu)
        crossings = threshold_phi_crossings(params, mu)
        results["phi_crossings_detected"] = crossings
    shadow = {
        "mu_p_matches_mu_d_at_unit_wage": abs(mu_p(1.0, sigma, phi) - closed_mu_d),
        "detected_vs_adjusted": abs(detected_mu - adjusted),
        "detected_vs_mu_d": abs(detected_mu - closed_mu_d),
    }
    doc = {
        "command": "thresholds",
        "config": _echo(opts, params),
        "results": results,
        "shadow_checks": shadow,
    }

    phis = np.linspace(0.01, 0.99, 197)
    curve = [dispersion_threshold(params.with_phi(p)) for p in phis]
    series = [Series("stability threshold", list(zip(phis.tolist(), curve)), PALETTE[0])]
    if mu is not None:
        series.append(Series(f"mu = {mu:g}", [(0.01, mu), (0.99, mu)], PALETTE[1],
                             dash="6,4"))
    svg = line_chart("Where the symmetric point changes stability",
                     "freeness of trade", "penalty weight", series,
                     annotations=[(c, mu, "crossing") for c in crossings]
                     if mu is not None else None)

    header = ["sigma", "phi", "theta", "mu", "mu_d", "dispersion_threshold",
              "dispersion_slope_display", "mu_pitchfork_detected", "phi_b",
              "phi_crossing_detected"]
    row = [sigma, phi, params.theta, "" if mu is None else mu, closed_mu_d,
           adjusted, slope_display, detected_mu,
           "" if mu is None or phi_b(sigma, mu) is None else phi_b(sigma, mu),
           "" if not crossings else crossings[0]]
    _emit(opts, "thresholds", header=header, rows=[row], document=doc, svg=svg)

    print(f"mu_d = {closed_mu_d:.12g}")
    print(f"curvature-adjusted threshold = {adjusted:.12g} "
          f"(detected {detected_mu:.12g})")
    if mu is not None:
        print(f"phi_b = {results['phi_b']!r}, detected crossings = "
              f"{[f'{c:.12g}' for c in crossings]}")
    return EXIT_OK


def _threshold_report(branch: Branch, params: ModelParams,
                      spec: PenaltySpec) -> dict:
    """Which closed-form threshold convention the detected pitchforks match."""
    candidates: dict[str, float | None] = {}
    if branch.parameter == "mu":
        if spec.kind == LOGIT:
            candidates["curvature_adjusted"] = dispersion_threshold(params)
            candidates["closed_form"] = mu_d(params.sigma, params.phi)
            candidates["closed_form_halved"] = 0.5 * mu_d(params.sigma, params.phi)
        else:
            candidates["curvature_adjusted"] = 2.0 * dispersion_threshold(params)
    else:
        if spec.kind == LOGIT:
            crossings = threshold_phi_crossings(params, spec.mu)
            candidates["curvature_adjusted"] = crossings[0] if crossings else None
            candidates["closed_form"] = phi_b(params.sigma, spec.mu)
    matches = []
    for b in branch.bifurcations:
        best_name, best_gap = "none", float("inf")
        for name, value in candidates.items():
            if value is None:
                continue
            gap = abs(b.value - value)
            if gap < best_gap:
                best_name, best_gap = name, gap
        matches.append({
            "detected": b.value,
            "criticality": b.criticality,
            "matched": best_name if best_gap <= 1e-6 else "none",
            "gap": best_gap if math.isfinite(best_gap) else None,
        })
    return {"candidates": candidates, "matches": matches}


def _run_branch(opts: dict, name: str, parameter: str, lo: float, hi: float,
                steps: int, params: ModelParams, spec: PenaltySpec,
                grid_points: int, title: str, x_label: str) -> Branch:
    branch = sweep(parameter, lo, hi, steps, params, spec,
                   workers=int(opts["workers"]), grid_points=grid_points)
    rows = [(value, eq.h_star, eq.stability, eq.kind)
            for value, eqs in branch.samples for eq in eqs]
    doc = {
        "command": opts["command"],
        "config": _echo(opts, params, spec),
        "results": {
            "parameter": parameter,
            "range": [lo, hi],
            "steps": steps,
            "bifurcations": branch.bifurcations,
            "equilibrium_rows": len(rows),
            "diagnostics": branch.diagnostics,
        },
        "shadow_checks": {"threshold_match": _threshold_report(branch, params, spec)},
    }
    svg = branch_chart(branch, title, x_label)
    _emit(opts, name, header=["parameter", "h_star", "stability", "kind"],
          rows=rows, document=doc, svg=svg)
    for b in branch.bifurcations:
        print(f"pitchfork at {parameter} = {b.value:.12g} ({b.criticality}, "
              f"third derivative {b.third_derivative:.6g})")
    if not branch.bifurcations:
        print(f"no pitchfork of the symmetric point inside [{lo:g}, {hi:g}]")
    for line in branch.diagnostics:
        print(f"diagnostic: {line}", file=sys.stderr)
    return branch


def run_sweep(opts: dict) -> int:
    parameter = opts.get("param")
    if parameter is None:
        raise ValueError("--param is required (phi or mu)")
    if opts.get("min") is None or opts.get("max") is None:
        raise ValueError("--min and --max are required")
    if parameter == "phi" and opts.get("phi") is None and opts.get("tau") is None:
        # the swept parameter replaces the base value at every step anyway
        opts = dict(opts, phi=0.5)
    params = _params_from(opts)
    spec = _penalty_from(opts)
    label = "freeness of trade" if parameter == "phi" else "penalty weight"
    _run_branch(opts, "sweep", parameter, float(opts["min"]), float(opts["max"]),
                int(opts["steps"]), params, spec, int(opts["grid_points"]),
                "Equilibrium branches", label)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Figures


def _figure_fig1(opts: dict) -> None:
    grid = int(opts["grid"] or 513)
    sigma = 2.0
    phis = (0.1, 0.5, 0.7)
    h = np.linspace(0.0, 1.0, grid)
    columns, series, shadow = [], [], {}
    for i, phi in enumerate(phis):
        params = ModelParams(sigma=sigma, phi=phi)
        w = np.asarray(solve_wage(h, params))
        columns.append(w)
        series.append(Series(f"freeness {phi:g}", list(zip(h.tolist(), w.tolist())),
                             PALETTE[i]))
        shadow[f"reciprocal_max_err_phi_{phi:g}"] = float(
            np.max(np.abs(w * w[::-1] - 1.0)))
        shadow[f"monotone_phi_{phi:g}"] = bool(np.all(np.diff(w) > 0.0))
    header = ["h"] + [f"w_phi_{phi:g}" for phi in phis]
    rows = zip(h.tolist(), *[c.tolist() for c in columns])
    doc = {
        "command": "figure",
        "config": _echo(opts) | {"sigma": sigma, "phi_values": list(phis),
                                 "grid": grid},
        "results": {"columns": header, "grid_points": grid},
        "shadow_checks": shadow,
    }
    svg = line_chart("Market-clearing relative wage",
                     "resident share of region L", "relative wage", series)
    _emit(opts, "fig1", header=header, rows=rows, document=doc, svg=svg)


def _figure_fig2(opts: dict) -> None:
    grid = int(opts["grid"] or 513)
    sigma, phi = 2.0, 0.5
    thetas = (0.0, 1.0, 2.0)
    h = np.linspace(0.0, 1.0, grid)
    columns, series, shadow = [], [], {}
    for i, theta in enumerate(thetas):
        params = ModelParams(sigma=sigma, phi=phi, theta=theta)
        du = np.asarray(delta_u(h, params))
        columns.append(du)
        series.append(Series(f"curvature {theta:g}", list(zip(h.tolist(), du.tolist())),
                             PALETTE[i]))
        shadow[f"antisymmetry_max_err_theta_{theta:g}"] = float(
            np.max(np.abs(du + du[::-1])))
    shadow["curvature_amplifies_at_0.8"] = bool(
        columns[0][int(0.8 * (grid - 1))] < columns[1][int(0.8 * (grid - 1))]
        < columns[2][int(0.8 * (grid - 1))])
    header = ["h"] + [f"delta_u_theta_{theta:g}" for theta in thetas]
    rows = zip(h.tolist(), *[c.tolist() for c in columns])
    doc = {
        "command": "figure",
        "config": _echo(opts) | {"sigma": sigma, "phi": phi,
                                 "theta_values": list(thetas), "grid": grid},
        "results": {"columns": header, "grid_points": grid},
        "shadow_checks": shadow,
    }
    svg = line_chart("Utility advantage of the crowded region",
                     "resident share of region L", "utility differential", series)
    _emit(opts, "fig2", header=header, rows=rows, document=doc, svg=svg)


def _figure_fig5(opts: dict) -> None:
    grid = int(opts["grid"] or 513)
    sigma, theta, mu = 2.5, 0.0, 0.2
    phis = (0.3, 0.5, 0.9)
    spec = PenaltySpec(kind=LOGIT, mu=mu)
    h = np.linspace(0.01, 0.99, grid)
    dt = np.asarray(delta_t(h, spec))
    columns, series, shadow = [], [], {}
    eq_report = {}
    for i, phi in enumerate(phis):
        params = ModelParams(sigma=sigma, phi=phi, theta=theta)
        du = np.asarray(delta_u(h, params))
        columns.append(du)
        series.append(Series(f"freeness {phi:g}", list(zip(h.tolist(), du.tolist())),
                             PALETTE[i], dash="6,4"))
        shadow[f"net_sign_changes_phi_{phi:g}"] = _sign_change_count(du - dt)
        eqs = find_equilibria(params, spec)
        eq_report[f"phi_{phi:g}"] = eqs
    series.append(Series(f"penalty differential (mu = {mu:g})",
                         list(zip(h.tolist(), dt.tolist())), "#111111", width=2.8))
    header = ["h"] + [f"delta_u_phi_{phi:g}" for phi in phis] + ["delta_t"]
    rows = zip(h.tolist(), *[c.tolist() for c in columns], dt.tolist())
    doc = {
        "command": "figure",
        "config": _echo(opts) | {"sigma": sigma, "theta": theta, "mu": mu,
                                 "phi_values": list(phis), "grid": grid},
        "results": {"columns": header, "grid_points": grid,
                    "equilibria": eq_report},
        "shadow_checks": shadow,
    }
    svg = line_chart("Attraction against congestion",
                     "resident share of region L", "utility differential", series)
    _emit(opts, "fig5", header=header, rows=rows, document=doc, svg=svg)


def _figure_fig6(opts: dict, side: str) -> None:
    steps = int(opts["steps"] or 181)
    sigma, theta = 2.0, 0.0
    if side == "left":
        params = ModelParams(sigma=sigma, phi=0.4, theta=theta)
        spec = PenaltySpec(kind=LOGIT, mu=0.2)
        _run_branch(opts, "fig6-left", "mu", 0.0, 1.0, steps, params, spec,
                    2048, "Equilibria against the penalty weight",
                    "penalty weight")
    else:
        params = ModelParams(sigma=sigma, phi=0.5, theta=theta)
        spec = PenaltySpec(kind=LOGIT, mu=0.2)
        _run_branch(opts, "fig6-right", "phi", 0.02, 0.98, steps, params, spec,
                    2048, "Equilibria against the freeness of trade",
                    "freeness of trade")


def run_figure(opts: dict) -> int:
    name = opts["name"]
    if name == "fig1":
        _figure_fig1(opts)
    elif name == "fig2":
        _figure_fig2(opts)
    elif name == "fig5":
        _figure_fig5(opts)
    elif name == "fig6-left":
        _figure_fig6(opts, "left")
    elif name == "fig6-right":
        _figure_fig6(opts, "right")
    else:
        raise ValueError(f"unknown figure {name!r}")
    return EXIT_OK


_COMMANDS = {
    "shortrun": run_shortrun,
    "equilibria": run_equilibria,
    "thresholds": run_thresholds,
    "sweep": run_sweep,
    "figure": run_figure,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve_options(args)
        return _COMMANDS[args.command](opts)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, SingularityError, ArithmeticError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
