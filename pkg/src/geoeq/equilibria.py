"""Long-run equilibria of the migration dynamics and their bifurcations.

A spatial distribution h is at rest when the utility advantage of the
crowded region exactly offsets the congestion penalty of moving there:
``delta_V(h) = delta_u(h) - delta_t(h) = 0``, plus whatever boundary rest
points a bounded penalty leaves admissible.  Stability is read off the
slope of delta_V (negative means restoring), and the symmetric rest point
h = 1/2 loses stability through pitchfork bifurcations as trade gets
freer or the penalty weaker.

The scan works on the upper half [1/2, 1): delta_V is antisymmetric, so
every asymmetric rest point arrives with its mirror image for free, and
the symmetric point is always a root.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .model import ModelParams, SingularityError, SolverError, solve_wage
from .penalty import LINEAR, LOGIT, PenaltySpec, delta_t
from .welfare import FD_STEP, delta_u, dispersion_slope

__all__ = [
    "Equilibrium",
    "BifurcationPoint",
    "Branch",
    "delta_V",
    "find_equilibria",
    "classify_stability",
    "mu_d",
    "mu_p",
    "phi_b",
    "dispersion_threshold",
    "threshold_phi_crossings",
    "pitchfork_criticality",
    "sweep",
    "KIND_DISPERSION",
    "KIND_PARTIAL",
    "KIND_BOUNDARY",
    "STABLE",
    "UNSTABLE",
    "MARGINAL",
    "SUPERCRITICAL",
    "SUBCRITICAL",
    "INDETERMINATE",
]

KIND_DISPERSION = "symmetric_dispersion"
KIND_PARTIAL = "partial_agglomeration"
KIND_BOUNDARY = "boundary_agglomeration"

STABLE = "stable"
UNSTABLE = "unstable"
MARGINAL = "marginal"

SUPERCRITICAL = "supercritical"
SUBCRITICAL = "subcritical"
INDETERMINATE = "indeterminate"

# Scan grid for root bracketing over [0, 1]; the upper half uses half of it.
GRID_POINTS = 2048

# Interior rest points must satisfy |delta_V| below this after refinement.
RESIDUAL_TOL = 1e-10

# |slope| below this is reported as marginal rather than given a sign.
MARGINAL_BAND = 1e-8

# Shares closer than this to 1/2 are the symmetric rest point itself.
DISPERSION_TOL = 1e-9

# The scan stops this short of the boundary, where unbounded penalties blow up.
GRID_EDGE = 1e-9

# |third derivative| below this cannot be signed reliably by the stencil.
CRITICALITY_FLOOR = 1e-5

# Base step for the third-derivative stencil (Richardson-extrapolated).
CRITICALITY_STEP = 1e-2


@dataclass(frozen=True)
class Equilibrium:
    """A rest point of the migration dynamics.

    ``slope`` is d(delta_V)/dh at the rest point (one-sided at the
    boundary); ``residual`` is |delta_V| there, small for interior kinds
    but meaningfully nonzero for boundary ones, where rest does not
    require indifference.
    """

    h_star: float
    w: float
    kind: str
    stability: str
    slope: float
    residual: float


@dataclass(frozen=True)
class BifurcationPoint:
    parameter: str
    value: float
    kind: str
    criticality: str
    third_derivative: float


@dataclass
class Branch:
    """Equilibrium set traced along one parameter.

    ``samples`` pairs each parameter value with the equilibria found
    there, in parameter order; ``diagnostics`` records steps where the
    solver failed (their equilibrium lists stay empty).
    """

    parameter: str
    samples: list[tuple[float, list[Equilibrium]]]
    bifurcations: list[BifurcationPoint]
    diagnostics: list[str]


def delta_V(h, params: ModelParams, spec: PenaltySpec):
    """Net migration incentive toward region L at share h.

    Positive values push population into L.  Antisymmetric about 1/2;
    carries the signed infinities of an unbounded penalty differential at
    the endpoints rather than raising.
    """
    return delta_u(h, params) - delta_t(h, spec)


def _slope_delta_V(h: float, params: ModelParams, spec: PenaltySpec,
                   step: float = FD_STEP) -> float:
    """Central finite-difference slope of delta_V at an interior share."""
    step = min(step, 0.5 * h, 0.5 * (1.0 - h))
    up = delta_V(h + step, params, spec)
    dn = delta_V(h - step, params, spec)
    return float((up - dn) / (2.0 * step))


def _stability_from_slope(slope: float) -> str:
    if abs(slope) < MARGINAL_BAND:
        return MARGINAL
    return STABLE if slope < 0.0 else UNSTABLE


def _interior_equilibrium(h_star: float, params: ModelParams,
                          spec: PenaltySpec, residual_tol: float) -> Equilibrium:
    residual = abs(float(delta_V(h_star, params, spec)))
    slope = _slope_delta_V(h_star, params, spec)
    # Backward-error acceptance: near the boundary an unbounded penalty's
    # slope diverges like 1/(1-h), so |delta_V| at a root known to machine
    # precision in h grows with it.  Scaling by the local slope keeps the
    # criterion "h is right", not "delta_V is flat".
    if residual > residual_tol * max(1.0, abs(slope)):
        raise SolverError(
            f"rest-point residual {residual:.3e} exceeds {residual_tol:.0e} at h={h_star}"
        )
    kind = KIND_DISPERSION if abs(h_star - 0.5) <= DISPERSION_TOL else KIND_PARTIAL
    return Equilibrium(h_star=h_star, w=solve_wage(h_star, params), kind=kind,
                       stability=_stability_from_slope(slope), slope=slope,
                       residual=residual)


def _boundary_equilibria(params: ModelParams, spec: PenaltySpec) -> list[Equilibrium]:
    """Endpoint rest points, admissible only under a bounded penalty.

    h = 1 is at rest when no one wants to leave the crowded region, i.e.
    delta_V(1) >= 0; within MARGINAL_BAND of zero it is marginal.  The
    mirror point h = 0 follows by antisymmetry.
    """
    if not spec.bounded:
        return []
    v_full = float(delta_V(1.0, params, spec))
    if v_full < -MARGINAL_BAND:
        return []
    stability = MARGINAL if abs(v_full) <= MARGINAL_BAND else STABLE
    step = FD_STEP
    slope_full = (v_full - float(delta_V(1.0 - step, params, spec))) / step
    lo, hi = params.wage_bracket
    return [
        Equilibrium(h_star=0.0, w=lo, kind=KIND_BOUNDARY, stability=stability,
                    slope=slope_full, residual=abs(v_full)),
        Equilibrium(h_star=1.0, w=hi, kind=KIND_BOUNDARY, stability=stability,
                    slope=slope_full, residual=abs(v_full)),
    ]


def find_equilibria(params: ModelParams, spec: PenaltySpec, *,
                    grid_points: int = GRID_POINTS,
                    residual_tol: float = RESIDUAL_TOL) -> list[Equilibrium]:
    """All rest points of the migration dynamics, sorted by location.

    Brackets sign changes of delta_V on a uniform scan of the upper half
    [1/2, 1 - GRID_EDGE], polishes each with a bracketed root find,
    mirrors the asymmetric ones across 1/2, and appends admissible
    boundary points.  Roots closer together than the scan resolution
    (about 1/grid_points) can be missed; raise ``grid_points`` to chase
    structure near a bifurcation.

    Under an unbounded penalty the outermost rest point approaches the
    boundary exponentially fast as the penalty weight shrinks (the gap is
    about exp(-delta_u(1)/mu) for the logit family).  When it falls inside
    the last floating-point spacing below 1, no double can represent it
    and it is reported pinned at the boundary: kind boundary_agglomeration,
    stable, slope -inf, with ``residual`` carrying the outward incentive at
    the closest representable interior share.
    """
    if grid_points < 16:
        raise ValueError("grid_points too small to bracket roots reliably")
    n_upper = grid_points // 2 + 1
    upper = np.linspace(0.5, 1.0 - GRID_EDGE, n_upper)
    with np.errstate(divide="ignore"):
        values = np.asarray(delta_V(upper, params, spec), dtype=float)

    roots: list[float] = []

    def add_root(r: float) -> None:
        if r - 0.5 <= DISPERSION_TOL:
            return
        if all(abs(r - seen) > DISPERSION_TOL for seen in roots):
            roots.append(r)

    f = lambda x: float(delta_V(x, params, spec))

    # First cell: delta_V(1/2) = 0 by antisymmetry, so the usual sign-change
    # test is blind there.  Use the symmetric slope to see whether the curve
    # re-crosses before the first grid node.
    slope_half = _slope_delta_V(0.5, params, spec)
    if len(upper) > 1 and values[1] != 0.0 and slope_half * values[1] < 0.0:
        a = 0.5 + 1e-12
        if f(a) * values[1] < 0.0:
            add_root(brentq(f, a, upper[1], xtol=1e-15, maxiter=200))

    for i in range(1, n_upper - 1):
        vi, vj = values[i], values[i + 1]
        if vi == 0.0:
            add_root(float(upper[i]))
        elif vi * vj < 0.0:
            add_root(brentq(f, float(upper[i]), float(upper[i + 1]),
                            xtol=1e-15, maxiter=200))
    if values[-1] == 0.0:
        add_root(float(upper[-1]))

    found = [_interior_equilibrium(0.5, params, spec, residual_tol)]
    pinned: list[Equilibrium] = []
    if not spec.bounded and values[-1] > 0.0:
        # The net incentive still presses outward at the window edge, so the
        # outermost rest point lies between 1 - GRID_EDGE and 1.  Chase it
        # through the last representable shares; if even the closest double
        # to 1 still flows outward, the rest point is below the resolution
        # of the floating-point grid and is reported pinned at the boundary.
        h_last = float(np.nextafter(1.0, 0.0))
        v_last = f(h_last)
        if v_last < 0.0:
            add_root(brentq(f, float(upper[-1]), h_last, xtol=1e-16, maxiter=200))
        elif v_last == 0.0:
            add_root(h_last)
        else:
            lo_w, hi_w = params.wage_bracket
            pinned = [
                Equilibrium(h_star=0.0, w=lo_w, kind=KIND_BOUNDARY, stability=STABLE,
                            slope=float("-inf"), residual=v_last),
                Equilibrium(h_star=1.0, w=hi_w, kind=KIND_BOUNDARY, stability=STABLE,
                            slope=float("-inf"), residual=v_last),
            ]
    for r in sorted(roots):
        eq = _interior_equilibrium(r, params, spec, residual_tol)
        mirror = _interior_equilibrium(1.0 - r, params, spec, residual_tol)
        found.extend([mirror, eq])
    found.extend(pinned)
    found.extend(_boundary_equilibria(params, spec))
    found.sort(key=lambda e: e.h_star)
    return found


def classify_stability(eq: Equilibrium, params: ModelParams, spec: PenaltySpec) -> str:
    """Recompute the stability label of a rest point from scratch.

    Interior points are labeled by the sign of the delta_V slope; boundary
    points by whether the migration incentive still presses outward.
    """
    if eq.kind == KIND_BOUNDARY:
        probe = 1.0 if spec.bounded else float(np.nextafter(1.0, 0.0))
        v = float(delta_V(probe, params, spec))
        if v < -MARGINAL_BAND:
            return UNSTABLE
        return MARGINAL if abs(v) <= MARGINAL_BAND else STABLE
    return _stability_from_slope(_slope_delta_V(eq.h_star, params, spec))


# ---------------------------------------------------------------------------
# Closed-form thresholds


def mu_d(sigma: float, phi: float) -> float:
    """Logit penalty weight at which the symmetric point changes stability.

    Closed form (2 sigma - 1)(1 - phi) / ((sigma - 1)(2 sigma + phi - 1)),
    derived in the display convention where both the utility slope and the
    penalty slope at 1/2 are halved; the ratio, and hence the threshold,
    is unaffected.  Exact for logarithmic utility curvature (theta = 1);
    see :func:`dispersion_threshold` for the curvature-adjusted version.
    """
    if not (sigma > 1.0 and math.isfinite(sigma)):
        raise ValueError(f"sigma must be a finite number > 1, got {sigma}")
    if not 0.0 < phi < 1.0:
        raise ValueError(f"phi must lie strictly inside (0, 1), got {phi}")
    return (2.0 * sigma - 1.0) * (1.0 - phi) / ((sigma - 1.0) * (2.0 * sigma + phi - 1.0))


def mu_p(w: float, sigma: float, phi: float) -> float:
    """Logit weight pinning an asymmetric rest point at relative wage w.

    Equals mu_d at w = 1 and falls strictly to 0 as w approaches the upper
    end of the wage bracket, so every weight below mu_d supports some
    asymmetric rest point.
    """
    if not (sigma > 1.0 and math.isfinite(sigma)):
        raise ValueError(f"sigma must be a finite number > 1, got {sigma}")
    if not 0.0 < phi < 1.0:
        raise ValueError(f"phi must lie strictly inside (0, 1), got {phi}")
    lo = phi ** (1.0 / sigma)
    if not lo * (1.0 - 1e-12) <= w <= (1.0 + 1e-12) / lo:
        raise ValueError(
            f"wage {w} outside the admissible bracket [{lo:.6g}, {1.0 / lo:.6g}]"
        )
    X = w ** sigma
    G = (2.0 * sigma - phi * phi - 1.0) * X - (sigma - 1.0) * phi * (1.0 + X * X)
    if not G > 0.0:
        raise SingularityError(f"threshold denominator vanished at w={w}")
    return (2.0 * sigma - 1.0) * (X - phi) * (1.0 - X * phi) / ((sigma - 1.0) * G)


def phi_b(sigma: float, mu: float) -> float | None:
    """Freeness at which the symmetric point changes stability, given mu.

    Inverts the mu_d relation; returns None when the crossing falls
    outside (0, 1), meaning the symmetric point keeps one stability label
    over the whole trade-freeness range.  Exact at theta = 1.
    """
    if not (sigma > 1.0 and math.isfinite(sigma)):
        raise ValueError(f"sigma must be a finite number > 1, got {sigma}")
    if not (mu >= 0.0 and math.isfinite(mu)):
        raise ValueError(f"mu must be finite and >= 0, got {mu}")
    val = (2.0 * sigma - 1.0) * (mu * (sigma - 1.0) - 1.0) / (-(mu + 2.0) * sigma + mu + 1.0)
    return val if 0.0 < val < 1.0 else None


def dispersion_threshold(params: ModelParams) -> float:
    """Curvature-adjusted logit weight where the symmetric point turns.

    Half the display-convention symmetric slope, i.e.

        eta * mu_d(sigma, phi) * ((1 + phi)/2)**((1 - theta)/(sigma - 1)).

    Coincides with mu_d at theta = 1 and eta = 1; for other curvatures the
    adjustment factor is what the migration dynamics actually balance
    against the penalty slope 4 mu at h = 1/2.
    """
    return 0.5 * dispersion_slope(params)


def threshold_phi_crossings(params: ModelParams, mu: float, *,
                            scan_points: int = 1024) -> list[float]:
    """Freeness values where the symmetric point changes stability.

    Numeric companion to :func:`phi_b`: scans dispersion_threshold(phi) -
    mu for sign changes and polishes each.  Usually zero or one crossing;
    strong curvature can in principle produce more, hence the list.
    """
    if not (mu >= 0.0 and math.isfinite(mu)):
        raise ValueError(f"mu must be finite and >= 0, got {mu}")
    grid = np.linspace(1e-6, 1.0 - 1e-6, scan_points)
    g = lambda p: dispersion_threshold(params.with_phi(p)) - mu
    vals = np.array([g(p) for p in grid])
    crossings = []
    for i in range(scan_points - 1):
        if vals[i] == 0.0:
            crossings.append(float(grid[i]))
        elif vals[i] * vals[i + 1] < 0.0:
            crossings.append(float(brentq(g, float(grid[i]), float(grid[i + 1]),
                                          xtol=1e-14, maxiter=200)))
    return crossings


# ---------------------------------------------------------------------------
# Bifurcations


def _with_parameter(parameter: str, value: float, params: ModelParams,
                    spec: PenaltySpec) -> tuple[ModelParams, PenaltySpec]:
    if parameter == "phi":
        return params.with_phi(value), spec
    if parameter == "mu":
        if spec.kind not in (LOGIT, LINEAR):
            raise ValueError("mu sweeps require a named penalty family")
        return params, replace(spec, mu=value)
    raise ValueError(f"unknown sweep parameter {parameter!r}; use 'phi' or 'mu'")


def _third_derivative(f, x: float, step: float) -> float:
    """Five-point central stencil for f'''(x)."""
    return (
        -f(x - 2.0 * step) + 2.0 * f(x - step) - 2.0 * f(x + step) + f(x + 2.0 * step)
    ) / (2.0 * step ** 3)


def pitchfork_criticality(parameter: str, value: float, params: ModelParams,
                          spec: PenaltySpec, *,
                          step: float = CRITICALITY_STEP) -> BifurcationPoint:
    """Classify the pitchfork at the symmetric point for a parameter value.

    The first and (by symmetry) second derivatives of delta_V vanish at
    the bifurcation, so the cubic term decides the geometry: negative
    means the new asymmetric branch is stable and emerges on the far side
    (supercritical); positive means it is unstable and bends backward
    (subcritical).  The third derivative comes from a Richardson-
    extrapolated five-point stencil; magnitudes below CRITICALITY_FLOOR
    are reported indeterminate.
    """
    p2, s2 = _with_parameter(parameter, value, params, spec)
    f = lambda x: float(delta_V(x, p2, s2))
    coarse = _third_derivative(f, 0.5, step)
    fine = _third_derivative(f, 0.5, 0.5 * step)
    third = (4.0 * fine - coarse) / 3.0
    if abs(third) < CRITICALITY_FLOOR:
        crit = INDETERMINATE
    elif third < 0.0:
        crit = SUPERCRITICAL
    else:
        crit = SUBCRITICAL
    return BifurcationPoint(parameter=parameter, value=float(value), kind="pitchfork",
                            criticality=crit, third_derivative=third)


def _sweep_step(job):
    """One sweep sample; module level so process pools can pickle it."""
    parameter, value, params, spec, grid_points = job
    try:
        p2, s2 = _with_parameter(parameter, value, params, spec)
        eqs = find_equilibria(p2, s2, grid_points=grid_points)
        slope = _slope_delta_V(0.5, p2, s2)
        return value, eqs, slope, None
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        return value, [], float("nan"), f"{type(exc).__name__}: {exc}"


def sweep(parameter: str, lo: float, hi: float, steps: int, params: ModelParams,
          spec: PenaltySpec, *, workers: int = 1,
          grid_points: int = GRID_POINTS) -> Branch:
    """Trace the equilibrium set along one parameter.

    Every step re-scans from scratch on the same grid, so results are
    independent of traversal order and of how the steps are distributed
    over worker processes.  Pitchforks of the symmetric point are located
    by bracketing sign changes of its delta_V slope between consecutive
    steps, then classified via :func:`pitchfork_criticality`.

    Parallel runs (workers > 1) require a picklable penalty spec; the
    named families always are, custom callables must live at module level.
    """
    if parameter not in ("phi", "mu"):
        raise ValueError(f"unknown sweep parameter {parameter!r}; use 'phi' or 'mu'")
    if steps < 2:
        raise ValueError(f"a sweep needs at least 2 steps, got {steps}")
    if not lo < hi:
        raise ValueError(f"sweep range must satisfy min < max, got [{lo}, {hi}]")
    if parameter == "phi" and not (0.0 < lo and hi < 1.0):
        raise ValueError(f"phi sweep range must stay inside (0, 1), got [{lo}, {hi}]")
    if parameter == "mu" and lo < 0.0:
        raise ValueError(f"mu sweep range must be non-negative, got [{lo}, {hi}]")
    if parameter == "mu" and spec.kind not in (LOGIT, LINEAR):
        raise ValueError("mu sweeps require a named penalty family")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")

    values = np.linspace(lo, hi, steps)
    jobs = [(parameter, float(v), params, spec, grid_points) for v in values]
    if workers == 1:
        results = [_sweep_step(job) for job in jobs]
    else:
        chunk = max(1, steps // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_step, jobs, chunksize=chunk))

    samples: list[tuple[float, list[Equilibrium]]] = []
    slopes: list[float] = []
    diagnostics: list[str] = []
    for value, eqs, slope, error in results:
        samples.append((value, eqs))
        slopes.append(slope)
        if error is not None:
            diagnostics.append(f"{parameter}={value!r}: {error}")

    bifurcations: list[BifurcationPoint] = []

    def slope_at(p: float) -> float:
        p2, s2 = _with_parameter(parameter, p, params, spec)
        return _slope_delta_V(0.5, p2, s2)

    for i in range(steps - 1):
        si, sj = slopes[i], slopes[i + 1]
        if math.isnan(si) or math.isnan(sj):
            continue
        if si == 0.0:
            bifurcations.append(
                pitchfork_criticality(parameter, float(values[i]), params, spec))
        elif si * sj < 0.0:
            p_star = brentq(slope_at, float(values[i]), float(values[i + 1]),
                            xtol=1e-12, maxiter=200)
            bifurcations.append(
                pitchfork_criticality(parameter, float(p_star), params, spec))
    if slopes and slopes[-1] == 0.0 and not math.isnan(slopes[-1]):
        bifurcations.append(
            pitchfork_criticality(parameter, float(values[-1]), params, spec))

    return Branch(parameter=parameter, samples=samples,
                  bifurcations=bifurcations, diagnostics=diagnostics)
