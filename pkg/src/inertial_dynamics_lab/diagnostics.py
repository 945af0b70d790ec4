"""Lyapunov functions and convergence certificates along trajectories.

The convergence statements being checked are asymptotic; everything here is
a finite-horizon surrogate evaluated at the sampled states:

* limit of ``|u(t) - p|`` exists -> largest upward excursion of the anchor
  distance over the last half of the horizon;
* ``u'`` in L^2 and ``u' -> 0`` -> final speed and the integral of ``|u'|^2``
  over the last part of the horizon;
* ``u'' + grad phi(u) + A p`` in L^2 -> integral of ``D(t)`` over the same tail;
* convergence to an equilibrium -> equilibrium residual at the final state.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np
import structlog
from pydantic import BaseModel, Field

from .core import Vec, as_vec, check_dim, norm
from .dynamics import IntegratorSettings, PhaseState, SystemSpec, Trajectory, vector_field
from .exceptions import ConvergenceError, UnsupportedOperationError
from .operators import Potential, monotonicity_estimate

logger = structlog.get_logger()

DIAGNOSTIC_COLUMNS = (
    "h",
    "h_dot",
    "gamma0",
    "gamma1",
    "w",
    "a_residual",
    "d_term",
    "g_term",
    "eq_residual",
)


@dataclass(frozen=True)
class AnchorPoint:
    """An equilibrium ``p`` with ``|grad phi(p) + A p|`` as achieved."""

    p: Vec
    residual: float


@dataclass(frozen=True)
class DiagnosticsSample:
    t: float
    h: float
    h_dot: float
    gamma0: float | None
    gamma1: float | None
    w: float
    a_residual: float
    d_term: float
    g_term: float
    eq_residual: float

    def row(self) -> dict[str, float | None]:
        values = asdict(self)
        return {name: values[name] for name in DIAGNOSTIC_COLUMNS}


def find_equilibrium(
    sys: SystemSpec,
    guess: Any,
    tol: float = 1e-10,
    *,
    max_iter: int = 200,
) -> AnchorPoint:
    """Zero of ``F = grad phi + A`` near ``guess``.

    Affine systems are solved with one least-squares step, which keeps the
    component of ``guess`` along flat directions. Otherwise damped Newton
    with a central-difference Jacobian and backtracking on ``|F|``.
    """
    x = as_vec(guess)
    check_dim(x, sys.dim, "guess")

    def residual_map(u: Vec) -> Vec:
        return sys.potential.gradient(u) + sys.operator.apply(u)

    pot = sys.potential.affine_gradient()
    op = sys.operator.affine_form()
    if pot is not None and op is not None:
        jac = pot[0] + op[0]
        for _ in range(3):
            r = residual_map(x)
            if norm(r) <= tol:
                break
            step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
            x = x + step
        res = norm(residual_map(x))
        if res > tol:
            raise ConvergenceError("affine equilibrium solve", res, 3)
        logger.debug("equilibrium_found", method="least-squares", residual=res)
        return AnchorPoint(p=x, residual=res)

    r = residual_map(x)
    res = norm(r)
    for it in range(max_iter):
        if res <= tol:
            logger.debug("equilibrium_found", method="newton", iterations=it, residual=res)
            return AnchorPoint(p=x, residual=res)
        jac = _central_jacobian(residual_map, x)
        step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        alpha = 1.0
        while alpha > 1e-10:
            trial = x + alpha * step
            r_trial = residual_map(trial)
            if norm(r_trial) < (1.0 - 1e-4 * alpha) * res:
                break
            alpha *= 0.5
        else:
            # Jacobian direction stalled; fall back to a plain residual step
            trial = x - 0.5 * r
            r_trial = residual_map(trial)
        x, r, res = trial, r_trial, norm(r_trial)
    if res <= tol:
        return AnchorPoint(p=x, residual=res)
    raise ConvergenceError("equilibrium Newton solve", res, max_iter)


def _central_jacobian(f: Callable[[Vec], Vec], x: Vec) -> np.ndarray:
    n = x.size
    jac = np.empty((n, n))
    for i in range(n):
        h = 1e-7 * max(1.0, abs(float(x[i])))
        e = np.zeros(n)
        e[i] = h
        jac[:, i] = (f(x + e) - f(x - e)) / (2.0 * h)
    return jac


def _lyapunov(sys: SystemSpec, anchor: AnchorPoint, s: PhaseState, tikhonov_gap: float) -> float:
    lam = sys.cocoercivity
    if lam is None:
        raise UnsupportedOperationError("Lyapunov functions need a claimed cocoercivity")
    gamma = sys.damping
    d = s.u - anchor.p
    h = 0.5 * float(d @ d)
    h_dot = float(d @ s.v)
    inner_term = (
        float(s.v @ s.v)
        + 2.0 * sys.potential_value(s.u)
        - 2.0 * float(d @ sys.potential_gradient(anchor.p))
        + 2.0 * tikhonov_gap
    )
    return h_dot + gamma * h + lam * gamma * inner_term


def gamma0(sys: SystemSpec, anchor: AnchorPoint, s: PhaseState) -> float:
    """``h' + gamma h + lambda gamma (|u'|^2 + 2 phi(u) - 2 <u - p, grad phi(p)>)``.

    Only a Lyapunov function without a Tikhonov term; use :func:`gamma1` there.
    """
    check_dim(s.u, sys.dim)
    if sys.tikhonov is not None:
        raise UnsupportedOperationError("gamma0 on Tikhonov-regularized systems, use gamma1")
    return _lyapunov(sys, anchor, s, 0.0)


def gamma1(sys: SystemSpec, anchor: AnchorPoint, s: PhaseState) -> float:
    """``gamma0`` plus ``2 lambda gamma eps(t) (Theta(u) - inf Theta)``.

    Without a Tikhonov term (or with eps = 0) this is exactly ``gamma0``.
    """
    check_dim(s.u, sys.dim)
    if sys.tikhonov is None:
        return _lyapunov(sys, anchor, s, 0.0)
    inf_theta = sys.tikhonov.theta.infimum()
    if inf_theta is None:
        raise UnsupportedOperationError("Theta has no closed-form infimum")
    gap = sys.epsilon(s.t) * (sys.tikhonov.theta.value(s.u) - inf_theta)
    return _lyapunov(sys, anchor, s, gap)


def diagnose_state(sys: SystemSpec, anchor: AnchorPoint, s: PhaseState) -> DiagnosticsSample:
    d = s.u - anchor.p
    grad_u = sys.potential_gradient(s.u)
    grad_p = sys.potential_gradient(anchor.p)
    a_u = sys.operator_value(s.u)
    a_p = sys.operator_value(anchor.p)
    _, accel = vector_field(sys, s)
    eq = grad_u + a_u + sys.epsilon(s.t) * sys.tikhonov_gradient(s.u)
    has_lam = sys.cocoercivity is not None
    plain = has_lam and sys.tikhonov is None
    return DiagnosticsSample(
        t=s.t,
        h=0.5 * float(d @ d),
        h_dot=float(d @ s.v),
        gamma0=_lyapunov(sys, anchor, s, 0.0) if plain else None,
        gamma1=gamma1(sys, anchor, s) if has_lam else None,
        w=float((grad_u - grad_p) @ d),
        a_residual=norm(a_u - a_p),
        d_term=float(np.sum((accel + grad_u + a_p) ** 2)),
        g_term=float(np.sum((a_u + sys.damping * s.v - a_p) ** 2)),
        eq_residual=norm(eq),
    )


def attach_diagnostics(traj: Trajectory, sys: SystemSpec, anchor: AnchorPoint) -> Trajectory:
    """Every sample gains a :class:`DiagnosticsSample`; ``u''`` comes from the vector field."""
    if traj.dim != sys.dim:
        raise ValueError(f"trajectory dimension {traj.dim} differs from system {sys.dim}")
    check_dim(anchor.p, sys.dim, "anchor")
    if traj.system_hash != sys.hash():
        raise ValueError("trajectory was produced by a different system")
    return traj.with_diagnostics([diagnose_state(sys, anchor, s) for s in traj.samples])


class ToleranceSet(BaseModel):
    final_velocity: float = Field(default=1e-5, gt=0)
    l2_tail: float = Field(default=1e-4, gt=0)
    tail_fraction: float = Field(default=0.2, gt=0, lt=1)
    gamma0_step: float = Field(default=1e-8, gt=0)
    anchor_oscillation: float = Field(default=1e-5, gt=0)
    limit_residual: float = Field(default=1e-5, gt=0)


class ConvergenceReport(BaseModel):
    """Finite-horizon surrogate of the convergence theorem for one trajectory."""

    system_hash: str
    settings: IntegratorSettings
    anchor: list[float]
    anchor_residual: float
    final_time: float
    final_velocity_norm: float
    l2_velocity_tail: float
    d_term_tail: float
    anchor_oscillation: float
    anchor_variation: float
    final_anchor_distance: float
    gamma0_monotonicity_defect: float | None
    limit_estimate: list[float]
    limit_residual: float
    verdicts: dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())


def _tail_integral(times: Vec, values: Vec, start: float) -> float:
    """Trapezoid integral of sampled ``values`` over ``[start, times[-1]]``."""
    grid = np.concatenate([[start], times[times > start]])
    vals = np.interp(grid, times, values)
    return float(np.sum(0.5 * np.diff(grid) * (vals[1:] + vals[:-1])))


def convergence_report(
    traj: Trajectory,
    sys: SystemSpec,
    anchor: AnchorPoint,
    tolset: ToleranceSet | None = None,
) -> ConvergenceReport:
    if traj.diagnostics is None:
        raise ValueError("attach diagnostics before building a report")
    tol = tolset or ToleranceSet()
    times = traj.times
    t0, t_end = float(times[0]), float(times[-1])
    tail_start = t_end - tol.tail_fraction * (t_end - t0)
    final = traj.final

    running_at_start = float(np.interp(tail_start, times, traj.running_l2_velocity))
    l2_tail = float(traj.running_l2_velocity[-1]) - running_at_start
    d_series = np.array([d.d_term for d in traj.diagnostics])
    d_tail = _tail_integral(times, d_series, tail_start)

    dist = np.sqrt(2.0 * np.array([d.h for d in traj.diagnostics]))
    late = dist[times >= t0 + 0.5 * (t_end - t0)]
    oscillation = float(np.max(late - np.minimum.accumulate(late))) if late.size else 0.0
    variation = float(late.max() - late.min()) if late.size else 0.0

    g0 = [d.gamma0 for d in traj.diagnostics]
    defect: float | None = None
    if sys.tikhonov is None and all(v is not None for v in g0):
        series = np.array(g0, dtype=np.float64)
        defect = float(max(0.0, np.diff(series).max(initial=0.0)))

    limit_residual = sys.equilibrium_residual(final.u)
    speed = norm(final.v)
    verdicts = {
        "limit_in_equilibrium_set": limit_residual < tol.limit_residual,
        "velocity_vanishes": speed < tol.final_velocity and l2_tail < tol.l2_tail,
        "d_term_square_integrable": d_tail < tol.l2_tail,
        "anchor_distance_settles": oscillation <= tol.anchor_oscillation,
    }
    if defect is not None:
        verdicts["gamma0_nonincreasing"] = defect <= tol.gamma0_step

    report = ConvergenceReport(
        system_hash=traj.system_hash,
        settings=traj.settings,
        anchor=anchor.p.tolist(),
        anchor_residual=anchor.residual,
        final_time=t_end,
        final_velocity_norm=speed,
        l2_velocity_tail=l2_tail,
        d_term_tail=d_tail,
        anchor_oscillation=oscillation,
        anchor_variation=variation,
        final_anchor_distance=float(dist[-1]),
        gamma0_monotonicity_defect=defect,
        limit_estimate=final.u.tolist(),
        limit_residual=limit_residual,
        verdicts=verdicts,
    )
    logger.info(
        "convergence_report_built",
        passed=report.passed,
        final_velocity=speed,
        limit_residual=limit_residual,
    )
    return report


def vi_residual(theta: Potential, probes: Sequence[Any], u_star: Any) -> float:
    """``max_v max(0, -<grad Theta(u*), v - u*>)`` over the probe set."""
    if len(probes) == 0:
        raise ValueError("probe set is empty")
    u = as_vec(u_star)
    g = theta.gradient(u)
    worst = 0.0
    for probe in probes:
        v = as_vec(probe)
        check_dim(v, u.size, "probe")
        worst = max(worst, -float(g @ (v - u)))
    return worst


def strong_monotonicity_estimate(
    sys: SystemSpec,
    samples: int = 2000,
    radius: float = 1.0,
    seed: int = 42,
) -> float:
    """Sampled infimum of ``<F u - F v, u - v> / |u - v|^2`` for ``F = grad phi + A``."""

    def f(u: Vec) -> Vec:
        return sys.potential.gradient(u) + sys.operator.apply(u)

    return monotonicity_estimate(f, sys.dim, samples, radius, seed)
