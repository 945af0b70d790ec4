"""Second-order dissipative systems and their fixed-step RK4 integration.

The evolution equation is

    u'' + gamma k u' + k^2 (grad phi(u) + A(u)) + eps(t) grad Theta(u) = 0

where ``k`` is the time scale (1 for the unscaled system) and the Tikhonov
term is optional. It is integrated as a first-order system in phase space
``(u, u')``.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Annotated, Any, Literal

import numpy as np
import structlog
from pydantic import BaseModel, Field, model_validator

from .core import Mat, Vec, as_vec, check_dim
from .exceptions import BlowUpError, UnsupportedOperationError
from .operators import MonotoneSpec, PotentialSpec, SpecModel, gradient_growth_bounds

if TYPE_CHECKING:
    from .diagnostics import DiagnosticsSample

logger = structlog.get_logger()


class ZeroSchedule(SpecModel):
    kind: Literal["zero"] = "zero"

    def value(self, t: float) -> float:
        return 0.0

    def derivative(self, t: float) -> float:
        return 0.0

    @property
    def slow_decay(self) -> bool:
        return False


class PowerSchedule(SpecModel):
    """``eps(t) = c / (1 + t)^p``."""

    kind: Literal["power"] = "power"
    c: float = Field(gt=0)
    p: float = Field(gt=0)

    def value(self, t: float) -> float:
        return self.c / (1.0 + t) ** self.p

    def derivative(self, t: float) -> float:
        return -self.p * self.c / (1.0 + t) ** (self.p + 1.0)

    @property
    def slow_decay(self) -> bool:
        """``int_0^inf eps = +inf`` exactly when ``p <= 1``."""
        return self.p <= 1.0


class ExponentialSchedule(SpecModel):
    """``eps(t) = c exp(-a t)``."""

    kind: Literal["exponential"] = "exponential"
    c: float = Field(gt=0)
    a: float = Field(gt=0)

    def value(self, t: float) -> float:
        return self.c * math.exp(-self.a * t)

    def derivative(self, t: float) -> float:
        return -self.a * self.value(t)

    @property
    def slow_decay(self) -> bool:
        return False


EpsilonSchedule = Annotated[
    ZeroSchedule | PowerSchedule | ExponentialSchedule, Field(discriminator="kind")
]


def epsilon_value(sched: ZeroSchedule | PowerSchedule | ExponentialSchedule, t: float) -> float:
    if t < 0:
        raise ValueError("schedules are defined for t >= 0")
    return sched.value(t)


def epsilon_derivative(
    sched: ZeroSchedule | PowerSchedule | ExponentialSchedule, t: float
) -> float:
    if t < 0:
        raise ValueError("schedules are defined for t >= 0")
    return sched.derivative(t)


class TikhonovTerm(SpecModel):
    """``eps(t) grad Theta(u)`` with grad Theta eta-strongly monotone and delta-Lipschitz."""

    theta: PotentialSpec
    epsilon: EpsilonSchedule
    eta: float = Field(default=1.0, gt=0)
    delta: float = Field(default=1.0, gt=0)

    @model_validator(mode="after")
    def validate_theta(self) -> TikhonovTerm:
        if self.theta.infimum() is None:
            raise ValueError("Theta must have a closed-form infimum")
        bounds = gradient_growth_bounds(self.theta)
        if not bounds.satisfies(self.eta, self.delta):
            raise ValueError(
                f"grad Theta is not {self.eta}-strongly monotone and {self.delta}-Lipschitz "
                f"(sampled {bounds.strong_monotonicity:.6g}, {bounds.lipschitz:.6g})"
            )
        return self


class SystemSpec(SpecModel):
    gamma: float = Field(gt=0)
    potential: PotentialSpec
    operator: MonotoneSpec
    tikhonov: TikhonovTerm | None = None
    time_scale: float = Field(default=1.0, gt=0)

    @model_validator(mode="after")
    def validate_dims(self) -> SystemSpec:
        dims = {self.potential.dim, self.operator.dim}
        if self.tikhonov is not None:
            dims.add(self.tikhonov.theta.dim)
        if len(dims) != 1:
            raise ValueError(f"potential, operator and Theta dimensions differ: {sorted(dims)}")
        if self.tikhonov is not None and self.time_scale != 1.0:
            raise ValueError("time-rescaled systems cannot carry a Tikhonov term")
        return self

    @property
    def dim(self) -> int:
        return self.potential.dim

    @property
    def damping(self) -> float:
        """Effective damping ``gamma k``."""
        return self.gamma * self.time_scale

    @property
    def force_scale(self) -> float:
        return self.time_scale**2

    @property
    def cocoercivity(self) -> float | None:
        """Cocoercivity of the effective operator ``k^2 A``."""
        lam = self.operator.claimed_cocoercivity
        return None if lam is None else lam / self.force_scale

    @property
    def lambda_gamma_sq(self) -> float | None:
        """``lambda gamma^2`` of the effective system, ``(lambda / k^2) (gamma k)^2``."""
        lam = self.cocoercivity
        return None if lam is None else lam * self.damping**2

    @property
    def satisfies_damping_condition(self) -> bool:
        prod = self.lambda_gamma_sq
        return prod is not None and prod > 1.0

    def potential_value(self, u: Vec) -> float:
        return self.force_scale * self.potential.value(u)

    def potential_gradient(self, u: Vec) -> Vec:
        return self.force_scale * self.potential.gradient(u)

    def operator_value(self, u: Vec) -> Vec:
        return self.force_scale * self.operator.apply(u)

    def epsilon(self, t: float) -> float:
        return 0.0 if self.tikhonov is None else self.tikhonov.epsilon.value(t)

    def tikhonov_gradient(self, u: Vec) -> Vec:
        if self.tikhonov is None:
            return np.zeros_like(u)
        return self.tikhonov.theta.gradient(u)

    def force(self, t: float, u: Vec) -> Vec:
        """``k^2 (grad phi(u) + A(u)) + eps(t) grad Theta(u)``."""
        out = self.potential_gradient(u) + self.operator_value(u)
        if self.tikhonov is not None:
            out = out + self.tikhonov.epsilon.value(t) * self.tikhonov.theta.gradient(u)
        return out

    def equilibrium_residual(self, u: Vec, t: float | None = None) -> float:
        """``|grad phi(u) + A(u)|``, plus ``eps(t) grad Theta(u)`` when ``t`` is given."""
        r = self.potential.gradient(u) + self.operator.apply(u)
        if t is not None and self.tikhonov is not None:
            r = r + self.tikhonov.epsilon.value(t) * self.tikhonov.theta.gradient(u)
        return float(np.linalg.norm(r))

    def hash(self) -> str:
        payload = json.dumps(self.describe(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()


@dataclass(frozen=True)
class PhaseState:
    t: float
    u: Vec
    v: Vec

    def __post_init__(self) -> None:
        if self.u.shape != self.v.shape or self.u.ndim != 1:
            raise ValueError(f"position {self.u.shape} and velocity {self.v.shape} differ")
        if self.t < 0:
            raise ValueError("phase states live at t >= 0")

    @classmethod
    def initial(cls, u0: Any, v0: Any = None, t: float = 0.0) -> PhaseState:
        u = as_vec(u0)
        v = np.zeros_like(u) if v0 is None else as_vec(v0)
        return cls(t=float(t), u=u, v=v)


class IntegratorSettings(BaseModel):
    t_end: float
    step: float = Field(gt=0)
    sample_every: int = Field(ge=1)
    n_steps: int = Field(ge=1)
    method: Literal["rk4"] = "rk4"


@dataclass(frozen=True)
class Trajectory:
    """Sampled phase states plus the running integral of ``|u'|^2``."""

    times: Vec
    positions: Mat
    velocities: Mat
    running_l2_velocity: Vec
    system_hash: str
    settings: IntegratorSettings
    diagnostics: list[DiagnosticsSample] | None = field(default=None)

    def __post_init__(self) -> None:
        m = self.times.size
        if self.positions.shape[0] != m or self.velocities.shape != self.positions.shape:
            raise ValueError("trajectory arrays disagree in length")
        if self.running_l2_velocity.shape != (m,):
            raise ValueError("running integral must have one entry per sample")
        if m > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("sample times must be strictly increasing")
        if m > 1 and np.any(np.diff(self.running_l2_velocity) < 0):
            raise ValueError("running velocity integral must be nondecreasing")

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def dim(self) -> int:
        return int(self.positions.shape[1])

    def state(self, i: int) -> PhaseState:
        return PhaseState(float(self.times[i]), self.positions[i], self.velocities[i])

    @property
    def samples(self) -> list[PhaseState]:
        return [self.state(i) for i in range(len(self))]

    @property
    def final(self) -> PhaseState:
        return self.state(len(self) - 1)

    def with_diagnostics(self, diagnostics: list[DiagnosticsSample]) -> Trajectory:
        if len(diagnostics) != len(self):
            raise ValueError("one diagnostics record per sample is required")
        return replace(self, diagnostics=diagnostics)


def vector_field(sys: SystemSpec, s: PhaseState) -> tuple[Vec, Vec]:
    """``(u', -gamma k u' - force(t, u))``."""
    check_dim(s.u, sys.dim, "position")
    return s.v.copy(), -sys.damping * s.v - sys.force(s.t, s.u)


def _force_function(sys: SystemSpec) -> Callable[[float, Vec], Vec]:
    pot = sys.potential.affine_gradient()
    op = sys.operator.affine_form()
    if pot is None or op is None:
        return sys.force
    k2 = sys.force_scale
    m = k2 * (pot[0] + op[0])
    c = k2 * (pot[1] + op[1])
    tik = sys.tikhonov
    if tik is None:
        return lambda t, u: m @ u + c
    return lambda t, u: m @ u + c + tik.epsilon.value(t) * tik.theta.gradient(u)


def integrate(
    sys: SystemSpec,
    init: PhaseState,
    t_end: float,
    step: float = 1e-3,
    sample_every: int = 100,
    *,
    blowup_threshold: float = 1e12,
) -> Trajectory:
    """Classical fixed-step RK4 from ``init`` to ``t_end``.

    The step is adjusted to ``(t_end - t0) / n`` with ``n = round((t_end - t0) / step)``
    so the final sample lands on ``t_end``. States are recorded every
    ``sample_every`` steps and at the end; the running integral of ``|u'|^2``
    uses the trapezoid rule on every step.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if sample_every < 1:
        raise ValueError("sample_every must be at least 1")
    if not t_end > init.t:
        raise ValueError(f"t_end={t_end} must exceed the initial time {init.t}")
    check_dim(init.u, sys.dim, "initial position")

    t0 = init.t
    n_steps = max(1, round((t_end - t0) / step))
    h = (t_end - t0) / n_steps
    n = sys.dim
    damping = sys.damping
    force = _force_function(sys)

    def rhs(t: float, y: Vec) -> Vec:
        u, v = y[:n], y[n:]
        return np.concatenate([v, -damping * v - force(t, u)])

    n_samples = n_steps // sample_every + (1 if n_steps % sample_every else 0) + 1
    times = np.empty(n_samples)
    states = np.empty((n_samples, 2 * n))
    running = np.empty(n_samples)

    y = np.concatenate([init.u, init.v])
    times[0], states[0], running[0] = t0, y, 0.0
    k = 1
    integral = 0.0
    speed_sq = float(init.v @ init.v)

    logger.debug("integration_started", dim=n, t0=t0, t_end=t_end, step=h, n_steps=n_steps)
    for i in range(1, n_steps + 1):
        t = t0 + (i - 1) * h
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(t + h, y + h * k3)
        y_next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        if not np.all(np.isfinite(y_next)) or np.abs(y_next).max() > blowup_threshold:
            last = PhaseState(t, y[:n].copy(), y[n:].copy())
            logger.warning("integration_blew_up", t=t, threshold=blowup_threshold)
            raise BlowUpError(last, f"state exceeded {blowup_threshold:g} or became non-finite")

        y = y_next
        next_speed_sq = float(y[n:] @ y[n:])
        integral += 0.5 * h * (speed_sq + next_speed_sq)
        speed_sq = next_speed_sq

        if i % sample_every == 0 or i == n_steps:
            times[k], states[k], running[k] = t0 + i * h, y, integral
            k += 1

    times[-1] = t_end
    settings = IntegratorSettings(
        t_end=t_end, step=step, sample_every=sample_every, n_steps=n_steps
    )
    return Trajectory(
        times=times,
        positions=states[:, :n].copy(),
        velocities=states[:, n:].copy(),
        running_l2_velocity=running,
        system_hash=sys.hash(),
        settings=settings,
    )


def time_rescale(sys: SystemSpec, k: float) -> SystemSpec:
    """System satisfied by ``v(s) = u(k s)``: damping gamma k, forces scaled by k^2.

    The effective operator is ``k^2 A`` with cocoercivity ``lambda / k^2``, so the
    product ``lambda gamma^2`` of the new system equals the original one up to rounding.
    """
    if k <= 0:
        raise ValueError("rescaling factor must be positive")
    if sys.tikhonov is not None:
        raise UnsupportedOperationError("time rescaling of Tikhonov-regularized systems")
    return sys.model_copy(update={"time_scale": sys.time_scale * k})
