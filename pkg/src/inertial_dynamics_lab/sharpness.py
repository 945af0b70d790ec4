"""Closed-form analysis of the damped Yosida-rotation system.

With ``B`` the planar rotation by pi/2 and ``B_lam = (lam I + B) / (1 + lam^2)``
its Yosida approximation, the system ``u'' + gamma u' + B_lam u = 0`` has the
explicit real solution basis

    U1 = e^{a1 t} ( cos bt,  sin bt)    U2 = e^{a1 t} (-sin bt, cos bt)
    U3 = e^{a2 t} ( cos bt, -sin bt)    U4 = e^{a2 t} ( sin bt, cos bt)

where ``a1 - ib`` and ``a2 + ib`` solve ``r^2 + gamma r + (lam - i)/(1 + lam^2) = 0``.
Trajectories converge iff ``a2 < 0``, equivalently iff
``gamma^4 (1 - theta) < theta^3`` with ``theta = lam gamma^2``.

Complex numbers are carried as explicit real pairs.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field

from .core import Mat, Vec, as_vec, solve_linear
from .dynamics import SystemSpec
from .exceptions import DegenerateParametersError, InconsistentCriteriaError, SingularMatrixError
from .operators import ROTATION, ZeroPotential, linear, yosida_of

logger = structlog.get_logger()

RADICAND_DUST = 1e-14
CRITERIA_TOL = 1e-10


class RotationCase(BaseModel):
    model_config = ConfigDict(frozen=True)

    gamma: float = Field(gt=0)
    lam: float = Field(gt=0)

    @property
    def theta(self) -> float:
        return self.lam * self.gamma**2

    @classmethod
    def from_theta(cls, gamma: float, theta: float) -> RotationCase:
        return cls(gamma=gamma, lam=theta / gamma**2)


@dataclass(frozen=True)
class CharacteristicRoots:
    x: float
    y: float
    a1: float
    a2: float
    b: float

    def root_residuals(self, case: RotationCase) -> tuple[float, float]:
        """Moduli of ``r^2 + gamma r + (lam - i) c`` at ``a1 - ib`` and ``a2 + ib``."""
        c = 1.0 / (1.0 + case.lam**2)

        def residual(re: float, im: float) -> float:
            real = re * re - im * im + case.gamma * re + case.lam * c
            imag = 2.0 * re * im + case.gamma * im - c
            return math.hypot(real, imag)

        return residual(self.a1, -self.b), residual(self.a2, self.b)


def _sqrt_clamped(value: float, case: RotationCase, what: str) -> float:
    if value < -RADICAND_DUST:
        raise DegenerateParametersError(case.gamma, case.lam, f"negative radicand in {what}")
    return math.sqrt(max(value, 0.0))


def yosida_rotation_matrix(lam: float) -> Mat:
    """``(1 / (1 + lam^2)) [[lam, -1], [1, lam]]``."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    return np.array([[lam, -1.0], [1.0, lam]]) / (1.0 + lam**2)


def characteristic_roots(case: RotationCase) -> CharacteristicRoots:
    c = 1.0 / (1.0 + case.lam**2)
    d = case.gamma**2 - 4.0 * case.lam * c
    s = _sqrt_clamped(d * d + 16.0 * c * c, case, "modulus")
    x = _sqrt_clamped(d + s, case, "x") / math.sqrt(2.0)
    y = _sqrt_clamped(s - d, case, "y") / math.sqrt(2.0)
    return CharacteristicRoots(
        x=x, y=y, a1=0.5 * (-case.gamma - x), a2=0.5 * (-case.gamma + x), b=0.5 * y
    )


def companion_matrix(case: RotationCase) -> Mat:
    """First-order form ``[[0, I], [-B_lam, -gamma I]]`` of the rotation system."""
    out = np.zeros((4, 4))
    out[:2, 2:] = np.eye(2)
    out[2:, :2] = -yosida_rotation_matrix(case.lam)
    out[2:, 2:] = -case.gamma * np.eye(2)
    return out


def companion_max_real_part(case: RotationCase) -> float:
    """Largest real part among the companion-matrix eigenvalues."""
    return float(np.linalg.eigvals(companion_matrix(case)).real.max())


class StabilityVerdict(BaseModel):
    gamma: float
    lam: float
    theta: float
    a1: float
    a2: float
    b: float
    verdict: Literal["Converging", "NonConverging"]
    a2_margin: float
    radical_margin: float
    theta_form_margin: float
    a2_nonnegative: bool
    radical_holds: bool
    theta_form_holds: bool
    threshold_claim_nonconverging: bool
    claim_agrees: bool

    @property
    def converging(self) -> bool:
        return self.verdict == "Converging"


def _criteria_margins(case: RotationCase, roots: CharacteristicRoots) -> dict[str, float]:
    g, lam, theta = case.gamma, case.lam, case.theta
    c = 1.0 / (1.0 + lam**2)
    lhs = _sqrt_clamped(g**4 - 8.0 * g**2 * lam * c + 16.0 * c, case, "radical")
    return {
        "a2": roots.a2,
        "radical": lhs - (g**2 + 4.0 * lam * c),
        "theta_form": g**4 * (1.0 - theta) - theta**3,
    }


def classify(case: RotationCase) -> StabilityVerdict:
    """Converging iff ``a2 < 0``; the two equivalent inequalities must agree."""
    roots = characteristic_roots(case)
    margins = _criteria_margins(case, roots)
    signs = [m for m in margins.values() if abs(m) > CRITERIA_TOL]
    if any(m > 0 for m in signs) and any(m < 0 for m in signs):
        logger.error("stability_criteria_disagree", gamma=case.gamma, lam=case.lam, **margins)
        raise InconsistentCriteriaError(margins)

    nonconverging = roots.a2 >= 0.0
    claim = case.theta < 1.0
    return StabilityVerdict(
        gamma=case.gamma,
        lam=case.lam,
        theta=case.theta,
        a1=roots.a1,
        a2=roots.a2,
        b=roots.b,
        verdict="NonConverging" if nonconverging else "Converging",
        a2_margin=margins["a2"],
        radical_margin=margins["radical"],
        theta_form_margin=margins["theta_form"],
        a2_nonnegative=nonconverging,
        radical_holds=margins["radical"] >= 0.0,
        theta_form_holds=margins["theta_form"] >= 0.0,
        threshold_claim_nonconverging=claim,
        claim_agrees=claim == nonconverging,
    )


def _pair_mul(x: tuple[float, float], y: tuple[float, float]) -> tuple[float, float]:
    return x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0]


def _derivative(roots: CharacteristicRoots, coeffs: Vec, t: float, order: int) -> Vec:
    """``order``-th time derivative of ``sum_k c_k U_k`` at ``t``.

    Identifying (u1, u2) with u1 + i u2, the solution is
    ``(c1 + i c2) e^{(a1 + ib) t} + (c3 + i c4) e^{(a2 - ib) t}``.
    """
    out = np.zeros(2)
    modes = (
        ((coeffs[0], coeffs[1]), roots.a1, roots.b),
        ((coeffs[2], coeffs[3]), roots.a2, -roots.b),
    )
    for weight, a, w in modes:
        scale = math.exp(a * t)
        phase = (scale * math.cos(w * t), scale * math.sin(w * t))
        term = _pair_mul((float(weight[0]), float(weight[1])), phase)
        for _ in range(order):
            term = _pair_mul(term, (a, w))
        out += term
    return out


def closed_form_solution(case: RotationCase, coeffs: Any, t: float) -> tuple[Vec, Vec]:
    """Position and velocity of ``sum_k c_k U_k`` at time ``t``."""
    c = as_vec(coeffs)
    if c.size != 4:
        raise ValueError("four basis coefficients are required")
    roots = characteristic_roots(case)
    return _derivative(roots, c, t, 0), _derivative(roots, c, t, 1)


def closed_form_acceleration(case: RotationCase, coeffs: Any, t: float) -> Vec:
    c = as_vec(coeffs)
    if c.size != 4:
        raise ValueError("four basis coefficients are required")
    return _derivative(characteristic_roots(case), c, t, 2)


def fit_coefficients(case: RotationCase, u0: Any, v0: Any) -> Vec:
    """Coefficients reproducing ``(u0, v0)`` at ``t = 0``."""
    roots = characteristic_roots(case)
    a1, a2, b = roots.a1, roots.a2, roots.b
    basis = np.array(
        [
            [1.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 1.0],
            [a1, -b, a2, b],
            [b, a1, -b, a2],
        ]
    )
    rhs = np.concatenate([as_vec(u0), as_vec(v0)])
    try:
        return solve_linear(basis, rhs, tol=1e-12)
    except SingularMatrixError:
        raise DegenerateParametersError(
            case.gamma, case.lam, "solution basis is singular at t=0"
        ) from None


def rotation_system(case: RotationCase) -> SystemSpec:
    """``u'' + gamma u' + B_lam u = 0`` with the Yosida regularization built from the rotation."""
    return SystemSpec(
        gamma=case.gamma,
        potential=ZeroPotential(size=2),
        operator=yosida_of(linear(ROTATION), case.lam),
    )


def exact_boundary_theta(gamma: float) -> float:
    """Root in (0, 1) of ``theta^3 + gamma^4 theta - gamma^4``; a2 = 0 on this curve."""
    g4 = gamma**4
    roots = np.roots([1.0, 0.0, g4, -g4])
    real = [float(r.real) for r in roots if abs(r.imag) < 1e-12 and 0.0 < r.real < 1.0]
    if len(real) != 1:
        raise DegenerateParametersError(gamma, float("nan"), "boundary root not isolated")
    return real[0]


class BoundaryPoint(BaseModel):
    gamma: float
    theta_claimed: float = 1.0
    theta_exact: float
    lam_exact: float


def boundary_curve(gammas: Iterable[float]) -> list[BoundaryPoint]:
    """The ``theta = 1`` line next to the exact ``a2 = 0`` boundary."""
    out = []
    for g in gammas:
        theta = exact_boundary_theta(g)
        out.append(BoundaryPoint(gamma=g, theta_exact=theta, lam_exact=theta / g**2))
    return out


class SweepRow(BaseModel):
    index: int
    gamma: float
    lam: float
    theta: float
    a1: float
    a2: float
    b: float
    verdict: str
    a2_nonnegative: bool
    radical_holds: bool
    theta_form_holds: bool
    threshold_claim_nonconverging: bool
    claim_agrees: bool
    companion_max_real: float
    oracle_agrees: bool


def sweep_point(index: int, gamma: float, theta: float) -> SweepRow:
    case = RotationCase.from_theta(gamma, theta)
    verdict = classify(case)
    oracle = companion_max_real_part(case)
    agrees = abs(oracle) <= 1e-9 or (oracle >= 0.0) == (not verdict.converging)
    return SweepRow(
        index=index,
        gamma=gamma,
        lam=case.lam,
        theta=case.theta,
        a1=verdict.a1,
        a2=verdict.a2,
        b=verdict.b,
        verdict=verdict.verdict,
        a2_nonnegative=verdict.a2_nonnegative,
        radical_holds=verdict.radical_holds,
        theta_form_holds=verdict.theta_form_holds,
        threshold_claim_nonconverging=verdict.threshold_claim_nonconverging,
        claim_agrees=verdict.claim_agrees,
        companion_max_real=oracle,
        oracle_agrees=agrees,
    )
