"""Monotone and cocoercive single-valued operators.

An operator A is lambda-cocoercive when
``<Au - Av, u - v> >= lambda |Au - Av|^2`` for all u, v. In R^n a continuous
monotone map is maximal monotone, so maximality is never checked separately.

Operators built only from affine pieces expose their affine form ``(M, b)``
and are applied, inverted and Yosida-regularized in closed form. The generic
resolvent is a damped fixed-point iteration on the 1-strongly monotone
equation ``x + lam A x = v``.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Annotated, Any, Literal

import numpy as np
import structlog
from pydantic import Field, PrivateAttr, model_validator

from ..core import Mat, Vec, as_mat, as_vec, check_dim, norm, solve_linear
from ..exceptions import ConvergenceError, SingularMatrixError, UnsupportedOperationError
from .base import SpecModel
from .potentials import PotentialSpec
from .saddle import SaddleSpec
from .sets import ConvexSetSpec

logger = structlog.get_logger()

AffineForm = tuple[Mat, Vec]

DEFAULT_RESOLVENT_TOL = 1e-12
DEFAULT_RESOLVENT_MAX_ITER = 10_000


class Contraction(SpecModel, ABC):
    """Nonexpansive map ``T`` with ``|Tu - Tv| <= |u - v|``."""

    @property
    @abstractmethod
    def dim(self) -> int:
        """Ambient dimension."""

    @abstractmethod
    def __call__(self, x: Vec) -> Vec:
        """Value ``T(x)``."""

    @abstractmethod
    def lipschitz_bound(self) -> float:
        """Lipschitz constant in [0, 1]."""

    def affine_form(self) -> AffineForm | None:
        return None


class LinearContraction(Contraction):
    kind: Literal["linear"] = "linear"
    matrix: list[list[float]]

    _m: Mat = PrivateAttr()

    @model_validator(mode="after")
    def validate_norm(self) -> LinearContraction:
        m = as_mat(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise ValueError("contraction matrix must be square")
        if np.linalg.norm(m, 2) > 1.0 + 1e-12:
            raise ValueError("contraction matrix must have operator norm <= 1")
        return self

    def model_post_init(self, context: Any) -> None:
        self._m = as_mat(self.matrix)

    @property
    def dim(self) -> int:
        return int(self._m.shape[0])

    def __call__(self, x: Vec) -> Vec:
        return self._m @ x

    def lipschitz_bound(self) -> float:
        return float(min(1.0, np.linalg.norm(self._m, 2)))

    def affine_form(self) -> AffineForm:
        return self._m, np.zeros(self.dim)


class ProjectedGradientContraction(Contraction):
    """``T(x) = P_C(x - mu grad g(x))``, nonexpansive for ``0 < mu <= 2/L``."""

    kind: Literal["projected-gradient"] = "projected-gradient"
    objective: PotentialSpec
    constraint: ConvexSetSpec
    mu: float = Field(gt=0)

    @model_validator(mode="after")
    def validate_step(self) -> ProjectedGradientContraction:
        _check_projection_data(self.objective, self.constraint, self.mu)
        return self

    @property
    def dim(self) -> int:
        return self.objective.dim

    def __call__(self, x: Vec) -> Vec:
        return self.constraint.project(x - self.mu * self.objective.gradient(x))

    def lipschitz_bound(self) -> float:
        return 1.0


ContractionSpec = Annotated[
    LinearContraction | ProjectedGradientContraction, Field(discriminator="kind")
]


def _check_projection_data(objective: Any, constraint: Any, mu: float) -> None:
    if objective.dim != constraint.dim:
        raise ValueError("objective and constraint dimensions differ")
    lip = objective.lipschitz()
    if lip is not None and lip > 0 and mu > 2.0 / lip * (1.0 + 1e-12):
        raise ValueError(f"step mu={mu} exceeds 2/L={2.0 / lip}")


class MonotoneOperator(SpecModel, ABC):
    """Single-valued monotone map with an optional claimed cocoercivity."""

    cocoercivity: float | None = Field(default=None, gt=0)
    lipschitz: float | None = Field(default=None, gt=0)

    _affine: Any = PrivateAttr(default=None)
    _affine_ready: bool = PrivateAttr(default=False)

    @property
    @abstractmethod
    def dim(self) -> int:
        """Ambient dimension."""

    @abstractmethod
    def _apply(self, x: Vec) -> Vec:
        """Pointwise value (non-affine path)."""

    def _affine_form(self) -> AffineForm | None:
        return None

    def _derived_cocoercivity(self) -> float | None:
        return None

    def affine_form(self) -> AffineForm | None:
        """``(M, b)`` with ``A x = M x + b`` when A is affine."""
        if not self._affine_ready:
            self._affine = self._affine_form()
            self._affine_ready = True
        return self._affine  # type: ignore[no-any-return]

    def apply(self, x: Vec) -> Vec:
        form = self.affine_form()
        if form is not None:
            return form[0] @ x + form[1]
        return self._apply(x)

    @property
    def claimed_cocoercivity(self) -> float | None:
        """Explicit claim, else the constant implied by the operator's kind."""
        if self.cocoercivity is not None:
            return self.cocoercivity
        return self._derived_cocoercivity()

    def lipschitz_bound(self) -> float | None:
        if self.lipschitz is not None:
            return self.lipschitz
        lam = self.claimed_cocoercivity
        if lam is not None:
            return 1.0 / lam
        form = self.affine_form()
        if form is not None:
            return float(np.linalg.norm(form[0], 2))
        return None


class LinearOperator(MonotoneOperator):
    """``x -> M x + offset`` with M monotone (positive semidefinite symmetric part)."""

    kind: Literal["linear"] = "linear"
    matrix: list[list[float]]
    offset: list[float] | None = None

    @model_validator(mode="after")
    def validate_monotone(self) -> LinearOperator:
        m = as_mat(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise ValueError("operator matrix must be square")
        sym = 0.5 * (m + m.T)
        if np.linalg.eigvalsh(sym).min() < -1e-12 * max(1.0, float(np.abs(m).max())):
            raise ValueError("operator matrix is not monotone")
        if self.offset is not None and len(self.offset) != m.shape[0]:
            raise ValueError("offset dimension does not match the matrix")
        return self

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def _affine_form(self) -> AffineForm:
        m = as_mat(self.matrix)
        b = as_vec(self.offset) if self.offset is not None else np.zeros(m.shape[0])
        return m, b

    def _apply(self, x: Vec) -> Vec:
        raise AssertionError("linear operators are always affine")


class GradientOperator(MonotoneOperator):
    kind: Literal["gradient"] = "gradient"
    potential: PotentialSpec

    @property
    def dim(self) -> int:
        return self.potential.dim

    def _apply(self, x: Vec) -> Vec:
        return self.potential.gradient(x)

    def _affine_form(self) -> AffineForm | None:
        return self.potential.affine_gradient()

    def _derived_cocoercivity(self) -> float | None:
        lip = self.potential.lipschitz()
        if lip is None or lip <= 0:
            return None
        return 1.0 / lip


class ContractionResidual(MonotoneOperator):
    """``A = I - T`` for a contraction T; always 1/2-cocoercive."""

    kind: Literal["contraction-residual"] = "contraction-residual"
    contraction: ContractionSpec

    @property
    def dim(self) -> int:
        return self.contraction.dim

    def _apply(self, x: Vec) -> Vec:
        return x - self.contraction(x)

    def _affine_form(self) -> AffineForm | None:
        form = self.contraction.affine_form()
        if form is None:
            return None
        return np.eye(self.dim) - form[0], -form[1]

    def _derived_cocoercivity(self) -> float:
        return 0.5

    def lipschitz_bound(self) -> float:
        return self.lipschitz if self.lipschitz is not None else 2.0


class ProjectionResidual(MonotoneOperator):
    """``x -> x - P_C(x - mu grad g(x))``; 1/2-cocoercive for ``0 < mu < 2/L``."""

    kind: Literal["projection-residual"] = "projection-residual"
    objective: PotentialSpec
    constraint: ConvexSetSpec
    mu: float = Field(gt=0)

    @model_validator(mode="after")
    def validate_step(self) -> ProjectionResidual:
        _check_projection_data(self.objective, self.constraint, self.mu)
        return self

    @property
    def dim(self) -> int:
        return self.objective.dim

    def _apply(self, x: Vec) -> Vec:
        return x - self.constraint.project(x - self.mu * self.objective.gradient(x))

    def _derived_cocoercivity(self) -> float:
        return 0.5

    def lipschitz_bound(self) -> float:
        return self.lipschitz if self.lipschitz is not None else 2.0


class SaddleOperator(MonotoneOperator):
    """``(grad_x1 L, -grad_x2 L)`` of a quadratic-bilinear convex-concave L."""

    kind: Literal["saddle"] = "saddle"
    saddle: SaddleSpec

    @property
    def dim(self) -> int:
        return self.saddle.dim

    def _affine_form(self) -> AffineForm:
        return self.saddle.operator_matrix()

    def _apply(self, x: Vec) -> Vec:
        raise AssertionError("saddle operators are always affine")


class YosidaOperator(MonotoneOperator):
    """``A_lam = (I - J_lam)/lam``; lam-cocoercive with the same zeros as ``base``."""

    kind: Literal["yosida-of"] = "yosida-of"
    base: MonotoneSpec
    lam: float = Field(gt=0)
    tol: float = Field(default=DEFAULT_RESOLVENT_TOL, gt=0)
    max_iter: int = Field(default=DEFAULT_RESOLVENT_MAX_ITER, gt=0)

    @property
    def dim(self) -> int:
        return self.base.dim

    def _apply(self, x: Vec) -> Vec:
        j = resolvent(self.base, self.lam, x, self.tol, max_iter=self.max_iter)
        return (x - j) / self.lam

    def _affine_form(self) -> AffineForm | None:
        form = self.base.affine_form()
        if form is None:
            return None
        m, b = form
        n = m.shape[0]
        k = _inverse(np.eye(n) + self.lam * m)
        return (np.eye(n) - k) / self.lam, k @ b

    def _derived_cocoercivity(self) -> float:
        return self.lam


class ScaledOperator(MonotoneOperator):
    kind: Literal["scaled"] = "scaled"
    factor: float = Field(gt=0)
    base: MonotoneSpec

    @property
    def dim(self) -> int:
        return self.base.dim

    def _apply(self, x: Vec) -> Vec:
        return self.factor * self.base.apply(x)

    def _affine_form(self) -> AffineForm | None:
        form = self.base.affine_form()
        if form is None:
            return None
        return self.factor * form[0], self.factor * form[1]

    def _derived_cocoercivity(self) -> float | None:
        lam = self.base.claimed_cocoercivity
        return None if lam is None else lam / self.factor


class SumOperator(MonotoneOperator):
    kind: Literal["sum-of"] = "sum-of"
    terms: list[MonotoneSpec] = Field(min_length=1)

    @model_validator(mode="after")
    def validate_dims(self) -> SumOperator:
        dims = {t.dim for t in self.terms}
        if len(dims) != 1:
            raise ValueError(f"terms must share one dimension, got {sorted(dims)}")
        return self

    @property
    def dim(self) -> int:
        return self.terms[0].dim

    def _apply(self, x: Vec) -> Vec:
        out = self.terms[0].apply(x)
        for t in self.terms[1:]:
            out = out + t.apply(x)
        return out

    def _affine_form(self) -> AffineForm | None:
        forms = [t.affine_form() for t in self.terms]
        if any(f is None for f in forms):
            return None
        m = np.sum([f[0] for f in forms if f is not None], axis=0)
        b = np.sum([f[1] for f in forms if f is not None], axis=0)
        return m, b

    def _derived_cocoercivity(self) -> float | None:
        # sum of lam_i-cocoercive maps is (1 / sum 1/lam_i)-cocoercive
        lams = [t.claimed_cocoercivity for t in self.terms]
        if any(lam is None for lam in lams):
            return None
        return 1.0 / sum(1.0 / lam for lam in lams if lam is not None)


class ZeroOperator(MonotoneOperator):
    """Null operator; cocoercive for every constant, so no constant is derived."""

    kind: Literal["zero"] = "zero"
    size: int = Field(gt=0)

    @property
    def dim(self) -> int:
        return self.size

    def _affine_form(self) -> AffineForm:
        return np.zeros((self.size, self.size)), np.zeros(self.size)

    def _apply(self, x: Vec) -> Vec:
        return np.zeros(self.size)


MonotoneSpec = Annotated[
    LinearOperator
    | GradientOperator
    | ContractionResidual
    | ProjectionResidual
    | SaddleOperator
    | YosidaOperator
    | ScaledOperator
    | SumOperator
    | ZeroOperator,
    Field(discriminator="kind"),
]

YosidaOperator.model_rebuild()
ScaledOperator.model_rebuild()
SumOperator.model_rebuild()


def _inverse(m: Mat) -> Mat:
    try:
        return np.linalg.inv(m)
    except np.linalg.LinAlgError:
        raise SingularMatrixError(float("inf"), "I + lam M is not invertible") from None


def apply(op: MonotoneOperator, x: Vec) -> Vec:
    """Value of the operator at ``x``."""
    check_dim(x, op.dim)
    return op.apply(x)


def resolvent(
    op: MonotoneOperator,
    lam: float,
    v: Vec,
    tol: float = DEFAULT_RESOLVENT_TOL,
    *,
    max_iter: int = DEFAULT_RESOLVENT_MAX_ITER,
) -> Vec:
    """``J_lam v = (I + lam A)^{-1} v``.

    The output satisfies ``|x + lam A x - v| <= tol``. Affine operators use a
    direct solve, everything else a damped fixed-point iteration with step
    ``1 / (1 + lam Lip(A))^2``.
    """
    if lam <= 0:
        raise ValueError("resolvent index must be positive")
    check_dim(v, op.dim)
    if isinstance(op, ZeroOperator):
        return v.copy()

    def defect(x: Vec) -> Vec:
        return x + lam * op.apply(x) - v

    form = op.affine_form()
    if form is not None:
        m, b = form
        system = np.eye(op.dim) + lam * m
        x = solve_linear(system, v - lam * b, tol=max(tol, 1e-14))
        r = defect(x)
        # one refinement pass recovers digits lost to rounding
        if norm(r) > tol:
            x = x - solve_linear(system, r, tol=max(tol, 1e-14))
            r = defect(x)
        if norm(r) > tol:
            raise ConvergenceError("affine resolvent", norm(r), 2)
        return x

    lip = op.lipschitz_bound()
    if lip is None:
        raise UnsupportedOperationError(
            f"resolvent of {type(op).__name__} needs a Lipschitz bound; set `lipschitz`"
        )
    tau = 1.0 / (1.0 + lam * lip) ** 2
    x = v.copy()
    best = float("inf")
    for _ in range(max_iter):
        r = defect(x)
        res = norm(r)
        best = min(best, res)
        if res <= tol:
            return x
        x = x - tau * r
    logger.warning(
        "resolvent_not_converged", operator=type(op).__name__, lam=lam, best_residual=best
    )
    raise ConvergenceError("resolvent fixed-point iteration", best, max_iter)


def yosida(
    op: MonotoneOperator,
    lam: float,
    v: Vec,
    tol: float = DEFAULT_RESOLVENT_TOL,
    *,
    max_iter: int = DEFAULT_RESOLVENT_MAX_ITER,
) -> Vec:
    """``A_lam v = (v - J_lam v) / lam``."""
    return (v - resolvent(op, lam, v, tol, max_iter=max_iter)) / lam


def resolvent_of_yosida(
    op: MonotoneOperator,
    lam: float,
    mu: float,
    v: Vec,
    tol: float = DEFAULT_RESOLVENT_TOL,
    *,
    max_iter: int = DEFAULT_RESOLVENT_MAX_ITER,
) -> Vec:
    """``J_mu^{A_lam} v = lam/(lam+mu) v + mu/(lam+mu) J_{lam+mu}^A v``."""
    if lam <= 0 or mu <= 0:
        raise ValueError("lam and mu must be positive")
    s = lam + mu
    return (lam / s) * v + (mu / s) * resolvent(op, s, v, tol, max_iter=max_iter)


def yosida_of(op: MonotoneOperator, lam: float, **kwargs: Any) -> YosidaOperator:
    return YosidaOperator(base=op, lam=lam, **kwargs)  # type: ignore[arg-type]


def saddle_operator(saddle: SaddleSpec) -> SaddleOperator:
    """Monotone operator of L on the product space; no cocoercivity claimed."""
    return SaddleOperator(saddle=saddle)


def epi_hypo_regularize(saddle: SaddleSpec, lam: float) -> YosidaOperator:
    """Operator of the epi-hypo Moreau-Yosida regularization of L.

    It is the Yosida approximation of the saddle operator, so it is
    lam-cocoercive and shares the saddle operator's zeros.
    """
    return YosidaOperator(base=saddle_operator(saddle), lam=lam, cocoercivity=lam)


def linear(matrix: Any, offset: Any = None, **kwargs: Any) -> LinearOperator:
    m = as_mat(matrix)
    return LinearOperator(
        matrix=m.tolist(),
        offset=None if offset is None else as_vec(offset).tolist(),
        **kwargs,
    )


ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])
