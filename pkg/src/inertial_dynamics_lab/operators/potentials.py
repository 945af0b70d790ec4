"""Convex potentials with closed-form values and gradients."""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Annotated, Any, Literal

import numpy as np
from pydantic import Field, PrivateAttr, field_validator, model_validator

from ..core import Mat, Vec, as_mat, as_vec, check_dim, is_psd, symmetric_part
from .base import SpecModel

AffineGradient = tuple[Mat, Vec]


class Potential(SpecModel, ABC):
    """Convex differentiable function on R^n."""

    @property
    @abstractmethod
    def dim(self) -> int:
        """Dimension of the domain."""

    @abstractmethod
    def value(self, x: Vec) -> float:
        """Value at ``x``."""

    @abstractmethod
    def gradient(self, x: Vec) -> Vec:
        """Exact gradient at ``x``."""

    def infimum(self) -> float | None:
        """Closed-form infimum over R^n, or None when unknown."""
        return None

    def affine_gradient(self) -> AffineGradient | None:
        """``(H, b)`` with ``grad(x) = H x + b`` when the gradient is affine."""
        return None

    def lipschitz(self) -> float | None:
        """Global Lipschitz constant of the gradient, when one exists."""
        form = self.affine_gradient()
        if form is None:
            return None
        return float(np.linalg.eigvalsh(symmetric_part(form[0])).max(initial=0.0))

    def strong_convexity(self) -> float:
        """Largest known modulus of strong convexity (0 when none is known)."""
        form = self.affine_gradient()
        if form is None:
            return 0.0
        return max(0.0, float(np.linalg.eigvalsh(symmetric_part(form[0])).min()))

    @abstractmethod
    def embedded(self, offset: int, total: int) -> Potential:
        """Same potential acting on coordinates ``offset:offset+dim`` of R^total."""


class QuadraticPotential(Potential):
    """``x -> 1/2 <Q (x - c), x - c> + <b, x>`` with Q symmetric positive semidefinite.

    The textbook form ``1/2 <x, Q x> + <b, x>`` is ``center=None`` with ``b`` given.
    A center ``c`` alone equals that form with ``b = -Q c`` up to the constant
    ``1/2 <Q c, c>``, which changes values but not gradients.
    """

    kind: Literal["quadratic"] = "quadratic"
    q: list[list[float]]
    center: list[float] | None = None
    b: list[float] | None = None

    _q: Mat = PrivateAttr()
    _c: Vec = PrivateAttr()
    _b: Vec = PrivateAttr()

    @model_validator(mode="after")
    def validate_form(self) -> QuadraticPotential:
        q = as_mat(self.q)
        if q.shape[0] != q.shape[1]:
            raise ValueError(f"Q must be square, got shape {q.shape}")
        if not np.allclose(q, q.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(q).max()))):
            raise ValueError("Q must be symmetric")
        if not is_psd(q):
            raise ValueError("Q must be positive semidefinite (convexity)")
        if self.center is not None and len(self.center) != q.shape[0]:
            raise ValueError("center dimension does not match Q")
        if self.b is not None and len(self.b) != q.shape[0]:
            raise ValueError("linear term b dimension does not match Q")
        return self

    def model_post_init(self, context: Any) -> None:
        self._q = as_mat(self.q)
        self._c = as_vec(self.center) if self.center is not None else np.zeros(self._q.shape[0])
        self._b = as_vec(self.b) if self.b is not None else np.zeros(self._q.shape[0])

    @property
    def dim(self) -> int:
        return int(self._q.shape[0])

    def value(self, x: Vec) -> float:
        d = x - self._c
        return 0.5 * float(d @ (self._q @ d)) + float(self._b @ x)

    def gradient(self, x: Vec) -> Vec:
        return self._q @ (x - self._c) + self._b

    def infimum(self) -> float | None:
        """0 without a linear term; None when ``b`` leaves the range of Q (unbounded below)."""
        if not self._b.any():
            return 0.0
        d = -(np.linalg.pinv(self._q) @ self._b)
        scale = max(1.0, float(np.linalg.norm(self._b)))
        if np.linalg.norm(self._q @ d + self._b) > 1e-9 * scale:
            return None
        return 0.5 * float(self._b @ d) + float(self._b @ self._c)

    def affine_gradient(self) -> AffineGradient:
        return self._q, self._b - self._q @ self._c

    def embedded(self, offset: int, total: int) -> QuadraticPotential:
        q = np.zeros((total, total))
        q[offset : offset + self.dim, offset : offset + self.dim] = self._q
        c = np.zeros(total)
        c[offset : offset + self.dim] = self._c
        b = np.zeros(total)
        b[offset : offset + self.dim] = self._b
        return QuadraticPotential(
            q=q.tolist(), center=c.tolist(), b=b.tolist() if self.b is not None else None
        )


class SeparablePowerPotential(Potential):
    """``x -> sum_i w_i |x_i - c_i|^p / p`` with ``w_i >= 0`` and ``p >= 2``."""

    kind: Literal["separable-power"] = "separable-power"
    weights: list[float]
    exponent: float = 2.0
    center: list[float] | None = None

    _w: Vec = PrivateAttr()
    _c: Vec = PrivateAttr()

    @field_validator("exponent")
    @classmethod
    def validate_exponent(cls, v: float) -> float:
        if v < 2.0:
            raise ValueError("exponent must be >= 2 for a locally Lipschitz gradient")
        return v

    @model_validator(mode="after")
    def validate_weights(self) -> SeparablePowerPotential:
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        if self.center is not None and len(self.center) != len(self.weights):
            raise ValueError("center dimension does not match weights")
        return self

    def model_post_init(self, context: Any) -> None:
        self._w = as_vec(self.weights)
        self._c = as_vec(self.center) if self.center is not None else np.zeros(self._w.size)

    @property
    def dim(self) -> int:
        return int(self._w.size)

    def value(self, x: Vec) -> float:
        return float(np.sum(self._w * np.abs(x - self._c) ** self.exponent) / self.exponent)

    def gradient(self, x: Vec) -> Vec:
        d = x - self._c
        return self._w * np.sign(d) * np.abs(d) ** (self.exponent - 1.0)

    def infimum(self) -> float:
        return 0.0

    def affine_gradient(self) -> AffineGradient | None:
        if self.exponent != 2.0:
            return None
        return np.diag(self._w), -(self._w * self._c)

    def embedded(self, offset: int, total: int) -> SeparablePowerPotential:
        w = np.zeros(total)
        w[offset : offset + self.dim] = self._w
        c = np.zeros(total)
        c[offset : offset + self.dim] = self._c
        return SeparablePowerPotential(
            weights=w.tolist(), exponent=self.exponent, center=c.tolist()
        )


class ZeroPotential(Potential):
    kind: Literal["zero"] = "zero"
    size: int = Field(gt=0)

    @property
    def dim(self) -> int:
        return self.size

    def value(self, x: Vec) -> float:
        return 0.0

    def gradient(self, x: Vec) -> Vec:
        return np.zeros(self.size)

    def infimum(self) -> float:
        return 0.0

    def affine_gradient(self) -> AffineGradient:
        return np.zeros((self.size, self.size)), np.zeros(self.size)

    def embedded(self, offset: int, total: int) -> ZeroPotential:
        return ZeroPotential(size=total)


class ScaledPotential(Potential):
    """``x -> s * base(x)`` with ``s > 0``."""

    kind: Literal["scaled"] = "scaled"
    factor: float = Field(gt=0)
    base: PotentialSpec

    @property
    def dim(self) -> int:
        return self.base.dim

    def value(self, x: Vec) -> float:
        return self.factor * self.base.value(x)

    def gradient(self, x: Vec) -> Vec:
        return self.factor * self.base.gradient(x)

    def infimum(self) -> float | None:
        inf = self.base.infimum()
        return None if inf is None else self.factor * inf

    def affine_gradient(self) -> AffineGradient | None:
        form = self.base.affine_gradient()
        if form is None:
            return None
        return self.factor * form[0], self.factor * form[1]

    def embedded(self, offset: int, total: int) -> ScaledPotential:
        return ScaledPotential(factor=self.factor, base=self.base.embedded(offset, total))


class SumPotential(Potential):
    kind: Literal["sum-of"] = "sum-of"
    terms: list[PotentialSpec] = Field(min_length=1)

    @model_validator(mode="after")
    def validate_dims(self) -> SumPotential:
        dims = {t.dim for t in self.terms}
        if len(dims) != 1:
            raise ValueError(f"terms must share one dimension, got {sorted(dims)}")
        return self

    @property
    def dim(self) -> int:
        return self.terms[0].dim

    def value(self, x: Vec) -> float:
        return sum(t.value(x) for t in self.terms)

    def gradient(self, x: Vec) -> Vec:
        out = self.terms[0].gradient(x)
        for t in self.terms[1:]:
            out = out + t.gradient(x)
        return out

    def infimum(self) -> float | None:
        if len(self.terms) == 1:
            return self.terms[0].infimum()
        return None

    def affine_gradient(self) -> AffineGradient | None:
        forms = [t.affine_gradient() for t in self.terms]
        if any(f is None for f in forms):
            return None
        h = sum(f[0] for f in forms if f is not None)
        b = sum(f[1] for f in forms if f is not None)
        return np.asarray(h, dtype=np.float64), np.asarray(b, dtype=np.float64)

    def lipschitz(self) -> float | None:
        consts = [t.lipschitz() for t in self.terms]
        if any(c is None for c in consts):
            return None
        return float(sum(c for c in consts if c is not None))

    def embedded(self, offset: int, total: int) -> SumPotential:
        return SumPotential(terms=[t.embedded(offset, total) for t in self.terms])


PotentialSpec = Annotated[
    QuadraticPotential | SeparablePowerPotential | ZeroPotential | ScaledPotential | SumPotential,
    Field(discriminator="kind"),
]

ScaledPotential.model_rebuild()
SumPotential.model_rebuild()


def grad(p: Potential, x: Vec) -> Vec:
    """Analytic gradient of ``p`` at ``x``."""
    check_dim(x, p.dim)
    return p.gradient(x)


def quadratic(q: Any, center: Any = None, b: Any = None) -> QuadraticPotential:
    qm = as_mat(q)
    return QuadraticPotential(
        q=qm.tolist(),
        center=None if center is None else as_vec(center).tolist(),
        b=None if b is None else as_vec(b).tolist(),
    )


def half_squared_distance(center: Any) -> QuadraticPotential:
    """``x -> 1/2 |x - c|^2``."""
    c = as_vec(center)
    return QuadraticPotential(q=np.eye(c.size).tolist(), center=c.tolist())


def finite_difference_gradient(p: Potential, x: Vec, step: float = 1e-6) -> Vec:
    """Central differences, used to audit analytic gradients."""
    out = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        out[i] = (p.value(x + e) - p.value(x - e)) / (2.0 * step)
    return out
