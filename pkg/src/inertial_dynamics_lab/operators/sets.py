"""Closed convex sets with closed-form Euclidean projections."""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Annotated, Any, Literal

import numpy as np
from pydantic import Field, PrivateAttr, model_validator

from ..core import Mat, Vec, as_mat, as_vec, check_dim, norm
from .base import SpecModel


class ConvexSet(SpecModel, ABC):
    @property
    @abstractmethod
    def dim(self) -> int:
        """Ambient dimension."""

    @abstractmethod
    def project(self, v: Vec) -> Vec:
        """Euclidean projection of ``v``."""

    def contains(self, v: Vec, tol: float = 1e-12) -> bool:
        return norm(self.project(v) - v) <= tol * (1.0 + norm(v))


class BoxSet(ConvexSet):
    kind: Literal["box"] = "box"
    lower: list[float]
    upper: list[float]

    _lo: Vec = PrivateAttr()
    _hi: Vec = PrivateAttr()

    @model_validator(mode="after")
    def validate_bounds(self) -> BoxSet:
        if len(self.lower) != len(self.upper):
            raise ValueError("lower and upper bounds must have equal length")
        if any(lo > hi for lo, hi in zip(self.lower, self.upper, strict=True)):
            raise ValueError("box is empty: some lower bound exceeds its upper bound")
        return self

    def model_post_init(self, context: Any) -> None:
        self._lo = np.asarray(self.lower, dtype=np.float64)
        self._hi = np.asarray(self.upper, dtype=np.float64)

    @property
    def dim(self) -> int:
        return int(self._lo.size)

    def project(self, v: Vec) -> Vec:
        return np.clip(v, self._lo, self._hi)


class BallSet(ConvexSet):
    kind: Literal["ball"] = "ball"
    center: list[float]
    radius: float = Field(gt=0)

    _c: Vec = PrivateAttr()

    def model_post_init(self, context: Any) -> None:
        self._c = as_vec(self.center)

    @property
    def dim(self) -> int:
        return int(self._c.size)

    def project(self, v: Vec) -> Vec:
        d = v - self._c
        dist = norm(d)
        if dist <= self.radius:
            return v.copy()
        return self._c + (self.radius / dist) * d


class HalfspaceSet(ConvexSet):
    """``{x : <n, x> <= offset}``."""

    kind: Literal["halfspace"] = "halfspace"
    normal: list[float]
    offset: float = 0.0

    _n: Vec = PrivateAttr()

    @model_validator(mode="after")
    def validate_normal(self) -> HalfspaceSet:
        if not any(self.normal):
            raise ValueError("halfspace normal must be nonzero")
        return self

    def model_post_init(self, context: Any) -> None:
        self._n = as_vec(self.normal)

    @property
    def dim(self) -> int:
        return int(self._n.size)

    def project(self, v: Vec) -> Vec:
        excess = float(self._n @ v) - self.offset
        if excess <= 0.0:
            return v.copy()
        return v - (excess / float(self._n @ self._n)) * self._n


class AffineSet(ConvexSet):
    """``{x : M x = rhs}``; must be nonempty."""

    kind: Literal["affine"] = "affine"
    matrix: list[list[float]]
    rhs: list[float]

    _m: Mat = PrivateAttr()
    _pinv: Mat = PrivateAttr()
    _rhs: Vec = PrivateAttr()

    @model_validator(mode="after")
    def validate_consistent(self) -> AffineSet:
        m = as_mat(self.matrix)
        r = as_vec(self.rhs)
        if m.shape[0] != r.size:
            raise ValueError("rhs length must equal the number of rows")
        x0 = np.linalg.pinv(m) @ r
        if norm(m @ x0 - r) > 1e-9 * (1.0 + norm(r)):
            raise ValueError("affine constraint set is empty")
        return self

    def model_post_init(self, context: Any) -> None:
        self._m = as_mat(self.matrix)
        self._pinv = np.linalg.pinv(self._m)
        self._rhs = as_vec(self.rhs)

    @property
    def dim(self) -> int:
        return int(self._m.shape[1])

    def project(self, v: Vec) -> Vec:
        return v - self._pinv @ (self._m @ v - self._rhs)


class WholeSpace(ConvexSet):
    kind: Literal["whole-space"] = "whole-space"
    size: int = Field(gt=0)

    @property
    def dim(self) -> int:
        return self.size

    def project(self, v: Vec) -> Vec:
        return v.copy()


ConvexSetSpec = Annotated[
    BoxSet | BallSet | HalfspaceSet | AffineSet | WholeSpace,
    Field(discriminator="kind"),
]


def project(c: ConvexSet, v: Vec) -> Vec:
    """Closed-form Euclidean projection onto ``c``."""
    check_dim(v, c.dim)
    return c.project(v)
