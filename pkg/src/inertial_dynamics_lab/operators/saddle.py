"""Quadratic-bilinear convex-concave functions.

``L(x1, x2) = 1/2 <Q1 x1, x1> - 1/2 <Q2 x2, x2> + <R x1, x2> + <a, x1> - <b, x2>``
with Q1, Q2 symmetric positive semidefinite, so L is convex in x1 and concave
in x2. Its saddle operator ``(grad_x1 L, -grad_x2 L)`` is the affine map
``(Q1 x1 + R^T x2 + a, Q2 x2 - R x1 + b)``.
"""

from __future__ import annotations

from typing import Any

import numpy as np
from pydantic import PrivateAttr, model_validator

from ..core import Mat, Vec, as_mat, as_vec, block_diag, is_psd
from .base import SpecModel


class SaddleSpec(SpecModel):
    q1: list[list[float]]
    q2: list[list[float]]
    coupling: list[list[float]]
    a: list[float] | None = None
    b: list[float] | None = None

    _q1: Mat = PrivateAttr()
    _q2: Mat = PrivateAttr()
    _r: Mat = PrivateAttr()
    _a: Vec = PrivateAttr()
    _b: Vec = PrivateAttr()

    @model_validator(mode="after")
    def validate_blocks(self) -> SaddleSpec:
        q1, q2, r = as_mat(self.q1), as_mat(self.q2), as_mat(self.coupling)
        for name, q in (("Q1", q1), ("Q2", q2)):
            if q.shape[0] != q.shape[1] or not np.allclose(q, q.T):
                raise ValueError(f"{name} must be square and symmetric")
            if not is_psd(q):
                raise ValueError(f"{name} must be positive semidefinite")
        if r.shape != (q2.shape[0], q1.shape[0]):
            expected = (q2.shape[0], q1.shape[0])
            raise ValueError(f"coupling must have shape {expected}, got {r.shape}")
        if self.a is not None and len(self.a) != q1.shape[0]:
            raise ValueError("a must match the x1 dimension")
        if self.b is not None and len(self.b) != q2.shape[0]:
            raise ValueError("b must match the x2 dimension")
        return self

    def model_post_init(self, context: Any) -> None:
        self._q1 = as_mat(self.q1)
        self._q2 = as_mat(self.q2)
        self._r = as_mat(self.coupling)
        self._a = as_vec(self.a) if self.a is not None else np.zeros(self._q1.shape[0])
        self._b = as_vec(self.b) if self.b is not None else np.zeros(self._q2.shape[0])

    @property
    def n1(self) -> int:
        return int(self._q1.shape[0])

    @property
    def n2(self) -> int:
        return int(self._q2.shape[0])

    @property
    def dim(self) -> int:
        return self.n1 + self.n2

    @property
    def blocks(self) -> tuple[Mat, Mat, Mat, Vec, Vec]:
        return self._q1, self._q2, self._r, self._a, self._b

    def split(self, x: Vec) -> tuple[Vec, Vec]:
        return x[: self.n1], x[self.n1 :]

    def value(self, x1: Vec, x2: Vec) -> float:
        return float(
            0.5 * x1 @ (self._q1 @ x1)
            - 0.5 * x2 @ (self._q2 @ x2)
            + x2 @ (self._r @ x1)
            + self._a @ x1
            - self._b @ x2
        )

    def grad_x1(self, x1: Vec, x2: Vec) -> Vec:
        return self._q1 @ x1 + self._r.T @ x2 + self._a

    def grad_x2(self, x1: Vec, x2: Vec) -> Vec:
        return -(self._q2 @ x2) + self._r @ x1 - self._b

    def operator_matrix(self) -> tuple[Mat, Vec]:
        """Affine form ``(M, c)`` of the saddle operator on the product space."""
        m = block_diag(self._q1, self._q2)
        m[: self.n1, self.n1 :] = self._r.T
        m[self.n1 :, : self.n1] = -self._r
        return m, np.concatenate([self._a, self._b])

    def is_zero(self) -> bool:
        m, c = self.operator_matrix()
        return not np.any(m) and not np.any(c)


def bilinear(beta: float, n: int = 1) -> SaddleSpec:
    """``L(x1, x2) = beta <x1, x2>`` on R^n x R^n."""
    zeros = np.zeros((n, n)).tolist()
    return SaddleSpec(q1=zeros, q2=zeros, coupling=(beta * np.eye(n)).tolist())
