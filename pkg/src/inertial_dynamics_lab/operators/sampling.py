"""Sampled witnesses for cocoercivity, monotonicity and Lipschitz bounds.

Every estimate is an infimum (or supremum) over sampled pairs in a ball, so
it bounds the true constant from one side only: an empirical witness, not a
certificate. For affine operators the eigen and singular directions of the
linear part are added to the sample, which makes the cocoercivity estimate
sharp on the linear kinds.
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
import structlog
from pydantic import BaseModel

from ..core import Mat, Vec, ball_samples, symmetric_part
from ..exceptions import DegenerateSampleError, DimensionMismatchError
from .monotone import Contraction, MonotoneOperator
from .potentials import Potential

logger = structlog.get_logger()

DEGENERATE_PAIR = 1e-12

VectorMap = Callable[[Vec], Vec]


def _points(samples: int, dim: int, radius: float, seed: int) -> Mat:
    if samples < 2:
        raise ValueError("at least two samples are needed to form a pair")
    if radius <= 0:
        raise ValueError("sampling radius must be positive")
    rng = np.random.default_rng(seed)
    return ball_samples(rng, samples, dim, radius)


def _pairs(points: Mat, seed: int) -> tuple[Mat, Mat]:
    """Neighbour pairs plus a random matching, so every point is used twice."""
    n = points.shape[0]
    rng = np.random.default_rng(seed + 1)
    partner = rng.permutation(n)
    left = np.concatenate([np.arange(n - 1), np.arange(n)])
    right = np.concatenate([np.arange(1, n), partner])
    keep = left != right
    return points[left[keep]], points[right[keep]]


def _image_differences(fn: VectorMap, xs: Mat, ys: Mat) -> Mat:
    return np.array([fn(x) - fn(y) for x, y in zip(xs, ys, strict=True)])


def _linear_directions(m: Mat) -> Mat:
    _, _, vh = np.linalg.svd(m)
    _, eig = np.linalg.eigh(symmetric_part(m))
    return np.vstack([vh, eig.T])


def cocoercivity_estimate(
    op: MonotoneOperator,
    dim: int,
    samples: int = 2000,
    radius: float = 1.0,
    seed: int = 42,
) -> float:
    """Infimum of ``<Au - Av, u - v> / |Au - Av|^2`` over sampled pairs.

    Pairs whose images differ by less than 1e-12 are skipped. A value near 0
    flags an operator that is not cocoercive (skew maps give exactly 0).
    """
    if dim != op.dim:
        raise DimensionMismatchError(op.dim, dim, "sampling")
    points = _points(samples, dim, radius, seed)
    xs, ys = _pairs(points, seed)
    dx = xs - ys
    da = _image_differences(op.apply, xs, ys)
    form = op.affine_form()
    if form is not None:
        directions = _linear_directions(form[0])
        dx = np.vstack([dx, directions])
        da = np.vstack([da, directions @ form[0].T])

    sq = np.einsum("ij,ij->i", da, da)
    usable = np.sqrt(sq) >= DEGENERATE_PAIR
    if not np.any(usable):
        raise DegenerateSampleError("operator constant on sample")
    ratios = np.einsum("ij,ij->i", da[usable], dx[usable]) / sq[usable]
    estimate = float(max(ratios.min(), 0.0))
    logger.debug(
        "cocoercivity_estimated",
        operator=type(op).__name__,
        pairs=int(usable.sum()),
        skipped=int((~usable).sum()),
        estimate=estimate,
    )
    return estimate


def monotonicity_estimate(
    fn: VectorMap,
    dim: int,
    samples: int = 2000,
    radius: float = 1.0,
    seed: int = 42,
) -> float:
    """Infimum of ``<F u - F v, u - v> / |u - v|^2`` over sampled pairs.

    Nonnegative for monotone maps; a positive value is a strong-monotonicity
    witness on the ball.
    """
    points = _points(samples, dim, radius, seed)
    xs, ys = _pairs(points, seed)
    dx = xs - ys
    sq = np.einsum("ij,ij->i", dx, dx)
    usable = np.sqrt(sq) >= DEGENERATE_PAIR
    if not np.any(usable):
        raise DegenerateSampleError("all sampled pairs coincide")
    df = _image_differences(fn, xs[usable], ys[usable])
    return float((np.einsum("ij,ij->i", df, dx[usable]) / sq[usable]).min())


def lipschitz_estimate(
    fn: VectorMap,
    dim: int,
    samples: int = 2000,
    radius: float = 1.0,
    seed: int = 42,
) -> float:
    """Supremum of ``|F u - F v| / |u - v|`` over sampled pairs."""
    points = _points(samples, dim, radius, seed)
    xs, ys = _pairs(points, seed)
    dx = xs - ys
    lengths = np.linalg.norm(dx, axis=1)
    usable = lengths >= DEGENERATE_PAIR
    if not np.any(usable):
        raise DegenerateSampleError("all sampled pairs coincide")
    df = _image_differences(fn, xs[usable], ys[usable])
    return float((np.linalg.norm(df, axis=1) / lengths[usable]).max())


def is_monotone(
    op: MonotoneOperator, samples: int = 500, radius: float = 1.0, seed: int = 42
) -> bool:
    return monotonicity_estimate(op.apply, op.dim, samples, radius, seed) >= -1e-10


def is_nonexpansive(
    t: Contraction, samples: int = 500, radius: float = 1.0, seed: int = 42
) -> bool:
    return lipschitz_estimate(t, t.dim, samples, radius, seed) <= 1.0 + 1e-10


class GrowthBounds(BaseModel):
    """Sampled strong-monotonicity and Lipschitz constants of a gradient."""

    strong_monotonicity: float
    lipschitz: float

    def satisfies(self, eta: float, delta: float, tol: float = 1e-9) -> bool:
        return self.strong_monotonicity >= eta - tol and self.lipschitz <= delta + tol


def gradient_growth_bounds(
    theta: Potential,
    samples: int = 500,
    radius: float = 1.0,
    seed: int = 42,
) -> GrowthBounds:
    """Sampled ``(eta, delta)`` of ``grad theta``; exact for affine gradients."""
    form = theta.affine_gradient()
    if form is not None:
        eigs = np.linalg.eigvalsh(symmetric_part(form[0]))
        return GrowthBounds(
            strong_monotonicity=float(eigs.min()),
            lipschitz=float(np.linalg.norm(form[0], 2)),
        )
    return GrowthBounds(
        strong_monotonicity=monotonicity_estimate(theta.gradient, theta.dim, samples, radius, seed),
        lipschitz=lipschitz_estimate(theta.gradient, theta.dim, samples, radius, seed),
    )
