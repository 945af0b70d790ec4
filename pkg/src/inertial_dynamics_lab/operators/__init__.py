"""Operator catalog: potentials, convex sets, monotone maps and their algebra."""

from .base import SpecModel
from .monotone import (
    ROTATION,
    Contraction,
    ContractionResidual,
    ContractionSpec,
    GradientOperator,
    LinearContraction,
    LinearOperator,
    MonotoneOperator,
    MonotoneSpec,
    ProjectedGradientContraction,
    ProjectionResidual,
    SaddleOperator,
    ScaledOperator,
    SumOperator,
    YosidaOperator,
    ZeroOperator,
    apply,
    epi_hypo_regularize,
    linear,
    resolvent,
    resolvent_of_yosida,
    saddle_operator,
    yosida,
    yosida_of,
)
from .potentials import (
    Potential,
    PotentialSpec,
    QuadraticPotential,
    ScaledPotential,
    SeparablePowerPotential,
    SumPotential,
    ZeroPotential,
    finite_difference_gradient,
    grad,
    half_squared_distance,
    quadratic,
)
from .saddle import SaddleSpec, bilinear
from .sampling import (
    GrowthBounds,
    cocoercivity_estimate,
    gradient_growth_bounds,
    is_monotone,
    is_nonexpansive,
    lipschitz_estimate,
    monotonicity_estimate,
)
from .sets import (
    AffineSet,
    BallSet,
    BoxSet,
    ConvexSet,
    ConvexSetSpec,
    HalfspaceSet,
    WholeSpace,
    project,
)

__all__ = [
    "ROTATION",
    "AffineSet",
    "BallSet",
    "BoxSet",
    "Contraction",
    "ContractionResidual",
    "ContractionSpec",
    "ConvexSet",
    "ConvexSetSpec",
    "GradientOperator",
    "GrowthBounds",
    "HalfspaceSet",
    "LinearContraction",
    "LinearOperator",
    "MonotoneOperator",
    "MonotoneSpec",
    "Potential",
    "PotentialSpec",
    "ProjectedGradientContraction",
    "ProjectionResidual",
    "QuadraticPotential",
    "SaddleOperator",
    "SaddleSpec",
    "ScaledOperator",
    "ScaledPotential",
    "SeparablePowerPotential",
    "SpecModel",
    "SumOperator",
    "SumPotential",
    "WholeSpace",
    "YosidaOperator",
    "ZeroOperator",
    "ZeroPotential",
    "apply",
    "bilinear",
    "cocoercivity_estimate",
    "epi_hypo_regularize",
    "finite_difference_gradient",
    "grad",
    "gradient_growth_bounds",
    "half_squared_distance",
    "is_monotone",
    "is_nonexpansive",
    "linear",
    "lipschitz_estimate",
    "monotonicity_estimate",
    "project",
    "quadratic",
    "resolvent",
    "resolvent_of_yosida",
    "saddle_operator",
    "yosida",
    "yosida_of",
]
