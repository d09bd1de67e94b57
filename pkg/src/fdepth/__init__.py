"""Depth functions for functional data built from finite families of linear aspects."""

from .estimators import METHODS, FunctionalDepth, FunctionalPCA, functional_depth, resolve_config
from .functional import (
    PcaModel,
    band_depth,
    estimate_derivative,
    fit_pca,
    graph_depth,
    grid_depth,
    halfgraph_depth,
    location_slope_depth,
    location_slope_sample,
    pc_depth,
)
from .multivariate import (
    KINDS,
    DegenerateCloudError,
    DepthError,
    MultivariateDepth,
    halfspace_depth_1d,
    halfspace_depth_2d,
    halfspace_depth_approx,
    mahalanobis_depth,
    simplicial_depth_1d,
    zonoid_depth,
)
from .phi import (
    Aspect,
    AspectSet,
    DepthValue,
    deepest_condition,
    is_in_central_region,
    phi_depth,
    projection_aspects,
    surjection_check,
    time_point_aspects,
    weighted_phi_depth,
)
from .regions import (
    CentralRegionEnvelope,
    OutlierReport,
    classify_outliers,
    deepest_functions,
    region_envelope,
)
from .sample import FunctionalSample

__version__ = "0.1.0"

__all__ = [
    "METHODS",
    "KINDS",
    "Aspect",
    "AspectSet",
    "CentralRegionEnvelope",
    "DegenerateCloudError",
    "DepthError",
    "DepthValue",
    "FunctionalDepth",
    "FunctionalPCA",
    "FunctionalSample",
    "MultivariateDepth",
    "OutlierReport",
    "PcaModel",
    "band_depth",
    "classify_outliers",
    "deepest_condition",
    "deepest_functions",
    "estimate_derivative",
    "fit_pca",
    "functional_depth",
    "graph_depth",
    "grid_depth",
    "halfgraph_depth",
    "halfspace_depth_1d",
    "halfspace_depth_2d",
    "halfspace_depth_approx",
    "is_in_central_region",
    "location_slope_depth",
    "location_slope_sample",
    "mahalanobis_depth",
    "pc_depth",
    "phi_depth",
    "projection_aspects",
    "region_envelope",
    "resolve_config",
    "simplicial_depth_1d",
    "surjection_check",
    "time_point_aspects",
    "weighted_phi_depth",
    "zonoid_depth",
]
