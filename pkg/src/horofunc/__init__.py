"""Horofunction boundaries of finite-dimensional (possibly asymmetric) normed spaces."""

from .convexfn import AffineOnPolytope, MaxAffine, lf_transform_dual, lf_transform_primal
from .horoboundary import (
    build_almost_geodesic,
    build_dual_horodata,
    busemann_point,
    check_extreme_closure,
    identify_horofunction,
    limit_along_ray,
    verify_almost_geodesic,
    verify_min_decomposition,
)
from .normedspace import BallSpec, NormedSpace, phi, phi_star_closed_form, realize_ball

__version__ = "0.1.0"

__all__ = [
    "AffineOnPolytope",
    "BallSpec",
    "MaxAffine",
    "NormedSpace",
    "build_almost_geodesic",
    "build_dual_horodata",
    "busemann_point",
    "check_extreme_closure",
    "identify_horofunction",
    "lf_transform_dual",
    "lf_transform_primal",
    "limit_along_ray",
    "phi",
    "phi_star_closed_form",
    "realize_ball",
    "verify_almost_geodesic",
    "verify_min_decomposition",
]
