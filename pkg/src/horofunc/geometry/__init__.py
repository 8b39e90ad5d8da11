"""Exact polytope geometry and set-limit surrogates."""
from .faces import (
    AffineFunctional,
    ExposedChain,
    Face,
    enumerate_faces,
    exposed_face_chain,
    face_containing,
    is_extreme_set,
    verify_chain,
)
from .polytope import (
    GeometryError,
    Polytope,
    convex_hull,
    from_hrep,
    polar,
    vertex_enumeration,
)
from .setlimits import (
    SetLimitEstimate,
    directed_hausdorff,
    hausdorff_distance,
    pk_lower_limit,
    pk_upper_limit,
    point_cloud,
)

__all__ = [
    "AffineFunctional",
    "ExposedChain",
    "Face",
    "GeometryError",
    "Polytope",
    "SetLimitEstimate",
    "convex_hull",
    "directed_hausdorff",
    "enumerate_faces",
    "exposed_face_chain",
    "face_containing",
    "from_hrep",
    "hausdorff_distance",
    "is_extreme_set",
    "pk_lower_limit",
    "pk_upper_limit",
    "point_cloud",
    "polar",
    "vertex_enumeration",
    "verify_chain",
]
