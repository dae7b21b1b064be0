"""
Horizontal CMC tubes in the homogeneous spaces E(κ,τ).

Closed-form and integrated profile curves, finite-difference checks of
their mean curvature, the foliation criterion, the sister correspondence
with minimal helicoids and the isoperimetric profile of Berger spheres.
"""

from horizontal_tubes.curvature import numeric_mean_curvature
from horizontal_tubes.exceptions import DomainError, NumericalError, TubeError
from horizontal_tubes.foliation import foliation_criterion, max_height, solve_x0
from horizontal_tubes.isoperimetric import (
    enclosed_volume,
    isoperimetric_sweep,
    tube_area,
    tube_volume,
)
from horizontal_tubes.profile import (
    ProfileCurve,
    ProfilePoint,
    TubeParams,
    closed_form_profile,
    integrate_profile,
    tube_immersion,
)
from horizontal_tubes.sister import (
    SisterParams,
    SisterTarget,
    conformal_profile,
    lattice_b,
    sister_params,
)
from horizontal_tubes.space import SpaceParams, classify_space

__all__ = [
    "DomainError",
    "NumericalError",
    "ProfileCurve",
    "ProfilePoint",
    "SisterParams",
    "SisterTarget",
    "SpaceParams",
    "TubeError",
    "TubeParams",
    "classify_space",
    "closed_form_profile",
    "conformal_profile",
    "enclosed_volume",
    "foliation_criterion",
    "integrate_profile",
    "isoperimetric_sweep",
    "lattice_b",
    "max_height",
    "numeric_mean_curvature",
    "sister_params",
    "solve_x0",
    "tube_area",
    "tube_immersion",
    "tube_volume",
]
