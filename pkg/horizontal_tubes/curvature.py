"""
Finite-difference fundamental forms of immersed surfaces.

Everything here is independent of the profile ODE: the immersion is
differentiated numerically and contracted with the ambient metric, so
the prescribed mean curvature can be checked from scratch.
"""

from logging import getLogger
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from horizontal_tubes.exceptions import DegenerateTangencyError
from horizontal_tubes.profile import (
    TubeParams,
    closed_form_profile,
    orbit_point,
    profile_derivatives,
    tube_immersion,
)
from horizontal_tubes.sister import helicoid_immersion
from horizontal_tubes.space import (
    ModelPoint,
    SpaceParams,
    coordinate_connection,
    frame,
)

logger = getLogger("horizontal_tubes.curvature")

DEFAULT_STEP = 1e-3

Chart = Callable[[float, float], ModelPoint]

# Fourth order central stencils: (offset, weight).
_FIRST = ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12))
_SECOND = ((-2, -1 / 12), (-1, 16 / 12), (0, -30 / 12), (1, 16 / 12), (2, -1 / 12))


class FundamentalForms(NamedTuple):
    """First and second fundamental forms with the angle function."""

    first_form: np.ndarray
    second_form: np.ndarray
    nu: float
    normal: np.ndarray

    @property
    def mean_curvature(self) -> float:
        """Half of the trace of the shape operator."""
        shape = np.linalg.solve(self.first_form, self.second_form)
        return float(np.trace(shape) / 2)


class _Stencil:
    """Cached chart evaluations on the (u, v) lattice around a point."""

    def __init__(self, chart: Chart, u: float, v: float, step: float) -> None:
        self.chart = chart
        self.u = u
        self.v = v
        self.du = step * (1 + abs(u))
        self.dv = step * (1 + abs(v))
        self.cache: Dict[Tuple[int, int], np.ndarray] = {}

    def at(self, i: int, j: int) -> np.ndarray:
        if (i, j) not in self.cache:
            point = self.chart(self.u + i * self.du, self.v + j * self.dv)
            self.cache[(i, j)] = point.as_array()
        return self.cache[(i, j)]

    def first(self) -> Tuple[np.ndarray, np.ndarray]:
        along_u = sum(w * self.at(i, 0) for i, w in _FIRST) / self.du
        along_v = sum(w * self.at(0, j) for j, w in _FIRST) / self.dv
        return along_u, along_v

    def second(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        uu = sum(w * self.at(i, 0) for i, w in _SECOND) / self.du**2
        vv = sum(w * self.at(0, j) for j, w in _SECOND) / self.dv**2
        uv = sum(
            wi * wj * self.at(i, j) for i, wi in _FIRST for j, wj in _FIRST
        ) / (self.du * self.dv)
        return uu, uv, vv


def _first_form(
    coframe: np.ndarray,
    along_u: np.ndarray,
    along_v: np.ndarray,
) -> np.ndarray:
    tan_u = coframe @ along_u
    tan_v = coframe @ along_v
    cross = float(tan_u @ tan_v)
    return np.array([[tan_u @ tan_u, cross], [cross, tan_v @ tan_v]])


def surface_fundamental_forms(
    p: SpaceParams,
    chart: Chart,
    u: float,
    v: float,
    step: float = DEFAULT_STEP,
    inward: Optional[np.ndarray] = None,
) -> FundamentalForms:
    """
    Fundamental forms of a parametrized surface at (u, v).

    Partial derivatives use fourth order central stencils with spacing
    ``step * (1 + |parameter|)``. The normal is X_u × X_v in the
    orthonormal frame, flipped to point along ``inward`` when given.

    :param p: ambient space parameters.
    :param chart: parametrization returning Cartan or half-space points.
    :param u: first parameter.
    :param v: second parameter.
    :param step: relative finite-difference step.
    :param inward: optional coordinate vector fixing the side of the normal.
    :raises DegenerateTangencyError: if det I < 1e-14.
    :return: fundamental forms.
    """
    if step <= 0:
        raise ValueError("The finite-difference step must be positive")
    stencil = _Stencil(chart, u, v, step)
    center = chart(u, v)
    coframe = np.linalg.inv(frame(p, center))
    connection = coordinate_connection(p, center)

    along_u, along_v = stencil.first()
    first_form = _first_form(coframe, along_u, along_v)
    if np.linalg.det(first_form) < 1e-14:
        raise DegenerateTangencyError(f"Surface is not immersed at {(u, v)}")

    normal = np.cross(coframe @ along_u, coframe @ along_v)
    normal /= np.linalg.norm(normal)
    if inward is not None and normal @ (coframe @ inward) < 0:
        normal = -normal

    def second_entry(left: np.ndarray, right: np.ndarray, mixed: np.ndarray) -> float:
        transport = np.einsum("i,j,ijc->c", left, right, connection)
        covariant = coframe @ mixed + transport
        return float(normal @ covariant)

    uu, uv, vv = stencil.second()
    cross = second_entry(along_u, along_v, uv)
    second_form = np.array(
        [
            [second_entry(along_u, along_u, uu), cross],
            [cross, second_entry(along_v, along_v, vv)],
        ],
    )
    return FundamentalForms(first_form, second_form, float(normal[2]), normal)


def _inward_vector(t: TubeParams, phi: float, v: float) -> np.ndarray:
    point = closed_form_profile(t, phi)
    dr, dh = profile_derivatives(t, phi)
    delta = 1e-6 * (1 + abs(point.r))
    ahead = orbit_point(t, point.r + delta, point.h, v).as_array()
    behind = orbit_point(t, point.r - delta, point.h, v).as_array()
    along_r = (ahead - behind) / (2 * delta)
    # The height enters every chart as an additive z-shift.
    along_h = np.array([0.0, 0.0, 1.0])
    return -dh * along_r + dr * along_h


def numeric_fundamental_forms(
    t: TubeParams,
    phi: float,
    v: float,
    step: float = DEFAULT_STEP,
) -> FundamentalForms:
    """
    Fundamental forms of the H-tube X(φ, v).

    The normal points towards the axis Γ, which makes the mean curvature
    equal to +H.

    :param t: tube parameters.
    :param phi: auxiliary angle.
    :param v: translation parameter.
    :param step: relative finite-difference step.
    :return: fundamental forms.
    """
    return surface_fundamental_forms(
        t.space,
        lambda ph, vv: tube_immersion(t, ph, vv),
        phi,
        v,
        step,
        inward=_inward_vector(t, phi, v),
    )


def numeric_mean_curvature(
    t: TubeParams,
    phi: float,
    v: float,
    step: float = DEFAULT_STEP,
) -> float:
    """
    Mean curvature trace(I⁻¹ II)/2 of the H-tube at (φ, v).

    :param t: tube parameters.
    :param phi: auxiliary angle.
    :param v: translation parameter.
    :param step: relative finite-difference step.
    :return: numerical mean curvature.
    """
    return numeric_fundamental_forms(t, phi, v, step).mean_curvature


def first_fundamental_form(
    t: TubeParams,
    phi: float,
    v: float,
    step: float = DEFAULT_STEP,
) -> np.ndarray:
    """
    First fundamental form of the H-tube, without second derivatives.

    :param t: tube parameters.
    :param phi: auxiliary angle.
    :param v: translation parameter.
    :param step: relative finite-difference step.
    :return: 2×2 matrix.
    """
    stencil = _Stencil(lambda ph, vv: tube_immersion(t, ph, vv), phi, v, step)
    coframe = np.linalg.inv(frame(t.space, tube_immersion(t, phi, v)))
    return _first_form(coframe, *stencil.first())


def helicoid_fundamental_forms(
    kappa_t: float,
    tau_t: float,
    a: float,
    u: float,
    v: float,
    step: float = DEFAULT_STEP,
) -> FundamentalForms:
    """
    Fundamental forms of the spherical helicoid of pitch ``a``.

    :param kappa_t: base curvature κ̃ > 0.
    :param tau_t: bundle curvature τ̃.
    :param a: pitch.
    :param u: arc length along the ruling.
    :param v: rotation angle.
    :param step: relative finite-difference step.
    :return: fundamental forms.
    """
    return surface_fundamental_forms(
        SpaceParams(kappa_t, tau_t),
        lambda uu, vv: helicoid_immersion(kappa_t, tau_t, a, uu, vv),
        u,
        v,
        step,
    )


def helicoid_mean_curvature(
    kappa_t: float,
    tau_t: float,
    a: float,
    u: float,
    v: float,
    step: float = DEFAULT_STEP,
) -> float:
    """
    Numerical mean curvature of a spherical helicoid; it vanishes.

    :param kappa_t: base curvature κ̃ > 0.
    :param tau_t: bundle curvature τ̃.
    :param a: pitch.
    :param u: arc length along the ruling.
    :param v: rotation angle.
    :param step: relative finite-difference step.
    :return: numerical mean curvature.
    """
    return helicoid_fundamental_forms(kappa_t, tau_t, a, u, v, step).mean_curvature


def helicoid_angle_numeric(
    kappa_t: float,
    tau_t: float,
    a: float,
    u: float,
    v: float,
    step: float = DEFAULT_STEP,
) -> float:
    """
    Angle function ⟨N, ξ⟩ of a spherical helicoid from finite differences.

    The normal is X_u × X_v, normalized.

    :param kappa_t: base curvature κ̃ > 0.
    :param tau_t: bundle curvature τ̃.
    :param a: pitch.
    :param u: arc length along the ruling.
    :param v: rotation angle.
    :param step: relative finite-difference step.
    :return: numerical angle function.
    """
    return helicoid_fundamental_forms(kappa_t, tau_t, a, u, v, step).nu


def mean_curvature_grid(
    t: TubeParams,
    size: int = 5,
    step: float = DEFAULT_STEP,
) -> List[Tuple[float, float, float]]:
    """
    Numerical mean curvature on a uniform size × size grid.

    φ runs over [0, 2π) and v over [-π, π).

    :param t: tube parameters.
    :param size: number of samples per parameter.
    :param step: relative finite-difference step.
    :raises ValueError: if ``size`` is not positive.
    :return: (φ, v, H_num) triples, φ-major.
    """
    if size < 1:
        raise ValueError(f"Grid size must be positive, got {size}")
    angles = 2 * np.pi * np.arange(size) / size
    rows = []
    for phi in angles:
        for v in angles - np.pi:
            rows.append(
                (float(phi), float(v), numeric_mean_curvature(t, phi, v, step)),
            )
    logger.debug("Checked %d points of %s", len(rows), t)
    return rows
