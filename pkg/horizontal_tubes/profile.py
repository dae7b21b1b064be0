"""
Profile curves of horizontal H-tubes.

A tube is invariant under translations along a horizontal geodesic Γ.
Its profile is a closed convex curve (r(φ), h(φ)) in the orbit space,
where r is the horizontal distance along a horizontal geodesic α
orthogonal to Γ and h is the vertical distance over α. The curve is
parametrized by the auxiliary angle φ.

Three regimes are distinguished by the sign of κ:

* ``BERGER``: κ > 0, Cartan model, α is a circle of radius 2/√κ.
* ``FLAT``: κ = 0, Cartan model (Heisenberg or Euclidean space).
* ``HYPERBOLIC``: κ < 0, half-space model.
"""

import math
from dataclasses import dataclass
from enum import Enum
from logging import getLogger
from typing import Any, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from horizontal_tubes.exceptions import (
    DomainViolationError,
    ModelMismatchError,
    NonpositiveHError,
    StepFailureError,
    SupercriticalViolationError,
)
from horizontal_tubes.space import ModelPoint, SpaceParams
from horizontal_tubes.utils import is_flat

logger = getLogger("horizontal_tubes.profile")

_ARCTANH_CLAMP = 1 - 1e-14


class ProfileCase(str, Enum):
    """Regime of the profile formulas."""

    BERGER = "berger"
    FLAT = "flat"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class TubeParams:
    """
    Ambient curvatures and mean curvature of a tube.

    The mean curvature must be supercritical: 4H² + κ > 0.
    """

    kappa: float
    tau: float
    H: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(val) for val in (self.kappa, self.tau, self.H)):
            raise ValueError(f"Non-finite tube parameters: {self}")
        if 4 * self.H**2 + self.kappa <= 0:
            raise SupercriticalViolationError(
                f"4H²+κ must be positive, got {4 * self.H**2 + self.kappa}",
            )

    @property
    def space(self) -> SpaceParams:
        """Ambient space parameters."""
        return SpaceParams(self.kappa, self.tau)

    @property
    def case(self) -> ProfileCase:
        """Formula regime for these parameters."""
        if is_flat(self.kappa):
            return ProfileCase.FLAT
        if self.kappa > 0:
            return ProfileCase.BERGER
        return ProfileCase.HYPERBOLIC

    def with_h(self, H: float) -> "TubeParams":
        """
        Copy with a different mean curvature.

        :param H: new mean curvature.
        :return: new parameters.
        """
        return TubeParams(self.kappa, self.tau, H)


class ProfilePoint(NamedTuple):
    """Point of a profile curve."""

    phi: float
    r: float
    h: float


class OdeState(NamedTuple):
    """State of the arc-length parametrized profile system."""

    u: float
    r: float
    h: float
    varphi: float


class ProfileNormal(NamedTuple):
    """Inner normal of the profile and the curvature numerator."""

    eta: Tuple[float, float]
    convexity: float


@dataclass(frozen=True)
class ProfileCurve:
    """Sampled profile, ordered by strictly increasing φ."""

    params: TubeParams
    samples: Tuple[ProfilePoint, ...]

    def __post_init__(self) -> None:
        phis = [sample.phi for sample in self.samples]
        if any(later <= earlier for earlier, later in zip(phis, phis[1:])):
            raise ValueError("Profile samples must have strictly increasing phi")

    @property
    def phi(self) -> np.ndarray:
        """Sampled angles."""
        return np.array([sample.phi for sample in self.samples])

    @property
    def r(self) -> np.ndarray:
        """Sampled horizontal distances."""
        return np.array([sample.r for sample in self.samples])

    @property
    def h(self) -> np.ndarray:
        """Sampled heights."""
        return np.array([sample.h for sample in self.samples])

    def __len__(self) -> int:
        return len(self.samples)


def _require_positive_h(t: TubeParams) -> None:
    if t.H <= 0:
        raise NonpositiveHError(
            f"The closed-form profile needs H > 0, got H={t.H}",
        )


def _berger_sl_height(
    t: TubeParams,
    cos_phi: np.ndarray,
    sin_phi: np.ndarray,
) -> np.ndarray:
    H, kappa, tau = t.H, t.kappa, t.tau
    spread = np.sqrt(H**2 + tau**2 * cos_phi**2)
    gap = kappa - 4 * tau**2
    root_q = math.sqrt(4 * H**2 + kappa)
    if gap > 0:
        root_gap = math.sqrt(gap)
        arg = H * root_gap * sin_phi / (root_q * spread)
        if np.any(np.abs(arg) > _ARCTANH_CLAMP):
            logger.warning("Clamping arctanh argument for %s", t)
        arg = np.clip(arg, -_ARCTANH_CLAMP, _ARCTANH_CLAMP)
        first = 2 * H * root_gap / (kappa * root_q) * np.arctanh(arg)
    elif gap < 0:
        # arctanh(ix) = i·arctan(x) turns the imaginary branch into a real one.
        root_gap = math.sqrt(-gap)
        arg = H * root_gap * sin_phi / (root_q * spread)
        first = -2 * H * root_gap / (kappa * root_q) * np.arctan(arg)
    else:
        first = np.zeros_like(sin_phi)
    twist = np.arctan(tau * sin_phi / (math.sqrt(H**2 + tau**2) + spread))
    return first + 4 * tau / kappa * twist


def _flat_height(
    t: TubeParams,
    cos_phi: np.ndarray,
    sin_phi: np.ndarray,
) -> np.ndarray:
    H, tau = t.H, t.tau
    spread = np.sqrt(H**2 + tau**2 * cos_phi**2)
    if tau == 0:
        twist = sin_phi / (4 * H)
    else:
        norm = math.sqrt(H**2 + tau**2)
        twist = norm**2 / (4 * H**2 * tau) * np.arcsin(tau * sin_phi / norm)
    return twist + sin_phi * spread / (4 * H**2)


def closed_form_arrays(
    t: TubeParams,
    phi: Sequence[float],
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized closed-form profile.

    :param t: tube parameters, H > 0.
    :param phi: angles.
    :raises NonpositiveHError: if H ≤ 0.
    :return: arrays r(φ) and h(φ).
    """
    _require_positive_h(t)
    angles = np.asarray(phi, dtype=float)
    cos_phi = np.cos(angles)
    sin_phi = np.sin(angles)
    case = t.case
    if case == ProfileCase.FLAT:
        return cos_phi / (2 * t.H), _flat_height(t, cos_phi, sin_phi)
    root = math.sqrt(abs(t.kappa))
    ratio = root * cos_phi / (2 * t.H)
    if case == ProfileCase.BERGER:
        radius = np.arctan(ratio) / root
    else:
        radius = np.arctanh(ratio) / root
    return radius, _berger_sl_height(t, cos_phi, sin_phi)


def closed_form_profile(t: TubeParams, phi: float) -> ProfilePoint:
    """
    Closed-form profile point normalized by h(0) = 0.

    :param t: tube parameters, H > 0.
    :param phi: auxiliary angle.
    :raises NonpositiveHError: if H ≤ 0.
    :return: profile point.
    """
    radius, height = closed_form_arrays(t, [phi])
    return ProfilePoint(float(phi), float(radius[0]), float(height[0]))


def sample_profile(t: TubeParams, phi_grid: Sequence[float]) -> ProfileCurve:
    """
    Sample the closed form on a grid.

    :param t: tube parameters.
    :param phi_grid: strictly increasing angles.
    :return: profile curve.
    """
    radius, height = closed_form_arrays(t, phi_grid)
    samples = tuple(
        ProfilePoint(float(phi), float(r_val), float(h_val))
        for phi, r_val, h_val in zip(phi_grid, radius, height)
    )
    return ProfileCurve(t, samples)


def translated_profile(t: TubeParams, phi: float) -> ProfilePoint:
    """
    Profile point of the tube translated vertically by 2πτ/κ.

    In a Berger sphere these translated copies are the tubes with H < 0.
    They foliate a neighbourhood of the second horizontal geodesic Γ′.

    :param t: tube parameters with κ > 0 and τ ≠ 0.
    :param phi: auxiliary angle.
    :raises ModelMismatchError: outside of Berger spheres.
    :return: shifted profile point.
    """
    if t.case != ProfileCase.BERGER or t.tau == 0:
        raise ModelMismatchError(
            "Translated tubes only exist in Berger spheres with τ ≠ 0",
        )
    point = closed_form_profile(t, phi)
    return point._replace(h=point.h + 2 * math.pi * t.tau / t.kappa)


def profile_derivatives(t: TubeParams, phi: float) -> Tuple[float, float]:
    """
    Derivatives dr/dφ and dh/dφ shared by all three regimes.

    :param t: tube parameters.
    :param phi: auxiliary angle.
    :return: both derivatives.
    """
    cos_phi, sin_phi = math.cos(phi), math.sin(phi)
    denom = 4 * t.H**2 + t.kappa * cos_phi**2
    spread = math.sqrt(t.H**2 + t.tau**2 * cos_phi**2)
    return -2 * t.H * sin_phi / denom, 2 * cos_phi * spread / denom


def arc_parameter_rate(t: TubeParams, phi: float) -> float:
    """
    Rate du/dφ between the ODE parameter and the auxiliary angle.

    :param t: tube parameters, H > 0.
    :param phi: auxiliary angle.
    :return: du/dφ.
    """
    cos_sq = math.cos(phi) ** 2
    spread = math.sqrt(t.H**2 + t.tau**2 * cos_sq)
    if t.case == ProfileCase.FLAT:
        return spread / (2 * t.H**2)
    denom = 4 * t.H**2 + t.kappa * cos_sq
    return 4 * t.H * math.sqrt(abs(t.kappa)) * spread / denom**1.5


def profile_normal_and_convexity(t: TubeParams, phi: float) -> ProfileNormal:
    """
    Inner normal η = (−h′, r′) and the curvature numerator r′h″ − h′r″.

    The numerator is nonnegative for H > 0 because the profile is a
    convex curve run counterclockwise.

    :param t: tube parameters, H > 0.
    :param phi: auxiliary angle.
    :return: normal and convexity.
    """
    _require_positive_h(t)
    dr, dh = profile_derivatives(t, phi)
    x_sq = math.cos(phi) ** 2
    H, tau = t.H, t.tau
    spread = math.sqrt(H**2 + tau**2 * x_sq)
    denom = 4 * H**2 + t.kappa * x_sq
    convexity = 4 * H * (H**2 + tau**2 * x_sq * (2 - x_sq)) / (spread * denom**2)
    return ProfileNormal((-dh, dr), convexity)


def profile_ode_rhs(t: TubeParams, s: OdeState) -> Tuple[float, float, float]:
    """
    Right hand side of the profile system in the parameter u.

    :param t: tube parameters.
    :param s: current state.
    :raises DomainViolationError: if a radicand or a cosine leaves its domain.
    :return: dr/du, dh/du and dφ/du.
    """
    kappa, tau, H = t.kappa, t.tau, t.H
    cos_phi, sin_phi = math.cos(s.varphi), math.sin(s.varphi)
    gap = kappa - 4 * tau**2
    case = t.case
    if case == ProfileCase.FLAT:
        speed = math.sqrt(1 + 4 * tau**2 * s.r**2)
        return -sin_phi / speed, cos_phi, 2 * H / speed
    root = math.sqrt(abs(kappa))
    if case == ProfileCase.BERGER:
        cos_r = math.cos(root * s.r)
        radicand = 4 * tau**2 + gap * cos_r**2
        if cos_r <= 0 or radicand <= 0:
            raise DomainViolationError(f"State {s} is outside of the Berger domain")
        speed = math.sqrt(radicand)
        return (
            -sin_phi / speed,
            cos_phi / (root * cos_r),
            (2 * H + root * cos_phi * math.tan(root * s.r)) / speed,
        )
    cosh_r = math.cosh(root * s.r)
    radicand = -4 * tau**2 - gap * cosh_r**2
    if radicand <= 0:
        raise DomainViolationError(f"State {s} has a nonpositive radicand")
    speed = math.sqrt(radicand)
    return (
        -sin_phi / speed,
        cos_phi / (root * cosh_r),
        (2 * H - root * cos_phi * math.tanh(root * s.r)) / speed,
    )


def energy(t: TubeParams, r: float, phi: float) -> float:
    """
    First integral of the profile system; tubes have zero energy.

    :param t: tube parameters.
    :param r: horizontal distance.
    :param phi: auxiliary angle.
    :return: energy value.
    """
    case = t.case
    if case == ProfileCase.FLAT:
        return math.cos(phi) - 2 * t.H * r
    root = math.sqrt(abs(t.kappa))
    if case == ProfileCase.BERGER:
        return math.cos(root * r) * math.cos(phi) - 2 * t.H / root * math.sin(root * r)
    return math.cosh(root * r) * math.cos(phi) - 2 * t.H / root * math.sinh(root * r)


def integrate_profile(
    t: TubeParams,
    phi0: float,
    phi1: float,
    tol: float = 1e-10,
    num_samples: Optional[int] = None,
) -> ProfileCurve:
    """
    Integrate the profile system from the closed-form seed at ``phi0``.

    The system is integrated in u until φ reaches ``phi1``. Without
    ``num_samples`` the accepted steps are returned. Otherwise the
    dense output is resampled on a uniform φ-grid.

    :param t: tube parameters, H > 0.
    :param phi0: initial angle.
    :param phi1: final angle, not smaller than ``phi0``.
    :param tol: absolute and relative tolerance.
    :param num_samples: optional size of a uniform φ-grid.
    :raises ValueError: if ``phi1 < phi0`` or ``tol`` is not positive.
    :raises StepFailureError: if the integrator fails.
    :return: integrated profile.
    """
    if phi1 < phi0 or tol <= 0:
        raise ValueError("Expected phi0 <= phi1 and tol > 0")
    seed = closed_form_profile(t, phi0)
    if phi1 == phi0:
        return ProfileCurve(t, (seed,))

    rates = [arc_parameter_rate(t, phi) for phi in np.linspace(phi0, phi1, 257)]
    u_end = 1.5 * max(rates) * (phi1 - phi0) + 1e-6

    def rhs(u: float, state: np.ndarray) -> Tuple[float, float, float]:
        return profile_ode_rhs(t, OdeState(u, state[0], state[1], state[2]))

    def reached(_: float, state: np.ndarray) -> float:
        return float(state[2] - phi1)

    reached.terminal = True  # type: ignore[attr-defined]
    reached.direction = 1  # type: ignore[attr-defined]

    solution = solve_ivp(
        rhs,
        (0.0, u_end),
        [seed.r, seed.h, seed.phi],
        method="DOP853",
        rtol=tol,
        atol=tol,
        dense_output=True,
        events=reached,
    )
    if solution.status != 1:
        raise StepFailureError(f"Profile integration failed: {solution.message}")
    logger.debug("Integrated %s in %d steps", t, solution.t.size)

    if num_samples is None:
        samples = [seed]
        for r_val, h_val, phi in solution.y[:, 1:].T:
            if phi > samples[-1].phi:
                samples.append(ProfilePoint(float(phi), float(r_val), float(h_val)))
        return ProfileCurve(t, tuple(samples))
    return ProfileCurve(t, _resample(solution, phi0, phi1, num_samples))


def _resample(
    solution: Any,
    phi0: float,
    phi1: float,
    count: int,
) -> Tuple[ProfilePoint, ...]:
    times = solution.t
    dense = solution.sol
    phis = solution.y[2]
    samples = []
    for target in np.linspace(phi0, phi1, count):
        idx = int(np.searchsorted(phis, target))
        if idx == 0:
            u_val = times[0]
        elif idx >= len(phis):
            u_val = times[-1]
        else:
            u_val = brentq(
                lambda u, goal=target: dense(u)[2] - goal,
                times[idx - 1],
                times[idx],
                xtol=1e-14,
            )
        r_val, h_val, _ = dense(u_val)
        samples.append(ProfilePoint(float(target), float(r_val), float(h_val)))
    return tuple(samples)


def orbit_point(t: TubeParams, r: float, h: float, v: float) -> ModelPoint:
    """
    Image of an orbit-space point under the invariant immersion.

    :param t: tube parameters.
    :param r: horizontal distance along α.
    :param h: vertical distance over α.
    :param v: translation parameter along Γ.
    :raises DomainViolationError: if r is beyond the Berger chart.
    :return: Cartan point for κ ≥ 0, half-space point for κ < 0.
    """
    kappa, tau = t.kappa, t.tau
    case = t.case
    if case == ProfileCase.FLAT:
        return ModelPoint.cartan(v, r, h + tau * v * r)
    root = math.sqrt(abs(kappa))
    if case == ProfileCase.BERGER:
        angle = root * r / 2 + math.pi / 4
        if not 0 < angle < math.pi / 2:
            raise DomainViolationError(f"r={r} is beyond the tangent singularity")
        radius = 2 / root * math.tan(angle)
        return ModelPoint.cartan(
            radius * math.cos(v),
            radius * math.sin(v),
            h + 2 * tau * v / kappa,
        )
    half = math.tanh(root * r / 2)
    scale = math.exp(v)
    return ModelPoint.half_space(
        scale * math.tanh(root * r),
        scale / math.cosh(root * r),
        h + 4 * tau / kappa * math.acos(half / math.sqrt(1 + half**2)),
    )


def tube_immersion(t: TubeParams, phi: float, v: float) -> ModelPoint:
    """
    Point X(φ, v) of the H-tube.

    :param t: tube parameters, H > 0.
    :param phi: auxiliary angle.
    :param v: translation parameter.
    :return: point of the matching model.
    """
    point = closed_form_profile(t, phi)
    return orbit_point(t, point.r, point.h, v)
