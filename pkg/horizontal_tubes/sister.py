"""
Sister correspondence between minimal helicoids and horizontal H-tubes.

A surface in E(κ̃,τ̃) with mean curvature H̃ has a sister surface in
E(κ,τ) for every phase angle θ, where κ - 4τ² = κ̃ - 4τ̃² and
τ + iH = e^{iθ}(τ̃ + iH̃). Starting from the spherical helicoid of pitch
2τ̃/κ̃ the sisters are the horizontal H-tubes, and this module computes
the lattice data (a, b(θ)) giving their conformal class.
"""

import math
from dataclasses import dataclass
from logging import getLogger
from typing import Callable, NamedTuple, Optional, Tuple, Union, overload

import numpy as np
from scipy.integrate import solve_ivp

from horizontal_tubes.exceptions import (
    DegenerateProjectionError,
    DomainViolationError,
    NonToralSisterError,
    StepFailureError,
)
from horizontal_tubes.profile import TubeParams
from horizontal_tubes.space import ModelPoint
from horizontal_tubes.utils import adaptive_quad

logger = getLogger("horizontal_tubes.sister")

# Below this value the projection of a deformed horizontal geodesic is singular.
_REGULARITY_EPS = 1e-14
_ODE_RTOL = 1e-12
_ODE_ATOL = 1e-13

FloatOrArray = Union[float, np.ndarray]


@dataclass(frozen=True)
class SisterParams:
    """Source space E(κ̃,τ̃), source mean curvature H̃ and phase angle θ."""

    kappa_t: float
    tau_t: float
    H_t: float
    theta: float

    def __post_init__(self) -> None:
        # Phases θ and θ + π give congruent sisters.
        object.__setattr__(self, "theta", self.theta % math.pi)


@dataclass(frozen=True)
class GeodesicDeformation:
    """
    Rotation of the normal along a geodesic of the source surface.

    ``nu`` is the angle function. Along horizontal geodesics it equals
    sin(ϑ); use :meth:`horizontal` to build it that way.
    """

    theta: float
    vartheta: float
    vartheta_prime: float
    nu: float

    def __post_init__(self) -> None:
        if abs(self.nu) > 1 + 1e-12:
            raise ValueError(f"Angle function must satisfy |ν| ≤ 1, got {self.nu}")

    @classmethod
    def horizontal(
        cls,
        theta: float,
        vartheta: float,
        vartheta_prime: float,
    ) -> "GeodesicDeformation":
        """
        Deformation data along a horizontal geodesic.

        :param theta: phase angle.
        :param vartheta: rotation angle of the normal.
        :param vartheta_prime: derivative of the rotation angle.
        :return: data with ν = sin(ϑ).
        """
        return cls(theta, vartheta, vartheta_prime, math.sin(vartheta))


class VerticalDeformation(NamedTuple):
    """Image of a vertical geodesic under the correspondence."""

    vertical_component: float
    kappa_g: float


class HorizontalDeformation(NamedTuple):
    """
    Image of a horizontal geodesic under the correspondence.

    The curvatures and the intersection angle are None where the
    projection is not regular.
    """

    vertical_component: float
    regular: bool
    kappa_g: Optional[float]
    kappa_gP: Optional[float]
    cos_angle: Optional[float]


@dataclass(frozen=True)
class LatticeSpec:
    """
    Lattice of the sister surface in the conformal (s, v) plane.

    The quotient by both generators is a torus when the sister space has
    κ > 0; otherwise only the first generator acts and ``b_theta`` is None.
    """

    a: float
    b_theta: Optional[float]
    torus: bool
    second_generator: Tuple[float, float] = (0.0, 4 * math.pi)

    @property
    def first_generator(self) -> Tuple[float, Optional[float]]:
        """Return (a, b(θ))."""
        return self.a, self.b_theta


class SisterTarget(NamedTuple):
    """(κ, τ, H) of a sister surface, with no supercriticality check."""

    kappa: float
    tau: float
    H: float

    def tube(self) -> TubeParams:
        """
        Tube parameters of the sister.

        :raises SupercriticalViolationError: if 4H² + κ ≤ 0.
        :return: validated parameters.
        """
        return TubeParams(self.kappa, self.tau, self.H)


class ConformalClass(NamedTuple):
    """Second lattice generator after normalizing the first one to (1, 0)."""

    first: float
    second: float
    reduced: float


def sister_params(s: SisterParams) -> SisterTarget:
    """
    Parameters of the sister surface.

    κ - 4τ² and τ² + H² are preserved. Any source is accepted, so
    subcritical sisters are returned as well.

    :param s: source parameters and phase.
    :return: (κ, τ, H) of the sister.
    """
    cos_t = math.cos(s.theta)
    sin_t = math.sin(s.theta)
    tau = s.tau_t * cos_t - s.H_t * sin_t
    mean = s.tau_t * sin_t + s.H_t * cos_t
    kappa = s.kappa_t - 4 * s.tau_t**2 + 4 * tau**2
    return SisterTarget(kappa, tau, mean)


def sister_tube_params(kappa_t: float, tau_t: float, theta: float) -> TubeParams:
    """
    Parameters of the H-tube that is sister to the minimal helicoid.

    :param kappa_t: base curvature κ̃ > 0.
    :param tau_t: bundle curvature τ̃ ≠ 0.
    :param theta: phase angle.
    :return: κ = κ̃ - 4τ̃² sin²θ, τ = τ̃ cos θ, H = τ̃ sin θ.
    """
    _require_helicoid_source(kappa_t, tau_t)
    return sister_params(SisterParams(kappa_t, tau_t, 0.0, theta)).tube()


def vertical_geodesic_deformation(
    d: GeodesicDeformation,
    H: float,
) -> VerticalDeformation:
    """
    Deform a vertical geodesic of a minimal surface.

    The sister curve makes a constant angle with the fibres and projects
    to a curve of constant geodesic curvature when ϑ' is constant.

    :param d: deformation data.
    :param H: mean curvature of the sister surface.
    :raises DegenerateProjectionError: if sin θ = 0.
    :return: vertical component cos θ and geodesic curvature of the projection.
    """
    sin_t = math.sin(d.theta)
    if abs(sin_t) < _REGULARITY_EPS:
        raise DegenerateProjectionError(
            "The projection of the sister of a vertical geodesic is a point",
        )
    return VerticalDeformation(
        vertical_component=math.cos(d.theta),
        kappa_g=2 * H - d.vartheta_prime / sin_t,
    )


def horizontal_geodesic_deformation(
    d: GeodesicDeformation,
    tau: float,
) -> HorizontalDeformation:
    """
    Deform a horizontal geodesic of a minimal surface.

    :param d: deformation data, with ν = sin ϑ.
    :param tau: bundle curvature of the sister space.
    :return: vertical component, regularity flag and the curvatures.
    """
    cos_t = math.cos(d.theta)
    sin_t = math.sin(d.theta)
    cos_v = math.cos(d.vartheta)
    nu = d.nu
    vertical = sin_t * cos_v
    norm_sq = cos_t**2 + nu**2 * sin_t**2
    if norm_sq <= _REGULARITY_EPS:
        logger.debug("Irregular projection at theta=%s, nu=%s", d.theta, nu)
        return HorizontalDeformation(vertical, False, None, None, None)
    norm = math.sqrt(norm_sq)
    kappa_g = (
        (2 * tau * norm_sq - d.vartheta_prime * cos_t) * sin_t * cos_v / norm**3
    )
    kappa_gp = d.vartheta_prime * math.sin(d.vartheta) * sin_t / norm
    return HorizontalDeformation(
        vertical_component=vertical,
        regular=True,
        kappa_g=kappa_g,
        kappa_gP=kappa_gp,
        cos_angle=cos_t * cos_v / norm,
    )


def _require_helicoid_source(kappa_t: float, tau_t: float) -> None:
    if kappa_t <= 0:
        raise DomainViolationError(f"Spherical helicoids need κ̃ > 0, got {kappa_t}")
    if tau_t == 0:
        raise DomainViolationError("Spherical helicoids need τ̃ ≠ 0")


def helicoid_immersion(
    kappa_t: float,
    tau_t: float,
    a: float,
    u: float,
    v: float,
) -> ModelPoint:
    """
    Spherical helicoid of pitch ``a`` in the Cartan model of E(κ̃,τ̃).

    The curves with constant v are horizontal geodesics and v is the
    parameter of the screw motion.

    :param kappa_t: base curvature κ̃ > 0.
    :param tau_t: bundle curvature τ̃.
    :param a: pitch.
    :param u: arc length along the ruling.
    :param v: rotation angle.
    :raises DomainViolationError: at the tangent singularity |u√κ̃/2| ≥ π/2.
    :return: Cartan point.
    """
    if kappa_t <= 0:
        raise DomainViolationError(f"Spherical helicoids need κ̃ > 0, got {kappa_t}")
    root = math.sqrt(kappa_t)
    if abs(root * u / 2) >= math.pi / 2:
        raise DomainViolationError(f"u={u} reaches the point at infinity of the chart")
    radius = 2 / root * math.tan(root * u / 2)
    return ModelPoint.cartan(radius * math.cos(v), radius * math.sin(v), a * v)


def helicoid_angle_function(kappa_t: float, tau_t: float, a: float, u: float) -> float:
    """
    Angle function ν = ⟨N, ξ⟩ of the spherical helicoid.

    It does not depend on v, and it reaches 1 iff 0 ≤ a ≤ 4τ̃/κ̃.

    :param kappa_t: base curvature κ̃ > 0.
    :param tau_t: bundle curvature τ̃.
    :param a: pitch.
    :param u: arc length along the ruling.
    :return: ν(u).
    """
    if kappa_t <= 0:
        raise DomainViolationError(f"Spherical helicoids need κ̃ > 0, got {kappa_t}")
    x = math.sqrt(kappa_t) * u
    radicand = (
        2 * a**2 * kappa_t**2
        - 8 * a * kappa_t * tau_t
        + 8 * tau_t * (a * kappa_t - 2 * tau_t) * math.cos(x)
        + kappa_t
        + 12 * tau_t**2
        - (kappa_t - 4 * tau_t**2) * math.cos(2 * x)
    )
    if radicand <= 0:
        raise DomainViolationError(f"The helicoid is singular at u={u}")
    return math.sqrt(2 * kappa_t) * math.sin(x) / math.sqrt(radicand)


def helicoid_axis_rates(kappa_t: float, tau_t: float, a: float) -> Tuple[float, float]:
    """
    Rotation speeds of the normal along the two vertical axes of a helicoid.

    :param kappa_t: base curvature κ̃ > 0.
    :param tau_t: bundle curvature τ̃.
    :param a: pitch, different from 0 and 4τ̃/κ̃.
    :raises DomainViolationError: if one of the axes degenerates.
    :return: (ϑ'₊, ϑ'₋).
    """
    other = 4 * tau_t - kappa_t * a
    if a == 0 or other == 0:
        raise DomainViolationError(f"The helicoid of pitch {a} is a minimal sphere")
    return 1 / a, -kappa_t / other


def axial_symmetry(kappa_t: float, tau_t: float, pt: ModelPoint) -> ModelPoint:
    """
    Axial symmetry about the horizontal circle of radius 2/√κ̃.

    The principal argument is used, so the expression is valid for
    points off the half-plane y = 0, x < 0.

    :param kappa_t: base curvature κ̃ > 0.
    :param tau_t: bundle curvature τ̃.
    :param pt: Cartan point.
    :raises DomainViolationError: on the z-axis.
    :return: image point.
    """
    x, y, z = pt.coords
    rho_sq = x**2 + y**2
    if rho_sq == 0:
        raise DomainViolationError("The axial symmetry is not defined on the z-axis")
    factor = 4 / (kappa_t * rho_sq)
    return ModelPoint.cartan(
        factor * x,
        factor * y,
        -z + 4 * tau_t / kappa_t * math.atan2(y, x),
    )


@overload
def induced_metric_rho(kappa_t: float, tau_t: float, u: float) -> float: ...


@overload
def induced_metric_rho(kappa_t: float, tau_t: float, u: np.ndarray) -> np.ndarray: ...


def induced_metric_rho(kappa_t: float, tau_t: float, u: FloatOrArray) -> FloatOrArray:
    """
    Warping function of the metric du² + ρ(u) dv² of the minimal torus.

    :param kappa_t: base curvature κ̃ > 0.
    :param tau_t: bundle curvature τ̃.
    :param u: arc length along the ruling.
    :return: ρ(u).
    """
    x = np.sqrt(kappa_t) * np.asarray(u, dtype=float)
    rho = np.sin(x) ** 2 / kappa_t + 4 * tau_t**2 * np.cos(x) ** 2 / kappa_t**2
    if np.ndim(rho) == 0:
        return float(rho)
    return rho


def ruling_speed(kappa_t: float, tau_t: float, theta: float, phi: float) -> float:
    """
    Speed v'(φ) of a helicoid ruling in the tube parametrization X(φ, v).

    :param kappa_t: base curvature κ̃ > 0.
    :param tau_t: bundle curvature τ̃.
    :param theta: phase angle.
    :param phi: auxiliary angle.
    :return: v'(φ).
    """
    cos_t = math.cos(theta)
    sin_t = math.sin(theta)
    if sin_t == 0:
        return cos_t
    cos_p = math.cos(phi)
    sin_p = math.sin(phi)
    sister_kappa = kappa_t - 4 * tau_t**2 * sin_t**2
    numerator = cos_t * math.sqrt(max(sister_kappa, 0.0)) * cos_p**2
    first = math.sqrt(kappa_t * cos_p**2 + 4 * tau_t**2 * sin_t**2 * sin_p**2)
    second = math.sqrt(cos_p**2 + sin_t**2 * sin_p**2)
    return numerator / (first * second)


def lattice_b(
    kappa_t: float,
    tau_t: float,
    theta: float,
    tol: float = 1e-10,
) -> float:
    """
    Shear b(θ) of the first lattice generator.

    It decreases from 2π to -2π as θ runs over [0, π].

    :param kappa_t: base curvature κ̃ > 0.
    :param tau_t: bundle curvature τ̃.
    :param theta: phase angle.
    :param tol: absolute quadrature tolerance.
    :raises NonToralSisterError: if the sister space has κ ≤ 0.
    :return: b(θ).
    """
    if tol <= 0:
        raise ValueError("Tolerance must be positive")
    _require_helicoid_source(kappa_t, tau_t)
    if kappa_t - 4 * tau_t**2 * math.sin(theta) ** 2 <= 0:
        raise NonToralSisterError(
            f"The sister of phase {theta} lives in a space with κ ≤ 0",
        )
    if math.sin(theta) == 0:
        return 2 * math.pi * math.cos(theta)
    return adaptive_quad(
        lambda phi: ruling_speed(kappa_t, tau_t, theta, phi),
        0.0,
        2 * math.pi,
        tol,
        points=(math.pi / 2, 3 * math.pi / 2),
    )


def _amplitude_rhs(m: float) -> Callable[[float, np.ndarray], Tuple[float, float]]:
    def rhs(_: float, state: np.ndarray) -> Tuple[float, float]:
        amplitude, delta = state
        return delta, -m * math.sin(amplitude) * math.cos(amplitude)

    return rhs


@overload
def jacobi_amplitude(x: float, m: float) -> float: ...


@overload
def jacobi_amplitude(x: np.ndarray, m: float) -> np.ndarray: ...


def jacobi_amplitude(x: FloatOrArray, m: float) -> FloatOrArray:
    """
    Jacobi amplitude am(x, m) for any parameter m ≤ 1.

    Integrates am' = dn, dn' = -m sin(am) cos(am) from (0, 1), which
    also covers negative parameters.

    :param x: argument, scalar or array.
    :param m: parameter.
    :raises ValueError: if m > 1.
    :raises StepFailureError: if the integrator fails.
    :return: am(x, m), odd in x.
    """
    if m > 1:
        raise ValueError(f"Parameter must satisfy m ≤ 1, got {m}")
    values = np.asarray(x, dtype=float)
    magnitude = np.abs(values)
    upper = float(magnitude.max()) if magnitude.size else 0.0
    if upper == 0:
        result = np.zeros_like(values)
    else:
        solution = solve_ivp(
            _amplitude_rhs(m),
            (0.0, upper),
            [0.0, 1.0],
            method="DOP853",
            rtol=_ODE_RTOL,
            atol=_ODE_ATOL,
            dense_output=True,
        )
        if not solution.success:
            raise StepFailureError(f"Jacobi amplitude failed: {solution.message}")
        result = np.sign(values) * solution.sol(magnitude.ravel())[0].reshape(
            values.shape,
        )
    if np.ndim(result) == 0:
        return float(result)
    return result


class ConformalProfile:
    """
    Conformal change u = g(s) for the metric du² + ρ(u) dv².

    g solves g' = √ρ(g) with g(0) = 0. It is quasi-periodic with period
    ``a`` and jump 2π/√κ̃, so the ODE is solved on [0, a] once and
    extended from there.
    """

    def __init__(self, kappa_t: float, tau_t: float) -> None:
        _require_helicoid_source(kappa_t, tau_t)
        self.kappa_t = kappa_t
        self.tau_t = tau_t
        self.jump = 2 * math.pi / math.sqrt(kappa_t)
        # ρ is bounded below by min(1/κ̃, 4τ̃²/κ̃²).
        slowest = math.sqrt(min(1 / kappa_t, 4 * tau_t**2 / kappa_t**2))

        def rhs(_: float, state: np.ndarray) -> Tuple[float]:
            return (math.sqrt(induced_metric_rho(kappa_t, tau_t, float(state[0]))),)

        def closed(_: float, state: np.ndarray) -> float:
            return float(state[0]) - self.jump

        closed.terminal = True  # type: ignore[attr-defined]
        closed.direction = 1  # type: ignore[attr-defined]

        solution = solve_ivp(
            rhs,
            (0.0, 1.5 * self.jump / slowest),
            [0.0],
            method="DOP853",
            rtol=_ODE_RTOL,
            atol=_ODE_ATOL,
            dense_output=True,
            events=closed,
        )
        if solution.status != 1:
            raise StepFailureError(
                f"The conformal factor never reached {self.jump}: {solution.message}",
            )
        self.a = float(solution.t_events[0][0])
        self._dense = solution.sol
        logger.debug("Conformal period a=%s for (%s, %s)", self.a, kappa_t, tau_t)

    def __repr__(self) -> str:
        return (
            f"ConformalProfile(kappa_t={self.kappa_t}, tau_t={self.tau_t}, "
            f"a={self.a})"
        )

    @overload
    def __call__(self, s: float) -> float: ...

    @overload
    def __call__(self, s: np.ndarray) -> np.ndarray: ...

    def __call__(self, s: FloatOrArray) -> FloatOrArray:
        """
        Evaluate g.

        :param s: conformal parameter, scalar or array.
        :return: g(s).
        """
        values = np.asarray(s, dtype=float)
        turns = np.floor(values / self.a)
        rest = np.clip(values - turns * self.a, 0.0, self.a)
        result = self._dense(rest.ravel())[0].reshape(values.shape) + turns * self.jump
        if np.ndim(result) == 0:
            return float(result)
        return result

    @overload
    def derivative(self, s: float) -> float: ...

    @overload
    def derivative(self, s: np.ndarray) -> np.ndarray: ...

    def derivative(self, s: FloatOrArray) -> FloatOrArray:
        """
        Evaluate g' = √ρ(g).

        :param s: conformal parameter, scalar or array.
        :return: g'(s).
        """
        values = np.asarray(self(s), dtype=float)
        result = np.sqrt(induced_metric_rho(self.kappa_t, self.tau_t, values))
        if np.ndim(result) == 0:
            return float(result)
        return result


def conformal_profile(kappa_t: float, tau_t: float) -> ConformalProfile:
    """
    Build the conformal factor of the minimal torus in E(κ̃,τ̃).

    :param kappa_t: base curvature κ̃ > 0.
    :param tau_t: bundle curvature τ̃ ≠ 0.
    :return: immutable evaluator carrying ``a``.
    """
    return ConformalProfile(kappa_t, tau_t)


def lattice_spec(
    kappa_t: float,
    tau_t: float,
    theta: float,
    tol: float = 1e-10,
) -> LatticeSpec:
    """
    Lattice of the sister of phase θ in conformal coordinates.

    :param kappa_t: base curvature κ̃ > 0.
    :param tau_t: bundle curvature τ̃ ≠ 0.
    :param theta: phase angle.
    :param tol: quadrature tolerance for b(θ).
    :return: lattice data.
    """
    a = conformal_profile(kappa_t, tau_t).a
    if kappa_t - 4 * tau_t**2 * math.sin(theta) ** 2 <= 0:
        return LatticeSpec(a=a, b_theta=None, torus=False)
    return LatticeSpec(a=a, b_theta=lattice_b(kappa_t, tau_t, theta, tol), torus=True)


def normalized_conformal_class(
    kappa_t: float,
    tau_t: float,
    theta: float,
    tol: float = 1e-10,
) -> ConformalClass:
    """
    Conformal class of the sister torus.

    After a similarity the lattice is spanned by (1, 0) and
    (b/2π, a/2π). ``reduced`` shifts the first coordinate by an integer
    into (-1/2, 1/2].

    :param kappa_t: base curvature κ̃ > 0.
    :param tau_t: bundle curvature τ̃ ≠ 0.
    :param theta: phase angle.
    :param tol: quadrature tolerance for b(θ).
    :raises NonToralSisterError: if the sister is a cylinder.
    :return: normalized second generator.
    """
    spec = lattice_spec(kappa_t, tau_t, theta, tol)
    if spec.b_theta is None:
        raise NonToralSisterError(
            f"The sister of phase {theta} is a cylinder, not a torus",
        )
    first = spec.b_theta / (2 * math.pi)
    return ConformalClass(
        first=first,
        second=spec.a / (2 * math.pi),
        reduced=first - math.ceil(first - 0.5),
    )
