"""
Coordinate models of the homogeneous spaces E(κ,τ).

Three charts are supported: the Cartan model (the whole E(κ,τ) for κ ≥ 0,
a cylinder over a disk for κ < 0), the half-space model for κ < 0, and
the unit sphere of C² carrying the Berger metric for κ > 0.
"""

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from logging import getLogger
from typing import Tuple, Union

import numpy as np

from horizontal_tubes.exceptions import InvalidPointError, ModelMismatchError

logger = getLogger("horizontal_tubes.space")

_SPHERE_TOL = 1e-12


class SpaceKind(str, Enum):
    """Geometric type of E(κ,τ)."""

    ROUND_SPHERE = "RoundSphere"
    BERGER_SPHERE = "BergerSphere"
    PRODUCT_SXR = "ProductSxR"
    EUCLIDEAN = "Euclidean"
    HEISENBERG = "Heisenberg"
    PRODUCT_HXR = "ProductHxR"
    SL2_COVER = "SL2Cover"


class Model(str, Enum):
    """Coordinate chart a point is expressed in."""

    CARTAN = "Cartan"
    HALF_SPACE = "HalfSpace"
    BERGER_S3 = "BergerS3"


@dataclass(frozen=True)
class SpaceParams:
    """Base curvature κ and bundle curvature τ."""

    kappa: float
    tau: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.kappa) and math.isfinite(self.tau)):
            raise ValueError(f"Non-finite space parameters: {self}")

    @property
    def is_round(self) -> bool:
        """Whether κ > 0 and κ = 4τ²."""
        return self.kappa > 0 and abs(self.kappa - 4 * self.tau**2) <= 1e-12 * max(
            1.0,
            self.kappa,
        )


@dataclass(frozen=True)
class SpaceClass:
    """
    Classification of E(κ,τ).

    Products S²(κ)×R are tagged as Berger spheres with ``is_product`` set.
    """

    tag: SpaceKind
    is_product: bool = False


@dataclass(frozen=True)
class ModelPoint:
    """
    A point in one of the coordinate models.

    Cartan and half-space points carry (x, y, z). Berger points carry
    (Re z, Im z, Re w, Im w) for (z, w) on the unit sphere of C².
    """

    model: Model
    coords: Tuple[float, ...]

    @classmethod
    def cartan(cls, x: float, y: float, z: float) -> "ModelPoint":
        """
        Build a Cartan model point.

        :param x: first coordinate.
        :param y: second coordinate.
        :param z: fibre coordinate.
        :return: new point.
        """
        return cls(Model.CARTAN, (float(x), float(y), float(z)))

    @classmethod
    def half_space(cls, x: float, y: float, z: float) -> "ModelPoint":
        """
        Build a half-space model point.

        :param x: first coordinate.
        :param y: second coordinate, must be positive.
        :param z: fibre coordinate.
        :return: new point.
        """
        return cls(Model.HALF_SPACE, (float(x), float(y), float(z)))

    @classmethod
    def berger(cls, z: complex, w: complex) -> "ModelPoint":
        """
        Build a point of S³ ⊂ C².

        :param z: first complex coordinate.
        :param w: second complex coordinate.
        :return: new point.
        """
        return cls(Model.BERGER_S3, (z.real, z.imag, w.real, w.imag))

    @property
    def complex_coords(self) -> Tuple[complex, complex]:
        """Return (z, w) for a Berger point."""
        if self.model != Model.BERGER_S3:
            raise ModelMismatchError("Only Berger points have complex coordinates")
        re_z, im_z, re_w, im_w = self.coords
        return complex(re_z, im_z), complex(re_w, im_w)

    def as_array(self) -> np.ndarray:
        """Return the coordinates as a numpy array."""
        return np.asarray(self.coords, dtype=float)


def classify_space(p: SpaceParams) -> SpaceClass:
    """
    Classify E(κ,τ).

    :param p: space parameters.
    :return: class tag.
    """
    if p.kappa > 0:
        if p.is_round:
            return SpaceClass(SpaceKind.ROUND_SPHERE)
        return SpaceClass(SpaceKind.BERGER_SPHERE, is_product=p.tau == 0)
    if p.kappa == 0:
        if p.tau == 0:
            return SpaceClass(SpaceKind.EUCLIDEAN)
        return SpaceClass(SpaceKind.HEISENBERG)
    if p.tau == 0:
        return SpaceClass(SpaceKind.PRODUCT_HXR)
    return SpaceClass(SpaceKind.SL2_COVER)


def validate_point(p: SpaceParams, pt: ModelPoint) -> None:
    """
    Check that a point is valid in its chart.

    :param p: space parameters.
    :param pt: point to check.
    :raises InvalidPointError: if the point is outside of the chart.
    :raises ModelMismatchError: if the chart does not exist for these parameters.
    """
    if pt.model == Model.CARTAN:
        if len(pt.coords) != 3:
            raise InvalidPointError("Cartan points have three coordinates")
        x, y, _ = pt.coords
        if 1 + p.kappa / 4 * (x**2 + y**2) <= 0:
            raise InvalidPointError(f"λ_κ is not positive at {pt.coords}")
    elif pt.model == Model.HALF_SPACE:
        if p.kappa >= 0:
            raise ModelMismatchError("The half-space model needs κ < 0")
        if len(pt.coords) != 3 or pt.coords[1] <= 0:
            raise InvalidPointError(f"Half-space point must have y > 0: {pt.coords}")
    else:
        if p.kappa <= 0:
            raise ModelMismatchError("The Berger sphere model needs κ > 0")
        if len(pt.coords) != 4:
            raise InvalidPointError("Berger points have four real coordinates")
        if abs(sum(c**2 for c in pt.coords) - 1) > _SPHERE_TOL:
            raise InvalidPointError(f"Point {pt.coords} is off the unit sphere")


def _require_chart(p: SpaceParams, pt: ModelPoint) -> None:
    validate_point(p, pt)
    if pt.model == Model.BERGER_S3:
        raise ModelMismatchError("Metrics are given in Cartan or half-space charts")


def frame(p: SpaceParams, pt: ModelPoint) -> np.ndarray:
    """
    Orthonormal frame as a matrix whose columns are E1, E2, E3.

    :param p: space parameters.
    :param pt: Cartan or half-space point.
    :return: 3×3 matrix of coordinate components.
    """
    _require_chart(p, pt)
    x, y, _ = pt.coords
    if pt.model == Model.CARTAN:
        mu = 1 + p.kappa / 4 * (x**2 + y**2)
        return np.array(
            [
                [mu, 0.0, 0.0],
                [0.0, mu, 0.0],
                [-p.tau * y, p.tau * x, 1.0],
            ],
        )
    root = math.sqrt(-p.kappa)
    return np.array(
        [
            [y * root, 0.0, 0.0],
            [0.0, y * root, 0.0],
            [2 * p.tau / root, 0.0, 1.0],
        ],
    )


def metric_tensor(p: SpaceParams, pt: ModelPoint) -> np.ndarray:
    """
    Riemannian metric in the coordinate basis.

    :param p: space parameters.
    :param pt: Cartan or half-space point.
    :return: symmetric positive definite 3×3 matrix.
    """
    _require_chart(p, pt)
    x, y, _ = pt.coords
    if pt.model == Model.CARTAN:
        lam = 1 / (1 + p.kappa / 4 * (x**2 + y**2))
        horizontal = lam**2
        vertical = np.array([p.tau * lam * y, -p.tau * lam * x, 1.0])
    else:
        horizontal = 1 / (-p.kappa * y**2)
        vertical = np.array([2 * p.tau / (p.kappa * y), 0.0, 1.0])
    return np.diag([horizontal, horizontal, 0.0]) + np.outer(vertical, vertical)


def metric_and_frame(p: SpaceParams, pt: ModelPoint) -> Tuple[np.ndarray, np.ndarray]:
    """
    Metric tensor and orthonormal frame at a point.

    :param p: space parameters.
    :param pt: Cartan or half-space point.
    :raises InvalidPointError: if λ_κ ≤ 0 or y ≤ 0.
    :raises ModelMismatchError: if the chart does not match κ.
    :return: metric matrix and frame matrix (columns are E1, E2, E3).
    """
    return metric_tensor(p, pt), frame(p, pt)


def _structure_constants(p: SpaceParams, pt: ModelPoint) -> Tuple[float, float]:
    # [E1, E2] = αE1 + βE2 + 2τE3
    x, y, _ = pt.coords
    if pt.model == Model.CARTAN:
        return -p.kappa * y / 2, p.kappa * x / 2
    return -math.sqrt(-p.kappa), 0.0


def frame_connection(p: SpaceParams, pt: ModelPoint) -> np.ndarray:
    """
    Levi-Civita connection in the orthonormal frame.

    ``table[a, b]`` holds the frame components of ∇_{E_a}E_b
    (zero-based indices).

    :param p: space parameters.
    :param pt: Cartan or half-space point.
    :return: array of shape (3, 3, 3).
    """
    _require_chart(p, pt)
    alpha, beta = _structure_constants(p, pt)
    tau = p.tau
    table = np.zeros((3, 3, 3))
    table[0, 0] = (0.0, -alpha, 0.0)
    table[0, 1] = (alpha, 0.0, tau)
    table[0, 2] = (0.0, -tau, 0.0)
    table[1, 0] = (0.0, -beta, -tau)
    table[1, 1] = (beta, 0.0, 0.0)
    table[1, 2] = (tau, 0.0, 0.0)
    table[2, 0] = (0.0, -tau, 0.0)
    table[2, 1] = (tau, 0.0, 0.0)
    return table


def levi_civita(p: SpaceParams, pt: ModelPoint, a: int, b: int) -> np.ndarray:
    """
    Frame coefficients of ∇_{E_a}E_b in the Cartan model.

    :param p: space parameters.
    :param pt: Cartan point.
    :param a: direction index in {1, 2, 3}.
    :param b: field index in {1, 2, 3}.
    :raises ModelMismatchError: for points outside of the Cartan model.
    :raises ValueError: for indices outside of {1, 2, 3}.
    :return: three coefficients.
    """
    if pt.model != Model.CARTAN:
        raise ModelMismatchError("The connection table is stated in the Cartan model")
    if a not in (1, 2, 3) or b not in (1, 2, 3):
        raise ValueError(f"Frame indices must be 1, 2 or 3, got {(a, b)}")
    return frame_connection(p, pt)[a - 1, b - 1]


def _frame_derivatives(p: SpaceParams, pt: ModelPoint) -> np.ndarray:
    x, y, _ = pt.coords
    d_frame = np.zeros((3, 3, 3))
    if pt.model == Model.CARTAN:
        d_frame[0] = [[p.kappa * x / 2, 0, 0], [0, p.kappa * x / 2, 0], [0, p.tau, 0]]
        d_frame[1] = [[p.kappa * y / 2, 0, 0], [0, p.kappa * y / 2, 0], [-p.tau, 0, 0]]
    else:
        root = math.sqrt(-p.kappa)
        d_frame[1] = [[root, 0, 0], [0, root, 0], [0, 0, 0]]
    return d_frame


def coordinate_connection(p: SpaceParams, pt: ModelPoint) -> np.ndarray:
    """
    Covariant derivatives of the coordinate fields.

    ``result[i, j]`` holds the frame components of ∇_{∂_i}∂_j.
    It is assembled from the frame table and the derivative of the coframe.

    :param p: space parameters.
    :param pt: Cartan or half-space point.
    :return: array of shape (3, 3, 3).
    """
    coframe = np.linalg.inv(frame(p, pt))
    table = frame_connection(p, pt)
    d_frame = _frame_derivatives(p, pt)
    result = np.einsum("ai,bj,abc->ijc", coframe, coframe, table)
    for i in range(3):
        d_coframe = -coframe @ d_frame[i] @ coframe
        result[i] += d_coframe.T
    return result


def covering_map_theta(p: SpaceParams, pt: ModelPoint) -> ModelPoint:
    """
    Riemannian covering of the Berger sphere by the Cartan model.

    :param p: space parameters with κ > 0 and τ ≠ 0.
    :param pt: Cartan point.
    :raises ModelMismatchError: if κ ≤ 0, τ = 0 or the point is not a Cartan point.
    :return: point of S³ ⊂ C².
    """
    if p.kappa <= 0 or p.tau == 0:
        raise ModelMismatchError("The covering map needs κ > 0 and τ ≠ 0")
    if pt.model != Model.CARTAN:
        raise ModelMismatchError("The covering map is defined on the Cartan model")
    validate_point(p, pt)
    x, y, z = pt.coords
    scale = 1 / math.sqrt(1 + p.kappa / 4 * (x**2 + y**2))
    phase = cmath.exp(1j * p.kappa * z / (4 * p.tau))
    first = scale * math.sqrt(p.kappa) / 2 * complex(y, x) * phase
    return ModelPoint.berger(first, scale * phase)


def hopf_projection(p: SpaceParams, pt: ModelPoint) -> np.ndarray:
    """
    Hopf fibration onto the sphere of radius 1/√κ in C×R.

    :param p: space parameters with κ > 0.
    :param pt: Berger point.
    :raises ModelMismatchError: for other charts or κ ≤ 0.
    :return: array (Re, Im, height).
    """
    if pt.model != Model.BERGER_S3:
        raise ModelMismatchError("The Hopf projection acts on Berger points")
    validate_point(p, pt)
    z, w = pt.complex_coords
    factor = 2 / math.sqrt(p.kappa)
    product = factor * z * w.conjugate()
    return np.array(
        [product.real, product.imag, factor * (abs(z) ** 2 - abs(w) ** 2) / 2],
    )


ComplexVector = Union[np.ndarray, Tuple[complex, complex]]


def berger_inner(
    p: SpaceParams,
    pt: ModelPoint,
    first: ComplexVector,
    second: ComplexVector,
) -> float:
    """
    Berger metric on tangent vectors of S³ ⊂ C².

    :param p: space parameters with κ > 0 and τ ≠ 0.
    :param pt: base point.
    :param first: tangent vector as two complex numbers.
    :param second: tangent vector as two complex numbers.
    :return: inner product.
    """
    z, w = pt.complex_coords
    xi = p.kappa / (4 * p.tau) * np.array([1j * z, 1j * w])
    vec_x = np.asarray(first, dtype=complex)
    vec_y = np.asarray(second, dtype=complex)

    def real_dot(left: np.ndarray, right: np.ndarray) -> float:
        return float(np.real(np.vdot(right, left)))

    stretch = 16 * p.tau**2 / p.kappa**2 * (4 * p.tau**2 / p.kappa - 1)
    return (
        4
        / p.kappa
        * (
            real_dot(vec_x, vec_y)
            + stretch * real_dot(vec_x, xi) * real_dot(vec_y, xi)
        )
    )
