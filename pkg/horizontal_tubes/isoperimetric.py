"""
Area and enclosed volume of horizontal H-tubes in Berger spheres.

Formulas are stated for κ = 4. Any Berger sphere E(κ,τ) is homothetic to
E(4, 2τ/√κ), see :func:`rescale_to_kappa4`.
"""

import math
from dataclasses import dataclass
from enum import Enum
from logging import getLogger
from typing import List, Optional, Tuple, Union

import anyio
import anyio.to_thread

from horizontal_tubes.exceptions import (
    ModelMismatchError,
    NonpositiveHError,
    NumericalError,
    UnscaledCurvatureError,
)
from horizontal_tubes.foliation import foliation_criterion
from horizontal_tubes.profile import TubeParams
from horizontal_tubes.space import SpaceParams
from horizontal_tubes.utils import adaptive_quad, inclusive_grid

logger = getLogger("horizontal_tubes.isoperimetric")

_KAPPA4_EPS = 1e-12
# Integrands peak around cos u = 0 when H is small.
_PEAKS = (math.pi / 2, 3 * math.pi / 2)


class VolumeMethod(str, Enum):
    """How enclosed volumes are computed."""

    REDUCED = "reduced"
    SWEPT = "swept"


@dataclass(frozen=True)
class IsoperimetricRecord:
    """
    Area and volumes of one tube.

    ``foliates`` is false when the family does not foliate, in which
    case the volume is an algebraic one. Rows whose quadrature failed
    carry NaNs and the error message.
    """

    H: float
    area: float
    volume: float
    complement_volume: float
    foliates: bool = True
    error: Optional[str] = None


def rescale_to_kappa4(t: TubeParams) -> Tuple[TubeParams, float]:
    """
    Homothety from E(κ,τ) onto E(4, 2τ/√κ).

    E(κ,τ) is E(4, 2τ/√κ) with its metric scaled by c² = 4/κ, so areas
    of E(κ,τ) are c² times the rescaled ones and volumes c³ times.

    :param t: tube parameters with κ > 0.
    :raises ModelMismatchError: if κ ≤ 0.
    :return: rescaled parameters and the length factor c.
    """
    if t.kappa <= 0:
        raise ModelMismatchError("Only Berger spheres can be rescaled to κ = 4")
    root = math.sqrt(t.kappa)
    return TubeParams(4.0, 2 * t.tau / root, 2 * t.H / root), 2 / root


def _require_kappa4(t: TubeParams) -> None:
    if abs(t.kappa - 4) > _KAPPA4_EPS:
        raise UnscaledCurvatureError(
            f"Expected κ = 4, got κ={t.kappa}; use rescale_to_kappa4 first",
        )
    if t.H <= 0:
        raise NonpositiveHError(f"Tube areas and volumes need H > 0, got H={t.H}")


def total_volume(t: Union[TubeParams, SpaceParams]) -> float:
    """
    Volume 32|τ|π²/κ² of the Berger sphere.

    :param t: parameters with κ > 0.
    :raises ModelMismatchError: if κ ≤ 0.
    :return: total volume, infinite for S²×R.
    """
    if t.kappa <= 0:
        raise ModelMismatchError("Only Berger spheres have finite volume")
    if t.tau == 0:
        return math.inf
    return 32 * abs(t.tau) * math.pi**2 / t.kappa**2


def tube_area(t: TubeParams, tol: float = 1e-10) -> float:
    """
    Area of the H-tube.

    :param t: tube parameters with κ = 4 and H > 0.
    :param tol: absolute quadrature tolerance.
    :raises UnscaledCurvatureError: if κ ≠ 4.
    :return: Hπ ∫ √(H²+τ²cos²u)/(H²+cos²u)^{3/2} du over [0, 2π].
    """
    _require_kappa4(t)
    H, tau = t.H, t.tau

    def integrand(u: float) -> float:
        cos_sq = math.cos(u) ** 2
        return math.sqrt(H**2 + tau**2 * cos_sq) / (H**2 + cos_sq) ** 1.5

    return H * math.pi * adaptive_quad(
        integrand,
        0.0,
        2 * math.pi,
        tol / (H * math.pi),
        points=_PEAKS,
    )


def enclosed_volume(t: TubeParams, tol: float = 1e-10) -> float:
    """
    Volume enclosed by the H-tube, from the orbit-space volume element.

    :param t: tube parameters with κ = 4 and H > 0.
    :param tol: absolute quadrature tolerance.
    :raises UnscaledCurvatureError: if κ ≠ 4.
    :return: (π/2) ∫ cos²u √(H²+τ²cos²u)/(H²+cos²u)^{3/2} du over [0, 2π].
    """
    _require_kappa4(t)
    H, tau = t.H, t.tau

    def integrand(u: float) -> float:
        cos_sq = math.cos(u) ** 2
        return cos_sq * math.sqrt(H**2 + tau**2 * cos_sq) / (H**2 + cos_sq) ** 1.5

    return math.pi / 2 * adaptive_quad(
        integrand,
        0.0,
        2 * math.pi,
        2 * tol / math.pi,
        points=_PEAKS,
    )


def _swept_integrand(w: float, tau: float, u: float) -> float:
    cos_sq = math.cos(u) ** 2
    numerator = cos_sq * w * (2 * w**2 + (3 * tau**2 - 1) * cos_sq)
    return numerator / (
        math.sqrt(w**2 + tau**2 * cos_sq) * (w**2 + cos_sq) ** 2.5
    )


def tube_volume(t: TubeParams, tol: float = 1e-10) -> float:
    """
    Volume swept by the tubes T_w, w ≥ H, that lie inside T_H.

    The improper w-integral is mapped to [0, 1) by w = H + s/(1-s).
    Where the family does not foliate the result is an algebraic volume.

    :param t: tube parameters with κ = 4 and H > 0.
    :param tol: absolute quadrature tolerance.
    :raises UnscaledCurvatureError: if κ ≠ 4.
    :raises QuadratureFailureError: if a quadrature misses its tolerance.
    :return: enclosed volume.
    """
    _require_kappa4(t)
    H, tau = t.H, t.tau

    def outer(s: float) -> float:
        w = H + s / (1 - s)
        jacobian = 1 / (1 - s) ** 2
        # Keep the scaled inner error below the outer tolerance.
        inner = adaptive_quad(
            lambda u: _swept_integrand(w, tau, u),
            0.0,
            2 * math.pi,
            tol / (10 * jacobian),
            points=_PEAKS,
        )
        return inner * jacobian

    return math.pi / 2 * adaptive_quad(outer, 0.0, 1.0, 2 * tol / math.pi)


def _record(
    t: TubeParams,
    tol: float,
    method: VolumeMethod,
    foliates: bool,
) -> IsoperimetricRecord:
    total = total_volume(t)
    try:
        area = tube_area(t, tol)
        if method == VolumeMethod.SWEPT:
            volume = tube_volume(t, tol)
        else:
            volume = enclosed_volume(t, tol)
    except NumericalError as exc:
        logger.warning("Row H=%s failed: %s", t.H, exc, exc_info=True)
        return IsoperimetricRecord(
            t.H,
            math.nan,
            math.nan,
            math.nan,
            foliates,
            str(exc),
        )
    return IsoperimetricRecord(t.H, area, volume, total - volume, foliates)


def _sweep_grid(H_start: float, H_stop: float, H_step: float) -> List[float]:
    if H_start <= 0:
        raise NonpositiveHError(f"Sweeps need H > 0, got H_start={H_start}")
    if H_step <= 0 or H_stop < H_start:
        raise ValueError("Sweeps need H_step > 0 and H_stop >= H_start")
    return [float(H) for H in inclusive_grid(H_start, H_stop, H_step)]


def isoperimetric_sweep(
    tau: float,
    H_start: float,
    H_stop: float,
    H_step: float,
    tol: float = 1e-10,
    volume_method: Union[VolumeMethod, str] = VolumeMethod.REDUCED,
) -> List[IsoperimetricRecord]:
    """
    Areas and volumes of the tubes of E(4,τ) along a grid of H.

    :param tau: bundle curvature.
    :param H_start: first mean curvature, positive.
    :param H_stop: last mean curvature.
    :param H_step: grid spacing.
    :param tol: absolute quadrature tolerance per integral.
    :param volume_method: reduced single integral or swept double integral.
    :return: records ordered by H.
    """
    method = VolumeMethod(volume_method)
    grid = _sweep_grid(H_start, H_stop, H_step)
    foliates = foliation_criterion(SpaceParams(4.0, tau)).foliates
    logger.info("Sweeping %d tubes of E(4, %s)", len(grid), tau)
    return [_record(TubeParams(4.0, tau, H), tol, method, foliates) for H in grid]


async def isoperimetric_sweep_async(
    tau: float,
    H_start: float,
    H_stop: float,
    H_step: float,
    tol: float = 1e-10,
    volume_method: Union[VolumeMethod, str] = VolumeMethod.REDUCED,
    workers: int = 4,
) -> List[IsoperimetricRecord]:
    """
    Same as :func:`isoperimetric_sweep`, with rows computed in worker threads.

    :param tau: bundle curvature.
    :param H_start: first mean curvature, positive.
    :param H_stop: last mean curvature.
    :param H_step: grid spacing.
    :param tol: absolute quadrature tolerance per integral.
    :param volume_method: reduced single integral or swept double integral.
    :param workers: maximum number of rows computed at once.
    :return: records ordered by H.
    """
    if workers < 1:
        raise ValueError(f"At least one worker is needed, got {workers}")
    method = VolumeMethod(volume_method)
    grid = _sweep_grid(H_start, H_stop, H_step)
    foliates = foliation_criterion(SpaceParams(4.0, tau)).foliates
    limiter = anyio.CapacityLimiter(workers)
    records: List[Optional[IsoperimetricRecord]] = [None] * len(grid)

    async def run_row(idx: int, H: float) -> None:
        records[idx] = await anyio.to_thread.run_sync(
            _record,
            TubeParams(4.0, tau, H),
            tol,
            method,
            foliates,
            limiter=limiter,
        )

    logger.info(
        "Sweeping %d tubes of E(4, %s) on %d workers",
        len(grid),
        tau,
        workers,
    )
    async with anyio.create_task_group() as tg:
        for idx, H in enumerate(grid):
            tg.start_soon(run_row, idx, H)
    return [record for record in records if record is not None]
