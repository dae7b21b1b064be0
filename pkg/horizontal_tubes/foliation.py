"""
Foliation and embeddedness of the families of horizontal H-tubes.

For fixed (κ,τ) the tubes T_H around a horizontal geodesic Γ foliate
the complement of Γ (and of the antipodal geodesic Γ' in Berger
spheres) if and only if (1 - x₀²)κ - 4τ² ≤ 0, where x₀ is the positive
root of x·arctanh(x) = 1. All tangencies between profiles happen at
φ = π/2, so everything reduces to the maximum height h_H(π/2).
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from logging import getLogger
from typing import List, NamedTuple, Optional, Sequence

from scipy.optimize import brentq

from horizontal_tubes.exceptions import (
    DegenerateCaseError,
    ModelMismatchError,
    NonpositiveHError,
)
from horizontal_tubes.profile import TubeParams, closed_form_profile
from horizontal_tubes.space import SpaceParams
from horizontal_tubes.utils import sign_changes

logger = getLogger("horizontal_tubes.foliation")

# The statement includes the equality case in the foliating regime.
_CRITERION_EPS = 1e-12
_DEGENERATE_EPS = 1e-12


class FoliatedSet(str, Enum):
    """Region foliated by the family of tubes."""

    COMPLEMENT_OF_GAMMA = "ComplementOfGamma"
    COMPLEMENT_OF_GAMMA_AND_GAMMA_PRIME = "ComplementOfGammaAndGammaPrime"
    NONE = "None"


@dataclass(frozen=True)
class FoliationReport:
    """Outcome of the foliation criterion for one space."""

    x0: float
    criterion_value: float
    foliates: bool
    H0: Optional[float]
    foliated_set: FoliatedSet


class ScanRow(NamedTuple):
    """Maximum height of one tube of a scanned family."""

    H: float
    max_height: float
    turning_point: bool


@lru_cache(maxsize=1)
def solve_x0() -> float:
    """
    Positive root of x·arctanh(x) = 1.

    :return: x₀ ≈ 0.833557.
    """
    return float(
        brentq(lambda x: x * math.atanh(x) - 1, 0.5, 0.99, xtol=1e-15, rtol=1e-15),
    )


def _require_positive_h(t: TubeParams) -> None:
    if t.H <= 0:
        raise NonpositiveHError(f"Maximum heights need H > 0, got H={t.H}")


def max_height(t: TubeParams) -> float:
    """
    Maximum height h_H(π/2) of the profile over α.

    :param t: tube parameters, H > 0.
    :raises NonpositiveHError: if H ≤ 0.
    :return: maximum height.
    """
    _require_positive_h(t)
    return closed_form_profile(t, math.pi / 2).h


def _height_derivative_fd(t: TubeParams) -> float:
    step = 1e-5 * max(1.0, t.H)
    if 4 * (t.H - step) ** 2 + t.kappa <= 0 or t.H - step <= 0:
        step = (t.H - math.sqrt(max(-t.kappa, 0.0)) / 2) / 2
    ahead = max_height(t.with_h(t.H + step))
    behind = max_height(t.with_h(t.H - step))
    return (ahead - behind) / (2 * step)


def d_max_height_dH(
    t: TubeParams,
    allow_degenerate: bool = False,
) -> float:
    """
    Derivative of the maximum height with respect to H.

    With q = 4H² + κ and d = κ - 4τ², the derivative is
    (2/q)(√(d/q)·arctanh√(d/q) - 1) if d > 0 and
    -(2/q)(√(-d/q)·arctan√(-d/q) + 1) if d < 0.

    :param t: tube parameters, H > 0.
    :param allow_degenerate: use a finite difference when κ = 4τ².
    :raises DegenerateCaseError: if κ = 4τ² and ``allow_degenerate`` is off.
    :raises NonpositiveHError: if H ≤ 0.
    :return: derivative of h_H(π/2).
    """
    _require_positive_h(t)
    gap = t.kappa - 4 * t.tau**2
    q = 4 * t.H**2 + t.kappa
    if abs(gap) <= _DEGENERATE_EPS * max(1.0, abs(t.kappa)):
        if not allow_degenerate:
            raise DegenerateCaseError(
                f"No closed derivative for κ = 4τ² (κ={t.kappa}, τ={t.tau})",
            )
        logger.warning("Using a finite difference for the degenerate case %s", t)
        return _height_derivative_fd(t)
    ratio = math.sqrt(abs(gap) / q)
    if gap > 0:
        return 2 / q * (ratio * math.atanh(ratio) - 1)
    return -2 / q * (ratio * math.atan(ratio) + 1)


def critical_mean_curvature(p: SpaceParams) -> Optional[float]:
    """
    Mean curvature H₀ where the maximum height stops increasing.

    :param p: space parameters.
    :return: H₀ solving 4H₀²x₀² = (1 - x₀²)κ - 4τ², or None if it foliates.
    """
    x0 = solve_x0()
    criterion = (1 - x0**2) * p.kappa - 4 * p.tau**2
    if criterion <= _CRITERION_EPS:
        return None
    return math.sqrt(criterion / (4 * x0**2))


def foliation_criterion(p: SpaceParams) -> FoliationReport:
    """
    Decide whether the tubes around Γ foliate the space.

    :param p: space parameters.
    :return: report with x₀, the criterion value and H₀ when it fails.
    """
    x0 = solve_x0()
    criterion = (1 - x0**2) * p.kappa - 4 * p.tau**2
    foliates = criterion <= _CRITERION_EPS
    if not foliates:
        foliated_set = FoliatedSet.NONE
    elif p.kappa > 0:
        foliated_set = FoliatedSet.COMPLEMENT_OF_GAMMA_AND_GAMMA_PRIME
    else:
        foliated_set = FoliatedSet.COMPLEMENT_OF_GAMMA
    report = FoliationReport(
        x0=x0,
        criterion_value=criterion,
        foliates=foliates,
        H0=critical_mean_curvature(p),
        foliated_set=foliated_set,
    )
    logger.debug("Foliation report for %s: %s", p, report)
    return report


def embeddedness(t: TubeParams) -> bool:
    """
    Whether the tube is embedded.

    Only in Berger spheres with τ ≠ 0 can the profile reach its own
    translate by the fibre period 2π|τ|/κ.

    :param t: tube parameters, H > 0.
    :raises NonpositiveHError: if H ≤ 0.
    :return: embeddedness flag.
    """
    _require_positive_h(t)
    if t.kappa <= 0 or t.tau == 0:
        return True
    return max_height(t) < 2 * math.pi * abs(t.tau) / t.kappa


def tangency_scan(
    p: SpaceParams,
    H_grid: Sequence[float],
) -> List[ScanRow]:
    """
    Maximum heights along a grid of mean curvatures.

    A turning point of H ↦ h_H(π/2) signals tangent profiles, that is,
    a failure of the foliation.

    :param p: space parameters.
    :param H_grid: increasing admissible mean curvatures.
    :return: one row per grid value.
    """
    heights = [max_height(TubeParams(p.kappa, p.tau, H)) for H in H_grid]
    turning = set(sign_changes(heights))
    return [
        ScanRow(float(H), height, idx in turning)
        for idx, (H, height) in enumerate(zip(H_grid, heights))
    ]


def small_h_limit(p: SpaceParams, phi: float) -> float:
    """
    Limit of the Berger profile heights h_H(φ) as H → 0.

    :param p: space parameters with κ > 0.
    :param phi: auxiliary angle.
    :raises ModelMismatchError: if κ ≤ 0.
    :return: (4τ/κ)·arctan(sin φ / (1 + |cos φ|)), equal to 2τφ/κ for |φ| ≤ π/2.
    """
    if p.kappa <= 0:
        raise ModelMismatchError("Only Berger spheres have minimal limits of tubes")
    twist = math.atan(math.sin(phi) / (1 + abs(math.cos(phi))))
    return 4 * p.tau / p.kappa * twist
