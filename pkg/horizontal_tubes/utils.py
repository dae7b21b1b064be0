"""Numeric helpers shared by the geometry modules and the command line."""

import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from horizontal_tubes.exceptions import QuadratureFailureError

# Absolute threshold below which κ is treated as zero.
KAPPA_EPS = 1e-7


def is_flat(kappa: float) -> bool:
    """
    Return true if κ should be handled by the κ=0 formulas.

    :param kappa: base curvature.
    :return: whether |κ| is below the dispatch threshold.
    """
    return abs(kappa) < KAPPA_EPS


def format_float(value: float) -> str:
    """
    Format a float with the shortest decimal that round-trips.

    :param value: number to format.
    :return: decimal representation.
    """
    return repr(float(value))


def parse_range(text: str) -> Tuple[float, float, float]:
    """
    Parse a ``start:stop:step`` triple.

    :param text: textual range.
    :raises ValueError: if the text is malformed or the step is not positive.
    :return: start, stop and step.
    """
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"Expected start:stop:step, got {text!r}")
    start, stop, step = (float(part) for part in parts)
    if not all(math.isfinite(val) for val in (start, stop, step)):
        raise ValueError(f"Range {text!r} is not finite")
    if step <= 0 or stop < start:
        raise ValueError(f"Range {text!r} must have step > 0 and stop >= start")
    return start, stop, step


def inclusive_grid(start: float, stop: float, step: float) -> np.ndarray:
    """
    Build an evenly spaced grid that includes ``stop`` when it lies on it.

    Values are computed as ``start + i * step`` so that they do not
    accumulate rounding errors.

    :param start: first value.
    :param stop: last value.
    :param step: spacing.
    :return: grid values.
    """
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count, dtype=float)


def sign_changes(values: List[float]) -> List[int]:
    """
    Find indices where the discrete slope changes sign.

    Index ``i`` is reported when the slope entering ``values[i]``
    and the slope leaving it have opposite signs.

    :param values: sequence of samples.
    :return: interior indices of turning points.
    """
    turning = []
    for idx in range(1, len(values) - 1):
        before = values[idx] - values[idx - 1]
        after = values[idx + 1] - values[idx]
        if before * after < 0:
            turning.append(idx)
    return turning


def adaptive_quad(
    func: Callable[[float], float],
    lower: float,
    upper: float,
    tol: float,
    points: Optional[Sequence[float]] = None,
) -> float:
    """
    Adaptive Gauss-Kronrod quadrature with an absolute tolerance.

    :param func: integrand.
    :param lower: lower limit.
    :param upper: upper limit.
    :param tol: requested absolute error.
    :param points: interior break points where the integrand varies fast.
    :raises QuadratureFailureError: if the error estimate exceeds the tolerance.
    :return: value of the integral.
    """
    value, error = quad(
        func,
        lower,
        upper,
        epsabs=tol,
        epsrel=0.0,
        limit=500,
        points=points,
    )
    if not math.isfinite(value) or error > tol:
        raise QuadratureFailureError(
            f"Quadrature error {error:.3e} exceeds tolerance {tol:.3e}",
        )
    return float(value)
