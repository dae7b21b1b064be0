"""
Figure recipes.

Every recipe writes SVG files whose contents only depend on the recipe
and its arguments, so reruns give byte-identical files.
"""

import math
from logging import getLogger
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from horizontal_tubes.isoperimetric import IsoperimetricRecord, isoperimetric_sweep
from horizontal_tubes.profile import (
    ProfileCase,
    TubeParams,
    sample_profile,
    translated_profile,
)
from horizontal_tubes.space import SpaceParams
from horizontal_tubes.svg import SvgPlot
from horizontal_tubes.utils import format_float

logger = getLogger("horizontal_tubes.figures")

FIGURES = ("foliation-berger", "profiles", "profile-curves")

FOLIATION_PANELS = ((4.0, 1.5), (4.0, 0.4), (4.0, 0.2))
PROFILE_TAUS = (0.244, 0.374, 0.407, 0.5, 1.05, 1.5, 2.5, 10.0)
CURVE_PANELS = ((0.0, 0.5), (-1.0, 1.0))

DEFAULT_H_STEP = 0.025
PROFILES_H_STOP = 20.0

# Offsets above the supercritical threshold √(-κ)/2 of the nested profiles.
NESTED_OFFSETS = (0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0)
_PHI_SAMPLES = 361

TUBE_COLOR = "#cc0000"
TRANSLATED_COLOR = "#0044cc"
OVERLAY_COLOR = "#0044cc"


def _slug(value: float) -> str:
    return format_float(value).replace("-", "m")


def nested_mean_curvatures(p: SpaceParams) -> List[float]:
    """
    Mean curvatures of the nested profiles drawn for a space.

    :param p: space parameters.
    :return: increasing supercritical values of H.
    """
    threshold = math.sqrt(max(-p.kappa, 0.0)) / 2
    return [threshold + offset for offset in NESTED_OFFSETS]


def profile_plot(p: SpaceParams, H_values: Iterable[float]) -> SvgPlot:
    """
    Nested profile curves (r, h) of the tubes of one space.

    In Berger spheres with τ ≠ 0 the copies translated by 2πτ/κ are
    added in a second colour.

    :param p: space parameters.
    :param H_values: mean curvatures to draw.
    :return: plot ready to render.
    """
    plot = SvgPlot(
        title=f"Profiles in E({format_float(p.kappa)}, {format_float(p.tau)})",
        x_label="r",
        y_label="h",
    )
    phi_grid = np.linspace(0.0, 2 * math.pi, _PHI_SAMPLES)
    for H in H_values:
        t = TubeParams(p.kappa, p.tau, H)
        curve = sample_profile(t, phi_grid)
        plot.polyline(list(zip(curve.r, curve.h)), color=TUBE_COLOR)
        if t.case == ProfileCase.BERGER and t.tau != 0:
            shifted = [translated_profile(t, phi) for phi in phi_grid]
            plot.polyline(
                [(point.r, point.h) for point in shifted],
                color=TRANSLATED_COLOR,
            )
    return plot


def isoperimetric_plot(
    tau: float,
    records: Sequence[IsoperimetricRecord],
    overlay: Optional[Sequence[Tuple[float, float]]] = None,
) -> SvgPlot:
    """
    Area of the tubes of E(4,τ) against the volume they enclose.

    The area against the complementary volume is dashed.

    :param tau: bundle curvature.
    :param records: sweep rows.
    :param overlay: optional external (volume, area) curve.
    :return: plot ready to render.
    """
    plot = SvgPlot(
        title=f"Horizontal tubes in E(4, {format_float(tau)})",
        x_label="volume",
        y_label="area",
    )
    plot.polyline([(row.volume, row.area) for row in records], color=TUBE_COLOR)
    plot.polyline(
        [(row.complement_volume, row.area) for row in records],
        color=TUBE_COLOR,
        dashed=True,
    )
    if overlay:
        plot.polyline(list(overlay), color=OVERLAY_COLOR)
    return plot


def _foliation_berger(out_dir: Path) -> List[Path]:
    paths = []
    for kappa, tau in FOLIATION_PANELS:
        p = SpaceParams(kappa, tau)
        path = out_dir / f"foliation-berger-kappa{_slug(kappa)}-tau{_slug(tau)}.svg"
        profile_plot(p, nested_mean_curvatures(p)).save(path)
        paths.append(path)
    return paths


def _profile_curves(out_dir: Path) -> List[Path]:
    paths = []
    for kappa, tau in CURVE_PANELS:
        p = SpaceParams(kappa, tau)
        path = out_dir / f"profile-curves-kappa{_slug(kappa)}-tau{_slug(tau)}.svg"
        profile_plot(p, nested_mean_curvatures(p)).save(path)
        paths.append(path)
    return paths


def _profiles(out_dir: Path, h_step: float, tol: float) -> List[Path]:
    paths = []
    for tau in PROFILE_TAUS:
        records = isoperimetric_sweep(tau, h_step, PROFILES_H_STOP, h_step, tol)
        path = out_dir / f"profiles-tau{_slug(tau)}.svg"
        isoperimetric_plot(tau, records).save(path)
        paths.append(path)
    return paths


def reproduce_figure(
    name: str,
    out_dir: Path,
    h_step: Optional[float] = None,
    tol: float = 1e-10,
) -> List[Path]:
    """
    Write the SVG panels of a figure recipe.

    :param name: one of :data:`FIGURES`.
    :param out_dir: target directory, created if missing.
    :param h_step: H spacing of the ``profiles`` sweeps.
    :param tol: quadrature tolerance of the ``profiles`` sweeps.
    :raises ValueError: for unknown recipes or a nonpositive step.
    :return: written files, in panel order.
    """
    if name not in FIGURES:
        raise ValueError(f"Unknown figure {name!r}, expected one of {FIGURES}")
    step = DEFAULT_H_STEP if h_step is None else h_step
    if step <= 0:
        raise ValueError(f"H step must be positive, got {step}")
    out_dir.mkdir(parents=True, exist_ok=True)
    logger.info("Reproducing %s into %s", name, out_dir)
    if name == "foliation-berger":
        paths = _foliation_berger(out_dir)
    elif name == "profile-curves":
        paths = _profile_curves(out_dir)
    else:
        paths = _profiles(out_dir, step, tol)
    for path in paths:
        logger.debug("Wrote %s", path)
    return paths
