import math
from typing import List

import numpy as np
import pytest

from horizontal_tubes.curvature import (
    first_fundamental_form,
    helicoid_angle_numeric,
    helicoid_mean_curvature,
    mean_curvature_grid,
    numeric_fundamental_forms,
    numeric_mean_curvature,
)
from horizontal_tubes.profile import TubeParams
from horizontal_tubes.sister import helicoid_angle_function

TRIPLES = [
    (4.0, 1.0, 1.0),
    (4.0, 0.4, 1.0),
    (4.0, 1.5, 0.7),
    (4.0, 0.0, 1.0),
    (1.0, 1.0, 0.5),
    (0.0, 0.5, 1.0),
    (0.0, 0.5, 2.0),
    (-1.0, 1.0, 1.0),
    (-2.0, 0.3, 1.0),
]

HELICOIDS = [(4.0, 1.0, 0.5), (4.0, 0.4, 0.2), (1.0, 0.3, 0.6)]


@pytest.mark.parametrize(("kappa", "tau", "H"), TRIPLES)
def test_tubes_have_constant_mean_curvature(
    kappa: float,
    tau: float,
    H: float,
) -> None:
    """Test H_num = H on a 5×5 grid, with the normal towards the axis."""
    rows = mean_curvature_grid(TubeParams(kappa, tau, H), size=5)
    values: List[float] = [row[2] for row in rows]
    assert len(values) == 25
    assert max(abs(value - H) for value in values) < 1e-5
    assert np.std(values) < 1e-6


def test_grid_points() -> None:
    """Test the grid layout."""
    rows = mean_curvature_grid(TubeParams(4.0, 1.0, 1.0), size=2)
    assert [(phi, v) for phi, v, _ in rows] == pytest.approx(
        [(0.0, -math.pi), (0.0, 0.0), (math.pi, -math.pi), (math.pi, 0.0)],
    )
    with pytest.raises(ValueError):
        mean_curvature_grid(TubeParams(4.0, 1.0, 1.0), size=0)


@pytest.mark.parametrize(("kappa", "tau", "H"), TRIPLES)
def test_fundamental_forms_shape(kappa: float, tau: float, H: float) -> None:
    """Test symmetry of the forms and the range of the angle function."""
    forms = numeric_fundamental_forms(TubeParams(kappa, tau, H), 0.7, 0.3)
    assert forms.first_form == pytest.approx(forms.first_form.T)
    assert forms.second_form == pytest.approx(forms.second_form.T)
    assert np.linalg.det(forms.first_form) > 0
    assert abs(forms.nu) <= 1.0
    assert np.linalg.norm(forms.normal) == pytest.approx(1.0)


def test_first_form_diagonal_on_the_axis_plane() -> None:
    """Test that X_φ and X_v are orthogonal where the profile meets r = 0."""
    first = first_fundamental_form(TubeParams(0.0, 0.5, 1.0), math.pi / 2, 0.0)
    assert first[0, 1] == pytest.approx(0.0, abs=1e-8)
    assert first[1, 1] == pytest.approx(1.0)


def test_step_halving_converges() -> None:
    """Test that differences shrink when the step is halved."""
    t = TubeParams(4.0, 0.4, 1.0)
    coarse, middle, fine = (
        numeric_mean_curvature(t, 0.7, 0.3, step) for step in (0.04, 0.02, 0.01)
    )
    assert abs(fine - middle) < abs(middle - coarse) / 3


@pytest.mark.parametrize(("kappa_t", "tau_t", "a"), HELICOIDS)
def test_helicoids_are_minimal(kappa_t: float, tau_t: float, a: float) -> None:
    """Test that spherical helicoids have zero mean curvature."""
    limit = math.pi / math.sqrt(kappa_t)
    for u in (-0.6 * limit, -0.2 * limit, 0.3 * limit, 0.7 * limit):
        for v in (0.0, 0.5, 1.3):
            assert abs(helicoid_mean_curvature(kappa_t, tau_t, a, u, v)) < 1e-5


@pytest.mark.parametrize(("kappa_t", "tau_t", "a"), HELICOIDS)
def test_helicoid_angle_function(kappa_t: float, tau_t: float, a: float) -> None:
    """Test the closed angle function against the numerical normal."""
    limit = math.pi / math.sqrt(kappa_t)
    for u in (0.2 * limit, 0.5 * limit, 0.8 * limit):
        expected = helicoid_angle_function(kappa_t, tau_t, a, u)
        for v in (0.0, 1.1):
            numeric = helicoid_angle_numeric(kappa_t, tau_t, a, u, v)
            assert numeric == pytest.approx(expected, abs=1e-6)
