import math

import pytest

from horizontal_tubes.exceptions import (
    DegenerateCaseError,
    ModelMismatchError,
    NonpositiveHError,
)
from horizontal_tubes.foliation import (
    FoliatedSet,
    d_max_height_dH,
    embeddedness,
    foliation_criterion,
    max_height,
    small_h_limit,
    solve_x0,
    tangency_scan,
)
from horizontal_tubes.profile import TubeParams, closed_form_profile
from horizontal_tubes.space import SpaceParams
from horizontal_tubes.utils import inclusive_grid


def test_solve_x0() -> None:
    """Test the root of x·arctanh(x) = 1."""
    x0 = solve_x0()
    assert x0 == pytest.approx(0.833557, abs=5e-7)
    assert abs(x0 * math.atanh(x0) - 1) < 1e-12


def test_foliating_berger_sphere() -> None:
    """Test that a large bundle curvature gives a foliation."""
    report = foliation_criterion(SpaceParams(4.0, 1.5))
    assert report.foliates
    assert report.criterion_value < 0
    assert report.H0 is None
    assert report.foliated_set == FoliatedSet.COMPLEMENT_OF_GAMMA_AND_GAMMA_PRIME


def test_non_foliating_berger_sphere() -> None:
    """Test H₀ where the maximum heights turn back."""
    report = foliation_criterion(SpaceParams(4.0, 0.4))
    assert not report.foliates
    assert report.foliated_set == FoliatedSet.NONE
    assert report.H0 == pytest.approx(0.4571, abs=1e-4)
    slope = d_max_height_dH(TubeParams(4.0, 0.4, report.H0))
    assert slope == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize(
    ("kappa", "tau", "foliates"),
    [(0.0, 0.5, True), (-1.0, 0.0, True), (-1.0, 1.0, True), (4.0, 0.0, False)],
)
def test_criterion_other_spaces(kappa: float, tau: float, foliates: bool) -> None:
    """Test the criterion outside of Berger spheres and in S²×R."""
    report = foliation_criterion(SpaceParams(kappa, tau))
    assert report.foliates == foliates
    if foliates:
        assert report.foliated_set == FoliatedSet.COMPLEMENT_OF_GAMMA


def test_degenerate_derivative() -> None:
    """Test that κ = 4τ² has no closed derivative."""
    t = TubeParams(4.0, 1.0, 1.0)
    with pytest.raises(DegenerateCaseError):
        d_max_height_dH(t)
    step = 1e-5
    expected = (
        max_height(t.with_h(1.0 + step)) - max_height(t.with_h(1.0 - step))
    ) / (2 * step)
    assert d_max_height_dH(t, allow_degenerate=True) == pytest.approx(
        expected,
        abs=1e-6,
    )


@pytest.mark.parametrize(
    ("kappa", "tau", "H"),
    [
        (4.0, 0.4, 1.0),
        (4.0, 1.5, 0.7),
        (4.0, 0.0, 1.0),
        (0.0, 0.5, 1.0),
        (-1.0, 1.0, 1.0),
        (-2.0, 0.3, 1.0),
    ],
)
def test_height_derivative(kappa: float, tau: float, H: float) -> None:
    """Test the closed derivative against a central difference."""
    t = TubeParams(kappa, tau, H)
    step = 1e-5
    expected = (max_height(t.with_h(H + step)) - max_height(t.with_h(H - step))) / (
        2 * step
    )
    assert d_max_height_dH(t) == pytest.approx(expected, abs=1e-6)


def test_max_height_is_the_top_of_the_profile() -> None:
    """Test that h(π/2) is the largest height."""
    t = TubeParams(4.0, 0.4, 0.8)
    top = max_height(t)
    for phi in (0.3, 1.0, 1.4, 1.7, 2.5):
        assert closed_form_profile(t, phi).h < top
    with pytest.raises(NonpositiveHError):
        max_height(t.with_h(0.0))


def test_scan_finds_the_turning_point() -> None:
    """Test a family that stops foliating and loses embeddedness."""
    p = SpaceParams(4.0, 0.2)
    rows = tangency_scan(p, inclusive_grid(0.05, 3.0, 0.01))
    turning = [row for row in rows if row.turning_point]
    assert len(turning) == 1
    H0 = foliation_criterion(p).H0
    assert H0 is not None
    assert turning[0].H == pytest.approx(H0, abs=0.01)
    fibre = 2 * math.pi * p.tau / p.kappa
    assert max(row.max_height for row in rows) >= fibre
    assert not embeddedness(TubeParams(4.0, 0.2, turning[0].H))


def test_foliating_family_is_embedded() -> None:
    """Test that the tubes of a foliating Berger sphere are embedded."""
    p = SpaceParams(4.0, 1.5)
    grid = inclusive_grid(0.05, 5.0, 0.05)
    rows = tangency_scan(p, grid)
    assert not any(row.turning_point for row in rows)
    assert all(embeddedness(TubeParams(4.0, 1.5, H)) for H in grid)
    assert embeddedness(TubeParams(0.0, 0.5, 0.1))
    assert embeddedness(TubeParams(4.0, 0.0, 0.1))


def test_small_h_limit() -> None:
    """Test the heights of the minimal limit of the tubes."""
    p = SpaceParams(4.0, 0.4)
    assert small_h_limit(p, 0.7) == pytest.approx(2 * 0.4 * 0.7 / 4)
    assert small_h_limit(p, math.pi / 2) == pytest.approx(0.4 * math.pi / 4)
    t = TubeParams(4.0, 0.4, 1e-7)
    for phi in (0.3, 1.2, 2.0, 2.9):
        assert closed_form_profile(t, phi).h == pytest.approx(
            small_h_limit(p, phi),
            abs=1e-5,
        )
    with pytest.raises(ModelMismatchError):
        small_h_limit(SpaceParams(0.0, 0.5), 0.3)
