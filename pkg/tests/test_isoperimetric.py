import math

import numpy as np
import pytest

from horizontal_tubes import isoperimetric
from horizontal_tubes.curvature import first_fundamental_form
from horizontal_tubes.exceptions import (
    ModelMismatchError,
    NonpositiveHError,
    QuadratureFailureError,
    UnscaledCurvatureError,
)
from horizontal_tubes.isoperimetric import (
    VolumeMethod,
    enclosed_volume,
    isoperimetric_sweep,
    isoperimetric_sweep_async,
    rescale_to_kappa4,
    total_volume,
    tube_area,
    tube_volume,
)
from horizontal_tubes.profile import TubeParams
from horizontal_tubes.space import SpaceParams


@pytest.mark.parametrize("H", [0.25, 0.5, 1.0, 2.0, 7.5])
def test_round_area(H: float) -> None:
    """Test the area of the tubes of the round sphere."""
    area = tube_area(TubeParams(4.0, 1.0, H))
    assert abs(area - 2 * math.pi**2 / math.sqrt(1 + H**2)) < 1e-8


@pytest.mark.parametrize("H", [0.5, 1.0, 2.0])
def test_round_volume(H: float) -> None:
    """Test the volume enclosed by the tubes of the round sphere."""
    expected = math.pi**2 * (1 - H / math.sqrt(1 + H**2))
    assert enclosed_volume(TubeParams(4.0, 1.0, H)) == pytest.approx(expected, abs=1e-9)


def test_round_volume_value() -> None:
    """Test the Clifford-like tube of H = 1."""
    assert enclosed_volume(TubeParams(4.0, 1.0, 1.0)) == pytest.approx(2.8907, abs=1e-4)


@pytest.mark.parametrize(
    ("tau", "H"),
    [(1.0, 1.0), (0.4, 1.0), (1.5, 0.7), (0.4, 0.3)],
)
def test_swept_volume_matches_reduced(tau: float, H: float) -> None:
    """Test that the family integral agrees with the single integral."""
    t = TubeParams(4.0, tau, H)
    assert tube_volume(t) == pytest.approx(enclosed_volume(t), abs=1e-7)


def test_round_swept_volume() -> None:
    """Test the family integral against the round closed form."""
    expected = math.pi**2 * (1 - 1 / math.sqrt(2))
    assert tube_volume(TubeParams(4.0, 1.0, 1.0)) == pytest.approx(expected, abs=1e-7)


def test_small_tubes_fill_half_the_sphere() -> None:
    """Test that the volume tends to half the ambient volume as H → 0."""
    volume = enclosed_volume(TubeParams(4.0, 0.4, 1e-4))
    assert volume == pytest.approx(total_volume(SpaceParams(4.0, 0.4)) / 2, rel=1e-3)


@pytest.mark.parametrize(("tau", "H"), [(0.4, 1.0), (1.5, 0.5)])
def test_area_matches_surface_integral(tau: float, H: float) -> None:
    """Test the area against √det I integrated over the fundamental domain."""
    t = TubeParams(4.0, tau, H)
    phis = np.linspace(0.0, 2 * math.pi, 65)[:-1]
    densities = [
        math.sqrt(np.linalg.det(first_fundamental_form(t, phi, 0.0))) for phi in phis
    ]
    # The integrand does not depend on v, which runs over [0, 4π].
    area = 4 * math.pi * 2 * math.pi * float(np.mean(densities))
    assert area == pytest.approx(tube_area(t), abs=1e-4)


def test_total_volume() -> None:
    """Test the volume of Berger spheres."""
    assert total_volume(SpaceParams(4.0, 1.0)) == pytest.approx(2 * math.pi**2)
    assert total_volume(SpaceParams(4.0, 0.0)) == math.inf
    with pytest.raises(ModelMismatchError):
        total_volume(SpaceParams(0.0, 0.5))


def test_rescale_to_kappa4() -> None:
    """Test the homothety onto κ = 4."""
    rescaled, factor = rescale_to_kappa4(TubeParams(1.0, 0.5, 0.5))
    assert (rescaled.kappa, rescaled.tau, rescaled.H) == pytest.approx((4.0, 1.0, 1.0))
    assert factor == pytest.approx(2.0)
    with pytest.raises(ModelMismatchError):
        rescale_to_kappa4(TubeParams(-1.0, 1.0, 1.0))


def test_needs_kappa4() -> None:
    """Test the κ = 4 and H > 0 checks."""
    with pytest.raises(UnscaledCurvatureError):
        tube_area(TubeParams(1.0, 0.5, 0.5))
    with pytest.raises(UnscaledCurvatureError):
        enclosed_volume(TubeParams(1.0, 0.5, 0.5))
    with pytest.raises(NonpositiveHError):
        tube_volume(TubeParams(4.0, 0.5, 0.0))


def test_round_sweep() -> None:
    """Test the area column of a round sweep."""
    records = isoperimetric_sweep(1.0, 0.5, 5.0, 0.5)
    assert [row.H for row in records] == pytest.approx(np.arange(1, 11) * 0.5)
    for row in records:
        assert row.area == pytest.approx(2 * math.pi**2 / math.sqrt(1 + row.H**2))
        assert row.volume + row.complement_volume == pytest.approx(2 * math.pi**2)
        assert row.foliates
        assert row.error is None
    areas = [row.area for row in records]
    assert all(later < earlier for earlier, later in zip(areas, areas[1:]))


def test_sweep_decreasing_area() -> None:
    """Test that large tubes of E(4, 0.5) lose area as H grows."""
    records = isoperimetric_sweep(0.5, 1.5, 5.0, 0.5)
    areas = [row.area for row in records]
    assert all(later < earlier for earlier, later in zip(areas, areas[1:]))


def test_sweep_bookkeeping() -> None:
    """Test the complementary volume and the foliation flag."""
    records = isoperimetric_sweep(10.0, 1.0, 3.0, 1.0)
    total = 32 * 10 * math.pi**2 / 16
    for row in records:
        assert row.volume + row.complement_volume == pytest.approx(total)
    assert all(row.foliates for row in records)
    assert not any(row.foliates for row in isoperimetric_sweep(0.2, 1.0, 1.0, 1.0))


def test_failed_rows_are_marked(monkeypatch: pytest.MonkeyPatch) -> None:
    """Test that a failing quadrature only marks its own row."""
    real_area = isoperimetric.tube_area

    def flaky_area(t: TubeParams, tol: float = 1e-10) -> float:
        if t.H == 2.0:
            raise QuadratureFailureError("did not converge")
        return real_area(t, tol)

    monkeypatch.setattr(isoperimetric, "tube_area", flaky_area)
    records = isoperimetric_sweep(1.0, 1.0, 3.0, 1.0)
    assert [row.H for row in records] == [1.0, 2.0, 3.0]
    failed = records[1]
    assert failed.error == "did not converge"
    assert math.isnan(failed.area)
    assert math.isnan(failed.volume)
    assert math.isnan(failed.complement_volume)
    for row in (records[0], records[2]):
        assert row.error is None
        assert row.area > 0


def test_sweep_grid_errors() -> None:
    """Test the checks on the H grid."""
    with pytest.raises(NonpositiveHError):
        isoperimetric_sweep(1.0, 0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        isoperimetric_sweep(1.0, 1.0, 0.5, 0.5)
    with pytest.raises(ValueError):
        isoperimetric_sweep(1.0, 1.0, 2.0, 0.0)


@pytest.mark.parametrize(("tau", "H"), [(1.0, 1.0), (0.4, 0.3)])
def test_swept_volume_converges(tau: float, H: float) -> None:
    """Test that refining the improper integral moves it by less than tol."""
    t = TubeParams(4.0, tau, H)
    tol = 1e-8
    assert tube_volume(t, tol / 2) == pytest.approx(tube_volume(t, tol), abs=tol)


def test_swept_sweep() -> None:
    """Test the swept volume method in a sweep."""
    reduced = isoperimetric_sweep(1.0, 1.0, 2.0, 1.0)
    swept = isoperimetric_sweep(1.0, 1.0, 2.0, 1.0, volume_method="swept")
    for left, right in zip(reduced, swept):
        assert left.volume == pytest.approx(right.volume, abs=1e-7)
    with pytest.raises(ValueError):
        isoperimetric_sweep(1.0, 1.0, 2.0, 1.0, volume_method="triple")


@pytest.mark.anyio
async def test_async_sweep_matches() -> None:
    """Test that worker threads give the same ordered rows."""
    expected = isoperimetric_sweep(0.4, 0.25, 2.0, 0.25)
    records = await isoperimetric_sweep_async(
        0.4,
        0.25,
        2.0,
        0.25,
        volume_method=VolumeMethod.REDUCED,
        workers=3,
    )
    assert records == expected


@pytest.mark.anyio
async def test_async_sweep_needs_workers() -> None:
    """Test that at least one worker is required."""
    with pytest.raises(ValueError):
        await isoperimetric_sweep_async(1.0, 0.5, 1.0, 0.5, workers=0)
