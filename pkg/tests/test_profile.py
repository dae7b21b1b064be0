import io
import math

import numpy as np
import pytest

from horizontal_tubes.csvio import read_profile_csv, write_profile_csv
from horizontal_tubes.exceptions import (
    ModelMismatchError,
    NonpositiveHError,
    SupercriticalViolationError,
)
from horizontal_tubes.profile import (
    OdeState,
    ProfileCurve,
    ProfilePoint,
    TubeParams,
    arc_parameter_rate,
    closed_form_arrays,
    closed_form_profile,
    energy,
    integrate_profile,
    profile_derivatives,
    profile_normal_and_convexity,
    profile_ode_rhs,
    sample_profile,
    translated_profile,
    tube_immersion,
)

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


def test_supercritical_check() -> None:
    """Test that 4H² + κ must be positive."""
    with pytest.raises(SupercriticalViolationError):
        TubeParams(-1.0, 1.0, 0.4)
    with pytest.raises(ValueError):
        TubeParams(4.0, math.nan, 1.0)


def test_closed_form_needs_positive_h() -> None:
    """Test that minimal tubes are not given by the closed form."""
    with pytest.raises(NonpositiveHError):
        closed_form_profile(TubeParams(4.0, 1.0, 0.0), 0.3)


def test_closed_form_values() -> None:
    """Test closed-form values in the three regimes."""
    point = closed_form_profile(TubeParams(4, 1, 1), 0.0)
    assert point.r == pytest.approx(math.pi / 8)
    assert point.h == pytest.approx(0.0)

    point = closed_form_profile(TubeParams(4, 0, 1), math.pi / 2)
    assert point.r == pytest.approx(0.0, abs=1e-15)
    assert point.h == pytest.approx(math.atanh(1 / math.sqrt(2)) / (2 * math.sqrt(2)))
    assert point.h == pytest.approx(0.311612, abs=1e-6)

    point = closed_form_profile(TubeParams(0, 0.5, 1), math.pi / 2)
    assert point.r == pytest.approx(0.0, abs=1e-15)
    assert point.h == pytest.approx(0.625 * math.atan(0.5) + 0.25)
    assert point.h == pytest.approx(0.5397798, abs=1e-7)


@pytest.mark.parametrize(("kappa", "tau", "H"), TRIPLES)
def test_closed_form_symmetry(kappa: float, tau: float, H: float) -> None:
    """Test that r is even and h is odd and 2π-periodic."""
    t = TubeParams(kappa, tau, H)
    phi = np.linspace(0.1, 3.0, 30)
    r_val, h_val = closed_form_arrays(t, phi)
    r_neg, h_neg = closed_form_arrays(t, -phi)
    r_per, h_per = closed_form_arrays(t, phi + 2 * np.pi)
    assert r_neg == pytest.approx(r_val, abs=1e-12)
    assert h_neg == pytest.approx(-h_val, abs=1e-12)
    assert r_per == pytest.approx(r_val, abs=1e-12)
    assert h_per == pytest.approx(h_val, abs=1e-12)


@pytest.mark.parametrize(("kappa", "tau", "H"), TRIPLES)
def test_closed_form_derivatives(kappa: float, tau: float, H: float) -> None:
    """Test finite differences of the closed form against dr/dφ and dh/dφ."""
    t = TubeParams(kappa, tau, H)
    step = 1e-5
    for phi in np.linspace(0.05, 2 * np.pi - 0.05, 17):
        ahead = closed_form_profile(t, phi + step)
        behind = closed_form_profile(t, phi - step)
        dr, dh = profile_derivatives(t, phi)
        assert (ahead.r - behind.r) / (2 * step) == pytest.approx(dr, abs=1e-6)
        assert (ahead.h - behind.h) / (2 * step) == pytest.approx(dh, abs=1e-6)


@pytest.mark.parametrize("kappa", [1e-6, -1e-6])
def test_flat_limit(kappa: float) -> None:
    """Test that the curved formulas approach the κ = 0 ones."""
    phi = np.linspace(-3.0, 3.0, 25)
    r_flat, h_flat = closed_form_arrays(TubeParams(0.0, 0.5, 1.0), phi)
    r_val, h_val = closed_form_arrays(TubeParams(kappa, 0.5, 1.0), phi)
    assert np.abs(r_val - r_flat).max() < 1e-5
    assert np.abs(h_val - h_flat).max() < 1e-5


def test_ode_rhs_values() -> None:
    """Test the profile system at a few states."""
    rates = profile_ode_rhs(TubeParams(4, 1, 1), OdeState(0, 0, 0, math.pi / 2))
    assert rates == pytest.approx((-0.5, 0.0, 1.0), abs=1e-15)
    rates = profile_ode_rhs(TubeParams(0, 0.5, 1), OdeState(0, 0, 0, 0))
    assert rates == pytest.approx((0.0, 1.0, 2.0))
    rates = profile_ode_rhs(TubeParams(-1, 1, 1), OdeState(0, 0, 0, 0))
    assert rates == pytest.approx((0.0, 1.0, 2.0))


@pytest.mark.parametrize(("kappa", "tau", "H"), TRIPLES)
def test_arc_parameter_rate(kappa: float, tau: float, H: float) -> None:
    """Test du/dφ against dφ/du of the system along the closed form."""
    t = TubeParams(kappa, tau, H)
    for phi in np.linspace(0.0, 2 * np.pi, 13):
        point = closed_form_profile(t, phi)
        _, _, dphi = profile_ode_rhs(t, OdeState(0, point.r, point.h, phi))
        assert dphi * arc_parameter_rate(t, phi) == pytest.approx(1.0)


def test_energy_values() -> None:
    """Test the energy at a few points."""
    t = TubeParams(4, 1, 1)
    assert energy(t, 0.0, 0.0) == pytest.approx(1.0)
    assert energy(TubeParams(0, 0.5, 1), 0.5, 0.0) == pytest.approx(0.0)
    for phi in np.linspace(0, 2 * np.pi, 9):
        point = closed_form_profile(t, phi)
        assert energy(t, point.r, phi) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize(("kappa", "tau", "H"), TRIPLES)
def test_integrate_matches_closed_form(kappa: float, tau: float, H: float) -> None:
    """Test the integrated profile against the closed form and the energy."""
    t = TubeParams(kappa, tau, H)
    curve = integrate_profile(t, 0.0, 2 * math.pi, tol=1e-10)
    assert curve.phi[-1] == pytest.approx(2 * math.pi)
    seed_energy = energy(t, curve.samples[0].r, curve.samples[0].phi)
    for sample in curve.samples:
        exact = closed_form_profile(t, sample.phi)
        assert abs(sample.r - exact.r) < 1e-8
        assert abs(sample.h - exact.h) < 1e-8
        assert abs(energy(t, sample.r, sample.phi) - seed_energy) < 1e-8


def test_integrate_resampled() -> None:
    """Test the uniform resampling of the dense output."""
    t = TubeParams(0.0, 0.5, 1.0)
    curve = integrate_profile(t, 0.0, math.pi, num_samples=11)
    assert len(curve) == 11
    assert curve.phi == pytest.approx(np.linspace(0.0, math.pi, 11), abs=1e-9)
    exact_r, exact_h = closed_form_arrays(t, curve.phi)
    assert curve.r == pytest.approx(exact_r, abs=1e-8)
    assert curve.h == pytest.approx(exact_h, abs=1e-8)


def test_integrate_empty_interval() -> None:
    """Test that an empty interval gives the seed."""
    t = TubeParams(4.0, 1.0, 1.0)
    curve = integrate_profile(t, 0.5, 0.5)
    assert curve.samples == (closed_form_profile(t, 0.5),)
    with pytest.raises(ValueError):
        integrate_profile(t, 1.0, 0.5)


def test_tube_immersion_values() -> None:
    """Test immersion points in the three models."""
    point = tube_immersion(TubeParams(0, 0.5, 1), 0.0, 2.0)
    assert point.coords == pytest.approx((2.0, 0.5, 0.5))

    point = tube_immersion(TubeParams(4, 1, 1), 0.0, 0.0)
    assert point.coords == pytest.approx((math.tan(3 * math.pi / 8), 0.0, 0.0))
    assert point.coords[0] == pytest.approx(2.414214, abs=1e-6)

    t = TubeParams(-1, 1, 1)
    point = tube_immersion(t, math.pi / 2, 0.0)
    height = closed_form_profile(t, math.pi / 2).h
    assert point.coords == pytest.approx((0.0, 1.0, height - 2 * math.pi), abs=1e-12)


@pytest.mark.parametrize(("kappa", "tau", "H"), TRIPLES)
def test_profile_convexity(kappa: float, tau: float, H: float) -> None:
    """Test convexity and the winding of the inner normal."""
    t = TubeParams(kappa, tau, H)
    phis = np.linspace(0.0, 2 * np.pi, 401)
    normals = [profile_normal_and_convexity(t, phi) for phi in phis]
    assert min(normal.convexity for normal in normals) >= -1e-14
    angles = np.unwrap([math.atan2(n.eta[1], n.eta[0]) for n in normals])
    assert angles[-1] - angles[0] == pytest.approx(2 * math.pi)


def test_profile_normal_values() -> None:
    """Test the normal at φ = 0 and the convexity at φ = π/2."""
    t = TubeParams(4.0, 0.4, 0.7)
    normal = profile_normal_and_convexity(t, 0.0)
    expected = -2 * math.sqrt(0.7**2 + 0.4**2) / (4 * 0.7**2 + 4)
    assert normal.eta == pytest.approx((expected, 0.0))
    top = profile_normal_and_convexity(t, math.pi / 2)
    assert top.convexity == pytest.approx(1 / (4 * 0.7**2))


def test_translated_profile() -> None:
    """Test the vertical shift by 2πτ/κ."""
    t = TubeParams(4.0, 0.4, 1.0)
    shifted = translated_profile(t, 0.3)
    point = closed_form_profile(t, 0.3)
    assert shifted.r == point.r
    assert shifted.h == pytest.approx(point.h + 2 * math.pi * 0.4 / 4)
    with pytest.raises(ModelMismatchError):
        translated_profile(TubeParams(0.0, 0.5, 1.0), 0.3)
    with pytest.raises(ModelMismatchError):
        translated_profile(TubeParams(4.0, 0.0, 1.0), 0.3)


def test_profile_curve_order() -> None:
    """Test that samples must have increasing φ."""
    t = TubeParams(4.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        ProfileCurve(t, (ProfilePoint(1.0, 0.0, 0.0), ProfilePoint(0.5, 0.0, 0.0)))


def test_profile_csv_reparses_exactly() -> None:
    """Test that written profiles read back to identical floats."""
    t = TubeParams(-1.0, 1.0, 1.0)
    curve = sample_profile(t, np.linspace(0.0, 2 * np.pi, 50))
    buffer = io.StringIO()
    write_profile_csv(curve, buffer)
    assert buffer.getvalue().startswith("phi,r,h\n")
    buffer.seek(0)
    assert read_profile_csv(buffer, t) == curve


def test_profile_csv_header() -> None:
    """Test that a wrong header is rejected."""
    with pytest.raises(ValueError):
        read_profile_csv(io.StringIO("a,b,c\n1,2,3\n"), TubeParams(4.0, 1.0, 1.0))
