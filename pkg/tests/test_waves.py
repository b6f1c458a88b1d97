import numpy as np
import pytest

from wavedesal.waves import (
    SeaState,
    elevation_series,
    excitation_series,
    pm_spectrum,
    regular_wave,
    spectral_moment,
    synthesize,
)


@pytest.fixture(scope="module")
def seastate():
    return SeaState(Hs=2.64, Tp=9.86)


def test_seastate_validation():
    with pytest.raises(ValueError):
        SeaState(Hs=-1.0, Tp=9.0)
    with pytest.raises(ValueError):
        SeaState(Hs=1.0, Tp=0.0)


def test_spectrum_point_value(seastate):
    # Direct evaluation of the published closed form at the peak.
    wp = 2 * np.pi / 9.86
    S = pm_spectrum(seastate, np.array([wp]), mode="verbatim")
    assert S[0] == pytest.approx(6.152, rel=1e-3)


def test_spectrum_peak_location(seastate):
    w = np.linspace(0.3, 1.2, 500001)
    S = pm_spectrum(seastate, w, mode="standard")
    assert w[np.argmax(S)] == pytest.approx(2 * np.pi / 9.86, abs=1e-5)


def test_verbatim_integral(seastate):
    w = np.linspace(0.01, 25, 500001)
    S = pm_spectrum(seastate, w, mode="verbatim")
    assert np.trapezoid(S, w) == pytest.approx(np.pi * 2.64**2 / 8, rel=1e-4)


def test_standard_variance(seastate):
    # Standard normalization recovers the conventional m0 = Hs^2/16.
    w = np.linspace(0.01, 25, 500001)
    S = pm_spectrum(seastate, w, mode="standard")
    assert np.trapezoid(S, w) == pytest.approx(2.64**2 / 16, rel=1e-4)


def test_closed_form_moment(seastate):
    assert spectral_moment(seastate, 0, mode="verbatim") == pytest.approx(
        np.pi * 2.64**2 / 8
    )
    assert spectral_moment(seastate, 0, mode="standard") == pytest.approx(
        2.64**2 / 16
    )


def test_unknown_mode(seastate):
    with pytest.raises(ValueError, match="mode"):
        pm_spectrum(seastate, np.array([1.0]), mode="pm")


def test_synthesis_deterministic(seastate):
    a = synthesize(seastate, seed=11)
    b = synthesize(seastate, seed=11)
    assert np.array_equal(a.phases, b.phases)
    assert np.array_equal(a.amplitudes, b.amplitudes)


def test_synthesis_seed_sensitivity(seastate):
    a = synthesize(seastate, seed=11)
    b = synthesize(seastate, seed=12)
    assert not np.array_equal(a.phases, b.phases)


def test_synthesis_band(seastate):
    r = synthesize(seastate, n_components=200)
    assert r.freqs.min() > 0.2
    assert r.freqs.max() < 3.0
    assert len(r.freqs) == 200


def test_synthesis_variance_matches_m0(seastate):
    # sum a_i^2/2 approximates the band-limited spectral variance.
    r = synthesize(seastate, n_components=2000)
    w = np.linspace(0.2, 3.0, 200001)
    S = pm_spectrum(seastate, w, mode="standard")
    band_m0 = np.trapezoid(S, w)
    assert np.sum(r.amplitudes**2) / 2 == pytest.approx(band_m0, rel=1e-3)


def test_elevation_ramp(seastate):
    r = synthesize(seastate, seed=3, ramp_time=10.0)
    t = np.arange(0, 300.0, 0.1)
    eta = elevation_series(r, t)
    assert eta[0] == 0.0
    # the ramp suppresses early elevations relative to the unramped series
    r0 = synthesize(seastate, seed=3, ramp_time=0.0)
    eta0 = elevation_series(r0, t)
    assert np.all(np.abs(eta[t < 5.0]) <= np.abs(eta0[t < 5.0]) + 1e-12)
    assert np.allclose(eta[t > 10.0], eta0[t > 10.0])


def test_regular_wave(seastate):
    r = regular_wave(seastate)
    assert r.freqs[0] == pytest.approx(2 * np.pi / 9.86)
    assert r.amplitudes[0] == pytest.approx(1.32)
    t = np.arange(20.0, 100.0, 0.01)
    eta = elevation_series(r, t)
    assert eta.max() == pytest.approx(1.32, rel=1e-4)


def test_excitation_out_of_band_rejected(seastate, params, solver_grid,
                                         nominal_geometry, nominal_khs):
    from wavedesal.hydro import flat_plate_coefficients

    coeffs = flat_plate_coefficients(
        nominal_geometry, solver_grid, 12.0, 1025.0, 9.81, nominal_khs
    )
    bad = regular_wave(SeaState(Hs=1.0, Tp=40.0))  # omega = 0.157 < 0.2
    with pytest.raises(ValueError, match="outside coefficient range"):
        excitation_series(bad, coeffs, np.arange(0, 10, 0.1))
