"""Pierson-Moskowitz spectra and seeded irregular-wave synthesis."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .hydro import HydroCoefficients

OMEGA_LO = 0.2   # rad/s, synthesis band matches the coefficient grid
OMEGA_HI = 3.0


@dataclass(frozen=True)
class SeaState:
    Hs: float   # significant wave height, m
    Tp: float   # peak period, s

    def __post_init__(self):
        if self.Hs <= 0 or self.Tp <= 0:
            raise ValueError("Hs and Tp must be positive")


@dataclass(frozen=True)
class WaveRealization:
    freqs: np.ndarray       # rad/s
    amplitudes: np.ndarray  # m
    phases: np.ndarray      # rad
    dt: float
    duration: float
    ramp_time: float
    seed: int


_warned_verbatim = False


def pm_spectrum(seastate: SeaState, omega, mode: str = "standard"):
    """Spectral density S(omega) in m^2 s.

    ``verbatim`` evaluates 10 pi^5 Hs^2 / (Tp^4 w^5) exp(-20 pi^4/(Tp^4 w^4)),
    which integrates to pi Hs^2 / 8. ``standard`` divides by 2 pi so the
    variance comes out at the conventional Hs^2/16.
    """
    global _warned_verbatim
    if mode not in ("verbatim", "standard"):
        raise ValueError(f"unknown spectrum mode: {mode!r}")
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("omega must be positive")
    Hs, Tp = seastate.Hs, seastate.Tp
    a = 10.0 * np.pi**5 * Hs**2 / Tp**4
    b = 20.0 * np.pi**4 / Tp**4
    S = a / omega**5 * np.exp(-b / omega**4)
    if mode == "verbatim":
        if not _warned_verbatim:
            warnings.warn(
                "verbatim PM normalization integrates to pi*Hs^2/8, "
                "2*pi times the standard variance Hs^2/16",
                stacklevel=2,
            )
            _warned_verbatim = True
        return S
    return S / (2.0 * np.pi)


def synthesize(
    seastate: SeaState,
    n_components: int = 200,
    duration: float = 300.0,
    dt: float = 0.1,
    seed: int = 0,
    ramp_time: float = 10.0,
    mode: str = "standard",
) -> WaveRealization:
    """Discretize the spectrum into seeded random-phase components.

    Equal-bandwidth discretization over [0.2, 3.0] rad/s; deterministic
    given the seed. The cosine ramp is applied by consumers when they
    evaluate the series.
    """
    if n_components < 2:
        raise ValueError("n_components must be >= 2")
    d_omega = (OMEGA_HI - OMEGA_LO) / n_components
    freqs = OMEGA_LO + d_omega * (np.arange(n_components) + 0.5)
    S = pm_spectrum(seastate, freqs, mode=mode)
    amplitudes = np.sqrt(2.0 * S * d_omega)
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=n_components)
    return WaveRealization(
        freqs=freqs,
        amplitudes=amplitudes,
        phases=phases,
        dt=dt,
        duration=duration,
        ramp_time=ramp_time,
        seed=seed,
    )


def regular_wave(
    seastate: SeaState, duration: float = 300.0, dt: float = 0.1, ramp_time: float = 10.0
) -> WaveRealization:
    """Single-component wave at the peak period with amplitude Hs/2."""
    return WaveRealization(
        freqs=np.array([2.0 * np.pi / seastate.Tp]),
        amplitudes=np.array([seastate.Hs / 2.0]),
        phases=np.array([0.0]),
        dt=dt,
        duration=duration,
        ramp_time=ramp_time,
        seed=0,
    )


def _ramp(t: np.ndarray, ramp_time: float) -> np.ndarray:
    """Cosine ramp from 0 to 1 over [0, ramp_time]."""
    if ramp_time <= 0:
        return np.ones_like(t)
    r = np.where(t < ramp_time, 0.5 * (1.0 - np.cos(np.pi * t / ramp_time)), 1.0)
    return r


def elevation_series(realization: WaveRealization, t: np.ndarray) -> np.ndarray:
    """Free-surface elevation eta(t), m, with the startup ramp applied."""
    t = np.asarray(t, dtype=float)
    eta = (
        realization.amplitudes[None, :]
        * np.cos(np.outer(t, realization.freqs) + realization.phases[None, :])
    ).sum(axis=1)
    return _ramp(t, realization.ramp_time) * eta


def excitation_series(
    realization: WaveRealization, coeffs: HydroCoefficients, t: np.ndarray
) -> np.ndarray:
    """Excitation moment time series f_e(t), N m, with the startup ramp.

    Coefficient magnitude/phase are linearly interpolated onto the
    realization frequencies; frequencies outside the tabulated range are
    an error rather than silently extrapolated.
    """
    t = np.asarray(t, dtype=float)
    w = realization.freqs
    lo, hi = coeffs.omega[0], coeffs.omega[-1]
    tol = 1e-9
    if np.any(w < lo - tol) or np.any(w > hi + tol):
        raise ValueError(
            f"realization frequencies [{w.min():.3f}, {w.max():.3f}] rad/s "
            f"outside coefficient range [{lo:.3f}, {hi:.3f}]"
        )
    mag = np.interp(w, coeffs.omega, coeffs.excitation_mag)
    pha = np.interp(w, coeffs.omega, coeffs.excitation_phase)
    fe = (
        (mag * realization.amplitudes)[None, :]
        * np.cos(np.outer(t, w) + (realization.phases + pha)[None, :])
    ).sum(axis=1)
    return _ramp(t, realization.ramp_time) * fe


def spectral_moment(seastate: SeaState, order: int = 0, mode: str = "standard") -> float:
    """Closed-form m0 for the PM form a w^-5 exp(-b w^-4); numeric otherwise."""
    Hs, Tp = seastate.Hs, seastate.Tp
    a = 10.0 * np.pi**5 * Hs**2 / Tp**4
    b = 20.0 * np.pi**4 / Tp**4
    if order == 0:
        m0 = a / (4.0 * b)
        return m0 if mode == "verbatim" else m0 / (2.0 * np.pi)
    w = np.linspace(1e-3, 30.0, 200001)
    S = pm_spectrum(seastate, w, mode=mode)
    return float(np.trapz(S * w**order, w))
