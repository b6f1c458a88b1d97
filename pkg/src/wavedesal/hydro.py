"""Frequency-domain hydrodynamic coefficients and time-domain radiation kernels.

Coefficients come either from a JSON file produced by an external BEM run
(import mode) or from a built-in analytical flat-plate surrogate used
during optimization, where running a panel solver per candidate is not
an option. Surrogate output is flagged as such.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import WecGeometry

COEFF_SCHEMA_VERSION = 1


class CoefficientFileError(ValueError):
    """Raised on schema or invariant violations in a coefficient file."""


def mesh_resolution(w: float, t: float, h: float) -> tuple[int, int, int]:
    """Panel counts (n_surge, n_sway, n_heave) for an external BEM mesh.

    Scaled so the largest panel stays under an eighth of the shortest
    wavelength on the coefficient grid.
    """
    if w <= 0 or t <= 0 or h <= 0:
        raise ValueError("dimensions must be positive")
    eps = 1e-9  # guard against float noise pushing exact integers up a panel
    n_surge = math.ceil(t * 4.0 / 5.0 - eps)
    n_sway = math.ceil(w * 26.0 / 30.0 - eps)
    n_heave = math.ceil(h * 8.0 / 9.1 - eps)
    return n_surge, n_sway, n_heave


def geometry_hash(geom: WecGeometry) -> str:
    """Stable fingerprint of the dimensions a BEM run depends on."""
    key = json.dumps(
        {
            "w": round(geom.w, 9),
            "t": round(geom.t, 9),
            "h": round(geom.h, 9),
            "draft": round(geom.draft, 9),
        },
        sort_keys=True,
    )
    return hashlib.sha256(key.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class HydroCoefficients:
    omega: np.ndarray               # rad/s, strictly increasing
    added_mass: np.ndarray          # kg m^2
    radiation_damping: np.ndarray   # N m s/rad, >= 0
    excitation_mag: np.ndarray      # N m / m
    excitation_phase: np.ndarray    # rad
    K_hs: float                     # N m/rad
    surrogate: bool = False
    geom_hash: str = ""
    # Infinite-frequency added inertia. BEM tables often omit it; None
    # falls back to the added mass at the highest tabulated frequency.
    A_inf: float | None = None

    def __post_init__(self):
        arrays = (
            self.omega,
            self.added_mass,
            self.radiation_damping,
            self.excitation_mag,
            self.excitation_phase,
        )
        n = len(self.omega)
        if any(len(a) != n for a in arrays):
            raise ValueError("coefficient arrays must have equal length")
        if np.any(self.omega <= 0) or np.any(np.diff(self.omega) <= 0):
            raise ValueError("omega must be strictly increasing and positive")
        if np.any(self.radiation_damping < 0):
            raise ValueError("radiation damping must be nonnegative")


@dataclass(frozen=True)
class RadiationKernel:
    dt: float
    K: np.ndarray      # impulse-response samples, N m / rad
    A_inf: float       # kg m^2
    decayed: bool = field(default=True)  # |K(t_end)| < 5% of peak


def save_coefficients(coeffs: HydroCoefficients, path: str | Path) -> None:
    doc = {
        "schema_version": COEFF_SCHEMA_VERSION,
        "geom_hash": coeffs.geom_hash,
        "surrogate": coeffs.surrogate,
        "K_hs": coeffs.K_hs,
        "A_inf": coeffs.A_inf,
        "omega": coeffs.omega.tolist(),
        "added_mass": coeffs.added_mass.tolist(),
        "radiation_damping": coeffs.radiation_damping.tolist(),
        "excitation_mag": coeffs.excitation_mag.tolist(),
        "excitation_phase": coeffs.excitation_phase.tolist(),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_coefficients(
    path: str | Path, expected_geom: WecGeometry | None = None
) -> HydroCoefficients:
    """Load a coefficient JSON document, enforcing the schema and invariants.

    If ``expected_geom`` is given, the stored geometry hash must match;
    this rejects stale coefficient files inside optimization loops.
    """
    path = Path(path)
    if not path.exists():
        raise CoefficientFileError(f"coefficient file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise CoefficientFileError(f"invalid JSON in {path}: {exc}") from exc

    required = (
        "omega",
        "added_mass",
        "radiation_damping",
        "excitation_mag",
        "excitation_phase",
        "K_hs",
    )
    for key in required:
        if key not in doc:
            raise CoefficientFileError(f"missing field {key!r} in {path}")

    omega = np.asarray(doc["omega"], dtype=float)
    if len(omega) == 0:
        raise CoefficientFileError(f"empty omega grid in {path}")
    diffs = np.diff(omega)
    bad = np.where(diffs <= 0)[0]
    if np.any(omega <= 0) or len(bad):
        row = int(bad[0] + 1) if len(bad) else int(np.argmax(omega <= 0))
        raise CoefficientFileError(
            f"field 'omega' not strictly increasing/positive at row {row} in {path}"
        )
    damping = np.asarray(doc["radiation_damping"], dtype=float)
    neg = np.where(damping < 0)[0]
    if len(neg):
        raise CoefficientFileError(
            f"field 'radiation_damping' negative at row {int(neg[0])} in {path}"
        )
    for key in ("added_mass", "excitation_mag", "excitation_phase"):
        if len(doc[key]) != len(omega):
            raise CoefficientFileError(
                f"field {key!r} length {len(doc[key])} != omega length "
                f"{len(omega)} in {path}"
            )

    if expected_geom is not None:
        expected = geometry_hash(expected_geom)
        stored = doc.get("geom_hash", "")
        if stored and stored != expected:
            raise CoefficientFileError(
                f"geometry hash mismatch in {path}: file {stored}, "
                f"current geometry {expected}"
            )

    return HydroCoefficients(
        omega=omega,
        added_mass=np.asarray(doc["added_mass"], dtype=float),
        radiation_damping=damping,
        excitation_mag=np.asarray(doc["excitation_mag"], dtype=float),
        excitation_phase=np.asarray(doc["excitation_phase"], dtype=float),
        K_hs=float(doc["K_hs"]),
        surrogate=bool(doc.get("surrogate", False)),
        geom_hash=doc.get("geom_hash", ""),
        A_inf=None if doc.get("A_inf") is None else float(doc["A_inf"]),
    )


# Surrogate shape constants, calibrated once so the nominal design lands in
# a physically plausible response/production range. Added mass and damping
# both scale linearly with rho and with flap width.
_SURROGATE_CA_INF = 0.12    # high-frequency added inertia, x rho w d^4
_SURROGATE_CB = 0.50        # damping peak scale, x rho w d^3 sqrt(g d)


def _surrogate_damping(omega: np.ndarray, rho: float, w: float, d: float, g: float):
    nu = omega**2 * d / g
    return _SURROGATE_CB * rho * w * d**3 * math.sqrt(g * d) * nu * np.exp(-nu)


def flat_plate_coefficients(
    geom: WecGeometry,
    omega: np.ndarray,
    depth: float,
    rho: float,
    g: float,
    K_hs: float,
) -> HydroCoefficients:
    """Analytical flat-plate surrogate for the pitching flap.

    Radiation damping follows a single-peaked nondimensional law peaking
    near omega = sqrt(g/draft); added mass is reconstructed from the
    damping through the Ogilvie relations so the frequency-domain table
    and its time-domain kernel realization are mutually consistent; the
    excitation magnitude comes from damping via the point-absorber
    (Haskind) reciprocity relation.
    """
    omega = np.asarray(omega, dtype=float)
    d = geom.draft
    B = _surrogate_damping(omega, rho, geom.w, d, g)
    A_inf = _SURROGATE_CA_INF * rho * geom.w * d**4

    # A(w) = A_inf - (1/w) \int K(t) sin(wt) dt with K the radiation IRF
    # built from B on the same tabulated grid that the time-domain solver
    # uses, so the frequency table and its kernel realization agree.
    t_fine = np.arange(0.0, 20.0 + 1e-12, 0.01)
    K = (2.0 / np.pi) * np.trapezoid(
        B[None, :] * np.cos(np.outer(t_fine, omega)), omega, axis=1
    )
    sin_part = np.trapezoid(K[None, :] * np.sin(np.outer(omega, t_fine)), t_fine, axis=1)
    A = A_inf - sin_part / omega

    excitation = np.sqrt(2.0 * rho * g**3 * B / omega**3)
    return HydroCoefficients(
        omega=omega,
        added_mass=A,
        radiation_damping=B,
        excitation_mag=excitation,
        excitation_phase=np.zeros_like(omega),
        K_hs=K_hs,
        surrogate=True,
        geom_hash=geometry_hash(geom),
        A_inf=A_inf,
    )


def radiation_irf(
    coeffs: HydroCoefficients, dt: float = 0.1, duration: float = 20.0
) -> RadiationKernel:
    """Time-domain radiation kernel K(t) = (2/pi) int B(w) cos(wt) dw.

    Trapezoidal quadrature on the tabulated grid. A_inf comes from the
    table when present, else falls back to the added mass at the highest
    tabulated frequency. Non-decay of the kernel is flagged, not fatal.
    """
    t = np.arange(0.0, duration + dt / 2, dt)
    K = (2.0 / np.pi) * np.trapezoid(
        coeffs.radiation_damping[None, :] * np.cos(np.outer(t, coeffs.omega)),
        coeffs.omega,
        axis=1,
    )
    peak = np.max(np.abs(K))
    decayed = bool(peak == 0.0 or abs(K[-1]) < 0.05 * peak)
    A_inf = coeffs.A_inf if coeffs.A_inf is not None else float(coeffs.added_mass[-1])
    return RadiationKernel(dt=dt, K=K, A_inf=A_inf, decayed=decayed)
