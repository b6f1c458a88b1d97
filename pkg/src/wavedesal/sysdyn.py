"""Coupled WEC / mechanism / hydraulic-circuit time-domain simulation.

Fixed-step RK4 on the flap pitch dynamics with a radiation-memory
convolution; the hydraulic feed node is advanced inside each step (see
_core). Constraint violations are measured and reported, never abort the
run; penalization is the optimizer's job.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _core
from .desal import DesalPlant
from .geometry import DesignVector, WecGeometry
from .hydro import HydroCoefficients, RadiationKernel
from .params import ParameterSet
from .waves import WaveRealization, excitation_series

SECONDS_PER_YEAR = 31_536_000.0
J_PER_KWH = 3.6e6


@dataclass(frozen=True)
class MechanismConfig:
    l1: float
    l2: float = 4.7
    l3: float = 0.0

    def __post_init__(self):
        if self.l1 <= 0:
            raise ValueError("l1 must be positive")
        # The closure must stay solvable over the full pitch range.
        worst = math.hypot(self.l2, self.l3)
        if self.l1 >= worst:
            raise ValueError(
                f"attachment radius l1={self.l1} reaches the anchor "
                f"(distance {worst}); geometry degenerate"
            )


def piston_kinematics(theta: float, mech: MechanismConfig) -> tuple[float, float]:
    """Piston extension s and its analytic derivative ds/dtheta.

    The anchor sits at horizontal offset l2 and vertical offset l3 from
    the hinge; the rod attaches to the flap centerline at radius l1.
    """
    dx = mech.l2 - mech.l1 * math.sin(theta)
    dy = mech.l3 - mech.l1 * math.cos(theta)
    s = math.hypot(dx, dy)
    if s < 1e-12:
        raise ValueError("degenerate mechanism: anchor coincides with attachment")
    ds = (-dx * mech.l1 * math.cos(theta) + dy * mech.l1 * math.sin(theta)) / s
    return s, ds


@dataclass(frozen=True)
class ConstraintViolation:
    name: str
    magnitude: float    # absolute exceedance, in the constraint's unit
    limit: float
    first_time: float   # s

    @property
    def relative(self) -> float:
        return self.magnitude / abs(self.limit) if self.limit else math.inf


@dataclass(frozen=True)
class SimulationResult:
    time: np.ndarray
    theta: np.ndarray
    dtheta: np.ndarray
    s: np.ndarray               # piston travel relative to theta=0, m
    P_feed: np.ndarray          # Pa
    Q_perm: np.ndarray          # m^3/s
    Q_brine: np.ndarray
    Q_relief: np.ndarray
    V_liquid: np.ndarray
    excitation: np.ndarray      # N m, at the step grid
    tau_pto: np.ndarray         # N m, PTO reaction torque at the step grid
    permeate_volume: float      # m^3, post-ramp
    volumes: dict               # cumulative ledgers, total and post-ramp
    max_stroke: float           # m, peak-to-peak piston travel
    max_pressure: float         # Pa
    min_cyl_pressure: float     # Pa gauge, suction side
    constraint_violations: list[ConstraintViolation]
    energies: dict
    failed: bool = False
    diagnostic: str = ""
    flags: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.1
    duration: float = 300.0
    ramp_time: float = 10.0
    pto_connected: bool = True
    use_membrane: bool = True    # False: SDO flow stage, throttle only
    use_relief: bool = True
    stroke_max: float = 20.0
    pressure_limit_factor: float = 1.5
    min_cylinder_pressure: float = -0.09e6
    cracking_pressure: float = 0.05e6

    @staticmethod
    def from_params(params: ParameterSet, **overrides) -> "SimConfig":
        base = dict(
            dt=params.solver.dt,
            duration=params.solver.duration,
            ramp_time=params.solver.ramp_time,
            stroke_max=params.pto.stroke_max,
            pressure_limit_factor=params.pto.pressure_limit_factor,
            min_cylinder_pressure=params.pto.min_cylinder_pressure,
            cracking_pressure=params.pto.cracking_pressure,
        )
        base.update(overrides)
        return SimConfig(**base)


def weighted_kernel(kernel: RadiationKernel) -> np.ndarray:
    """Trapezoid quadrature weights folded into the kernel taps."""
    Kw = kernel.K * kernel.dt
    Kw[0] *= 0.5
    Kw[-1] *= 0.5
    return Kw


def simulate(
    design: DesignVector,
    geom: WecGeometry,
    coeffs: HydroCoefficients,
    kernel: RadiationKernel,
    plant: DesalPlant,
    realization: WaveRealization,
    config: SimConfig,
    k_relief: float | None = None,
    mech: MechanismConfig | None = None,
) -> SimulationResult:
    """Run one coupled time-domain simulation."""
    dt = config.dt
    if abs(realization.dt - dt) > 1e-12:
        raise ValueError("realization dt must match simulation dt")
    if abs(kernel.dt - dt) > 1e-12:
        raise ValueError("kernel dt must match simulation dt")
    n_steps = int(round(config.duration / dt))
    ramp_steps = int(round(config.ramp_time / dt))
    t = np.arange(n_steps + 1) * dt
    t_half = np.arange(2 * n_steps + 1) * (dt / 2.0)
    fe_half = excitation_series(realization, coeffs, t_half)

    if mech is None:
        mech = MechanismConfig(l1=design.l1)
    if k_relief is None:
        k_relief = 100.0 / plant.R_m

    I_tot = geom.I_pitch + kernel.A_inf
    out = _core.integrate_wec(
        n_steps,
        dt,
        ramp_steps,
        fe_half,
        I_tot,
        coeffs.K_hs,
        weighted_kernel(kernel),
        config.pto_connected,
        config.use_membrane,
        config.use_relief,
        mech.l1,
        mech.l2,
        mech.l3,
        design.Ap,
        config.cracking_pressure,
        design.Vacc,
        design.P0,
        plant.R_m,
        plant.delta_pi,
        plant.R_t,
        plant.P_relief,
        k_relief,
        0.0,
        0.0,
    )
    (theta, omega, s_rel, P_node, Qp, Qb, Qr, Vliq,
     tau_pto, conv_force, totals, diverged_at) = out

    failed = diverged_at >= 0
    diagnostic = (
        f"simulation diverged at t={diverged_at:.1f} s" if failed else ""
    )

    fe_grid = fe_half[::2]
    max_stroke = float(s_rel.max() - s_rel.min())
    max_pressure = float(P_node.max())
    min_cyl = -config.cracking_pressure if config.pto_connected else 0.0

    violations: list[ConstraintViolation] = []
    if max_stroke > config.stroke_max:
        exceed = np.flatnonzero(
            (s_rel - s_rel.min()) > config.stroke_max
        )
        first = float(t[exceed[0]]) if len(exceed) else float(t[-1])
        violations.append(
            ConstraintViolation(
                "stroke", max_stroke - config.stroke_max, config.stroke_max, first
            )
        )
    P_max_allowed = config.pressure_limit_factor * plant.P_relief
    if max_pressure > P_max_allowed:
        exceed = np.flatnonzero(P_node > P_max_allowed)
        violations.append(
            ConstraintViolation(
                "circuit_pressure",
                max_pressure - P_max_allowed,
                P_max_allowed,
                float(t[exceed[0]]),
            )
        )
    if min_cyl < config.min_cylinder_pressure:
        violations.append(
            ConstraintViolation(
                "cylinder_suction",
                config.min_cylinder_pressure - min_cyl,
                abs(config.min_cylinder_pressure),
                0.0,
            )
        )

    # Energy ledger: work integrals accumulated at RK4-stage resolution
    # inside the core, endpoint energies from the recorded state.
    work_exc = float(totals[10])
    e_rad = float(totals[11])
    e_pto = float(-totals[12])
    ke = 0.5 * I_tot * omega**2
    pe = 0.5 * coeffs.K_hs * theta**2
    energies = {
        "excitation_work": work_exc,
        "radiated": e_rad,
        "pto_absorbed": e_pto,
        "delta_kinetic": float(ke[-1] - ke[0]),
        "delta_potential": float(pe[-1] - pe[0]),
        "hydraulic_in": float(totals[8]),
        "hydraulic_out": float(totals[9]),
        "gas_stored": (
            0.0
            if Vliq[-1] <= 0
            else design.P0 * design.Vacc * math.log(design.Vacc / (design.Vacc - Vliq[-1]))
        ),
    }
    volumes = {
        "intake": float(totals[0]),
        "permeate": float(totals[1]),
        "brine": float(totals[2]),
        "relief": float(totals[3]),
        "liquid_final": float(Vliq[-1]),
        "intake_post_ramp": float(totals[4]),
        "permeate_post_ramp": float(totals[5]),
        "brine_post_ramp": float(totals[6]),
        "relief_post_ramp": float(totals[7]),
    }

    return SimulationResult(
        time=t,
        theta=theta,
        dtheta=omega,
        s=s_rel,
        P_feed=P_node,
        Q_perm=Qp,
        Q_brine=Qb,
        Q_relief=Qr,
        V_liquid=Vliq,
        excitation=fe_grid,
        tau_pto=tau_pto,
        permeate_volume=float(totals[5]),
        volumes=volumes,
        max_stroke=max_stroke,
        max_pressure=max_pressure,
        min_cyl_pressure=min_cyl,
        constraint_violations=violations,
        energies=energies,
        failed=failed,
        diagnostic=diagnostic,
        flags={"surrogate_hydro": coeffs.surrogate},
    )


def annual_water_production(
    result: SimulationResult, config: SimConfig, availability: float = 1.0
) -> float:
    """Scale post-ramp permeate volume to a yearly basis, m^3/yr."""
    window = config.duration - config.ramp_time
    if window <= 0:
        raise ValueError("post-ramp window must be positive")
    return result.permeate_volume * (SECONDS_PER_YEAR / window) * availability


def annualized_flow(volume_post_ramp: float, config: SimConfig) -> float:
    """Post-ramp cumulative volume scaled to m^3/yr."""
    window = config.duration - config.ramp_time
    return volume_post_ramp * (SECONDS_PER_YEAR / window)


def mean_kinetic_energy(
    result: SimulationResult, I_tot: float, config: SimConfig
) -> float:
    """Time-average kinetic energy over the post-ramp window, J."""
    i0 = int(round(config.ramp_time / config.dt))
    return float(np.mean(0.5 * I_tot * result.dtheta[i0:] ** 2))


def annual_kinetic_energy(
    result: SimulationResult, I_tot: float, config: SimConfig
) -> float:
    """Annualized kinetic-energy metric, kWh/yr.

    Ranking metric for the WEC-only sequential stage: the post-ramp mean
    kinetic energy treated as renewable each second of the year.
    """
    return mean_kinetic_energy(result, I_tot, config) * SECONDS_PER_YEAR / J_PER_KWH
