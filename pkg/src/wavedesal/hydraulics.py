"""Lumped-parameter hydraulic PTO circuit.

Single feed node at accumulator pressure, fed by the rectifying piston
and discharged through the membrane, brine throttle, and relief valve.
The gas law is isothermal (P V = const). The stepping here is plain
forward Euler for standalone use; the coupled simulation integrates the
same flow relations inside its RK4 loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .desal import DesalPlant
from .params import ParameterSet


class AccumulatorOverfullError(RuntimeError):
    """Liquid volume reached the accumulator shell volume."""


@dataclass(frozen=True)
class PistonConfig:
    Ap: float                   # m^2
    stroke_max: float = 20.0    # m
    cracking_pressure: float = 0.05e6  # Pa

    @staticmethod
    def from_design(Ap: float, params: ParameterSet) -> "PistonConfig":
        return PistonConfig(
            Ap=Ap,
            stroke_max=params.pto.stroke_max,
            cracking_pressure=params.pto.cracking_pressure,
        )


@dataclass(frozen=True)
class CircuitConfig:
    Vacc: float                 # m^3
    P0: float                   # Pa
    k_relief: float             # m^3/(s Pa), linear overflow conductance

    @staticmethod
    def build(Vacc: float, P0: float, plant: DesalPlant, params: ParameterSet):
        return CircuitConfig(
            Vacc=Vacc,
            P0=P0,
            k_relief=params.pto.relief_conductance_factor / plant.R_m,
        )


@dataclass(frozen=True)
class HydraulicState:
    V_liquid: float = 0.0       # m^3
    P_feed: float = 0.0         # Pa, last computed node pressure
    vol_permeate: float = 0.0   # cumulative m^3
    vol_brine: float = 0.0
    vol_relief: float = 0.0
    vol_intake: float = 0.0
    starved: bool = field(default=False)  # accumulator ran dry this step


@dataclass(frozen=True)
class CircuitFlows:
    P_feed: float
    Q_permeate: float
    Q_brine: float
    Q_relief: float
    dV_liquid: float


def accumulator_pressure(V_liquid: float, Vacc: float, P0: float) -> float:
    """Isothermal gas-charge pressure; returns the precharge floor when empty."""
    if V_liquid >= Vacc:
        raise AccumulatorOverfullError(
            f"liquid volume {V_liquid} m^3 >= accumulator volume {Vacc} m^3"
        )
    if V_liquid <= 0.0:
        return P0
    return P0 * Vacc / (Vacc - V_liquid)


def _outflow(P: float, plant: DesalPlant, cfg: CircuitConfig) -> float:
    """Total discharge from the feed node at pressure P."""
    q = P / plant.R_t
    if P > plant.delta_pi:
        q += (P - plant.delta_pi) / plant.R_m
    if P > plant.P_relief:
        q += cfg.k_relief * (P - plant.P_relief)
    return q


def _starved_pressure(Q_in: float, plant: DesalPlant, cfg: CircuitConfig) -> float:
    """Equilibrium node pressure when the accumulator is empty.

    Solves outflow(P) = Q_in on the piecewise-linear discharge law and
    caps at the precharge, so the node never reports a pressure above
    what the gas charge would supply.
    """
    # Try the sub-osmotic branch first: Q = P / R_t.
    P = Q_in * plant.R_t
    if P > plant.delta_pi:
        # Membrane passing flow: Q = P/R_t + (P - dpi)/R_m.
        P = (Q_in + plant.delta_pi / plant.R_m) / (1.0 / plant.R_t + 1.0 / plant.R_m)
        if P > plant.P_relief:
            g = 1.0 / plant.R_t + 1.0 / plant.R_m + cfg.k_relief
            P = (
                Q_in
                + plant.delta_pi / plant.R_m
                + cfg.k_relief * plant.P_relief
            ) / g
    return min(P, cfg.P0)


def circuit_flows(
    V_liquid: float, Q_in: float, plant: DesalPlant, cfg: CircuitConfig
) -> CircuitFlows:
    """Node pressure and branch flows for a given accumulator fill level."""
    if V_liquid > 0.0:
        P = accumulator_pressure(min(V_liquid, cfg.Vacc * (1 - 1e-9)), cfg.Vacc, cfg.P0)
    else:
        P = _starved_pressure(Q_in, plant, cfg)
    Q_perm = max(0.0, (P - plant.delta_pi) / plant.R_m)
    Q_brine = P / plant.R_t
    Q_relief = cfg.k_relief * max(0.0, P - plant.P_relief)
    dV = Q_in - Q_perm - Q_brine - Q_relief
    if V_liquid <= 0.0 and dV < 0.0:
        dV = 0.0
    return CircuitFlows(P, Q_perm, Q_brine, Q_relief, dV)


def step_circuit(
    state: HydraulicState,
    Q_piston_in: float,
    plant: DesalPlant,
    cfg: CircuitConfig,
    dt: float,
) -> tuple[HydraulicState, float, CircuitFlows]:
    """Advance the circuit one explicit-Euler step; flows held over dt."""
    if Q_piston_in < 0:
        raise ValueError("piston flow must be rectified (nonnegative)")
    flows = circuit_flows(state.V_liquid, Q_piston_in, plant, cfg)
    V_new = state.V_liquid + flows.dV_liquid * dt
    starved = V_new <= 0.0
    V_new = min(max(V_new, 0.0), cfg.Vacc * (1 - 1e-9))
    new_state = replace(
        state,
        V_liquid=V_new,
        P_feed=flows.P_feed,
        vol_permeate=state.vol_permeate + flows.Q_permeate * dt,
        vol_brine=state.vol_brine + flows.Q_brine * dt,
        vol_relief=state.vol_relief + flows.Q_relief * dt,
        vol_intake=state.vol_intake + Q_piston_in * dt,
        starved=starved,
    )
    return new_state, flows.P_feed, flows


def piston_coupling(
    v_piston: float, P_feed: float, cfg: PistonConfig
) -> tuple[float, float]:
    """Rectified piston: flow out and reaction force on the rod.

    Both strokes pump (double acting); the force always opposes motion,
    with the suction side drawing at ambient minus cracking pressure.
    """
    if v_piston == 0.0:
        return 0.0, 0.0
    Q_out = cfg.Ap * abs(v_piston)
    sign = 1.0 if v_piston > 0 else -1.0
    f_piston = -sign * cfg.Ap * (P_feed + cfg.cracking_pressure)
    return Q_out, f_piston


def gas_energy(V_liquid: float, Vacc: float, P0: float) -> float:
    """Isothermal work stored in the gas charge, J."""
    import math

    if V_liquid <= 0:
        return 0.0
    return P0 * Vacc * math.log(Vacc / (Vacc - V_liquid))
