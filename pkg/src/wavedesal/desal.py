"""Single-stage SWRO plant sizing and membrane flow physics."""

from __future__ import annotations

from dataclasses import dataclass

from .params import ParameterSet

SECONDS_PER_DAY = 86400.0


@dataclass(frozen=True)
class SeawaterSpec:
    feed_tds: float        # mg/L
    permeate_tds: float    # mg/L
    molar_mass: float      # g/mol
    ions_per_molecule: float
    temperature: float     # K
    gas_constant: float    # J/(K mol)

    def __post_init__(self):
        if not self.feed_tds > self.permeate_tds >= 0:
            raise ValueError("require feed_tds > permeate_tds >= 0")
        if self.ions_per_molecule < 1:
            raise ValueError("ions_per_molecule must be >= 1")

    @staticmethod
    def from_params(params: ParameterSet) -> "SeawaterSpec":
        s = params.swro
        return SeawaterSpec(
            feed_tds=s.feed_tds,
            permeate_tds=s.permeate_tds,
            molar_mass=s.salt_molar_mass,
            ions_per_molecule=s.ions_per_molecule,
            temperature=params.general.temperature,
            gas_constant=s.gas_constant,
        )


@dataclass(frozen=True)
class DesalPlant:
    """Sized plant: all pressures Pa, flows m^3/s."""

    Qpmax: float        # m^3/s, permeate capacity
    A_m: float          # m^2, total membrane area
    A_w: float          # m^3/(N s)
    R_m: float          # Pa s/m^3, membrane resistance
    delta_pi: float     # Pa, osmotic pressure difference
    P_relief: float     # Pa, relief valve set point
    R_t: float          # Pa s/m^3, brine throttle resistance
    eta_RO: float       # design recovery ratio


def osmotic_pressure(tds: float, spec: SeawaterSpec) -> float:
    """van 't Hoff osmotic pressure in Pa; tds in mg/L (== g/m^3)."""
    if tds < 0:
        raise ValueError("tds must be nonnegative")
    concentration = tds / spec.molar_mass  # mol/m^3
    return spec.ions_per_molecule * concentration * spec.gas_constant * spec.temperature


def size_plant(
    Qpmax_per_day: float,
    spec: SeawaterSpec,
    *,
    membrane_unit_flow: float,
    membrane_unit_area: float,
    water_permeability: float,
    recovery_ratio: float,
) -> DesalPlant:
    """Size membrane area, relief set point, and brine throttle for a capacity.

    Qpmax_per_day and membrane_unit_flow are in m^3/day, matching datasheet
    convention; everything stored on the plant is SI.
    """
    if Qpmax_per_day <= 0:
        raise ValueError("plant capacity must be positive")
    delta_pi = osmotic_pressure(spec.feed_tds, spec) - osmotic_pressure(
        spec.permeate_tds, spec
    )
    A_m = (Qpmax_per_day / membrane_unit_flow) * membrane_unit_area
    R_m = 1.0 / (water_permeability * A_m)
    Qpmax = Qpmax_per_day / SECONDS_PER_DAY
    P_relief = Qpmax * R_m + delta_pi
    R_t = P_relief / (Qpmax * (1.0 / recovery_ratio - 1.0))
    return DesalPlant(
        Qpmax=Qpmax,
        A_m=A_m,
        A_w=water_permeability,
        R_m=R_m,
        delta_pi=delta_pi,
        P_relief=P_relief,
        R_t=R_t,
        eta_RO=recovery_ratio,
    )


def plant_from_params(Qpmax_per_day: float, params: ParameterSet) -> DesalPlant:
    """Convenience wrapper using the registered membrane/seawater parameters."""
    spec = SeawaterSpec.from_params(params)
    s = params.swro
    return size_plant(
        Qpmax_per_day,
        spec,
        membrane_unit_flow=s.membrane_unit_flow,
        membrane_unit_area=s.membrane_unit_area,
        water_permeability=s.water_permeability,
        recovery_ratio=s.recovery_ratio,
    )


def permeate_flow(P_feed: float, plant: DesalPlant) -> float:
    """Permeate flow m^3/s at feed pressure P_feed (Pa, gauge).

    The check valve blocks forward osmosis, so flow clamps at zero below
    the osmotic threshold.
    """
    return max(0.0, (P_feed - plant.delta_pi) / plant.R_m)
