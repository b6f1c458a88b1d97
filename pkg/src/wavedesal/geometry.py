"""WEC design vector and flap geometry/hydrostatics.

The device is a bottom-hinged rectangular flap (width w, thickness t,
height h) with the hinge at depth equal to the draft. All moments and
lever arms are taken about the hinge axis.
"""

from __future__ import annotations

from dataclasses import dataclass

from .params import ParameterSet


class InfeasibleGeometryError(ValueError):
    """Raised when a design cannot be realized physically."""


#: Design-variable bounds: name -> (lower, upper), SI units.
DESIGN_BOUNDS = {
    "w": (4.0, 24.0),            # m
    "t": (0.8, 3.0),             # m
    "m": (50e3, 500e3),          # kg
    "l1": (0.1, 4.0),            # m
    "Ap": (0.1, 1.0),            # m^2
    "Vacc": (0.01, 6.0),         # m^3
    "P0": (3e6, 6e6),            # Pa
    "Qpmax": (1000.0, 10000.0),  # m^3/day
}

#: Variable ordering used by the binary genome encoding.
DESIGN_VARIABLES = tuple(DESIGN_BOUNDS)


@dataclass(frozen=True)
class DesignVector:
    """The eight optimization variables."""

    w: float       # flap width, m
    t: float       # flap thickness, m
    m: float       # flap mass, kg
    l1: float      # hinge-to-joint length, m
    Ap: float      # piston area, m^2
    Vacc: float    # accumulator volume, m^3
    P0: float      # accumulator precharge pressure, Pa
    Qpmax: float   # SWRO plant capacity, m^3/day

    @staticmethod
    def nominal() -> "DesignVector":
        """Baseline design from the reference literature."""
        return DesignVector(
            w=18.0, t=2.0, m=127e3, l1=2.0, Ap=0.26,
            Vacc=4.0, P0=3e6, Qpmax=3150.0,
        )

    def replace(self, **kwargs) -> "DesignVector":
        import dataclasses
        return dataclasses.replace(self, **kwargs)

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in DESIGN_VARIABLES}

    def check_bounds(self) -> None:
        for name, (lo, hi) in DESIGN_BOUNDS.items():
            v = getattr(self, name)
            if not lo <= v <= hi:
                raise ValueError(
                    f"design variable {name}={v} outside bounds [{lo}, {hi}]"
                )


@dataclass(frozen=True)
class WecGeometry:
    w: float
    t: float
    h: float
    draft: float
    mass: float
    submerged_volume: float      # m^3
    z_cg: float                  # m, below SWL negative
    z_cb: float                  # m
    I_pitch: float               # kg m^2 about the hinge
    waterplane_moment: float     # m^4 about the hinge axis
    wetted_area: float           # m^2


def build_geometry(design: DesignVector, params: ParameterSet) -> WecGeometry:
    """Map design variables to mass/hydrostatic properties of the flap."""
    design.check_bounds()
    wec = params.wec
    draft = wec.draft
    if draft > params.general.water_depth:
        raise InfeasibleGeometryError(
            f"draft {draft} m exceeds water depth {params.general.water_depth} m"
        )
    w, t, h = design.w, design.t, wec.height
    return WecGeometry(
        w=w,
        t=t,
        h=h,
        draft=draft,
        mass=design.m,
        submerged_volume=w * t * draft,
        z_cg=wec.cg_draft_factor * draft,
        z_cb=-draft / 2.0,
        I_pitch=design.m * wec.unit_inertia,
        waterplane_moment=w * t**3 / 12.0,
        wetted_area=2.0 * (w * h + w * t + t * h),
    )


def hydrostatic_stiffness(geom: WecGeometry, rho: float, g: float) -> float:
    """Pitch hydrostatic stiffness about the hinge, N m/rad.

    Negative values are returned as-is (statically unstable flap); callers
    decide whether that is an error.
    """
    z_cb_hinge = geom.z_cb + geom.draft
    z_cg_hinge = geom.z_cg + geom.draft
    buoyancy_part = rho * g * (
        geom.waterplane_moment + geom.submerged_volume * z_cb_hinge
    )
    return buoyancy_part - geom.mass * g * z_cg_hinge
