"""Co-design toolkit for wave-energy-driven seawater desalination.

Couples an oscillating surge wave energy converter to a hydraulic power
take-off and a small reverse-osmosis plant, simulates the coupled system
in the time domain, and optimizes the combined design for levelized cost
of water.
"""

from .desal import DesalPlant, SeawaterSpec, osmotic_pressure, plant_from_params
from .geometry import (
    DESIGN_BOUNDS,
    DESIGN_VARIABLES,
    DesignVector,
    WecGeometry,
    build_geometry,
    hydrostatic_stiffness,
)
from .hydro import (
    HydroCoefficients,
    RadiationKernel,
    flat_plate_coefficients,
    load_coefficients,
    mesh_resolution,
    radiation_irf,
    save_coefficients,
)
from .optimizer import GaConfig, GaResult, ga_run
from .params import ParameterError, ParameterSet, load_params
from .sysdyn import SimConfig, SimulationResult, simulate
from .waves import SeaState, WaveRealization, pm_spectrum, regular_wave, synthesize
from .workflows import (
    EvaluationReport,
    OptimizationReport,
    PipelineContext,
    evaluate_design,
    run_mdo,
    run_sdo_a,
    run_sdo_b,
)

__version__ = "0.1.0"

__all__ = [
    "DESIGN_BOUNDS",
    "DESIGN_VARIABLES",
    "DesalPlant",
    "DesignVector",
    "EvaluationReport",
    "GaConfig",
    "GaResult",
    "HydroCoefficients",
    "OptimizationReport",
    "ParameterError",
    "ParameterSet",
    "PipelineContext",
    "RadiationKernel",
    "SeaState",
    "SeawaterSpec",
    "SimConfig",
    "SimulationResult",
    "WaveRealization",
    "WecGeometry",
    "build_geometry",
    "evaluate_design",
    "flat_plate_coefficients",
    "ga_run",
    "hydrostatic_stiffness",
    "load_coefficients",
    "load_params",
    "mesh_resolution",
    "osmotic_pressure",
    "plant_from_params",
    "pm_spectrum",
    "radiation_irf",
    "regular_wave",
    "run_mdo",
    "run_sdo_a",
    "run_sdo_b",
    "save_coefficients",
    "simulate",
    "synthesize",
    "__version__",
]
