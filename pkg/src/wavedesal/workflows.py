"""End-to-end pipeline: design -> geometry -> hydro -> simulation -> cost,
plus the MDO and sequential (SDO) optimization workflows."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import econ, hydro, sysdyn, waves
from .desal import DesalPlant, plant_from_params
from .geometry import DesignVector, WecGeometry, build_geometry, hydrostatic_stiffness
from .optimizer import GaConfig, GaResult, decode_design, encode_design, ga_run
from .params import ParameterSet
from .sysdyn import SimConfig, SimulationResult
from .waves import SeaState

FAILED_SENTINEL = 1e6
PENALTY_WEIGHT = 10.0  # $/m^3 per unit relative constraint violation
MIN_COSTING_STROKE = 0.1  # m, floor for cylinder sizing on near-dead designs


@dataclass(frozen=True)
class PipelineContext:
    """Everything needed to evaluate one design against one sea state."""

    params: ParameterSet
    seastate: SeaState
    wave_seed: int = 1
    spectrum_mode: str = "standard"
    hydro_provider: str = "surrogate"   # surrogate | import
    coeffs_path: str | None = None
    availability: float = 1.0

    def solver_grid(self) -> np.ndarray:
        s = self.params.solver
        n = int(round((s.omega_max - s.omega_min) / s.omega_step)) + 1
        return s.omega_min + s.omega_step * np.arange(n)


# Coefficient construction dominates a design evaluation; memoize on the
# geometry hash so stages that freeze the flap pay it once.
_HYDRO_CACHE: dict[tuple, hydro.HydroCoefficients] = {}


def hydro_coefficients(
    context: PipelineContext, geom: WecGeometry
) -> hydro.HydroCoefficients:
    key = (
        hydro.geometry_hash(geom),
        context.hydro_provider,
        context.coeffs_path,
        context.params.checksum(),
    )
    cached = _HYDRO_CACHE.get(key)
    if cached is None:
        if len(_HYDRO_CACHE) > 4096:
            _HYDRO_CACHE.clear()
        cached = _HYDRO_CACHE[key] = _build_hydro_coefficients(context, geom)
    return cached


def _build_hydro_coefficients(
    context: PipelineContext, geom: WecGeometry
) -> hydro.HydroCoefficients:
    params = context.params
    K_hs = hydrostatic_stiffness(geom, params.general.rho_water, params.general.gravity)
    if context.hydro_provider == "import":
        if not context.coeffs_path:
            raise ValueError("import hydro provider requires coeffs_path")
        return hydro.load_coefficients(context.coeffs_path, expected_geom=geom)
    if context.hydro_provider != "surrogate":
        raise ValueError(f"unknown hydro provider: {context.hydro_provider!r}")
    return hydro.flat_plate_coefficients(
        geom,
        context.solver_grid(),
        params.general.water_depth,
        params.general.rho_water,
        params.general.gravity,
        K_hs,
    )


@dataclass(frozen=True)
class EvaluationReport:
    design: dict
    lcow: float
    penalized: float
    awp: float                  # m^3/yr
    cost: dict
    constraints: list[dict]
    avg_feed: float             # m^3/day
    avg_permeate: float         # m^3/day
    feasible: bool
    failed: bool
    diagnostic: str = ""
    flags: dict = field(default_factory=dict)

    def to_json(self) -> str:
        doc = {"schema_version": 1, **dataclasses.asdict(self)}
        return json.dumps(doc, indent=2, sort_keys=True)


def _simulate_design(
    design: DesignVector,
    context: PipelineContext,
    sim_config: SimConfig,
    plant: DesalPlant,
    realization: waves.WaveRealization | None = None,
):
    params = context.params
    geom = build_geometry(design, params)
    coeffs = hydro_coefficients(context, geom)
    kernel = hydro.radiation_irf(
        coeffs, dt=params.solver.dt, duration=params.solver.kernel_duration
    )
    if realization is None:
        realization = waves.synthesize(
            context.seastate,
            n_components=params.solver.n_wave_components,
            duration=sim_config.duration,
            dt=sim_config.dt,
            seed=context.wave_seed,
            ramp_time=sim_config.ramp_time,
            mode=context.spectrum_mode,
        )
    result = sysdyn.simulate(
        design, geom, coeffs, kernel, plant, realization, sim_config
    )
    return geom, coeffs, kernel, result


def _cost_design(
    design: DesignVector,
    geom: WecGeometry,
    plant: DesalPlant,
    result: SimulationResult,
    sim_config: SimConfig,
    params: ParameterSet,
) -> tuple[econ.CostBreakdown, float, float]:
    capex_wec, opex_wec = econ.wec_cost(geom, params)
    stroke_req = max(
        params.econ.stroke_margin * result.max_stroke, MIN_COSTING_STROKE
    )
    capex_pto, opex_pto = econ.pto_cost(
        design.Ap, design.Vacc, stroke_req, plant.P_relief, params
    )
    avg_feed = (
        sysdyn.annualized_flow(result.volumes["intake_post_ramp"], sim_config) / 365.0
    )
    avg_perm = (
        sysdyn.annualized_flow(result.volumes["permeate_post_ramp"], sim_config) / 365.0
    )
    capex_swro, opex_swro = econ.swro_cost(plant, avg_feed, avg_perm, params)
    cost = econ.CostBreakdown(
        capex_wec=capex_wec,
        capex_pto=capex_pto,
        capex_swro=capex_swro,
        opex_wec=opex_wec,
        opex_pto=opex_pto,
        opex_swro=opex_swro,
    )
    return cost, avg_feed, avg_perm


def evaluate_design(
    design: DesignVector, context: PipelineContext
) -> EvaluationReport:
    """Full single-design pipeline pass producing LCOW and its breakdown."""
    params = context.params
    sim_config = SimConfig.from_params(params)
    plant = plant_from_params(design.Qpmax, params)
    try:
        geom, _, _, result = _simulate_design(design, context, sim_config, plant)
    except (ValueError, econ.InfeasibleCostError) as exc:
        return _failed_report(design, str(exc))
    if result.failed:
        return _failed_report(design, result.diagnostic)
    try:
        cost, avg_feed, avg_perm = _cost_design(
            design, geom, plant, result, sim_config, params
        )
    except econ.InfeasibleCostError as exc:
        return _failed_report(design, str(exc))

    awp = sysdyn.annual_water_production(result, sim_config, context.availability)
    value = econ.lcow(cost, awp, params.general.fcr)
    penalty = PENALTY_WEIGHT * sum(
        v.relative for v in result.constraint_violations
    )
    constraints = [
        {
            "name": v.name,
            "magnitude": v.magnitude,
            "limit": v.limit,
            "relative": v.relative,
            "first_time": v.first_time,
        }
        for v in result.constraint_violations
    ]
    return EvaluationReport(
        design=design.as_dict(),
        lcow=value,
        penalized=min(value + penalty, FAILED_SENTINEL),
        awp=awp,
        cost=cost.as_dict(),
        constraints=constraints,
        avg_feed=avg_feed,
        avg_permeate=avg_perm,
        feasible=not result.constraint_violations,
        failed=False,
        flags=result.flags,
    )


def _failed_report(design: DesignVector, diagnostic: str) -> EvaluationReport:
    return EvaluationReport(
        design=design.as_dict(),
        lcow=FAILED_SENTINEL,
        penalized=FAILED_SENTINEL,
        awp=0.0,
        cost={},
        constraints=[],
        avg_feed=0.0,
        avg_permeate=0.0,
        feasible=False,
        failed=True,
        diagnostic=diagnostic,
    )


def penalized_objective(design: DesignVector, context: PipelineContext) -> float:
    """LCOW plus weighted relative constraint violations; sentinel on failure."""
    return evaluate_design(design, context).penalized


def kinetic_energy_metric(
    design: DesignVector, context: PipelineContext
) -> float:
    """Annualized WEC kinetic energy, kWh/yr, PTO disconnected, regular wave
    at the peak period with amplitude Hs/2."""
    params = context.params
    sim_config = SimConfig.from_params(params, pto_connected=False)
    plant = plant_from_params(design.Qpmax, params)
    realization = waves.regular_wave(
        context.seastate,
        duration=sim_config.duration,
        dt=sim_config.dt,
        ramp_time=sim_config.ramp_time,
    )
    geom, coeffs, kernel, result = _simulate_design(
        design, context, sim_config, plant, realization=realization
    )
    if result.failed:
        return 0.0
    I_tot = geom.I_pitch + kernel.A_inf
    return sysdyn.annual_kinetic_energy(result, I_tot, sim_config)


# --- Stage objectives used by the sequential workflows -------------------


def lcoke_objective(design: DesignVector, context: PipelineContext) -> float:
    params = context.params
    try:
        geom = build_geometry(design, params)
        annual_ke = kinetic_energy_metric(design, context)
        capex, opex = econ.wec_cost(geom, params)
    except ValueError:
        return FAILED_SENTINEL
    value = econ.lcoke(capex, opex, annual_ke, params.general.fcr)
    return min(value, FAILED_SENTINEL)


def lcof_objective(design: DesignVector, context: PipelineContext) -> float:
    """Levelized cost of delivered feed with the plant replaced by a throttle."""
    params = context.params
    sim_config = SimConfig.from_params(params, use_membrane=False, use_relief=False)
    plant = plant_from_params(design.Qpmax, params)
    try:
        geom, _, _, result = _simulate_design(design, context, sim_config, plant)
    except ValueError:
        return FAILED_SENTINEL
    if result.failed:
        return FAILED_SENTINEL
    annual_feed = sysdyn.annualized_flow(
        result.volumes["intake_post_ramp"], sim_config
    )
    try:
        capex_wec, opex_wec = econ.wec_cost(geom, params)
        stroke_req = max(
            params.econ.stroke_margin * result.max_stroke, MIN_COSTING_STROKE
        )
        capex_pto, opex_pto = econ.pto_cost(
            design.Ap, design.Vacc, stroke_req, plant.P_relief, params
        )
    except econ.InfeasibleCostError:
        return FAILED_SENTINEL
    value = econ.lcof(
        capex_wec + capex_pto, opex_wec + opex_pto, annual_feed, params.general.fcr
    )
    penalty = PENALTY_WEIGHT * sum(v.relative for v in result.constraint_violations)
    return min(value + penalty, FAILED_SENTINEL)


# --- Optimization reports ------------------------------------------------


@dataclass
class StageReport:
    name: str
    active_variables: list[str]
    objective: str
    best_design: dict
    best_value: float
    history_best: list[float]
    history_mean: list[float]
    history_feasible: list[float]
    evaluations: int


@dataclass
class OptimizationReport:
    workflow: str
    seastate: dict
    seed: int
    best_design: dict
    best_lcow: float
    nominal_lcow: float | None
    stages: list[StageReport]
    ga_config: dict

    def to_json(self) -> str:
        doc = {"schema_version": 1, **dataclasses.asdict(self)}
        return json.dumps(doc, indent=2, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "OptimizationReport":
        doc = json.loads(text)
        doc.pop("schema_version", None)
        doc["stages"] = [StageReport(**s) for s in doc["stages"]]
        return OptimizationReport(**doc)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n")


def _run_stage(
    name: str,
    objective_name: str,
    objective,
    active: list[str],
    base: DesignVector,
    context: PipelineContext,
    config: GaConfig,
    initial_designs: list[DesignVector],
) -> tuple[DesignVector, StageReport]:
    if not active:
        # All variables frozen: nothing to optimize.
        value = objective(base, context)
        report = StageReport(
            name=name,
            active_variables=[],
            objective=objective_name,
            best_design=base.as_dict(),
            best_value=value,
            history_best=[value],
            history_mean=[value],
            history_feasible=[1.0 if value < FAILED_SENTINEL else 0.0],
            evaluations=1,
        )
        return base, report

    bits = config.bits_per_variable

    def bit_objective(genome: np.ndarray) -> float:
        design = decode_design(genome, active, base, bits)
        return objective(design, context)

    initial = [encode_design(d, active, bits) for d in initial_designs]
    result: GaResult = ga_run(
        bit_objective, config, bits * len(active), initial_genomes=initial
    )
    best = decode_design(result.best_genome, active, base, bits)
    report = StageReport(
        name=name,
        active_variables=list(active),
        objective=objective_name,
        best_design=best.as_dict(),
        best_value=result.best_value,
        history_best=result.history.best,
        history_mean=result.history.mean,
        history_feasible=result.history.feasible_fraction,
        evaluations=result.evaluations,
    )
    return best, report


def run_mdo(
    context: PipelineContext,
    config: GaConfig,
    initial_design: DesignVector | None = None,
) -> OptimizationReport:
    """All eight variables, penalized LCOW objective."""
    active = ["w", "t", "m", "l1", "Ap", "Vacc", "P0", "Qpmax"]
    base = DesignVector.nominal()
    initial = [initial_design or base]
    best, stage = _run_stage(
        "mdo", "lcow", penalized_objective, active, base, context, config, initial
    )
    nominal_eval = evaluate_design(DesignVector.nominal(), context)
    return OptimizationReport(
        workflow="mdo",
        seastate={"Hs": context.seastate.Hs, "Tp": context.seastate.Tp},
        seed=config.seed,
        best_design=best.as_dict(),
        best_lcow=evaluate_design(best, context).lcow,
        nominal_lcow=nominal_eval.lcow,
        stages=[stage],
        ga_config=dataclasses.asdict(config),
    )


def _wec_stage(context, config, base):
    return _run_stage(
        "wec_lcoke", "lcoke", lcoke_objective, ["w", "t", "m"],
        base, context, config, [base],
    )


def run_sdo_a(context: PipelineContext, config: GaConfig) -> OptimizationReport:
    """WEC for LCOKE, then PTO for LCOF with a throttle in place of the
    plant, then plant capacity for LCOW; each stage freezes its winners."""
    base = DesignVector.nominal()
    design, s1 = _wec_stage(context, config, base)
    design, s2 = _run_stage(
        "pto_lcof", "lcof", lcof_objective, ["l1", "Ap", "Vacc", "P0"],
        design, context, config, [design],
    )
    design, s3 = _run_stage(
        "plant_lcow", "lcow", penalized_objective, ["Qpmax"],
        design, context, config, [design],
    )
    nominal_eval = evaluate_design(DesignVector.nominal(), context)
    return OptimizationReport(
        workflow="sdo-a",
        seastate={"Hs": context.seastate.Hs, "Tp": context.seastate.Tp},
        seed=config.seed,
        best_design=design.as_dict(),
        best_lcow=evaluate_design(design, context).lcow,
        nominal_lcow=nominal_eval.lcow,
        stages=[s1, s2, s3],
        ga_config=dataclasses.asdict(config),
    )


def run_sdo_b(context: PipelineContext, config: GaConfig) -> OptimizationReport:
    """WEC for LCOKE, then plant capacity for LCOW with the nominal PTO,
    then PTO variables for LCOW with the plant fixed."""
    base = DesignVector.nominal()
    design, s1 = _wec_stage(context, config, base)
    design, s2 = _run_stage(
        "plant_lcow", "lcow", penalized_objective, ["Qpmax"],
        design, context, config, [design],
    )
    design, s3 = _run_stage(
        "pto_lcow", "lcow", penalized_objective, ["l1", "Ap", "Vacc", "P0"],
        design, context, config, [design],
    )
    nominal_eval = evaluate_design(DesignVector.nominal(), context)
    return OptimizationReport(
        workflow="sdo-b",
        seastate={"Hs": context.seastate.Hs, "Tp": context.seastate.Tp},
        seed=config.seed,
        best_design=design.as_dict(),
        best_lcow=evaluate_design(design, context).lcow,
        nominal_lcow=nominal_eval.lcow,
        stages=[s1, s2, s3],
        ga_config=dataclasses.asdict(config),
    )


def child_seed(base_seed: int, index: int) -> int:
    """Stable per-run seed derivation for multi-sea-state sweeps."""
    return int(
        np.random.SeedSequence([base_seed, index]).generate_state(1)[0] % (2**31)
    )


def run_sensitivity_one(
    seastate: SeaState,
    index: int,
    context_template: PipelineContext,
    config: GaConfig,
) -> OptimizationReport:
    context = dataclasses.replace(
        context_template,
        seastate=seastate,
        wave_seed=child_seed(context_template.wave_seed, index),
    )
    cfg = dataclasses.replace(config, seed=child_seed(config.seed, index))
    return run_mdo(context, cfg)
