"""Acceptance gate: one test (and one pass/fail line) per criterion.

Run with ``pytest -v tests/test_acceptance.py`` to get the per-criterion
verdict lines. The desk-scale optimization runs (criteria 6 and 7) share
session fixtures and dominate the runtime (a few minutes total).
"""

import dataclasses
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from wavedesal import econ
from wavedesal.cli import main as cli_main
from wavedesal.desal import SeawaterSpec, osmotic_pressure, plant_from_params
from wavedesal.geometry import (
    DESIGN_BOUNDS,
    DESIGN_VARIABLES,
    DesignVector,
    build_geometry,
    hydrostatic_stiffness,
)
from wavedesal.hydro import flat_plate_coefficients, radiation_irf
from wavedesal.optimizer import GaConfig, decode, ga_run
from wavedesal.seastates import load_station_files, kmeans, two_level_cluster
from wavedesal.sysdyn import SimConfig, simulate
from wavedesal.waves import SeaState, pm_spectrum, regular_wave, synthesize
from wavedesal.workflows import (
    PipelineContext,
    evaluate_design,
    run_mdo,
    run_sdo_a,
    run_sdo_b,
)

FIXTURES = Path(__file__).parent / "fixtures" / "ndbc"
DESK_GA = GaConfig.scaled(48, 120, seed=0)
TREND_SEASTATES = [
    SeaState(Hs=2.64, Tp=9.86),
    SeaState(Hs=1.92, Tp=7.90),
    SeaState(Hs=2.53, Tp=9.19),
]


def _verdict(criterion: int, detail: str) -> None:
    print(f"criterion {criterion}: PASS ({detail})")


# --- shared expensive runs ------------------------------------------------


@pytest.fixture(scope="session")
def desk_runs(context):
    t0 = time.monotonic()
    runs = {
        "mdo": run_mdo(context, DESK_GA),
        "sdo_a": run_sdo_a(context, DESK_GA),
        "sdo_b": run_sdo_b(context, DESK_GA),
    }
    runs["elapsed"] = time.monotonic() - t0
    return runs


@pytest.fixture(scope="session")
def trend_runs(context, desk_runs):
    def mdo_at(state, ga_seed):
        ctx = dataclasses.replace(context, seastate=state)
        return run_mdo(ctx, dataclasses.replace(DESK_GA, seed=ga_seed))

    runs = {TREND_SEASTATES[0]: desk_runs["mdo"]}
    for state in TREND_SEASTATES[1:]:
        runs[state] = mdo_at(state, 0)
    return runs, mdo_at


# --- criteria -------------------------------------------------------------


def test_criterion_01_desal_algebra(params):
    spec = SeawaterSpec.from_params(params)
    plant = plant_from_params(3150.0, params)
    # independent hand evaluation of the plant algebra
    pi_feed = 2.0 * (35946.0 / 58.44) * 8.314 * 298.15
    pi_perm = 2.0 * (150.0 / 58.44) * 8.314 * 298.15
    A_m = (3150.0 / 24.6) * 35.0
    R_m = 1.0 / (2.57e-12 * A_m)
    Qpmax = 3150.0 / 86400.0
    P_relief = Qpmax * R_m + (pi_feed - pi_perm)
    # brine throttle sized so the design-point brine flow honors the
    # recovery ratio: Q_brine = Qpmax (1-r)/r at P_relief
    R_t = P_relief / (Qpmax * (1.0 - 0.442) / 0.442)
    rel = 1e-6
    assert osmotic_pressure(35946.0, spec) == pytest.approx(pi_feed, rel=rel)
    assert osmotic_pressure(150.0, spec) == pytest.approx(pi_perm, rel=rel)
    assert plant.A_m == pytest.approx(A_m, rel=rel)
    assert plant.R_m == pytest.approx(R_m, rel=rel)
    assert plant.P_relief == pytest.approx(P_relief, rel=rel)
    assert plant.R_t == pytest.approx(R_t, rel=rel)
    _verdict(1, f"P_relief {plant.P_relief / 1e6:.4f} MPa, rel err < 1e-6")


def test_criterion_02_pm_spectrum():
    from scipy.integrate import quad
    from scipy.optimize import minimize_scalar

    state = SeaState(Hs=2.64, Tp=9.86)
    wp = 2.0 * math.pi / 9.86

    # Analytic stationarity: S = a w^-5 exp(-b w^-4) peaks at (4b/5)^(1/4);
    # with the PM coefficient b = 20 pi^4 / Tp^4 that is exactly 2 pi / Tp.
    b = 20.0 * math.pi**4 / 9.86**4
    argmax_err = abs((4.0 * b / 5.0) ** 0.25 - wp)
    assert argmax_err < 1e-9
    # and the implementation really does peak there (function-value search
    # is limited to ~sqrt(eps) localization, so this check is coarser)
    res = minimize_scalar(
        lambda w: -float(pm_spectrum(state, np.array([w]), mode="standard")[0]),
        bounds=(0.8 * wp, 1.2 * wp),
        method="bounded",
        options={"xatol": 1e-12},
    )
    assert abs(res.x - wp) < 1e-7

    integral, _ = quad(
        lambda w: float(pm_spectrum(state, np.array([w]), mode="verbatim")[0]),
        1e-3,
        np.inf,
        limit=400,
    )
    target = math.pi * 2.64**2 / 8.0
    rel = abs(integral - target) / target
    assert rel < 0.005
    _verdict(2, f"argmax err {argmax_err:.2e} rad/s, integral rel err {rel:.2e}")


def test_criterion_03_linear_response(params, nominal_design, nominal_geometry,
                                      nominal_khs, solver_grid):
    coeffs = flat_plate_coefficients(
        nominal_geometry, solver_grid, 12.0, 1025.0, 9.81, nominal_khs
    )
    kernel = radiation_irf(coeffs, dt=0.1, duration=20.0)
    I_tot = nominal_geometry.I_pitch + kernel.A_inf
    plant = plant_from_params(3150.0, params)
    config = SimConfig.from_params(params, pto_connected=False)

    worst = 0.0
    for w in (0.34, 1.6, 2.86):
        amp_wave = 0.5  # Hs = 1 m
        A = float(np.interp(w, coeffs.omega, coeffs.added_mass))
        B = float(np.interp(w, coeffs.omega, coeffs.radiation_damping))
        F = float(np.interp(w, coeffs.omega, coeffs.excitation_mag))
        K = coeffs.K_hs
        theta_fd = amp_wave * F / math.hypot(
            K - w**2 * (nominal_geometry.I_pitch + A), w * B
        )
        realization = regular_wave(SeaState(Hs=1.0, Tp=2 * math.pi / w), dt=0.1)
        result = simulate(
            nominal_design, nominal_geometry, coeffs, kernel, plant,
            realization, config,
        )
        tail = result.theta[result.time > 200.0]
        theta_td = 0.5 * (tail.max() - tail.min())
        err = abs(theta_td - theta_fd) / theta_fd
        worst = max(worst, err)
        assert err < 0.02, f"omega={w}: TD/FD mismatch {err:.3%}"
    _verdict(3, f"worst TD/FD amplitude error {worst:.3%} at 3 frequencies")


def test_criterion_04_conservation(params, context):
    rng = np.random.default_rng(12345)
    config = SimConfig.from_params(params)
    sampled = attempts = 0
    worst_vol = worst_energy = 0.0
    while sampled < 20:
        attempts += 1
        assert attempts < 200, "could not collect 20 clean runs"
        values = {
            name: float(rng.uniform(lo, hi))
            for name, (lo, hi) in DESIGN_BOUNDS.items()
        }
        design = DesignVector(**values)
        geom = build_geometry(design, params)
        K_hs = hydrostatic_stiffness(geom, 1025.0, 9.81)
        if K_hs < 3e6:
            # Marginally stable / capsizing flaps legitimately diverge in
            # the linearized model; the conservation suite samples the
            # statically stable subset.
            continue
        coeffs = flat_plate_coefficients(
            geom, context.solver_grid(), 12.0, 1025.0, 9.81, K_hs
        )
        kernel = radiation_irf(coeffs, dt=0.1, duration=20.0)
        plant = plant_from_params(design.Qpmax, params)
        realization = synthesize(
            SeaState(Hs=2.64, Tp=9.86), seed=1000 + attempts
        )
        r = simulate(design, geom, coeffs, kernel, plant, realization, config)
        if r.failed:
            # Lightly damped resonant flaps can exceed the linear model's
            # pitch validity guard; those runs end early and are resampled.
            continue
        sampled += 1

        v = r.volumes
        out = v["permeate"] + v["brine"] + v["relief"] + v["liquid_final"]
        vol_err = abs(v["intake"] - out) / max(v["intake"], 1e-9)
        worst_vol = max(worst_vol, vol_err)
        assert vol_err < 1e-3

        e = r.energies
        lhs = e["excitation_work"]
        rhs = (e["radiated"] + e["pto_absorbed"] + e["delta_kinetic"]
               + e["delta_potential"])
        scale = max(abs(lhs), e["radiated"], e["pto_absorbed"], 1.0)
        energy_err = abs(lhs - rhs) / scale
        worst_energy = max(worst_energy, energy_err)
        assert energy_err < 0.05

        # piston dissipativity: the PTO can only ever extract energy
        assert np.all(r.tau_pto * r.dtheta <= 1e-9)
    _verdict(
        4,
        f"20 designs: worst volume err {worst_vol:.2e}, "
        f"worst energy err {worst_energy:.2e}, dissipativity exact",
    )


def test_criterion_05_ga_oracle():
    bounds = [(0.0, 1.0), (0.0, 1.0), (0.0, 1.0)]
    bits = 4

    def f(x, y, z):
        # cheap analytic surrogate: convex bowl plus a mild ripple
        return ((x - 0.37) ** 2 + (y - 0.83) ** 2 + (z - 0.12) ** 2
                + 0.05 * math.sin(9 * x) * math.sin(7 * y) * math.cos(5 * z))

    # exhaustive optimum over the 16^3 quantized grid
    levels = [i / 15.0 for i in range(16)]
    grid_best = min(
        ((f(x, y, z), (i, j, k))
         for i, x in enumerate(levels)
         for j, y in enumerate(levels)
         for k, z in enumerate(levels)),
    )
    grid_codes = np.array(grid_best[1])

    def genome_codes(genome):
        return np.array([
            int("".join(map(str, genome[v * bits:(v + 1) * bits])), 2)
            for v in range(3)
        ])

    def objective(genome):
        return f(*decode(genome, bounds, bits))

    hits = 0
    for seed in range(5):
        cfg = GaConfig(
            population_size=50,
            immigrant_count=37,
            max_generations=100,
            bits_per_variable=bits,
            seed=seed,
        )
        result = ga_run(objective, cfg, genome_length=3 * bits)
        codes = genome_codes(result.best_genome)
        if np.all(np.abs(codes - grid_codes) <= 1):
            hits += 1
    assert hits >= 4, f"GA matched the grid optimum in only {hits}/5 seeds"
    _verdict(5, f"GA within one quantization step in {hits}/5 seeds")


def test_criterion_06_workflow_ordering(context, desk_runs):
    mdo = desk_runs["mdo"]
    sdo_a = desk_runs["sdo_a"]
    sdo_b = desk_runs["sdo_b"]
    assert desk_runs["elapsed"] < 3600.0
    assert mdo.best_lcow < mdo.nominal_lcow
    assert sdo_a.best_lcow >= mdo.best_lcow
    assert sdo_b.best_lcow >= mdo.best_lcow

    # import-mode nominal pin against the bundled reference coefficients
    from importlib import resources

    path = str(resources.files("wavedesal").joinpath(
        "data/reference_coefficients.json"))
    ctx = dataclasses.replace(context, hydro_provider="import",
                              coeffs_path=path)
    nominal_lcow = evaluate_design(DesignVector.nominal(), ctx).lcow
    assert 0.6 * 3.97 <= nominal_lcow <= 1.4 * 3.97
    _verdict(
        6,
        f"MDO {mdo.best_lcow:.3f} < SDO-A {sdo_a.best_lcow:.3f} / "
        f"SDO-B {sdo_b.best_lcow:.3f} < nominal {mdo.nominal_lcow:.3f} $/m^3; "
        f"import-mode nominal {nominal_lcow:.3f} in [2.38, 5.56]; "
        f"{desk_runs['elapsed']:.0f} s",
    )


def test_criterion_07_design_shift_trends(trend_runs):
    runs, mdo_at = trend_runs
    nominal = DesignVector.nominal()

    def trends_hold(report):
        best = report.best_design
        return (best["w"] < nominal.w and best["Ap"] > nominal.Ap
                and best["Vacc"] < nominal.Vacc
                and best["Qpmax"] > nominal.Qpmax)

    results = {state: trends_hold(runs[state]) for state in TREND_SEASTATES}
    if sum(results.values()) < 2:
        # documented flake allowance: one rerun of the failing sea states
        # with a different GA seed
        for state, ok in list(results.items()):
            if not ok:
                results[state] = trends_hold(mdo_at(state, 1))
    hit = sum(results.values())
    assert hit >= 2, f"design-shift trends held in only {hit}/3 sea states"
    _verdict(7, f"all four trends (w-, Ap+, Vacc-, Qpmax+) in {hit}/3 sea states")


def test_criterion_08_clustering():
    rng = np.random.default_rng(0)
    sigma, n = 0.3, 400
    means = np.array([[1.5, 6.0], [3.0, 12.0]])
    points = np.concatenate(
        [m + sigma * rng.standard_normal((n, 2)) for m in means]
    )
    cs = kmeans(points, 2, seed=0)
    got = np.array(sorted(map(tuple, cs.centers[:, ::-1])))
    tol = 3.0 * sigma / math.sqrt(n)
    assert np.all(np.abs(got - means) < tol)

    per_station = load_station_files(
        FIXTURES, ["41053", "44011", "46221", "51206", "52200"]
    )
    result = two_level_cluster(per_station, k1=10, k2=20, seed=3)
    doc = json.loads(result.to_json())
    assert doc["k"] == 20 and len(doc["sea_states"]) == 20
    for s in doc["sea_states"]:
        assert {"Tp", "Hs", "weight", "locations"} <= set(s)

    for seed in range(5):
        h = kmeans(rng.uniform(0, 10, (300, 2)), 7, seed=seed).inertia_history
        assert all(b <= a + 1e-9 for a, b in zip(h, h[1:]))
    _verdict(8, "blob recovery < 3 sigma/sqrt(n); 20-center schema; "
                "inertia monotone over 5 seeds")


def test_criterion_09_economics_pins(params):
    acc = econ.accumulator_cost(4.0, params)
    assert abs(acc - 636000.0) < 100.0

    w = params.wec
    geom = dataclasses.replace(
        build_geometry(DesignVector.nominal(), params),
        wetted_area=w.ref_surface_area,
    )
    capex, opex = econ.wec_cost(geom, params)
    ref_capex = (w.ref_flap_capex + w.ref_base_capex + w.ref_bearings_capex
                 + w.ref_mooring_capex)
    ref_opex = (w.ref_monitoring_opex + w.ref_marine_ops_opex
                + w.ref_shore_ops_opex + w.ref_parts_opex
                + w.ref_consumables_opex + w.ref_insurance_rate * ref_capex)
    assert capex == pytest.approx(ref_capex, rel=1e-12)
    assert opex == pytest.approx(ref_opex, rel=1e-12)

    curves = econ.load_cost_curves()
    n_curves = 0
    for table in (curves["capex"], curves["opex"]):
        for entry in table.values():
            assert econ._curve(entry, 1.0) == pytest.approx(entry["A"])
            n_curves += 1

    t_wall_mm = econ.cylinder_wall_thickness(0.26, 6.20e6, params) * 1000.0
    assert abs(t_wall_mm - 75.1) < 0.1
    _verdict(
        9,
        f"accumulator ${acc:,.0f}; WEC ref-area exact; {n_curves} curves "
        f"return A at X=1; t_wall {t_wall_mm:.2f} mm",
    )


def test_criterion_10_determinism(tmp_path):
    runner = CliRunner()
    common = ["--hs", "2.64", "--tp", "9.86", "--seed", "1"]

    # evaluate, twice
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / f"eval_{tag}.json"
        r = runner.invoke(cli_main, ["evaluate", *common, "--out", str(out)])
        assert r.exit_code == 0, r.output
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]

    # optimize, twice
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / f"mdo_{tag}.json"
        r = runner.invoke(
            cli_main,
            ["optimize", *common, "--pop", "8", "--generations", "3",
             "--ga-seed", "0", "--out", str(out)],
        )
        assert r.exit_code == 0, r.output
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]

    # sensitivity at --jobs 1 and 4, plus a repeat of jobs 1
    states = tmp_path / "states.json"
    states.write_text(json.dumps({
        "sea_states": [{"Hs": 2.64, "Tp": 9.86}, {"Hs": 1.92, "Tp": 7.90}]
    }))
    snapshots = []
    for tag, jobs in (("j1", 1), ("j4", 4), ("j1b", 1)):
        out_dir = tmp_path / f"sens_{tag}"
        r = runner.invoke(
            cli_main,
            ["sensitivity", "--seastates", str(states), "--pop", "8",
             "--generations", "3", "--jobs", str(jobs),
             "--out-dir", str(out_dir)],
        )
        assert r.exit_code == 0, r.output
        snapshots.append(
            {p.name: p.read_bytes() for p in sorted(out_dir.iterdir())}
        )
    assert snapshots[0] == snapshots[1] == snapshots[2]
    _verdict(10, "evaluate/optimize/sensitivity byte-identical; jobs 1 == 4")
