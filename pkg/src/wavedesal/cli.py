"""Command-line interface.

Exit codes: 0 success, 1 runtime failure, 2 configuration error. All
commands are deterministic given their config and seeds; output files
carry a schema_version.
"""

from __future__ import annotations

import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from . import hydro, seastates, workflows
from .geometry import DESIGN_VARIABLES, DesignVector
from .optimizer import GaConfig
from .params import ParameterError, load_params
from .waves import SeaState

# Fixed time-series CSV column order (documented contract).
TIMESERIES_COLUMNS = [
    "t", "theta", "theta_dot", "s", "P_feed", "Q_perm", "Q_brine", "Q_relief",
]

# Fixed sensitivity summary column order (documented contract).
SUMMARY_COLUMNS = ["index", "Hs", "Tp", *DESIGN_VARIABLES, "lcow"]

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


class ConfigError(click.ClickException):
    exit_code = EXIT_CONFIG


def _load_params_or_die(path: str | None):
    try:
        return load_params(path)
    except FileNotFoundError as exc:
        raise ConfigError(f"parameters file not found: {exc}") from exc
    except (ParameterError, json.JSONDecodeError) as exc:
        raise ConfigError(f"invalid parameters file: {exc}") from exc


def _design_from_options(design_file: str | None, sets: tuple[str, ...]) -> DesignVector:
    overrides: dict[str, float] = {}
    if design_file:
        try:
            doc = json.loads(Path(design_file).read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"design file not found: {design_file}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid design JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("design file must be a JSON object of name: value")
        overrides.update(doc)
    for item in sets:
        if "=" not in item:
            raise ConfigError(f"--set expects name=value, got {item!r}")
        name, _, raw = item.partition("=")
        try:
            overrides[name] = float(raw)
        except ValueError as exc:
            raise ConfigError(f"--set {name}: {raw!r} is not a number") from exc
    unknown = set(overrides) - set(DESIGN_VARIABLES)
    if unknown:
        raise ConfigError(f"unknown design variables: {sorted(unknown)}")
    try:
        design = DesignVector.nominal().replace(**overrides)
        design.check_bounds()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return design


def _context(params, hs, tp, seed, spectrum_mode, hydro_provider, coeffs):
    if hydro_provider == "import" and not coeffs:
        raise ConfigError("--hydro-provider import requires --coeffs")
    if coeffs and not Path(coeffs).exists():
        raise ConfigError(f"coefficients file not found: {coeffs}")
    return workflows.PipelineContext(
        params=params,
        seastate=SeaState(Hs=hs, Tp=tp),
        wave_seed=seed,
        spectrum_mode=spectrum_mode,
        hydro_provider=hydro_provider,
        coeffs_path=coeffs,
    )


def _write_timeseries(result, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TIMESERIES_COLUMNS)
        for row in zip(
            result.time, result.theta, result.dtheta, result.s,
            result.P_feed, result.Q_perm, result.Q_brine, result.Q_relief,
        ):
            writer.writerow([format(x, ".10g") for x in row])


_common = [
    click.option("--params", "params_path", default=None, help="JSON parameter override file."),
    click.option("--hs", type=float, required=True, help="Significant wave height, m."),
    click.option("--tp", type=float, required=True, help="Peak period, s."),
    click.option("--seed", type=int, default=1, show_default=True),
    click.option("--spectrum-mode", type=click.Choice(["standard", "verbatim"]), default="standard", show_default=True),
    click.option("--hydro-provider", type=click.Choice(["surrogate", "import"]), default="surrogate", show_default=True),
    click.option("--coeffs", default=None, help="Hydrodynamic coefficient JSON (import provider)."),
]


def _with(options):
    def wrap(f):
        for opt in reversed(options):
            f = opt(f)
        return f
    return wrap


@click.group()
def main():
    """Wave-powered desalination co-design toolkit."""


@main.command()
@_with(_common)
@click.option("--design-file", default=None, help="JSON object of design-variable overrides.")
@click.option("--set", "sets", multiple=True, help="Override one design variable, name=value.")
@click.option("--out", default="report.json", show_default=True)
@click.option("--dump-timeseries", default=None, help="Also write the state time series as CSV.")
def evaluate(params_path, hs, tp, seed, spectrum_mode, hydro_provider, coeffs,
             design_file, sets, out, dump_timeseries):
    """Evaluate one design against one sea state; write a report JSON.

    An infeasible or failed design still exits 0 -- the report carries the
    infeasibility flags. Only bad configuration exits nonzero.
    """
    params = _load_params_or_die(params_path)
    design = _design_from_options(design_file, sets)
    context = _context(params, hs, tp, seed, spectrum_mode, hydro_provider, coeffs)
    try:
        report = workflows.evaluate_design(design, context)
        Path(out).write_text(report.to_json() + "\n")
        if dump_timeseries:
            from .desal import plant_from_params
            from .sysdyn import SimConfig

            sim_config = SimConfig.from_params(params)
            plant = plant_from_params(design.Qpmax, params)
            _, _, _, result = workflows._simulate_design(
                design, context, sim_config, plant
            )
            _write_timeseries(result, dump_timeseries)
    except Exception as exc:  # noqa: BLE001 - map to documented exit code
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    click.echo(f"wrote {out} (LCOW {report.lcow:.4g} $/m^3)")


def _ga_options(f):
    f = click.option("--pop", type=int, default=400, show_default=True)(f)
    f = click.option("--generations", type=int, default=400, show_default=True)(f)
    f = click.option("--ga-seed", type=int, default=0, show_default=True)(f)
    return f


def _run_workflow(runner, name, params_path, hs, tp, seed, spectrum_mode,
                  hydro_provider, coeffs, pop, generations, ga_seed, out):
    params = _load_params_or_die(params_path)
    context = _context(params, hs, tp, seed, spectrum_mode, hydro_provider, coeffs)
    if pop < 2 or generations < 1:
        raise ConfigError("population must be >= 2 and generations >= 1")
    config = GaConfig.scaled(pop, generations, seed=ga_seed)
    try:
        report = runner(context, config)
        report.save(out)
    except Exception as exc:  # noqa: BLE001
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    click.echo(f"{name}: best LCOW {report.best_lcow:.4g} $/m^3 -> {out}")


@main.command()
@_with(_common)
@_ga_options
@click.option("--out", default="mdo_report.json", show_default=True)
def optimize(**kwargs):
    """All-at-once optimization of all eight design variables for LCOW."""
    _run_workflow(workflows.run_mdo, "mdo", **kwargs)


@main.command(name="sdo-a")
@_with(_common)
@_ga_options
@click.option("--out", default="sdo_a_report.json", show_default=True)
def sdo_a(**kwargs):
    """Sequential optimization: WEC -> PTO (flow) -> plant capacity."""
    _run_workflow(workflows.run_sdo_a, "sdo-a", **kwargs)


@main.command(name="sdo-b")
@_with(_common)
@_ga_options
@click.option("--out", default="sdo_b_report.json", show_default=True)
def sdo_b(**kwargs):
    """Sequential optimization: WEC -> plant capacity -> PTO."""
    _run_workflow(workflows.run_sdo_b, "sdo-b", **kwargs)


@main.command()
@click.option("--params", "params_path", default=None)
@click.option("--seastates", "seastates_path", required=True,
              help="JSON file with a sea_states list of {Hs, Tp} objects.")
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--spectrum-mode", type=click.Choice(["standard", "verbatim"]), default="standard", show_default=True)
@click.option("--hydro-provider", type=click.Choice(["surrogate", "import"]), default="surrogate", show_default=True)
@click.option("--coeffs", default=None)
@_ga_options
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out-dir", default="sensitivity", show_default=True)
def sensitivity(params_path, seastates_path, seed, spectrum_mode, hydro_provider,
                coeffs, pop, generations, ga_seed, jobs, out_dir):
    """Optimize once per sea state; write per-run reports and a summary CSV.

    Summary columns, in order: index, Hs, Tp, w, t, m, l1, Ap, Vacc, P0,
    Qpmax, lcow. Output is byte-identical for any --jobs value.
    """
    params = _load_params_or_die(params_path)
    try:
        doc = json.loads(Path(seastates_path).read_text())
        states = [SeaState(Hs=s["Hs"], Tp=s["Tp"]) for s in doc["sea_states"]]
    except FileNotFoundError as exc:
        raise ConfigError(f"sea-state file not found: {seastates_path}") from exc
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ConfigError(f"invalid sea-state file: {exc}") from exc
    if not states:
        raise ConfigError("sea-state file contains no sea states")
    if jobs < 1:
        raise ConfigError("--jobs must be >= 1")

    template = workflows.PipelineContext(
        params=params,
        seastate=states[0],
        wave_seed=seed,
        spectrum_mode=spectrum_mode,
        hydro_provider=hydro_provider,
        coeffs_path=coeffs,
    )
    config = GaConfig.scaled(pop, generations, seed=ga_seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    try:
        if jobs == 1:
            reports = [
                workflows.run_sensitivity_one(state, i, template, config)
                for i, state in enumerate(states)
            ]
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = [
                    pool.submit(workflows.run_sensitivity_one, state, i, template, config)
                    for i, state in enumerate(states)
                ]
                reports = [f.result() for f in futures]
    except Exception as exc:  # noqa: BLE001
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)

    for i, report in enumerate(reports):
        report.save(out / f"report_{i:03d}.json")
    with open(out / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for i, (state, report) in enumerate(zip(states, reports)):
            row = [i, format(state.Hs, ".10g"), format(state.Tp, ".10g")]
            row += [format(report.best_design[v], ".10g") for v in DESIGN_VARIABLES]
            row.append(format(report.best_lcow, ".10g"))
            writer.writerow(row)
    click.echo(f"wrote {len(reports)} reports and summary.csv to {out}/")


@main.command(name="cluster-seastates")
@click.option("--stations", required=True, help="Comma-separated NDBC station ids.")
@click.option("--years", required=True, help="Inclusive range, e.g. 2015-2024.")
@click.option("--k1", type=int, default=10, show_default=True)
@click.option("--k2", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--data-dir", required=True,
              help="Directory of stdmet text files named <station>*.txt.")
@click.option("--fetch/--no-fetch", default=False, show_default=True,
              help="Download missing station-years into --data-dir first.")
@click.option("--out", default="seastates.json", show_default=True)
def cluster_seastates(stations, years, k1, k2, seed, data_dir, fetch, out):
    """Two-level k-means over buoy observations; writes a sea-state JSON."""
    station_list = [s.strip() for s in stations.split(",") if s.strip()]
    if not station_list:
        raise ConfigError("no stations given")
    try:
        lo, _, hi = years.partition("-")
        year_list = list(range(int(lo), int(hi or lo) + 1))
    except ValueError as exc:
        raise ConfigError(f"invalid --years {years!r}: {exc}") from exc
    try:
        if fetch:
            for station in station_list:
                for year in year_list:
                    seastates.fetch_station_year(station, year, data_dir)
        per_station = seastates.load_station_files(data_dir, station_list)
        if len(per_station) < len(station_list):
            missing = sorted(set(station_list) - set(per_station))
            raise RuntimeError(f"no usable observations for stations: {missing}")
        result = seastates.two_level_cluster(per_station, k1=k1, k2=k2, seed=seed)
    except (RuntimeError, ValueError, seastates.NdbcFormatError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    Path(out).write_text(result.to_json() + "\n")
    click.echo(f"wrote {result.k} sea states to {out}")


@main.command(name="mesh-info")
@click.option("--width", type=float, required=True)
@click.option("--thickness", type=float, required=True)
@click.option("--height", type=float, required=True)
def mesh_info(width, thickness, height):
    """Print panel counts for an external BEM mesh of a box flap."""
    try:
        n = hydro.mesh_resolution(width, thickness, height)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    click.echo(f"panels (surge, sway, heave): {n[0]} x {n[1]} x {n[2]}")


@main.command(name="validate-config")
@click.option("--params", "params_path", required=True)
def validate_config(params_path):
    """Validate a parameter override file; exit 0 iff it is acceptable."""
    params = _load_params_or_die(params_path)
    click.echo(f"ok (checksum {params.checksum()[:16]})")


if __name__ == "__main__":
    main()
