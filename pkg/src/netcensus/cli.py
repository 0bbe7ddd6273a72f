"""Command-line interface.

Every compute subcommand can run in-process (default) or as a thin client
against a running service (``--server http://host:port``); both modes write
byte-identical files because the service returns the rendered CSV/JSON text.

Exit codes: 0 success, 2 configuration error, 3 resource cap exceeded.
"""

from __future__ import annotations

import functools
import sys
from pathlib import Path
from typing import Optional

import click
from pydantic import ValidationError

from .errors import ConfigError, ResourceCapExceeded
from .scenarios import (
    ExperimentReportModel,
    GridRequest,
    LandscapeRequest,
    OracleCheckRequest,
    ScenarioModel,
    ThresholdsRequest,
    graph_model_from_file,
    load_scenario,
    report_to_json,
    run_grid,
    run_landscape,
    run_oracle_check,
    run_scenario,
    run_thresholds,
    settings_table,
    shot_records_table,
    table_to_csv,
    write_report,
    write_table,
)


def _fail(code: int, label: str, message: str) -> None:
    click.echo(f"error [{label}]: {message}", err=True)
    sys.exit(code)


def cli_errors(fn):
    """Map the error families onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ResourceCapExceeded as exc:
            _fail(3, "resource-cap", str(exc))
        except (ConfigError, ValidationError) as exc:
            _fail(2, "config", str(exc))

    return wrapper


def parse_int_list(text: str) -> list[int]:
    """Parse ``"1,2,5-8"`` into ``[1, 2, 5, 6, 7, 8]`` (empty text -> [])."""
    values: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if "-" in part:
                lo, hi = part.split("-", 1)
                values.extend(range(int(lo), int(hi) + 1))
            else:
                values.append(int(part))
    except ValueError as exc:
        raise ConfigError(f"cannot parse integer range {text!r}: {exc}") from exc
    return values


def _out_dir(out: str) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _post(server: str, route: str, payload: dict) -> dict:
    import httpx

    url = server.rstrip("/") + route
    try:
        resp = httpx.post(url, json=payload, timeout=600.0)
    except httpx.HTTPError as exc:
        raise ConfigError(f"cannot reach server {server!r}: {exc}") from exc
    if resp.status_code == 200:
        return resp.json()
    try:
        detail = resp.json().get("detail", resp.text)
    except ValueError:
        detail = resp.text
    if resp.status_code == 409:
        raise ResourceCapExceeded(detail)
    raise ConfigError(f"server returned {resp.status_code}: {detail}")


def _resolve_shots(shots: Optional[int], exact: bool):
    if shots is not None and exact:
        raise ConfigError("--shots and --exact are mutually exclusive")
    if shots is not None:
        return shots
    if exact:
        return "exact"
    return None


out_option = click.option(
    "--out", default=".", show_default=True, help="Directory for output files."
)
server_option = click.option(
    "--server", default=None, help="Run against this service URL instead of in-process."
)
seed_option = click.option("--seed", type=int, default=None, help="Base RNG seed.")
shots_option = click.option(
    "--shots", type=int, default=None, help="Shots per measurement setting."
)
exact_option = click.option(
    "--exact", is_flag=True, help="Compute expectation values exactly (no sampling)."
)


@click.group()
def main() -> None:
    """Count classical nodes in quantum networks from fidelity measurements."""


@main.command()
@click.option("--max-nc", "max_nc", type=int, default=18, show_default=True,
              help="Largest classical-node count tabulated.")
@click.option("--bruteforce-max", type=int, default=0, show_default=True,
              help="Cross-check thresholds up to this n_c by assignment search.")
@out_option
@server_option
@cli_errors
def thresholds(max_nc: int, bruteforce_max: int, out: str, server: Optional[str]) -> None:
    """Tabulate threshold fidelities F(n_c)."""
    payload = {"n_max": max_nc, "bruteforce_max": bruteforce_max}
    out_path = _out_dir(out)
    if server:
        csv_text = _post(server, "/thresholds", payload)["csv"]
    else:
        csv_text = table_to_csv(run_thresholds(ThresholdsRequest(**payload)))
    _write_text(out_path / "thresholds.csv", csv_text)
    click.echo(f"wrote {out_path / 'thresholds.csv'} ({max_nc} rows)")


@main.command()
@click.argument("config", required=False, type=click.Path())
@click.option("--graph", "graph_file", type=click.Path(), default=None,
              help="Target description file (overrides the scenario's graph).")
@seed_option
@shots_option
@exact_option
@click.option("--save-shots", is_flag=True, help="Also write per-shot outcomes.")
@out_option
@server_option
@cli_errors
def simulate(config: Optional[str], graph_file: Optional[str], seed: Optional[int],
             shots: Optional[int], exact: bool, save_shots: bool, out: str,
             server: Optional[str]) -> None:
    """Run one scenario (CONFIG is a YAML/JSON document) and report the verdict."""
    if config is not None:
        scenario = load_scenario(config)
    elif graph_file is not None:
        scenario = ScenarioModel(graph=graph_model_from_file(graph_file))
    else:
        raise ConfigError("provide a scenario CONFIG file or --graph")
    updates: dict = {}
    if graph_file is not None and config is not None:
        updates["graph"] = graph_model_from_file(graph_file)
    if seed is not None:
        updates["seed"] = seed
    shots_value = _resolve_shots(shots, exact)
    if shots_value is not None:
        updates["shots"] = shots_value
    if save_shots:
        updates["save_shots"] = True
    if updates:
        scenario = scenario.model_copy(update=updates)
        scenario = ScenarioModel.model_validate(scenario.model_dump())
    out_path = _out_dir(out)
    if server:
        data = _post(server, "/simulate", scenario.model_dump(mode="json"))
        report = ExperimentReportModel.model_validate(data["report"])
        _write_text(out_path / "report.json", data["report_json"])
        if not report.exact:
            _write_text(out_path / "settings.csv", data["settings"]["csv"])
        if data.get("shots"):
            _write_text(out_path / "shots.csv", data["shots"]["csv"])
    else:
        report, records = run_scenario(scenario)
        write_report(out_path / "report.json", report)
        if not report.exact:
            write_table(out_path / "settings.csv", settings_table(report))
        if records:
            write_table(out_path / "shots.csv", shot_records_table(records))
    _echo_report(report, out_path)


def _echo_report(report: ExperimentReportModel, out_path: Path) -> None:
    mode = "exact" if report.exact else (
        f"{report.shots_per_setting} shots x {report.n_settings} settings"
    )
    click.echo(f"scenario {report.name!r}: N={report.n}, v_c={report.v_c} ({mode})")
    if report.exact:
        click.echo(f"fidelity   {report.fidelity!r}")
    else:
        click.echo(f"fidelity   {report.fidelity!r} +- {report.std_error!r}")
    v = report.verdict
    margin = "n/a" if v.margin_sigma is None else f"{v.margin_sigma:.2f} sigma"
    if isinstance(v.n_c_inferred, str):
        label = v.n_c_inferred
    else:
        label = f"at most {v.n_c_inferred} classical node(s)"
    click.echo(
        f"verdict    {label} (EW violated: {v.ew_violated}, "
        f"steering: {v.steering_confirmed}, margin: {margin})"
    )
    if report.s_ew is not None:
        click.echo(f"S(EW)      {report.s_ew:.3f}")
    if report.s_count is not None:
        click.echo(f"S(n_c)     {report.s_count:.3f}  [declared n_c={report.declared_n_c}]")
    click.echo(f"elapsed    {report.elapsed_seconds:.3f} s")
    click.echo(f"wrote {out_path / 'report.json'}")


@main.command()
@click.option("--nq", default="1,2", show_default=True,
              help="Quantum-node counts, e.g. '1,2' or '1-4'.")
@click.option("--nc", default="1-18", show_default=True,
              help="Classical-node counts, e.g. '1-18'.")
@seed_option
@shots_option
@exact_option
@out_option
@server_option
@cli_errors
def grid(nq: str, nc: str, seed: Optional[int], shots: Optional[int], exact: bool,
         out: str, server: Optional[str]) -> None:
    """Sweep the optimal strategy over (n_q, n_c) and classify each point."""
    shots_value = _resolve_shots(shots, exact)
    payload = {
        "n_q_values": parse_int_list(nq),
        "n_c_values": parse_int_list(nc),
        "shots": "exact" if shots_value is None else shots_value,
        "seed": 0 if seed is None else seed,
    }
    out_path = _out_dir(out)
    if server:
        csv_text = _post(server, "/grid", payload)["csv"]
    else:
        csv_text = table_to_csv(run_grid(GridRequest(**payload)))
    _write_text(out_path / "grid.csv", csv_text)
    n_rows = len(payload["n_q_values"]) * len(payload["n_c_values"])
    click.echo(f"wrote {out_path / 'grid.csv'} ({n_rows} rows)")


@main.command()
@click.option("--nq", type=int, default=1, show_default=True)
@click.option("--nc", type=int, default=1, show_default=True)
@click.option("--ntheta", type=int, default=101, show_default=True)
@click.option("--nphi", type=int, default=101, show_default=True)
@click.option("--assignment", default=None,
              help="Outcome-triple indices per classical node, e.g. '1,1'.")
@out_option
@server_option
@cli_errors
def landscape(nq: int, nc: int, ntheta: int, nphi: int, assignment: Optional[str],
              out: str, server: Optional[str]) -> None:
    """Tabulate the strategy fidelity over the (theta, phi) plane."""
    payload: dict = {"n_q": nq, "n_c": nc, "n_theta": ntheta, "n_phi": nphi}
    if assignment is not None:
        payload["assignment"] = parse_int_list(assignment)
    out_path = _out_dir(out)
    if server:
        data = _post(server, "/landscape", payload)
        csv_text = data["table"]["csv"]
        max_f, thr = data["max_fidelity"], data["threshold"]
    else:
        result = run_landscape(LandscapeRequest(**payload))
        csv_text = table_to_csv(result.table)
        max_f, thr = result.max_fidelity, result.threshold
    _write_text(out_path / "landscape.csv", csv_text)
    click.echo(f"wrote {out_path / 'landscape.csv'} ({ntheta * nphi} points)")
    click.echo(f"max fidelity {max_f!r}  threshold {thr!r}  excess {max_f - thr:.3e}")


@main.command(name="oracle-check")
@click.option("--graphs", default="star,chain,ring", show_default=True,
              help="Comma-separated graph families.")
@click.option("--n", "n_values", default="2-6", show_default=True,
              help="Node counts, e.g. '2-6'.")
@click.option("--max-nc", "max_nc", type=int, default=3, show_default=True)
@click.option("--tolerance", type=float, default=1e-9, show_default=True)
@out_option
@server_option
@cli_errors
def oracle_check(graphs: str, n_values: str, max_nc: int, tolerance: float,
                 out: str, server: Optional[str]) -> None:
    """Verify the assignment search reproduces the closed-form thresholds."""
    payload = {
        "graphs": [g.strip() for g in graphs.split(",") if g.strip()],
        "n_values": parse_int_list(n_values),
        "max_nc": max_nc,
        "tolerance": tolerance,
    }
    out_path = _out_dir(out)
    if server:
        data = _post(server, "/oracle-check", payload)
        summary_csv = data["summary"]["csv"]
        subsets_csv = data["subsets"]["csv"]
        passed, worst = data["passed"], data["max_abs_diff"]
        excess = data["max_excess"]
    else:
        result = run_oracle_check(OracleCheckRequest(**payload))
        summary_csv = table_to_csv(result.summary)
        subsets_csv = table_to_csv(result.subsets)
        passed, worst = result.passed, result.max_abs_diff
        excess = result.max_excess
    _write_text(out_path / "oracle_summary.csv", summary_csv)
    _write_text(out_path / "oracle_subsets.csv", subsets_csv)
    click.echo(f"wrote {out_path / 'oracle_summary.csv'} and oracle_subsets.csv")
    status = "PASS" if passed else "FAIL"
    click.echo(f"{status}: max |F_bruteforce - F_closed_form| = {worst:.3e}")
    if not passed:
        if excess <= tolerance:
            click.echo(
                "no case exceeds its threshold (counting rule intact); the "
                "failing graphs cannot reach the closed form with any "
                "assignment, so the bound is not tight for them"
            )
        else:
            click.echo(
                f"WARNING: a case exceeds its threshold by {excess:.3e}; "
                "the closed form is not an upper bound there"
            )
        sys.exit(1)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@cli_errors
def serve(host: str, port: int) -> None:
    """Start the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
