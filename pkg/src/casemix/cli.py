"""Command line for the case-mix planning engine."""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import capacity, mcdm
from .alteration import AlterationRequest, alter_subtype, alter_type, sweep_delta
from .fixtures import alteration_study_scenario, demo_scenario, surge_scenario
from .model import validate_scenario
from .store import StoreError, load_scenario, save_scenario, from_scenario


def _fail(message: str) -> "click.ClickException":
    return click.ClickException(message)


def _load(path: str):
    try:
        return load_scenario(path)
    except StoreError as exc:
        raise _fail(str(exc))


def _parse_vector(text: str) -> list[float]:
    """Accept a comma list ("1,2,3") or @file.json holding a JSON array."""
    if text.startswith("@"):
        doc = json.loads(Path(text[1:]).read_text())
        if isinstance(doc, dict):
            doc = doc.get("values", doc.get("mix"))
        return [float(v) for v in doc]
    return [float(v) for v in text.split(",") if v.strip() != ""]


def _round2(v) -> str:
    if v is None:
        return "n/a"
    return f"{v:.2f}"


def _emit_table(headers: list[str], rows: list[list[str]], out_format: str) -> None:
    if out_format == "csv":
        writer = csv.writer(sys.stdout)
        writer.writerow(headers)
        writer.writerows(rows)
        return
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    click.echo("  ".join(h.ljust(w) for h, w in zip(headers, widths)))
    click.echo("  ".join("-" * w for w in widths))
    for r in rows:
        click.echo("  ".join(c.ljust(w) for c, w in zip(r, widths)))


out_option = click.option(
    "--out", "out_format", type=click.Choice(["table", "csv"]), default="table",
    show_default=True, help="Output format.",
)
scenario_option = click.option(
    "--scenario", "scenario_path", required=True, envvar="CASEMIX_SCENARIO",
    help="Scenario JSON file (env: CASEMIX_SCENARIO).",
)


@click.group()
def main() -> None:
    """Hospital case-mix planning: bounds, throughput, alterations, comparison."""


@main.command()
@scenario_option
@out_option
def bounds(scenario_path: str, out_format: str) -> None:
    """Per-type patient ceilings (whole hospital dedicated to one type)."""
    stored = _load(scenario_path)
    rows = []

    def on_result(index, type_id, value):
        if out_format == "table":
            click.echo(f"  {type_id}: {value:.3f}")

    computed = capacity.bound_analysis(stored.scenario, on_result=on_result)
    effective = capacity.effective_type_bounds(stored.scenario, computed=computed)
    for t, cv, ev in zip(stored.scenario.patient_types, computed, effective):
        rows.append([t.id, f"{cv:.3f}", f"{ev:.3f}"])
    _emit_table(["type", "computed", "effective"], rows, out_format)


@main.command()
@scenario_option
@click.option("--mix", "mix_text", default=None,
              help="Case-mix fractions, e.g. '0.05,0.43,...'; defaults to the scenario mix.")
@out_option
def solve(scenario_path: str, mix_text: str | None, out_format: str) -> None:
    """Maximum treatable cohort under the required case mix."""
    stored = _load(scenario_path)
    s = stored.scenario
    mix = _parse_vector(mix_text) if mix_text else s.mix_fractions()
    try:
        res = capacity.max_throughput(s, mix=mix)
    except ValueError as exc:
        raise _fail(str(exc))
    if res.status != "optimal":
        raise _fail(f"no feasible cohort: {res.message}")
    rows = [
        [t.id, _round2(v)] for t, v in zip(s.patient_types, res.case_mix)
    ]
    rows.append(["total", _round2(res.total)])
    _emit_table(["type", "patients"], rows, out_format)
    util_rows = [
        [zid, _round2(pct)] for zid, pct in capacity.report_utilization(res).items()
    ]
    _emit_table(["zone", "util %"], util_rows, out_format)


@main.command()
@scenario_option
@click.option("--type", "type_id", default=None, help="Patient type to force.")
@click.option("--sub-type", "sub_id", default=None, help="Sub-type to force instead.")
@click.option("--delta", required=True, type=float, help="Signed change in patients.")
@click.option("--method", type=click.Choice(["ssq", "lin", "eq"]), default="eq", show_default=True)
@click.option("--baseline", "baseline_text", default=None,
              help="Baseline mix; defaults to the scenario-mix optimum.")
@out_option
def alter(scenario_path, type_id, sub_id, delta, method, baseline_text, out_format) -> None:
    """Force one type (or sub-type) by DELTA and re-optimise the others."""
    if (type_id is None) == (sub_id is None):
        raise _fail("exactly one of --type / --sub-type is required")
    stored = _load(scenario_path)
    s = stored.scenario
    if baseline_text:
        baseline = np.asarray(_parse_vector(baseline_text), dtype=float)
        baseline_sub = None
    else:
        base = capacity.max_throughput(s, mix=s.mix_fractions())
        if base.status != "optimal":
            raise _fail("scenario has no feasible baseline; pass --baseline")
        baseline, baseline_sub = base.case_mix, base.sub_mix
    request = AlterationRequest(
        baseline=baseline,
        delta=delta,
        method=method,
        target_type=type_id,
        target_subtype=sub_id,
        type_bounds=stored.ensure_type_bounds(),
        sub_type_bounds=stored.ensure_sub_type_bounds() if sub_id else None,
        baseline_sub_mix=baseline_sub,
    )
    try:
        result = alter_subtype(s, request) if sub_id else alter_type(s, request)
    except ValueError as exc:
        raise _fail(str(exc))
    if result.status != "ok":
        raise _fail(f"alteration {result.status}: {result.message}")
    rows = []
    for g, t in enumerate(s.patient_types):
        before = baseline[g]
        after = result.new_mix[g]
        rows.append([t.id, _round2(before), _round2(after), f"{after - before:+.2f}"])
    _emit_table(["type", "before", "after", "change"], rows, out_format)
    tail = f"total {result.total:.2f}  impact {result.total_impact:+.2f}"
    if result.uniform_deviation is not None:
        tail += f"  level {result.uniform_deviation:.4f}"
    if result.approximate:
        tail += "  (approximate)"
    click.echo(tail)


@main.command()
@scenario_option
@click.option("--type", "type_id", required=True)
@click.option("--deltas", required=True, help="Comma list of signed changes.")
@click.option("--method", type=click.Choice(["ssq", "lin", "eq"]), default="eq", show_default=True)
@click.option("--baseline", "baseline_text", default=None)
@out_option
def sweep(scenario_path, type_id, deltas, method, baseline_text, out_format) -> None:
    """Run a list of alterations for one type; rows never abort the sweep."""
    stored = _load(scenario_path)
    s = stored.scenario
    if baseline_text:
        baseline = np.asarray(_parse_vector(baseline_text), dtype=float)
        baseline_sub = None
    else:
        base = capacity.max_throughput(s, mix=s.mix_fractions())
        baseline, baseline_sub = base.case_mix, base.sub_mix
    results = sweep_delta(
        s, type_id, _parse_vector(deltas), method,
        baseline=baseline,
        type_bounds=stored.ensure_type_bounds(),
        baseline_sub_mix=baseline_sub,
    )
    rows = []
    for d, r in zip(_parse_vector(deltas), results):
        if r.status != "ok":
            rows.append([f"{d:+g}", r.status, r.message, "", ""])
            continue
        mix = " ".join(_round2(v) for v in r.new_mix)
        rows.append([f"{d:+g}", r.status, mix, _round2(r.total), f"{r.total_impact:+.2f}"])
    _emit_table(["delta", "status", "new mix", "total", "impact"], rows, out_format)


@main.command()
@scenario_option
@click.option("--a", "a_text", required=True, help="First mix ('1,2,...' or @file.json).")
@click.option("--b", "b_text", required=True, help="Second mix.")
@click.option("--eps", "eps_text", default=None, help="Significance thresholds per type.")
@click.option("--subset", default=None, help="Comma list of type ids to restrict to.")
@click.option("--mode", type=click.Choice(["normalized", "eps-scaled"]), default="normalized",
              show_default=True)
@out_option
def compare(scenario_path, a_text, b_text, eps_text, subset, mode, out_format) -> None:
    """Adjudicate two case mixes via resultant gains and losses."""
    stored = _load(scenario_path)
    s = stored.scenario
    a = _parse_vector(a_text)
    b = _parse_vector(b_text)
    upper = stored.ensure_type_bounds()
    eps = _parse_vector(eps_text) if eps_text else [float(v) for v in upper]
    try:
        subset_idx = [s.type_index(t.strip()) for t in subset.split(",")] if subset else None
        rep = mcdm.compare(a, b, upper=upper, mode=mode,
                           eps=eps if mode == "eps-scaled" else None, subset=subset_idx)
        sim = mcdm.similarity(a, b, eps)
    except (ValueError, KeyError) as exc:
        raise _fail(str(exc))
    rows = []
    for g, t in enumerate(s.patient_types):
        flag = "(*)" if sim.per_type_significant[g] else ""
        rows.append([
            t.id, _round2(a[g]), _round2(b[g]), f"{b[g] - a[g]:+.2f}",
            f"{rep.deltas[g]:+.4f}", f"{rep.deltas[g] ** 2:.4f}", flag,
        ])
    _emit_table(
        ["type", "mix A", "mix B", "diff", "scaled", "scaled sq", "significant"],
        rows, out_format,
    )
    ratio = f"{rep.ratio:.3f}" if rep.ratio is not None else "undefined"
    verdict = {
        mcdm.VERDICT_A: "mix A preferred",
        mcdm.VERDICT_B: "mix B preferred",
        mcdm.VERDICT_EQUIVALENT: "equivalent",
    }[rep.verdict]
    click.echo(f"gain {rep.gain:.3f}  loss {rep.loss:.3f}  ratio {ratio}  -> {verdict}")
    click.echo(f"similarity {sim.los:.0f}%  dissimilarity {sim.lod:.0f}%")


@main.command()
@scenario_option
@click.option("--host", default="127.0.0.1", show_default=True, envvar="CASEMIX_HOST")
@click.option("--port", default=8000, show_default=True, type=int, envvar="CASEMIX_PORT")
@click.option("--state-dir", default=None, envvar="CASEMIX_STATE_DIR",
              help="Directory for session persistence.")
@click.option("--ui", "ui_dir", default=None, envvar="CASEMIX_UI",
              help="Directory with the built web UI to serve at /.")
def serve(scenario_path, host, port, state_dir, ui_dir) -> None:
    """Run the HTTP service for the interactive front end."""
    from .service import serve as run_service

    run_service(scenario_path, host=host, port=port, state_dir=state_dir, ui_dir=ui_dir)


@main.command("init-scenarios")
@click.argument("directory", type=click.Path(file_okay=False))
def init_scenarios(directory: str) -> None:
    """Write the built-in demonstration scenarios as JSON files."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    scenarios = (
        ("demo.json", demo_scenario()),
        ("surge.json", surge_scenario()),
        ("demo-alteration.json", alteration_study_scenario()),
    )
    for name, scenario in scenarios:
        violations = validate_scenario(scenario)
        if violations:
            raise _fail(f"built-in scenario invalid: {violations}")
        save_scenario(from_scenario(scenario), out / name)
        click.echo(f"wrote {out / name}")


if __name__ == "__main__":
    main()
