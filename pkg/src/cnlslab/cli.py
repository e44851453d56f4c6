"""Command-line entry point, JSON run configs, and artifact I/O.

Subcommands: ground-state, soliton, evolve, construct, spectrum, scan.
Every command takes --config PATH (a schema-checked JSON document with
"schema": 1 and no unknown keys) plus --out DIR, --jobs N and --dry-run.
Exit codes: 0 ok, 1 config error, 2 solver failure, 3 blow-up, 4 I/O.

Commands are deterministic given their config (seeds live in the config);
reruns produce byte-identical artifacts except for the timestamp kept in
the summary JSON metadata block.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import jsonschema
import numpy as np

from . import fieldio
from .dynamics import EvolveConfig, evolve
from .errors import BlowUpError, BoxTooSmallError, CnlsError, ConfigError, SolverError
from .experiments import (
    CSV_COLUMNS,
    ConstructionConfig,
    ConstructionReport,
    MonitorSettings,
    RateFit,
    run_construction,
    threshold_scan,
)
from .functionals import energy, system_invariants
from .grid import FieldPair, Grid, box_sizing_length, make_grid, zero_field
from .linops import compute_spectral_report, coercivity_estimate, save_spectral_report
from .profiles import Profile, ground_state_1d, petviashvili, residual
from .solitons import SolitonFamily, SolitonParams, pair_solitons

SCHEMA_VERSION = 1

_NUM = {"type": "number"}
_VEC = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 1, "maxItems": 3},
    ]
}

_GRID = {
    "type": "object",
    "additionalProperties": False,
    "required": ["dim", "n", "length"],
    "properties": {
        "dim": {"type": "integer", "enum": [1, 2, 3]},
        "n": {
            "oneOf": [
                {"type": "integer"},
                {"type": "array", "items": {"type": "integer"}, "minItems": 1, "maxItems": 3},
            ]
        },
        "length": _VEC,
    },
}

_PARAMS = {
    "type": "object",
    "additionalProperties": False,
    "required": ["omega", "gamma", "x0", "v", "mu"],
    "properties": {
        "omega": _NUM,
        "gamma": _NUM,
        "x0": _VEC,
        "v": _VEC,
        "mu": _NUM,
    },
}

_FAMILY = {
    "type": "object",
    "additionalProperties": False,
    "required": ["first", "second"],
    "properties": {
        "first": _PARAMS,
        "second": _PARAMS,
        "profile": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"type": "string", "enum": ["ground_state", "file"]},
                "path": {"type": "string"},
            },
        },
    },
}

_EVOLVE = {
    "type": "object",
    "additionalProperties": False,
    "required": ["dt", "mu1", "mu2", "beta"],
    "properties": {
        "dt": _NUM,
        "mu1": _NUM,
        "mu2": _NUM,
        "beta": _NUM,
        "dealias": {"type": "boolean"},
        "record_every": {"type": "integer", "minimum": 1},
    },
}

_EXPERIMENT = {
    "type": "object",
    "additionalProperties": False,
    "required": ["T0", "Tn_schedule"],
    "properties": {
        "T0": _NUM,
        "Tn_schedule": {"type": "array", "items": _NUM, "minItems": 1},
        "seed": {"type": "integer"},
        "monitors": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "tail_rho": _NUM,
                "tail_kappa": _NUM,
            },
        },
    },
}

_OUTPUT = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "directory": {"type": "string"},
        "formats": {"type": "array", "items": {"type": "string", "enum": ["csv", "bin"]}},
        "snapshot_every": {"type": "integer", "minimum": 1},
    },
}

_GROUND_STATE = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "tol": _NUM,
        "max_iter": {"type": "integer", "minimum": 1},
        "gamma_exponent": _NUM,
    },
}

_TIME = {
    "type": "object",
    "additionalProperties": False,
    "required": ["t_from", "t_to"],
    "properties": {"t_from": _NUM, "t_to": _NUM},
}

_INITIAL = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"type": "string", "enum": ["soliton_pair", "file", "zero"]},
        "path_first": {"type": "string"},
        "path_second": {"type": "string"},
    },
}

_SPECTRUM = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "k": {"type": "integer", "minimum": 1},
        "tol": _NUM,
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "params": _PARAMS,
        "coercivity": {"type": "boolean"},
    },
}

_SCAN = {
    "type": "object",
    "additionalProperties": False,
    "required": ["v_list"],
    "properties": {"v_list": {"type": "array", "items": _NUM, "minItems": 1}},
}


def _schema(required: list[str], optional: list[str]) -> dict:
    blocks = {
        "grid": _GRID,
        "family": _FAMILY,
        "evolve": _EVOLVE,
        "experiment": _EXPERIMENT,
        "output": _OUTPUT,
        "ground_state": _GROUND_STATE,
        "time": _TIME,
        "initial_data": _INITIAL,
        "spectrum": _SPECTRUM,
        "scan": _SCAN,
        "soliton": {
            "type": "object",
            "additionalProperties": False,
            "required": ["t"],
            "properties": {"t": _NUM},
        },
    }
    props = {"schema": {"type": "integer", "enum": [SCHEMA_VERSION]}}
    for name in required + optional:
        props[name] = blocks[name]
    return {
        "type": "object",
        "additionalProperties": False,
        "required": ["schema"] + required,
        "properties": props,
    }


COMMAND_SCHEMAS = {
    "ground-state": _schema(["grid"], ["ground_state", "output"]),
    "soliton": _schema(["grid", "family", "soliton"], ["output"]),
    "evolve": _schema(["grid", "evolve", "time", "initial_data"], ["family", "output"]),
    "construct": _schema(["grid", "family", "evolve", "experiment"], ["output"]),
    "spectrum": _schema(["grid"], ["spectrum", "output"]),
    "scan": _schema(["grid", "family", "evolve", "experiment", "scan"], ["output"]),
}


# ---------------------------------------------------------------------------
# config loading and assembly
# ---------------------------------------------------------------------------

def load_config(path, command: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"malformed JSON in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    try:
        jsonschema.validate(doc, COMMAND_SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        loc = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config {path} at {loc}: {exc.message}") from exc
    return doc


def _build_grid(doc: dict) -> Grid:
    g = doc["grid"]
    return make_grid(g["dim"], g["n"], g["length"])


def _build_params(block: dict, dim: int) -> SolitonParams:
    x0 = np.atleast_1d(np.asarray(block["x0"], dtype=float))
    v = np.atleast_1d(np.asarray(block["v"], dtype=float))
    if x0.size != dim or v.size != dim:
        raise ConfigError(f"x0/v must have {dim} components")
    return SolitonParams(
        omega=float(block["omega"]),
        gamma=float(block["gamma"]),
        x0=tuple(x0),
        v=tuple(v),
        mu=float(block["mu"]),
    )


def _build_profile(doc: dict, grid: Grid) -> Profile:
    block = doc.get("family", {}).get("profile", {"kind": "ground_state"})
    kind = block.get("kind", "ground_state")
    if kind == "file":
        if "path" not in block:
            raise ConfigError("profile kind 'file' requires a path")
        f = fieldio.read_field(block["path"])
        if f.grid != grid:
            raise ConfigError("profile file grid does not match the run grid")
        return Profile(field=f, residual=residual(f), kind="external")
    if grid.dim == 1:
        return ground_state_1d(grid)
    if grid.dim == 2:
        gs = doc.get("ground_state", {})
        return petviashvili(
            grid,
            tol=gs.get("tol", 1e-12),
            max_iter=gs.get("max_iter", 500),
            gamma_exponent=gs.get("gamma_exponent", 1.5),
        )
    raise ConfigError("3D ground states are not generated; supply a profile file")


def _build_family(doc: dict, grid: Grid) -> SolitonFamily:
    fam = doc["family"]
    p1 = _build_params(fam["first"], grid.dim)
    p2 = _build_params(fam["second"], grid.dim)
    prof = _build_profile(doc, grid)
    return SolitonFamily(params=(p1, p2), profiles=(prof, prof))


def _build_evolve(doc: dict, grid: Grid, direction: str = "forward") -> EvolveConfig:
    e = doc["evolve"]
    # default: 2/3-rule dealiasing on for 2D/3D, off for 1D
    return EvolveConfig(
        dt=float(e["dt"]),
        mu1=float(e["mu1"]),
        mu2=float(e["mu2"]),
        beta=float(e["beta"]),
        direction=direction,
        dealias=bool(e.get("dealias", grid.dim >= 2)),
        record_every=int(e.get("record_every", 1)),
    )


def _check_family_couplings(family: SolitonFamily, ecfg: EvolveConfig) -> None:
    if family.params[0].mu != ecfg.mu1 or family.params[1].mu != ecfg.mu2:
        raise ConfigError(
            "family self-interactions (mu) disagree with the evolve block mu1/mu2"
        )


def _outdir(doc: dict, override: str | None) -> Path:
    d = override or doc.get("output", {}).get("directory", "out")
    path = Path(d)
    path.mkdir(parents=True, exist_ok=True)
    return path


# ---------------------------------------------------------------------------
# artifact writers
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (np.floating, float)):
        return repr(float(v))
    return str(v)


def write_rows_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _fit_dict(fit: RateFit | None) -> dict | None:
    if fit is None:
        return None
    return {
        "rate": fit.rate,
        "log_amplitude": fit.log_amplitude,
        "r_squared": fit.r_squared,
        "samples": fit.samples,
        "flagged": fit.flagged,
    }


def write_construction_outputs(report: ConstructionReport, outdir: Path) -> dict:
    run_files = []
    for run in report.runs:
        name = f"construct_T{run.Tn:g}.csv"
        cols = run.columns
        rows = []
        for i, t in enumerate(run.times):
            row = [t]
            for key in CSV_COLUMNS[1:]:
                row.append(cols[key][i])
            rows.append(row)
        write_rows_csv(outdir / name, CSV_COLUMNS, rows)
        run_files.append(name)

    fits_json = {}
    for tn, f in report.fits.items():
        fits_json[f"{tn:g}"] = {
            "l2": _fit_dict(f["l2"]),
            "l2_envelope_C": f["l2_envelope_C"],
            "action": _fit_dict(f["action"]),
            "interaction_slope": f["interaction_slope"],
            "interaction_r2": f["interaction_r2"],
            "source_slope": f["source_slope"],
        }
    summary = {
        "schema": SCHEMA_VERSION,
        "metadata": {"created": time.strftime("%Y-%m-%dT%H:%M:%S")},
        "rate": report.rate,
        "v_star": report.v_star,
        "omega_star": report.omega_star,
        "T0": report.T0,
        "schedule": list(report.schedule),
        "runs": [
            {"Tn": run.Tn, "csv": name} for run, name in zip(report.runs, run_files)
        ],
        "fits": fits_json,
        "verdicts": report.verdicts,
    }
    if report.cauchy is not None:
        c = report.cauchy
        summary["cauchy"] = {
            "pairs": [list(p) for p in c.pairs],
            "differences": c.differences,
            "control_differences": c.control_differences,
            "ratios": c.ratios,
            "fitted_rate": c.fitted_rate,
            "passed_raw": c.passed_raw,
            "passed_floored": c.passed_floored,
        }
    with open(outdir / "construct_summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
    return summary


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _derived_line(doc: dict, grid: Grid) -> str:
    if "family" not in doc:
        return f"grid: dim={grid.dim} n={grid.n} length={grid.length}"
    fam = _build_family(doc, grid)
    t_max = max(doc.get("experiment", {}).get("Tn_schedule", [0.0]))
    max_x0 = max(float(np.linalg.norm(p.x0)) for p in fam.params)
    max_v = max(float(np.linalg.norm(p.v)) for p in fam.params)
    need = box_sizing_length(max_x0, max_v, t_max, fam.omega_min)
    ok = min(grid.length) >= need
    return (
        f"v_star={fam.v_star:g} omega_star={fam.omega_star:g} "
        f"rate={fam.decay_rate:g} box_needed={need:g} box={min(grid.length):g} "
        f"box_ok={ok}"
    )


def cmd_ground_state(doc: dict, outdir: Path, jobs: int) -> int:
    grid = _build_grid(doc)
    gs = doc.get("ground_state", {})
    if grid.dim == 1:
        prof = ground_state_1d(grid)
    elif grid.dim == 2:
        prof = petviashvili(
            grid,
            tol=gs.get("tol", 1e-12),
            max_iter=gs.get("max_iter", 500),
            gamma_exponent=gs.get("gamma_exponent", 1.5),
        )
    else:
        raise ConfigError("ground states are generated in 1D and 2D only")
    fieldio.write_field(outdir / "profile.field", prof.field)
    fieldio.write_slice_csv(outdir / "profile_slice.csv", prof.field)
    sidecar = {
        "schema": SCHEMA_VERSION,
        "kind": prof.kind,
        "residual": prof.residual,
        "tolerance": gs.get("tol", 1e-12),
    }
    with open(outdir / "profile.json", "w") as fh:
        json.dump(sidecar, fh, indent=2)
    print(f"ground state written: kind={prof.kind} residual={prof.residual:.3e}")
    return 0


def cmd_soliton(doc: dict, outdir: Path, jobs: int) -> int:
    grid = _build_grid(doc)
    fam = _build_family(doc, grid)
    t = float(doc["soliton"]["t"])
    pair = pair_solitons(fam, t, grid)
    fieldio.write_field(outdir / "soliton_1.field", pair.first)
    fieldio.write_field(outdir / "soliton_2.field", pair.second)
    fieldio.write_slice_csv(outdir / "soliton_1_slice.csv", pair.first)
    fieldio.write_slice_csv(outdir / "soliton_2_slice.csv", pair.second)
    print(f"soliton pair written at t={t:g}")
    return 0


def _conservation_header(dim: int) -> list[str]:
    cols = ["t", "E1", "E2", "Etot", "M1", "M2", "Px_tot"]
    if dim >= 2:
        cols.append("Py_tot")
    if dim >= 3:
        cols.append("Pz_tot")
    cols.append("overlap")
    return cols


def cmd_evolve(doc: dict, outdir: Path, jobs: int) -> int:
    grid = _build_grid(doc)
    tblk = doc["time"]
    t_from, t_to = float(tblk["t_from"]), float(tblk["t_to"])
    direction = "forward" if t_to >= t_from else "backward"
    ecfg = _build_evolve(doc, grid, direction)

    init = doc["initial_data"]
    if init["kind"] == "zero":
        pair = FieldPair(zero_field(grid), zero_field(grid))
    elif init["kind"] == "file":
        if "path_first" not in init or "path_second" not in init:
            raise ConfigError("initial_data kind 'file' requires path_first and path_second")
        pair = FieldPair(
            fieldio.read_field(init["path_first"]), fieldio.read_field(init["path_second"])
        )
        if pair.grid != grid:
            raise ConfigError("initial data grid does not match the run grid")
    else:
        if "family" not in doc:
            raise ConfigError("initial_data kind 'soliton_pair' requires a family block")
        fam = _build_family(doc, grid)
        _check_family_couplings(fam, ecfg)
        pair = pair_solitons(fam, t_from, grid)

    mu1, mu2, beta = ecfg.mu1, ecfg.mu2, ecfg.beta
    header = _conservation_header(grid.dim)

    def conservation_row(t, state):
        e1 = energy(state.first, mu1)
        e2 = energy(state.second, mu2)
        inv = system_invariants(state, mu1, mu2, beta)
        row = {"E1": e1, "E2": e2, "Etot": inv.total_energy,
               "M1": inv.masses[0], "M2": inv.masses[1]}
        labels = ["Px_tot", "Py_tot", "Pz_tot"][: grid.dim]
        for lab, val in zip(labels, inv.total_momentum):
            row[lab] = val
        row["overlap"] = inv.coupling_overlap
        return row

    snapshot_every = doc.get("output", {}).get("snapshot_every")
    traj = evolve(pair, t_from, t_to, ecfg, monitors=[conservation_row],
                  snapshot_every=snapshot_every)

    rows = [[r[c] for c in header] for r in traj.monitor_rows]
    write_rows_csv(outdir / "trajectory.csv", header, rows)
    if traj.snapshots is not None:
        for i, (snap, ts) in enumerate(zip(traj.snapshots, traj.snapshot_times)):
            fieldio.write_field(outdir / f"snapshot_{i:04d}_1.field", snap.first)
            fieldio.write_field(outdir / f"snapshot_{i:04d}_2.field", snap.second)
        with open(outdir / "snapshots.json", "w") as fh:
            json.dump({"schema": SCHEMA_VERSION, "times": traj.snapshot_times,
                       "count": len(traj.snapshots)}, fh, indent=2)
    print(f"trajectory written: {len(rows)} rows over [{t_from:g}, {t_to:g}]")
    return 0


def cmd_construct(doc: dict, outdir: Path, jobs: int) -> int:
    grid = _build_grid(doc)
    fam = _build_family(doc, grid)
    ecfg = _build_evolve(doc, grid, "backward")
    _check_family_couplings(fam, ecfg)
    exp = doc["experiment"]
    mon = exp.get("monitors", {})
    cfg = ConstructionConfig(
        family=fam,
        T0=float(exp["T0"]),
        Tn_schedule=tuple(exp["Tn_schedule"]),
        evolve=ecfg,
        monitors=MonitorSettings(
            tail_rho=mon.get("tail_rho"), tail_kappa=mon.get("tail_kappa")
        ),
        seed=int(exp.get("seed", 0)),
    )
    report = run_construction(cfg, jobs=jobs)
    write_construction_outputs(report, outdir)
    ok = report.verdicts["bootstrap_ok_floored"]
    print(f"construction done: rate={report.rate:g} bootstrap_ok_floored={ok}")
    return 0


def cmd_spectrum(doc: dict, outdir: Path, jobs: int) -> int:
    grid = _build_grid(doc)
    spec = doc.get("spectrum", {})
    if grid.dim == 1:
        prof = ground_state_1d(grid)
        k = spec.get("k", 6)
    elif grid.dim == 2:
        prof = petviashvili(grid)
        k = spec.get("k", 10)
    else:
        raise ConfigError("spectra are computed in 1D and 2D only")
    tol = spec.get("tol", 1e-6)
    report = compute_spectral_report(prof, k=k, tol=tol)
    if spec.get("coercivity", True):
        pblock = spec.get("params")
        if pblock is not None:
            params = _build_params(pblock, grid.dim)
        else:
            params = SolitonParams(
                omega=1.0, gamma=0.0, x0=(0.0,) * grid.dim, v=(0.0,) * grid.dim, mu=1.0
            )
        co = coercivity_estimate(
            prof, params, trials=spec.get("trials", 200), seed=spec.get("seed", 0),
            report=report,
        )
        report = replace(report, coercivity=co)
    save_spectral_report(report, outdir)
    print(
        f"spectrum written: nu0={report.nu0} "
        f"lowest={[round(float(v), 6) for v in report.eigenvalues[:3]]}"
    )
    return 0


def cmd_scan(doc: dict, outdir: Path, jobs: int) -> int:
    grid = _build_grid(doc)
    fam = _build_family(doc, grid)
    ecfg = _build_evolve(doc, grid, "backward")
    _check_family_couplings(fam, ecfg)
    exp = doc["experiment"]
    mon = exp.get("monitors", {})
    base = ConstructionConfig(
        family=fam,
        T0=float(exp["T0"]),
        Tn_schedule=tuple(exp["Tn_schedule"]),
        evolve=ecfg,
        monitors=MonitorSettings(
            tail_rho=mon.get("tail_rho"), tail_kappa=mon.get("tail_kappa")
        ),
        seed=int(exp.get("seed", 0)),
    )
    result = threshold_scan(base, doc["scan"]["v_list"], jobs=jobs)
    summary = {
        "schema": SCHEMA_VERSION,
        "metadata": {"created": time.strftime("%Y-%m-%dT%H:%M:%S")},
        "points": result["points"],
        "onset": result["onset"],
        "violations_at_small_end": result["violations_at_small_end"],
    }
    with open(outdir / "scan_summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
    print(f"scan done: onset={result['onset']}")
    return 0


COMMANDS = {
    "ground-state": cmd_ground_state,
    "soliton": cmd_soliton,
    "evolve": cmd_evolve,
    "construct": cmd_construct,
    "spectrum": cmd_spectrum,
    "scan": cmd_scan,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cnlslab",
        description="Spectral laboratory for coupled cubic Schrodinger systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", default=None, help="output directory override")
        p.add_argument("--jobs", type=int, default=1, help="max parallel workers")
        p.add_argument("--dry-run", action="store_true",
                       help="validate the config and print derived quantities")
    args = parser.parse_args(argv)

    try:
        doc = load_config(args.config, args.command)
        grid = _build_grid(doc)
        if args.dry_run:
            print(_derived_line(doc, grid))
            return 0
        outdir = _outdir(doc, args.out)
        return COMMANDS[args.command](doc, outdir, max(1, args.jobs))
    except (ConfigError, ValueError, BoxTooSmallError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2
    except BlowUpError as exc:
        print(f"blow-up detected: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
