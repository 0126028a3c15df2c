"""Bit-stable run serialization: delimited series, snapshots, and a manifest.

All floats are written in their shortest round-trip decimal form, so two
identical runs produce byte-identical files and content hashes.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from .config import parse_config_text
from .errors import InputError
from .grid import State, build_grid
from .integrate import RunOutput

__all__ = ["emit_outputs", "load_run", "write_manifest_bounds"]


def _fmt(value) -> str:
    return repr(float(value))


def _file_sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _moment_columns(run: RunOutput):
    if run.config is not None:
        return list(run.config.moment_orders)
    k0 = run.law.k0
    return [k0, 1.0, 1.0 + k0]


def _snapshot_name(t: float) -> str:
    return f"snapshot_{_fmt(t)}.csv"


def write_manifest_bounds(run: RunOutput) -> dict:
    """Regime classification and the applicable constants for a run."""
    regime = bounds_mod.classify_regime(run.kernel, run.law)
    entry = {
        "regime": regime.value,
        "checklist": bounds_mod.hypothesis_checklist(run.kernel, run.law),
    }
    first = run.states[0]
    reps = run.grid.reps
    k0 = run.law.k0
    m_k0 = float(np.sum(reps**k0 * first.contents))
    m_k0p1 = float(np.sum(reps ** (1.0 + k0) * first.contents))
    if regime in (bounds_mod.Regime.GLOBAL_EXISTENCE, bounds_mod.Regime.LOCAL_EXISTENCE):
        report = bounds_mod.existence_bounds(run.kernel, run.law, run.rho, m_k0, m_k0p1)
        ts = [t for t in run.times if t < report.t_k0]
        report.c1_table = [(float(t), report.c1_of(float(t))) for t in ts]
        entry["existence"] = report.to_dict()
    if regime is bounds_mod.Regime.NON_EXISTENCE:
        moment_fn = lambda k: float(np.sum(reps**k * first.contents))
        report = bounds_mod.nonexistence_bound(
            run.kernel, run.law, run.rho, moment_fn
        )
        entry["nonexistence"] = report.to_dict()
    return entry


def emit_outputs(run: RunOutput, out_dir) -> dict:
    """Write moments.csv, one snapshot CSV per time, and manifest.json.

    Returns the manifest dictionary (also written to disk), which echoes
    the resolved configuration, the regime classification with its
    constants, and a content hash over the delimited files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = run.grid

    orders = _moment_columns(run)
    header = ["t"] + [f"M_{_fmt(k)}" for k in orders] + ["dust_mass", "clip_mass"]
    lines = [",".join(header)]
    series = [run.moments(k) for k in orders]
    for row, t in enumerate(run.times):
        cells = [_fmt(t)]
        cells += [_fmt(col[row]) for col in series]
        cells += [_fmt(run.states[row].dust_mass), _fmt(run.states[row].clip_mass)]
        lines.append(",".join(cells))
    moments_path = out / "moments.csv"
    moments_path.write_text("\n".join(lines) + "\n")

    widths = grid.widths()
    snapshot_files = []
    for state, t in zip(run.states, run.times):
        name = _snapshot_name(t)
        rows = ["cell_index,edge_lo,edge_hi,rep,content,density"]
        for i in range(grid.n_cells):
            rows.append(
                ",".join(
                    [
                        str(i),
                        _fmt(grid.edges[i]),
                        _fmt(grid.edges[i + 1]),
                        _fmt(grid.reps[i]),
                        _fmt(state.contents[i]),
                        _fmt(state.contents[i] / widths[i]),
                    ]
                )
            )
        (out / name).write_text("\n".join(rows) + "\n")
        snapshot_files.append({"t": float(t), "file": name})

    files = {"moments.csv": _file_sha256(moments_path)}
    for entry in snapshot_files:
        files[entry["file"]] = _file_sha256(out / entry["file"])
    combined = hashlib.sha256(
        "\n".join(f"{name}:{digest}" for name, digest in sorted(files.items())).encode()
    ).hexdigest()

    manifest = {
        "config": run.config.resolved() if run.config is not None else None,
        "rho": run.rho,
        "bounds": write_manifest_bounds(run),
        "snapshots": snapshot_files,
        "files": files,
        "content_hash": combined,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def load_run(run_dir) -> RunOutput:
    """Reconstruct a RunOutput from an emitted run directory."""
    run_dir = Path(run_dir)
    manifest_path = run_dir / "manifest.json"
    if not manifest_path.is_file():
        raise InputError(f"{run_dir} has no manifest.json")
    manifest = json.loads(manifest_path.read_text())
    if not manifest.get("config"):
        raise InputError(f"{manifest_path} carries no configuration echo")
    text = "\n".join(f"{k} = {v}" for k, v in manifest["config"].items())
    config = parse_config_text(text, name=str(manifest_path), base_dir=str(run_dir))
    grid = build_grid(config.x_min, config.x_max, config.n_cells)

    moments = {}
    with open(run_dir / "moments.csv") as handle:
        header = handle.readline().strip().split(",")
        data = np.loadtxt(handle, delimiter=",", ndmin=2)
    for col, name in enumerate(header):
        moments[name] = data[:, col]

    times = []
    states = []
    for row, entry in enumerate(manifest["snapshots"]):
        table = np.loadtxt(run_dir / entry["file"], delimiter=",", skiprows=1, ndmin=2)
        if table.shape[0] != grid.n_cells:
            raise InputError(f"{entry['file']} does not match the manifest grid")
        contents = table[:, 4]
        states.append(
            State(
                contents=contents,
                dust_mass=float(moments["dust_mass"][row]),
                time=float(entry["t"]),
                clip_mass=float(moments["clip_mass"][row]),
            )
        )
        times.append(float(entry["t"]))
    return RunOutput(
        grid=grid,
        kernel=config.kernel,
        law=config.law,
        times=np.asarray(times),
        states=states,
        config=config,
    )
