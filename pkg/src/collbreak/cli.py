"""Command-line interface: simulate, bounds, regime, verify, distance, shatter-study.

Exit codes: 0 success, 2 configuration error, 3 numerical failure
(step-size collapse or fixed-point divergence), 4 failed verification.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bounds as bounds_mod
from . import diagnostics
from .config import build_problem, parse_config
from .errors import CollbreakError, ConfigError, ContractionError, InputError, StiffnessError
from .grid import moment
from .integrate import run as run_config
from .output import emit_outputs, load_run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VERIFICATION = 4


def _emit_json(payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True, default=float))


def _cmd_simulate(args) -> int:
    config = parse_config(args.config)
    out_dir = args.out or config.out_dir
    if out_dir is None:
        raise ConfigError("no output directory: set output.dir or pass --out")
    run = run_config(config)
    manifest = emit_outputs(run, out_dir)
    _emit_json(
        {
            "out_dir": str(out_dir),
            "snapshots": len(run.states),
            "final_time": float(run.times[-1]),
            "mass_on_grid": float(run.moments(1.0)[-1]),
            "dust_mass": float(run.dust[-1]),
            "content_hash": manifest["content_hash"],
        }
    )
    return EXIT_OK


def _initial_report(config):
    workspace, state0 = build_problem(config)
    grid = workspace.grid
    moment_fn = lambda k: moment(grid, state0, k)
    rho = moment_fn(1.0)
    payload = {
        "regime": bounds_mod.classify_regime(config.kernel, config.law).value,
        "checklist": bounds_mod.hypothesis_checklist(config.kernel, config.law),
        "initial_moments": {
            "rho": rho,
            "M_k0": moment_fn(config.law.k0),
            "M_1+k0": moment_fn(1.0 + config.law.k0),
        },
    }
    existence = bounds_mod.existence_bounds(
        config.kernel, config.law, rho, moment_fn(config.law.k0), moment_fn(1.0 + config.law.k0)
    )
    if existence.c1 is not None:
        ts = [t for t in config.snapshot_times if t < existence.t_k0]
        existence.c1_table = [(float(t), existence.c1_of(float(t))) for t in ts]
        payload["existence"] = existence.to_dict()
    nonexistence = bounds_mod.nonexistence_bound(config.kernel, config.law, rho, moment_fn)
    if nonexistence.t1_bound is not None:
        payload["nonexistence"] = nonexistence.to_dict()
    return payload


def _cmd_bounds(args) -> int:
    config = parse_config(args.config)
    _emit_json(_initial_report(config))
    return EXIT_OK


def _cmd_regime(args) -> int:
    config = parse_config(args.config)
    _emit_json(
        {
            "regime": bounds_mod.classify_regime(config.kernel, config.law).value,
            "checklist": bounds_mod.hypothesis_checklist(config.kernel, config.law),
        }
    )
    return EXIT_OK


def _cmd_verify(args) -> int:
    run = load_run(args.run_dir)
    verdicts = diagnostics.run_verification(run)
    _emit_json({"run_dir": str(args.run_dir), "checks": verdicts})
    if all(v["passed"] for v in verdicts):
        return EXIT_OK
    return EXIT_VERIFICATION


def _cmd_distance(args) -> int:
    run_a = load_run(args.run_dir_a)
    run_b = load_run(args.run_dir_b)
    if run_a.grid != run_b.grid:
        raise InputError("runs live on different grids")
    if not np.array_equal(run_a.times, run_b.times):
        raise InputError("runs have different snapshot meshes")
    k0 = run_a.law.k0
    distances = [
        diagnostics.weighted_distance(sa, sb, run_a.grid, k0)
        for sa, sb in zip(run_a.states, run_b.states)
    ]
    m_k0 = run_a.moments(k0) + run_b.moments(k0)
    k_high = 1.0 + k0 + run_a.kernel.lambda2
    m_high = run_a.moments(k_high) + run_b.moments(k_high)
    envelope = bounds_mod.gronwall_envelope(
        run_a.law, run_a.times, m_k0, m_high, distances[0]
    )
    rows = [
        {"t": float(t), "distance": float(d), "envelope": float(e)}
        for t, d, e in zip(run_a.times, distances, envelope)
    ]
    _emit_json(
        {
            "rows": rows,
            "within_envelope": bool(
                all(r["distance"] <= r["envelope"] * (1.0 + 1e-12) for r in rows)
            ),
        }
    )
    return EXIT_OK


def _cmd_shatter_study(args) -> int:
    config = parse_config(args.config)
    try:
        x_mins = [float(tok) for tok in args.xmins.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"bad --xmins list: {args.xmins!r}") from None
    study = diagnostics.shattering_study(config, x_mins)
    _emit_json(study.to_dict())
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="collbreak",
        description="Sectional solver and theorem-level diagnostics for "
        "collision-induced fragmentation with power-law daughter spectra.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate a configuration and emit CSV/manifest")
    p.add_argument("config")
    p.add_argument("--out", help="output directory (overrides output.dir)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("bounds", help="constants and horizons for a configuration")
    p.add_argument("config")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("regime", help="theorem coverage of a configuration")
    p.add_argument("config")
    p.set_defaults(func=_cmd_regime)

    p = sub.add_parser("verify", help="run the check battery on an emitted run")
    p.add_argument("run_dir")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("distance", help="weighted distance between two runs")
    p.add_argument("run_dir_a")
    p.add_argument("run_dir_b")
    p.set_defaults(func=_cmd_distance)

    p = sub.add_parser("shatter-study", help="dust fraction under x_min refinement")
    p.add_argument("config")
    p.add_argument("--xmins", required=True, help="comma list of grid cutoffs")
    p.set_defaults(func=_cmd_shatter_study)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (StiffnessError, ContractionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InputError, CollbreakError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
