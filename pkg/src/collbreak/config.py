"""Flat key-value configuration: parsing, validation, and problem assembly.

Grammar: one ``section.key = value`` per line, ``#`` starts a comment,
blank lines ignored.  Every key has a documented default, so an empty file
is a valid configuration.  Validation failures cite the offending key, the
line number, and the hypothesis they violate.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .daughter import DaughterLaw
from .errors import ConfigError, DomainError
from .grid import (
    SizeGrid,
    build_grid,
    exponential_state,
    monodisperse_state,
    table_state,
)
from .kernel import KernelSpec
from .scheme import precompute

__all__ = ["SimConfig", "parse_config", "parse_config_text", "build_problem", "with_x_min"]

_INIT_KINDS = ("monodisperse", "exponential", "table")

# key -> (parser, default); None defaults are resolved contextually.
_KEYS = {
    "kernel.lambda1": (float, 0.5),
    "kernel.lambda2": (float, 0.5),
    "kernel.truncation_n": (int, None),
    "daughter.nu": (float, -1.2),
    "daughter.k0": (float, 0.5),
    "grid.x_min": (float, 1e-3),
    "grid.x_max": (float, 10.0),
    "grid.n_cells": (int, 64),
    "init.kind": (str, "exponential"),
    "init.size": (float, 1.0),
    "init.mass": (float, None),
    "init.mean": (float, 1.0),
    "init.path": (str, None),
    "time.t_end": (float, 1.0),
    "time.snapshots": (str, "11"),
    "time.rel_tol": (float, 1e-8),
    "time.abs_tol": (float, 1e-12),
    "picard.max_iter": (int, 40),
    "picard.tol": (float, 1e-10),
    "output.dir": (str, None),
    "output.moments": (str, None),
}


@dataclass(frozen=True)
class SimConfig:
    """Fully validated simulation configuration."""

    kernel: KernelSpec
    law: DaughterLaw
    x_min: float
    x_max: float
    n_cells: int
    init_kind: str
    init_size: float
    init_mass: float | None
    init_mean: float
    init_path: str | None
    t_end: float
    snapshot_times: tuple
    rel_tol: float
    abs_tol: float
    picard_max_iter: int
    picard_tol: float
    moment_orders: tuple
    out_dir: str | None

    def resolved(self) -> dict:
        """Flat key -> value echo of every setting, defaults included."""
        out = {
            "kernel.lambda1": self.kernel.lambda1,
            "kernel.lambda2": self.kernel.lambda2,
            "daughter.nu": self.law.nu,
            "daughter.k0": self.law.k0,
            "grid.x_min": self.x_min,
            "grid.x_max": self.x_max,
            "grid.n_cells": self.n_cells,
            "init.kind": self.init_kind,
            "time.t_end": self.t_end,
            "time.snapshots": ",".join(repr(t) for t in self.snapshot_times),
            "time.rel_tol": self.rel_tol,
            "time.abs_tol": self.abs_tol,
            "picard.max_iter": self.picard_max_iter,
            "picard.tol": self.picard_tol,
            "output.moments": ",".join(repr(k) for k in self.moment_orders),
        }
        if self.kernel.truncation is not None:
            out["kernel.truncation_n"] = self.kernel.truncation
        if self.init_kind == "monodisperse":
            out["init.size"] = self.init_size
        if self.init_kind == "exponential":
            out["init.mean"] = self.init_mean
        if self.init_kind == "table":
            out["init.path"] = self.init_path
        if self.init_mass is not None:
            out["init.mass"] = self.init_mass
        if self.out_dir is not None:
            out["output.dir"] = self.out_dir
        return out

    def to_text(self) -> str:
        lines = []
        for key, value in self.resolved().items():
            if isinstance(value, float):
                value = repr(value)
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"


def _parse_lines(text: str, name: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'section.key = value'", line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEYS:
            raise ConfigError(f"unknown key in {name}", key=key, line=lineno)
        parser, _ = _KEYS[key]
        if parser is str:
            parsed = value
        else:
            try:
                parsed = parser(value)
            except ValueError:
                raise ConfigError(
                    f"expected {parser.__name__}, got {value!r}", key=key, line=lineno
                ) from None
        values[key] = (parsed, lineno)
    return values


def _snapshot_times(raw: str, t_end: float, line) -> tuple:
    raw = raw.strip()
    try:
        if "," in raw:
            times = sorted(float(tok) for tok in raw.split(",") if tok.strip())
        else:
            count = int(raw)
            if count < 1:
                raise ValueError
            if t_end == 0.0:
                times = [0.0]
            else:
                times = list(np.linspace(0.0, t_end, max(count, 2)))
    except ValueError:
        raise ConfigError(
            f"expected a count or comma list of times, got {raw!r}",
            key="time.snapshots",
            line=line,
        ) from None
    if any(t < 0.0 or t > t_end * (1.0 + 1e-12) for t in times):
        raise ConfigError(
            f"snapshot times must lie within [0, t_end={t_end}]",
            key="time.snapshots",
            line=line,
        )
    if not times or times[0] > 0.0:
        times.insert(0, 0.0)
    if times[-1] < t_end:
        times.append(t_end)
    deduped = [times[0]]
    for t in times[1:]:
        if t > deduped[-1]:
            deduped.append(t)
    return tuple(float(t) for t in deduped)


def parse_config_text(text: str, name: str = "<config>", base_dir: str | None = None) -> SimConfig:
    values = _parse_lines(text, name)

    def get(key):
        if key in values:
            return values[key][0]
        return _KEYS[key][1]

    def line_of(key):
        return values[key][1] if key in values else None

    nu = get("daughter.nu")
    if not -2.0 < nu <= 0.0:
        raise ConfigError(
            f"nu={nu} violates the admissible range nu in (-2, 0] of the "
            "power-law daughter family",
            key="daughter.nu",
            line=line_of("daughter.nu"),
        )
    k0 = get("daughter.k0")
    if not max(0.0, abs(nu) - 1.0) < k0 < 1.0:
        raise ConfigError(
            f"k0={k0} violates the hypothesis k0 > |nu|-1 = {abs(nu) - 1.0} "
            "(finite k0-th fragment moment) with k0 in (0, 1)",
            key="daughter.k0",
            line=line_of("daughter.k0"),
        )
    law = DaughterLaw(nu, k0)

    try:
        kernel = KernelSpec(
            get("kernel.lambda1"), get("kernel.lambda2"), get("kernel.truncation_n")
        )
    except DomainError as exc:
        key = "kernel.lambda1" if "lambda1" in str(exc) else "kernel.lambda2"
        if "truncation" in str(exc):
            key = "kernel.truncation_n"
        raise ConfigError(str(exc), key=key, line=line_of(key)) from None

    x_min, x_max = get("grid.x_min"), get("grid.x_max")
    n_cells = get("grid.n_cells")
    if not 0.0 < x_min < x_max:
        raise ConfigError(
            f"need 0 < x_min < x_max, got ({x_min}, {x_max})",
            key="grid.x_min",
            line=line_of("grid.x_min"),
        )
    if n_cells < 2:
        raise ConfigError(
            f"need at least 2 cells, got {n_cells}",
            key="grid.n_cells",
            line=line_of("grid.n_cells"),
        )

    kind = get("init.kind")
    if kind not in _INIT_KINDS:
        raise ConfigError(
            f"unknown kind {kind!r}; expected one of {_INIT_KINDS}",
            key="init.kind",
            line=line_of("init.kind"),
        )
    size = get("init.size")
    if kind == "monodisperse" and not x_min <= size <= x_max:
        raise ConfigError(
            f"monodisperse size {size} outside the grid [{x_min}, {x_max}]",
            key="init.size",
            line=line_of("init.size"),
        )
    mean = get("init.mean")
    if mean <= 0.0:
        raise ConfigError("mean size must be positive", key="init.mean", line=line_of("init.mean"))
    mass = get("init.mass")
    if mass is None and kind != "table":
        mass = 1.0
    if mass is not None and mass <= 0.0:
        raise ConfigError("mass must be positive", key="init.mass", line=line_of("init.mass"))
    path = get("init.path")
    if kind == "table":
        if path is None:
            raise ConfigError(
                "table initial data needs init.path", key="init.path", line=None
            )
        if base_dir is not None and not Path(path).is_absolute():
            path = str(Path(base_dir) / path)

    t_end = get("time.t_end")
    if t_end < 0.0:
        raise ConfigError("t_end must be non-negative", key="time.t_end", line=line_of("time.t_end"))
    snapshots = _snapshot_times(get("time.snapshots"), t_end, line_of("time.snapshots"))

    rel_tol, abs_tol = get("time.rel_tol"), get("time.abs_tol")
    if rel_tol < 0.0 or abs_tol < 0.0 or rel_tol + abs_tol == 0.0:
        raise ConfigError(
            "tolerances must be non-negative and not both zero",
            key="time.rel_tol",
            line=line_of("time.rel_tol"),
        )
    max_iter, picard_tol = get("picard.max_iter"), get("picard.tol")
    if max_iter < 1:
        raise ConfigError("max_iter must be >= 1", key="picard.max_iter", line=line_of("picard.max_iter"))
    if picard_tol <= 0.0:
        raise ConfigError("tol must be positive", key="picard.tol", line=line_of("picard.tol"))

    raw_orders = get("output.moments")
    if raw_orders is None:
        orders = (k0, 1.0, 1.0 + k0)
    else:
        try:
            orders = tuple(float(tok) for tok in raw_orders.split(",") if tok.strip())
        except ValueError:
            raise ConfigError(
                f"expected comma list of floats, got {raw_orders!r}",
                key="output.moments",
                line=line_of("output.moments"),
            ) from None
    threshold = abs(nu) - 1.0
    for k in orders:
        if k <= threshold:
            raise ConfigError(
                f"moment order k={k} violates k > |nu|-1 = {threshold} "
                "(divergent sublinear fragment moment)",
                key="output.moments",
                line=line_of("output.moments"),
            )

    return SimConfig(
        kernel=kernel,
        law=law,
        x_min=float(x_min),
        x_max=float(x_max),
        n_cells=int(n_cells),
        init_kind=kind,
        init_size=float(size),
        init_mass=None if mass is None else float(mass),
        init_mean=float(mean),
        init_path=path,
        t_end=float(t_end),
        snapshot_times=snapshots,
        rel_tol=float(rel_tol),
        abs_tol=float(abs_tol),
        picard_max_iter=int(max_iter),
        picard_tol=float(picard_tol),
        moment_orders=tuple(float(k) for k in orders),
        out_dir=get("output.dir"),
    )


def parse_config(path) -> SimConfig:
    """Parse and validate a configuration file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config_text(text, name=str(path), base_dir=str(path.parent))


def _read_table(path: str):
    """(size, density) columns from a plain CSV or an emitted snapshot file."""
    try:
        with open(path) as handle:
            first = handle.readline()
            rest = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read init.path {path}: {exc}", key="init.path") from None
    header = [tok.strip() for tok in first.strip().split(",")]
    if "rep" in header and "density" in header:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return data[:, header.index("rep")], data[:, header.index("density")]
    try:
        float(header[0])
        text = first + rest
        skip = 0
    except ValueError:
        text = rest
        skip = 1
    data = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)
    if data.shape[1] < 2:
        raise ConfigError("table needs two columns (size, density)", key="init.path")
    return data[:, 0], data[:, 1]


def initial_state(config: SimConfig, grid: SizeGrid):
    if config.init_kind == "monodisperse":
        return monodisperse_state(grid, config.init_size, config.init_mass)
    if config.init_kind == "exponential":
        return exponential_state(grid, config.init_mass, config.init_mean)
    sizes, densities = _read_table(config.init_path)
    return table_state(grid, sizes, densities, mass=config.init_mass)


def build_problem(config: SimConfig):
    """Grid + workspace + initial state for a configuration."""
    grid = build_grid(config.x_min, config.x_max, config.n_cells)
    workspace = precompute(grid, config.kernel, config.law)
    return workspace, initial_state(config, grid)


def with_x_min(config: SimConfig, x_min: float) -> SimConfig:
    """Same physics on a grid cut at ``x_min``, cells per decade preserved."""
    if not 0.0 < x_min < config.x_max:
        raise ConfigError(f"x_min={x_min} must lie in (0, x_max={config.x_max})")
    decades_old = math.log10(config.x_max / config.x_min)
    per_decade = config.n_cells / decades_old
    decades_new = math.log10(config.x_max / x_min)
    n_cells = max(8, round(per_decade * decades_new))
    return dataclasses.replace(config, x_min=float(x_min), n_cells=int(n_cells))
