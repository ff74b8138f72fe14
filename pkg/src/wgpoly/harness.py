"""Convergence-study driver: refinement loops, rates and table emission."""

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import analysis, mesh as meshmod, solve as solvemod
from .assembly import assemble
from .mesh import (Mesh, build_polygon_grid, build_triangle_grid, load_mesh,
                   refine_uniform)
from .solve import SolveStatus, solve_spd


class ConfigError(Exception):
    pass


class NonPositiveError(Exception):
    pass


@dataclass(frozen=True)
class ExactSolution:
    """Manufactured solution: u, its gradient and the source -Laplacian."""

    u: callable
    grad: callable
    f: callable


def _sin_u(p):
    return np.sin(np.pi * p[:, 0]) * np.sin(np.pi * p[:, 1])


def _sin_grad(p):
    sx, cx = np.sin(np.pi * p[:, 0]), np.cos(np.pi * p[:, 0])
    sy, cy = np.sin(np.pi * p[:, 1]), np.cos(np.pi * p[:, 1])
    return np.pi * np.column_stack([cx * sy, sx * cy])


def _sin_f(p):
    return 2.0 * np.pi ** 2 * _sin_u(p)


SOLUTIONS = {"sin": ExactSolution(_sin_u, _sin_grad, _sin_f)}

#: level caps per element degree (the rows the reference tables report);
#: keeps desk-scale runtimes
LEVEL_CAP = {1: 8, 2: 8, 3: 8, 4: 7}


@dataclass(frozen=True)
class StudyConfig:
    family: str = "triangle"        # triangle | polygon | mesh file path
    k: int = 1
    j: object = "auto"              # explicit int or "auto"
    levels: tuple = (1, 3)          # inclusive (first, last)
    tol: float = 1e-12
    format: str = "csv"             # csv | markdown
    exact: str = "sin"
    expect_singular: bool = False

    def validate(self):
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.exact not in SOLUTIONS:
            raise ConfigError(f"unknown exact solution {self.exact!r}")
        if self.format not in ("csv", "markdown"):
            raise ConfigError(f"unknown format {self.format!r}")
        lo, hi = self.levels
        if lo > hi:
            raise ConfigError(f"empty level range {lo}..{hi}")
        cap = LEVEL_CAP.get(self.k, 6)
        if self.family in ("triangle", "polygon") and hi > cap:
            raise ConfigError(f"level {hi} exceeds cap {cap} for k={self.k}")
        if self.j != "auto":
            j = int(self.j)
            if j <= self.k and not self.expect_singular:
                raise ConfigError(
                    f"j={j} <= k={self.k} needs expect_singular")


def parse_levels(text):
    """'a..b' or 'a' -> inclusive (a, b)."""
    try:
        if ".." in text:
            a, b = text.split("..")
            return int(a), int(b)
        v = int(text)
        return v, v
    except ValueError:
        raise ConfigError(f"bad level range {text!r}") from None


def config_from_json(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"bad config JSON: {e}") from None
    if not isinstance(data, dict):
        raise ConfigError("config JSON must be an object")
    known = set(StudyConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config fields {sorted(unknown)}")
    if isinstance(data.get("levels"), str):
        data["levels"] = parse_levels(data["levels"])
    elif "levels" in data:
        data["levels"] = tuple(data["levels"])
    return StudyConfig(**data)


@dataclass
class ConvergenceRecord:
    level: int
    cells: int
    dofs: int
    status: str                      # ok | singular | no_convergence
    l2_error: float = None
    energy_error: float = None
    l2_rate: float = None
    energy_rate: float = None
    iterations: int = 0
    wall_time: float = 0.0


def _study_mesh(config, level, cache):
    if config.family == "triangle":
        return build_triangle_grid(level)
    if config.family == "polygon":
        return build_polygon_grid(level)
    base = cache.get("file_mesh")
    if base is None:
        with open(config.family) as fh:
            base = load_mesh(fh.read())
        cache["file_mesh"] = base
    m = base
    for _ in range(level - 1):
        m = refine_uniform(m)
    return m


def run_study(config):
    """Build/assemble/solve/measure across the configured levels."""
    config.validate()
    exact = SOLUTIONS[config.exact]
    records = []
    cache = {}
    lo, hi = config.levels
    for level in range(lo, hi + 1):
        t0 = time.perf_counter()
        try:
            m = _study_mesh(config, level, cache)
        except (OSError, meshmod.MeshError) as e:
            raise ConfigError(f"cannot build level {level} mesh: {e}") from e
        system = assemble(m, config.k, config.j, exact.f)
        report = solve_spd(system.A, system.b, tol=config.tol,
                           blocks=system.dofmap.free_blocks())
        rec = ConvergenceRecord(level, m.n_cells, system.dofmap.n_dofs,
                                "ok", iterations=report.iterations)
        if report.status == SolveStatus.SINGULAR:
            rec.status = "singular"
        elif report.status == SolveStatus.MAX_ITERATIONS:
            rec.status = "no_convergence"
        else:
            full = system.embed(report.x)
            err = analysis.compute_errors(full, exact, m, config.k, config.j)
            rec.l2_error = err.l2_error
            rec.energy_error = err.energy_error
        rec.wall_time = time.perf_counter() - t0
        records.append(rec)

    for prev, cur in zip(records, records[1:]):
        if prev.status == cur.status == "ok":
            cur.l2_rate = math.log2(prev.l2_error / cur.l2_error)
            cur.energy_rate = math.log2(prev.energy_error / cur.energy_error)
    return records


def compute_rates(errors):
    """log2 of consecutive error ratios under mesh halving."""
    errors = list(errors)
    if any(e <= 0 for e in errors):
        raise NonPositiveError(f"errors must be positive, got {errors}")
    return [math.log2(a / b) for a, b in zip(errors, errors[1:])]


def _fmt_err(v):
    return "" if v is None else f"{v:.3E}"


def _fmt_rate(v):
    return "" if v is None else f"{v:.2f}"


def emit_table(records, fmt="csv"):
    if fmt == "csv":
        lines = ["level,cells,dofs,l2_error,l2_rate,energy_error,"
                 "energy_rate,status"]
        for r in records:
            lines.append(",".join([
                str(r.level), str(r.cells), str(r.dofs),
                _fmt_err(r.l2_error), _fmt_rate(r.l2_rate),
                _fmt_err(r.energy_error), _fmt_rate(r.energy_rate),
                r.status]))
        return "\n".join(lines) + "\n"
    if fmt == "markdown":
        lines = ["| level | l2 error | rate | energy error | rate | status |",
                 "|---|---|---|---|---|---|"]
        for r in records:
            lines.append("| {} | {} | {} | {} | {} | {} |".format(
                r.level, _fmt_err(r.l2_error), _fmt_rate(r.l2_rate),
                _fmt_err(r.energy_error), _fmt_rate(r.energy_rate), r.status))
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown format {fmt!r}")


def parse_table(text):
    """Inverse of emit_table for the CSV format, at printed precision."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    records = []
    for ln in lines[1:]:
        parts = ln.split(",")
        records.append(ConvergenceRecord(
            level=int(parts[0]), cells=int(parts[1]), dofs=int(parts[2]),
            status=parts[7],
            l2_error=float(parts[3]) if parts[3] else None,
            l2_rate=float(parts[4]) if parts[4] else None,
            energy_error=float(parts[5]) if parts[5] else None,
            energy_rate=float(parts[6]) if parts[6] else None))
    return records
