"""Run specification files.

A spec is a UTF-8 text file of ``[section]`` headers and ``key = value``
lines; ``#`` starts a comment.  Every key is optional::

    [grid]
    L = 10
    N = 2048

    [initial]
    rho_family = sech        # none | sech | gaussian | table
    rho_amplitude = -0.8     # rho0 = 1 + amplitude * profile(width * x)
    rho_width = 7
    u_family = none

    [time]
    dt = 0.01
    t_end = 2.2

    [output]
    dir = out
    tasks = criteria, simulate, trace, diagnostics
    snapshot_times = 0, 1.5, 1.9, 2.0
    trace_alphas = 0
    plot_style = vB
"""

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from coldplasma.dynamics import SimConfig

FAMILIES = ("none", "sech", "gaussian", "table")
TASKS = ("criteria", "simulate", "trace", "diagnostics")
PLOT_STYLES = ("vB", "v")


class SpecError(ValueError):
    def __init__(self, message, line=None, path=None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.line = line


@dataclass(frozen=True)
class Profile:
    """A perturbation ``amplitude * shape(width * x)`` or a tabulated one."""

    family: str = "none"
    amplitude: float = 0.0
    width: float = 1.0
    file: Optional[str] = None

    def sample(self, x, base_dir=None):
        x = np.asarray(x, dtype=float)
        if self.family == "none":
            return np.zeros_like(x)
        if self.family == "sech":
            return self.amplitude / np.cosh(self.width * x)
        if self.family == "gaussian":
            return self.amplitude * np.exp(-((self.width * x) ** 2))
        path = Path(self.file)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        table = load_table(path)
        return np.interp(x, table[:, 0], table[:, 1], left=0.0, right=0.0)


def load_table(path):
    """Two columns (x, value), comma or whitespace separated, sorted by x."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except (IndexError, ValueError):
                # allow a header line
                if rows:
                    raise
    table = np.array(rows, dtype=float).reshape(-1, 2)
    if table.shape[0] < 2 or np.any(np.diff(table[:, 0]) <= 0):
        raise ValueError(f"{path}: need at least two rows with increasing x")
    return table


@dataclass(frozen=True)
class RunSpec:
    rho: Profile = Profile()
    u: Profile = Profile()
    sim: SimConfig = SimConfig()
    trace_alphas: tuple = (0.0,)
    out_dir: str = "out"
    tasks: tuple = TASKS
    plot_style: str = "vB"
    base_dir: Optional[str] = field(default=None, compare=False)

    def initial_data(self, g):
        x = g.nodes
        return 1.0 + self.rho.sample(x, self.base_dir), self.u.sample(x, self.base_dir)


def _float(s):
    val = float(s)
    if not math.isfinite(val):
        raise ValueError(f"{s!r} is not finite")
    return val


def _int(s):
    return int(s)


def _bool(s):
    low = s.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{s!r} is not a boolean")


def _floats(s):
    return tuple(_float(p) for p in s.split(",") if p.strip())


def _names(s):
    return tuple(p.strip() for p in s.split(",") if p.strip())


def _family(s):
    if s not in FAMILIES:
        raise ValueError(f"family must be one of {', '.join(FAMILIES)}")
    return s


# section -> key -> (target, converter)
_SCHEMA = {
    "grid": {"L": ("sim.L", _float), "N": ("sim.N", _int)},
    "initial": {
        "rho_family": ("rho.family", _family),
        "rho_amplitude": ("rho.amplitude", _float),
        "rho_width": ("rho.width", _float),
        "rho_file": ("rho.file", str),
        "u_family": ("u.family", _family),
        "u_amplitude": ("u.amplitude", _float),
        "u_width": ("u.width", _float),
        "u_file": ("u.file", str),
    },
    "time": {
        "dt": ("sim.dt", _float),
        "t_end": ("sim.t_end", _float),
        "save_stride": ("sim.save_stride", _int),
        "picard_tol": ("sim.picard_tol", _float),
        "picard_max": ("sim.picard_max", _int),
        "rho_max": ("sim.rho_max", _float),
        "rho_min": ("sim.rho_min", _float),
        "energy_drift_max": ("sim.energy_drift_max", _float),
        "dealias": ("sim.dealias", _bool),
        "strip_min": ("sim.strip_min", _float),
    },
    "output": {
        "dir": ("out_dir", str),
        "tasks": ("tasks", _names),
        "snapshot_times": ("sim.snapshot_times", _floats),
        "trace_alphas": ("trace_alphas", _floats),
        "plot_style": ("plot_style", str),
    },
}


def parse_spec(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise SpecError(f"not valid UTF-8: {exc}", path=path) from exc
    return parse_spec_text(text, path=path)


def parse_spec_text(text, path=None):
    values = {}
    lines = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SCHEMA:
                raise SpecError(f"unknown section [{section}]", lineno, path)
            continue
        if "=" not in line:
            raise SpecError(f"expected 'key = value', got {line!r}", lineno, path)
        if section is None:
            raise SpecError("key outside of any [section]", lineno, path)
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in _SCHEMA[section]:
            raise SpecError(f"unknown key {key!r} in [{section}]", lineno, path)
        target, conv = _SCHEMA[section][key]
        if target in values:
            raise SpecError(f"duplicate key {key!r}", lineno, path)
        try:
            values[target] = conv(value)
        except ValueError as exc:
            raise SpecError(f"invalid value for {key!r}: {exc}", lineno, path) from exc
        lines[target] = lineno

    def group(prefix):
        return {t.split(".", 1)[1]: v for t, v in values.items() if t.startswith(prefix + ".")}

    def fail(message, *targets):
        line = next((lines[t] for t in targets if t in lines), None)
        raise SpecError(message, line, path)

    sim_kw = group("sim")
    if "snapshot_times" not in sim_kw:
        t_end = sim_kw.get("t_end", SimConfig.t_end)
        sim_kw["snapshot_times"] = tuple(t for t in SimConfig.snapshot_times if t <= t_end)
    try:
        sim = SimConfig(**sim_kw)
        sim.grid()
    except ValueError as exc:
        # blame the key the message names, else the first [time]/[grid] key
        msg = str(exc)
        named = [k for k in sim_kw if msg.startswith((k, k.replace("_", " ")))]
        fail(msg, *(f"sim.{k}" for k in named + list(sim_kw)))

    rho = Profile(**group("rho"))
    u = Profile(**group("u"))
    for name, prof in (("rho", rho), ("u", u)):
        if prof.family in ("sech", "gaussian") and not prof.width > 0:
            fail(f"{name}_width must be positive", f"{name}.width")
        if prof.family == "table" and not prof.file:
            fail(f"{name}_family = table needs {name}_file", f"{name}.family")
    if rho.family in ("sech", "gaussian") and not rho.amplitude > -1.0:
        fail(
            f"rho_amplitude = {rho.amplitude} makes rho0 = 1 + amplitude non-positive at the profile peak",
            "rho.amplitude",
        )

    tasks = values.get("tasks", TASKS)
    for t in tasks:
        if t not in TASKS:
            fail(f"unknown task {t!r}; expected a subset of {', '.join(TASKS)}", "tasks")
    style = values.get("plot_style", "vB")
    if style not in PLOT_STYLES:
        fail(f"plot_style must be one of {', '.join(PLOT_STYLES)}", "plot_style")

    spec = RunSpec(
        rho=rho,
        u=u,
        sim=sim,
        trace_alphas=values.get("trace_alphas", RunSpec.trace_alphas),
        out_dir=values.get("out_dir", RunSpec.out_dir),
        tasks=tasks,
        plot_style=style,
        base_dir=str(path.parent) if path is not None else None,
    )
    for a in spec.trace_alphas:
        if not (-sim.L < a < sim.L):
            fail(f"trace alpha {a} lies outside (-L, L)", "trace_alphas")
    if rho.family == "table":
        g = sim.grid()
        try:
            rho0, _ = spec.initial_data(g)
        except (OSError, ValueError) as exc:
            fail(f"cannot read rho table: {exc}", "rho.file")
        if rho0.min() <= 0:
            fail("tabulated rho perturbation makes rho0 non-positive", "rho.file")
    return spec


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return ", ".join(_fmt(x) for x in v)
    return repr(v) if isinstance(v, float) else str(v)


def dump_spec(spec):
    """Canonical text form; ``parse_spec_text(dump_spec(s)) == s``."""
    out = []
    for section, keys in _SCHEMA.items():
        out.append(f"[{section}]")
        for key, (target, _) in keys.items():
            obj, _, attr = target.rpartition(".")
            holder = getattr(spec, obj) if obj else spec
            val = getattr(holder, attr)
            if val is None:
                continue
            out.append(f"{key} = {_fmt(val)}")
        out.append("")
    return "\n".join(out)


def replace_sim(spec, **changes):
    return dataclasses.replace(spec, sim=dataclasses.replace(spec.sim, **changes))
