"""CSV writers for run results.

Every file has a one-line header; floats use Python's shortest round-trip
representation, so each value parses back to the same double.
"""

import csv
import logging
from pathlib import Path

import numpy as np

from coldplasma.diagnostics import B_excess, identity_residual

logger = logging.getLogger(__name__)


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def write_csv(path, header, rows):
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])
    return path


def time_label(t):
    return repr(float(t))


def emit_energy(traj, out):
    drift = (traj.energies - traj.H0) / max(traj.H0, 1e-12)
    return write_csv(Path(out) / "energy.csv", ["t", "H", "drift"], zip(traj.times, traj.energies, drift))


def emit_fields(traj, out, times=None):
    """One fields_t<time>.csv per requested snapshot that the run reached."""
    g = traj.grid
    times = traj.config.snapshot_times if times is None else times
    paths = []
    for t in times:
        s = traj.state_at(t)
        if s is None:
            logger.warning("no saved state at t=%g (run ended at t=%g); snapshot skipped", t, traj.termination.t)
            continue
        rows = zip(g.nodes, s.rho, s.u, s.v, s.B, s.v * s.B)
        paths.append(write_csv(Path(out) / f"fields_t{time_label(t)}.csv", ["x", "rho", "u", "v", "B", "vB"], rows))
    return paths


def emit_trace(tr, out):
    rows = zip(tr.times, tr.positions, tr.w, tr.wprime)
    return write_csv(Path(out) / f"trace_{time_label(tr.alpha)}.csv", ["t", "x", "w", "wprime"], rows)


def emit_criteria(report, out):
    rows = zip(report.nodes, report.rho0, report.du0, report.flags_i, report.flags_ii, report.flags_iii)
    return write_csv(
        Path(out) / "criteria.csv", ["x", "rho0", "du0", "flag_i", "flag_ii", "flag_iii"], rows
    )


def emit_diagnostics(traj, report, out):
    g = traj.grid
    idx = {t: i for i, t in enumerate(traj.times)}
    rows = []
    for s in traj.states:
        i = idx.get(s.t)
        drift = abs(traj.energies[i] - traj.H0) / max(traj.H0, 1e-12) if i is not None else float("nan")
        rows.append((s.t, float(np.max(np.abs(s.v))), B_excess(s, traj.h0), identity_residual(s, g), drift))
    per_state = write_csv(
        Path(out) / "diagnostics.csv", ["t", "v_sup", "B_excess", "identity_relerr", "energy_drift"], rows
    )
    summary = write_csv(Path(out) / "diagnostics_summary.csv", ["quantity", "value"], report.as_rows())
    return [per_state, summary]


def emit_timeseries(traj, out, report=None, traces=(), criteria=None):
    """Write every CSV available for a finished run and return the paths."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    if criteria is not None:
        paths.append(emit_criteria(criteria, out))
    if traj is not None:
        paths.append(emit_energy(traj, out))
        paths.extend(emit_fields(traj, out))
        if report is not None:
            paths.extend(emit_diagnostics(traj, report, out))
    for tr in traces:
        paths.append(emit_trace(tr, out))
    return paths
