"""Command-line entry point.

    coldplasma run SPEC [--out DIR] [--tasks criteria,simulate,trace,diagnostics]

Exit status: 0 success (including a detected blow-up), 1 spec error,
2 step failure, 3 I/O error.  ``COLDPLASMA_OUT`` overrides the output
directory named in the spec; ``--out`` overrides both.
"""

import argparse
import logging
import os
import sys
from pathlib import Path

from coldplasma import criteria as crit
from coldplasma import diagnostics, dynamics, lagrange
from coldplasma.output import emit_timeseries
from coldplasma.plotting import emit_plots
from coldplasma.runspec import TASKS, SpecError, parse_spec

EXIT_OK, EXIT_SPEC, EXIT_STEP, EXIT_IO = 0, 1, 2, 3
OUT_ENV = "COLDPLASMA_OUT"

logger = logging.getLogger("coldplasma")


def _parse_tasks(text):
    tasks = tuple(t.strip() for t in text.split(",") if t.strip())
    bad = [t for t in tasks if t not in TASKS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown task(s): {', '.join(bad)}")
    return tasks


def build_parser():
    p = argparse.ArgumentParser(prog="coldplasma", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="evaluate criteria, simulate, trace and check a run spec")
    r.add_argument("spec", type=Path)
    r.add_argument("--out", type=Path, default=None, help="output directory")
    r.add_argument("--tasks", type=_parse_tasks, default=None, help="comma-separated subset of " + ",".join(TASKS))
    r.add_argument("-v", "--verbose", action="store_true")
    return p


def execute(spec, out, tasks):
    """Run the requested tasks and write results; return the exit status."""
    g = spec.sim.grid()
    rho0, u0 = spec.initial_data(g)
    report = traj = diag = None
    traces = []

    if "criteria" in tasks:
        report = crit.evaluate(rho0, u0, g)
        satisfied = ", ".join(sorted(report.witnesses)) or "none"
        print(f"H0 = {report.H0:.6g}  h0 = {report.h0:.6g}  threshold_i = {report.threshold_i:.6g}")
        print(f"criteria satisfied: {satisfied}  T_upper = {report.T_upper}")

    needs_run = {"simulate", "trace", "diagnostics"} & set(tasks)
    if needs_run:
        traj = dynamics.run(spec.sim, rho0, u0, g)
        term = traj.termination
        print(f"termination: {term.kind} at t = {term.t:.6g}" + (f" ({term.reason})" if term.reason else ""))
    if "trace" in tasks:
        for a in spec.trace_alphas:
            tr = lagrange.trace(traj, a, g)
            traces.append(tr)
            print(f"trace alpha = {a:g}: zero crossing = {tr.zero_crossing}")
    if "diagnostics" in tasks:
        diag = diagnostics.summarize(traj, g)
        for name, value in diag.as_rows():
            print(f"{name} = {value:.6g}")

    out.mkdir(parents=True, exist_ok=True)
    emit_timeseries(traj, out, report=diag, traces=traces, criteria=report)
    if traj is not None and "simulate" in tasks:
        emit_plots(traj, out, style=spec.plot_style)
    if traj is not None and traj.termination.kind == "step_failure":
        return EXIT_STEP
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        spec = parse_spec(args.spec)
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except OSError as exc:
        print(f"cannot read spec {args.spec}: {exc}", file=sys.stderr)
        return EXIT_SPEC

    out = Path(args.out or os.environ.get(OUT_ENV) or spec.out_dir)
    tasks = args.tasks if args.tasks is not None else spec.tasks
    try:
        return execute(spec, out, tasks)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
