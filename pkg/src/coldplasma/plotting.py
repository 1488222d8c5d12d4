"""Snapshot figures in the 2x2 layout (rho, u, B and vB or v)."""

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

logger = logging.getLogger(__name__)

PANELS = {
    "vB": (("rho", r"$\rho$"), ("u", r"$u$"), ("B", r"$B$"), ("vB", r"$vB$")),
    "v": (("rho", r"$\rho$"), ("u", r"$u$"), ("B", r"$B$"), ("v", r"$v$")),
}

RC = {
    "font.size": 10,
    "axes.labelsize": 11,
    "legend.fontsize": 8,
    "lines.linewidth": 1.2,
    "svg.fonttype": "path",
    "svg.hashsalt": "coldplasma",
}


def _series(s, name):
    if name == "vB":
        return s.v * s.B
    return getattr(s, name)


def snapshot_states(traj, times=None):
    times = traj.config.snapshot_times if times is None else times
    states = [s for s in (traj.state_at(t) for t in times) if s is not None]
    if not states:
        states = [traj.states[0], traj.states[-1]] if len(traj.states) > 1 else [traj.states[0]]
    return states


def profile_figure(traj, style="vB", times=None, xlim=None):
    if style not in PANELS:
        raise ValueError(f"unknown plot style {style!r}")
    g = traj.grid
    states = snapshot_states(traj, times)
    with plt.rc_context(RC):
        fig, axes = plt.subplots(2, 2, figsize=(9, 6.5), sharex=True)
        for ax, (name, label) in zip(axes.flat, PANELS[style]):
            for s in states:
                ax.plot(g.nodes, _series(s, name), label=f"t={s.t:g}")
            ax.set_ylabel(label)
            if xlim is not None:
                ax.set_xlim(*xlim)
        for ax in axes[1]:
            ax.set_xlabel(r"$x$")
        axes[0, 0].legend(frameon=False)
        fig.tight_layout()
    return fig


def emit_plots(traj, out, style="vB", times=None, name="profiles.svg", xlim=(-3, 3)):
    path = Path(out) / name
    fig = profile_figure(traj, style, times, xlim)
    try:
        with plt.rc_context(RC):
            fig.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return path
