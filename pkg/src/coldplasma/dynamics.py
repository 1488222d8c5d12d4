"""Crank-Nicolson / pseudo-spectral time stepping of (rho, u).

Density is advanced in flux form, ``rho_t + (rho u)_x = 0``, and velocity in
advective form, ``u_t + u u_x = v B``.  Each step solves the implicit
Crank-Nicolson equations by Picard iteration, re-closing ``v`` and ``B`` from
the current density iterate on every sweep.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from coldplasma.closure import ClosureError, close
from coldplasma.grid import Grid, derivative, integrate, make_grid, strip_width

logger = logging.getLogger(__name__)

FIGURE1_SNAPSHOTS = (0.0, 1.5, 1.9, 2.0)


class StepFailure(RuntimeError):
    def __init__(self, t, reason):
        super().__init__(f"step failed at t={t:.6g}: {reason}")
        self.t = t
        self.reason = reason


@dataclass(frozen=True)
class FieldState:
    t: float
    rho: np.ndarray
    u: np.ndarray
    v: np.ndarray
    B: np.ndarray


@dataclass(frozen=True)
class SimConfig:
    L: float = 10.0
    N: int = 2048
    dt: float = 0.01
    t_end: float = 2.2
    save_stride: int = 1
    picard_tol: float = 1e-10
    picard_max: int = 12
    rho_max: float = 50.0
    rho_min: float = 1e-6
    energy_drift_max: float = 0.05
    dealias: bool = True
    # resolution-loss threshold on the analyticity strip, in mesh widths
    strip_min: float = 1.0
    snapshot_times: tuple = FIGURE1_SNAPSHOTS

    def __post_init__(self):
        for name in ("dt", "t_end", "picard_tol", "rho_max", "rho_min", "energy_drift_max"):
            val = getattr(self, name)
            if not (val > 0 and math.isfinite(val)):
                raise ValueError(f"{name} must be positive and finite, got {val}")
        if self.strip_min < 0:
            raise ValueError("strip_min must be non-negative")
        if int(self.save_stride) != self.save_stride or self.save_stride < 1:
            raise ValueError("save_stride must be a positive integer")
        if int(self.picard_max) != self.picard_max or self.picard_max < 1:
            raise ValueError("picard_max must be a positive integer")
        if self.rho_min >= self.rho_max:
            raise ValueError("rho_min must be below rho_max")
        snaps = tuple(float(t) for t in self.snapshot_times)
        if any(t < 0 or t > self.t_end + 1e-12 for t in snaps):
            raise ValueError(f"snapshot times {snaps} must lie in [0, t_end={self.t_end}]")
        object.__setattr__(self, "snapshot_times", snaps)

    def grid(self):
        return make_grid(self.L, self.N)

    @property
    def n_steps(self):
        return int(round(self.t_end / self.dt))


@dataclass(frozen=True)
class Termination:
    kind: str  # reached_t_end | blowup_detected | step_failure
    t: float
    reason: Optional[str] = None


@dataclass(frozen=True)
class Trajectory:
    grid: Grid
    config: SimConfig
    states: tuple
    times: np.ndarray
    energies: np.ndarray
    rho_max: np.ndarray
    mass: np.ndarray
    H0: float
    h0: float
    termination: Termination
    rho0: np.ndarray = field(repr=False)
    u0: np.ndarray = field(repr=False)

    @property
    def state_times(self):
        return np.array([s.t for s in self.states])

    def state_at(self, t, tol=None):
        """Saved state closest to ``t``; None if none lies within ``tol``."""
        if tol is None:
            tol = 0.5 * self.config.dt
        ts = self.state_times
        i = int(np.argmin(np.abs(ts - t)))
        return self.states[i] if abs(ts[i] - t) <= tol else None


def initial_state(rho0, u0, g):
    rho0 = np.asarray(rho0, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    if rho0.shape != (g.N,) or u0.shape != (g.N,):
        raise ValueError("initial data must be sampled on the grid")
    if not (np.all(np.isfinite(rho0)) and np.all(np.isfinite(u0))):
        raise ValueError("initial data must be finite")
    if rho0.min() <= 0:
        raise ValueError(f"initial density must be positive, min = {rho0.min():.3e}")
    sol = close(rho0, g)
    return FieldState(0.0, rho0.copy(), u0.copy(), sol.v, sol.B)


def energy(s, g):
    """H = 1/2 * integral of rho (u^2 + v^2) + (B - 1)^2."""
    dens = s.rho * (s.u**2 + s.v**2) + (s.B - 1.0) ** 2
    return 0.5 * integrate(dens, g)


def mass(s, g):
    return integrate(s.rho - 1.0, g)


def _rhs(rho, u, v, B, g, mask):
    drho = -derivative(rho * u, g, mask)
    du = -u * derivative(u, g, mask) + v * B
    return drho, du


def step(s, cfg, g, mask=None):
    """Advance one Crank-Nicolson step of size ``cfg.dt``.

    Raises
    ------
    StepFailure
        On Picard non-convergence, non-finite iterates or a failed closure.
    """
    if mask is None and cfg.dealias:
        mask = g.dealias_mask()
    dt = cfg.dt
    t_new = s.t + dt
    f_rho, f_u = _rhs(s.rho, s.u, s.v, s.B, g, mask)
    rho_old = s.rho + 0.5 * dt * f_rho
    u_old = s.u + 0.5 * dt * f_u

    rho, u, v, B = s.rho, s.u, s.v, s.B
    for sweep in range(1, cfg.picard_max + 1):
        g_rho, g_u = _rhs(rho, u, v, B, g, mask)
        rho_new = rho_old + 0.5 * dt * g_rho
        u_new = u_old + 0.5 * dt * g_u
        if not (np.all(np.isfinite(rho_new)) and np.all(np.isfinite(u_new))):
            raise StepFailure(t_new, "non-finite iterate")
        change = max(np.max(np.abs(rho_new - rho)), np.max(np.abs(u_new - u)))
        rho, u = rho_new, u_new
        try:
            sol = close(rho, g)
        except ClosureError as exc:
            raise StepFailure(t_new, f"closure failed: {exc}") from exc
        v, B = sol.v, sol.B
        if change < cfg.picard_tol:
            break
    else:
        raise StepFailure(
            t_new, f"Picard iteration did not converge in {cfg.picard_max} sweeps (last change {change:.2e})"
        )
    return FieldState(t_new, rho, u, v, B)


def detect_blowup(s, cfg, g):
    """Return the reason the state is at incipient blow-up, or None.

    Besides the density and gradient thresholds, the state is flagged when
    the analyticity strip of rho shrinks below ``cfg.strip_min`` mesh
    widths: from then on the grid cannot represent the forming spike.
    """
    rmax = float(np.max(s.rho))
    if rmax > cfg.rho_max:
        return f"density_exceeds({cfg.rho_max:g}): max rho = {rmax:.4g}"
    rmin = float(np.min(s.rho))
    if rmin < cfg.rho_min:
        return f"density_below({cfg.rho_min:g}): min rho = {rmin:.4g}"
    uxmin = float(np.min(derivative(s.u, g)))
    if uxmin < -1.0 / cfg.dt:
        return f"gradient_exceeds({-1.0 / cfg.dt:g}): min u_x = {uxmin:.4g}"
    if cfg.strip_min > 0:
        k_cut = (2.0 / 3.0) * g.k_max if cfg.dealias else None
        delta = strip_width(s.rho, g, k_cut=k_cut)
        if delta < cfg.strip_min * g.dx:
            return f"resolution_lost: analyticity strip {delta / g.dx:.3g} dx"
    return None


def _h0(H0):
    return 2.0 * H0 + math.sqrt(4.0 * H0 * H0 + 2.0 * H0)


def run(cfg, rho0, u0, g=None):
    """Integrate from (rho0, u0) until t_end, blow-up detection or failure."""
    if g is None:
        g = cfg.grid()
    mask = g.dealias_mask() if cfg.dealias else None
    s = initial_state(rho0, u0, g)
    H0 = energy(s, g)
    h0 = _h0(max(H0, 0.0))
    m0 = mass(s, g)

    snap_steps = {int(round(t / cfg.dt)) for t in cfg.snapshot_times}
    states = [s]
    times, energies, rmax, masses = [0.0], [H0], [float(s.rho.max())], [m0]
    termination = None
    n_steps = cfg.n_steps
    for n in range(1, n_steps + 1):
        try:
            s = step(s, cfg, g, mask)
        except StepFailure as exc:
            logger.info("%s", exc)
            termination = Termination("step_failure", exc.t, exc.reason)
            break
        # integer step count keeps times free of accumulated round-off
        s = FieldState(n * cfg.dt, s.rho, s.u, s.v, s.B)
        H = energy(s, g)
        times.append(s.t)
        energies.append(H)
        rmax.append(float(s.rho.max()))
        masses.append(mass(s, g))

        reason = detect_blowup(s, cfg, g)
        if reason is None and abs(H - H0) / max(H0, 1e-12) > cfg.energy_drift_max:
            reason = f"energy_drift: relative drift {abs(H - H0) / max(H0, 1e-12):.3g}"
        if reason is not None or n % cfg.save_stride == 0 or n in snap_steps or n == n_steps:
            states.append(s)
        if reason is not None:
            logger.info("blow-up detected at t=%.4f: %s", s.t, reason)
            termination = Termination("blowup_detected", s.t, reason)
            break
    if termination is None:
        termination = Termination("reached_t_end", s.t)

    return Trajectory(
        grid=g,
        config=cfg,
        states=tuple(states),
        times=np.array(times),
        energies=np.array(energies),
        rho_max=np.array(rmax),
        mass=np.array(masses),
        H0=H0,
        h0=h0,
        termination=termination,
        rho0=np.asarray(rho0, dtype=float).copy(),
        u0=np.asarray(u0, dtype=float).copy(),
    )
