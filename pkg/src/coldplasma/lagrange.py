"""Characteristics and the Jacobian ODE along them.

For a label alpha the characteristic ``x(t)`` and ``w = dx/dalpha`` satisfy

    x' = u(t, x),
    w'' + B^2 w = (B - v^2) rho0(alpha),   w(0) = 1,  w'(0) = u0'(alpha),

with ``u, v, B`` taken from a computed Eulerian trajectory.  ``w -> 0``
is equivalent to the density at the label blowing up, via
``w rho(t, x(t)) = rho0(alpha)``.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from coldplasma.grid import derivative, interpolate

W_FLOOR = 1e-3


@dataclass(frozen=True)
class CharacteristicTrace:
    alpha: float
    times: np.ndarray
    positions: np.ndarray
    w: np.ndarray
    wprime: np.ndarray
    zero_crossing: Optional[float]
    rho0_alpha: float
    du0_alpha: float
    # samples after this time used the last Eulerian state frozen in time
    frozen_after: Optional[float] = None


class _FieldSampler:
    """Evaluates (u, v, B) of saved states at arbitrary x, caching splines."""

    def __init__(self, traj):
        self.states = traj.states
        self.g = traj.grid
        self._cache = {}

    def __call__(self, n, x):
        g = self.g
        if not (-g.L <= x < g.L):
            raise ValueError(f"characteristic left the box [{-g.L}, {g.L}) at x = {x:.6g}")
        sp = self._cache.get(n)
        if sp is None:
            s = self.states[n]
            ys = np.column_stack([s.u, s.v, s.B])
            ys = np.vstack([ys, ys[:1]])
            sp = CubicSpline(np.append(g.nodes, g.L), ys, bc_type="periodic")
            if len(self._cache) > 8:
                self._cache.pop(min(self._cache))
            self._cache[n] = sp
        return sp(x)


def _rk4_rhs(fields, y, r0):
    u, v, B = fields
    return np.array([u, y[2], (B - v * v) * r0 - B * B * y[1]])


def trace(traj, alpha, g=None, w_floor=W_FLOOR, extend=0.5):
    """Integrate one characteristic and its Jacobian with classical RK4.

    The step is the trajectory time step; fields are linear in time between
    consecutive saved states.  When the trajectory ends before ``w`` reaches
    ``w_floor`` the integration continues for at most ``extend`` time units
    with the last state frozen (``w`` has bounded second derivative, so its
    zero is well approximated this way).  Pass ``extend=0`` to stop at the
    end of the trajectory.

    Raises
    ------
    ValueError
        If the trajectory was not saved at every step, or alpha or the
        characteristic leaves the box.
    """
    g = traj.grid if g is None else g
    cfg = traj.config
    ts = traj.state_times
    if cfg.save_stride != 1 or (len(ts) > 1 and np.max(np.abs(np.diff(ts) - cfg.dt)) > 1e-9):
        raise ValueError("tracing needs states saved at every time step (save_stride = 1)")
    alpha = float(alpha)
    if not (-g.L < alpha < g.L):
        raise ValueError(f"alpha = {alpha} must lie inside (-{g.L}, {g.L})")

    r0 = interpolate(traj.rho0, g, alpha)
    du0 = interpolate(derivative(traj.u0, g), g, alpha)
    sample = _FieldSampler(traj)
    h = cfg.dt
    n_last = len(ts) - 1
    n_extra = int(round(max(extend, 0.0) / h))

    y = np.array([alpha, 1.0, du0])
    times, xs, ws, wps = [ts[0]], [alpha], [1.0], [du0]
    crossing = None
    for n in range(n_last + n_extra):
        n0, n1 = min(n, n_last), min(n + 1, n_last)

        def fields(x, theta):
            a = sample(n0, x)
            return a if n1 == n0 else (1.0 - theta) * a + theta * sample(n1, x)

        k1 = _rk4_rhs(fields(y[0], 0.0), y, r0)
        yh = y + 0.5 * h * k1
        k2 = _rk4_rhs(fields(yh[0], 0.5), yh, r0)
        yh = y + 0.5 * h * k2
        k3 = _rk4_rhs(fields(yh[0], 0.5), yh, r0)
        yh = y + h * k3
        k4 = _rk4_rhs(fields(yh[0], 1.0), yh, r0)
        y_new = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        t_new = ts[0] + (n + 1) * h
        times.append(t_new)
        xs.append(y_new[0])
        ws.append(y_new[1])
        wps.append(y_new[2])
        if y_new[1] <= w_floor:
            frac = (y[1] - w_floor) / (y[1] - y_new[1])
            crossing = t_new - h + frac * h
            break
        y = y_new

    frozen = float(ts[-1]) if len(times) - 1 > n_last else None
    return CharacteristicTrace(
        alpha=alpha,
        times=np.array(times),
        positions=np.array(xs),
        w=np.array(ws),
        wprime=np.array(wps),
        zero_crossing=crossing,
        rho0_alpha=r0,
        du0_alpha=du0,
        frozen_after=frozen,
    )


def mass_invariant_residual(tr, traj, rho0_alpha=None, t_max=None, rho_cap=5.0):
    """max |w rho(t, x(t)) - rho0(alpha)| over the credible part of a trace.

    Only samples backed by a saved state are used, before the zero crossing,
    up to ``t_max``, and while the global density maximum stays below
    ``rho_cap``.
    """
    if rho0_alpha is None:
        rho0_alpha = tr.rho0_alpha
    g = traj.grid
    ts = traj.state_times
    worst = 0.0
    for t, x, w in zip(tr.times, tr.positions, tr.w):
        if t_max is not None and t > t_max + 1e-12:
            break
        if tr.zero_crossing is not None and t >= tr.zero_crossing:
            break
        n = int(round((t - ts[0]) / traj.config.dt))
        if n >= len(ts) or abs(ts[n] - t) > 1e-9:
            break
        s = traj.states[n]
        if s.rho.max() > rho_cap:
            break
        worst = max(worst, abs(w * interpolate(s.rho, g, x) - rho0_alpha))
    return worst


def fit_blowup_rate(tr, window=0.3, min_samples=10):
    """Exponent p in ``u_x ~ (T* - t)^p`` along the trace, or None.

    Uses ``u_x = w'/w`` and ``T* = tr.zero_crossing``; fits on samples with
    ``T* - t`` in ``(2 h, window]`` where h is the sample spacing.
    """
    if tr.zero_crossing is None or len(tr.times) < 2:
        return None
    T = tr.zero_crossing
    h = tr.times[1] - tr.times[0]
    tau = T - tr.times
    sel = (tau > 2.0 * h) & (tau <= window) & (tr.w > 0) & (tr.wprime != 0)
    if sel.sum() < min_samples:
        return None
    rate = np.abs(tr.wprime[sel] / tr.w[sel])
    slope, _ = np.polyfit(np.log(tau[sel]), np.log(rate), 1)
    return float(slope)
