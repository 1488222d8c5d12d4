"""Run-time checks of proved identities and bounds on simulated states.

For every classical solution

    sup |B - 1| <= h0,
    int (rho - 1)^2 = int (B - 1)^2 + v_x^2 + 2 rho v^2,

and the energy H is conserved.  Failures point at numerical trouble, not
at the model.
"""

from dataclasses import dataclass

import numpy as np

from coldplasma.grid import derivative, integrate

TOL_B = 1e-2
RHO_CAP = 5.0


@dataclass(frozen=True)
class DiagnosticsReport:
    max_B_violation: float
    max_identity_relerr: float
    max_energy_drift: float
    mass_drift: float
    v_sup_series: np.ndarray  # rows of (t, max |v|)

    def as_rows(self):
        return [
            ("max_B_violation", self.max_B_violation),
            ("max_identity_relerr", self.max_identity_relerr),
            ("max_energy_drift", self.max_energy_drift),
            ("mass_drift", self.mass_drift),
            ("v_sup_max", float(self.v_sup_series[:, 1].max())),
        ]


def B_excess(s, h0):
    return float(np.max(np.abs(s.B - 1.0)) - h0)


def check_B_bound(traj):
    """max over saved states of (max |B - 1| - h0); should be <= TOL_B."""
    return max(B_excess(s, traj.h0) for s in traj.states)


def identity_residual(s, g):
    vx = derivative(s.v, g)
    lhs = integrate((s.rho - 1.0) ** 2, g)
    rhs = integrate((s.B - 1.0) ** 2 + vx**2 + 2.0 * s.rho * s.v**2, g)
    return abs(lhs - rhs) / max(lhs, 1e-12)


def energy_drift(traj, rho_cap=RHO_CAP):
    """Relative drift |H(t) - H(0)| / H(0) over steps with max rho <= rho_cap."""
    ok = traj.rho_max <= rho_cap
    drift = np.abs(traj.energies - traj.H0) / max(traj.H0, 1e-12)
    return float(drift[ok].max()) if ok.any() else 0.0


def summarize(traj, g=None):
    g = traj.grid if g is None else g
    return DiagnosticsReport(
        max_B_violation=check_B_bound(traj),
        max_identity_relerr=max(identity_residual(s, g) for s in traj.states),
        max_energy_drift=energy_drift(traj),
        mass_drift=float(np.max(np.abs(traj.mass - traj.mass[0]))),
        v_sup_series=np.array([(s.t, float(np.max(np.abs(s.v)))) for s in traj.states]),
    )
