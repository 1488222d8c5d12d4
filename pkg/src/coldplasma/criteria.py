"""Sufficient conditions for finite-time C^1 blow-up, evaluated on initial data.

With ``h0 = 2 H0 + sqrt(4 H0^2 + 2 H0)`` bounding ``sup |B - 1|`` for all
time, the Lagrangian Jacobian ``w`` obeys ``w'' + (1 - h0)^2 w <= (1 + h0) rho0``
and, since ``w >= 0``, ``w'' <= (1 + h0) rho0``.  Each test below forces a
zero of ``w`` (and so blow-up) at some label alpha:

  (i)   h0 < 1 and rho0 < (1 - h0)^2 / (2 (1 + h0))
  (ii)  h0 < 1 and -sqrt(2 (1 + h0) rho0 - (1 - h0)^2) >= u0'
  (iii) -sqrt(2 (1 + h0) rho0) >= u0'

Inequalities are evaluated exactly as written, without tolerance bands.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from coldplasma.dynamics import energy, initial_state
from coldplasma.grid import derivative


def compute_h0(H0):
    if H0 < 0 or not math.isfinite(H0):
        raise ValueError(f"energy must be a non-negative number, got {H0}")
    return 2.0 * H0 + math.sqrt(4.0 * H0 * H0 + 2.0 * H0)


def threshold_i(h0):
    return (1.0 - h0) ** 2 / (2.0 * (1.0 + h0))


def criterion_i(rho0, h0):
    rho0 = np.asarray(rho0, dtype=float)
    if not h0 < 1.0:
        return np.zeros(rho0.shape, dtype=bool)
    return rho0 < threshold_i(h0)


def _radicand_ii(rho0, h0):
    return 2.0 * (1.0 + h0) * rho0 - (1.0 - h0) ** 2


def criterion_ii(rho0, du0, h0):
    rho0 = np.asarray(rho0, dtype=float)
    du0 = np.asarray(du0, dtype=float)
    if not h0 < 1.0:
        return np.zeros(rho0.shape, dtype=bool)
    rad = _radicand_ii(rho0, h0)
    ok = rad >= 0.0
    root = np.sqrt(np.where(ok, rad, 0.0))
    return ok & (-root >= du0)


def criterion_iii(rho0, du0, h0):
    rho0 = np.asarray(rho0, dtype=float)
    du0 = np.asarray(du0, dtype=float)
    return -np.sqrt(2.0 * (1.0 + h0) * rho0) >= du0


def _margins(rho0, du0, h0):
    """Signed slack of each condition (>= 0 or > 0 where it holds)."""
    m_i = threshold_i(h0) - rho0
    rad = _radicand_ii(rho0, h0)
    m_ii = np.where(rad >= 0, -np.sqrt(np.maximum(rad, 0.0)) - du0, -np.inf)
    m_iii = -np.sqrt(2.0 * (1.0 + h0) * rho0) - du0
    return m_i, m_ii, m_iii


def blowup_time_bound(case, rho0_alpha, du0_alpha, h0):
    """Upper bound on the blow-up time forced by one criterion at one label.

    Cases (i) and (ii) force a zero of w on ``[0, pi / sqrt(a)]`` with
    ``a = (1 - h0)^2``.  Case (iii) uses the majorant
    ``w(t) <= c t^2 / 2 + u0' t + 1`` with ``c = (1 + h0) rho0`` and returns
    its first root.
    """
    rho0_alpha = float(rho0_alpha)
    du0_alpha = float(du0_alpha)
    r = np.array([rho0_alpha])
    d = np.array([du0_alpha])
    if case == "i":
        holds = criterion_i(r, h0)[0]
    elif case == "ii":
        holds = criterion_ii(r, d, h0)[0]
    elif case == "iii":
        holds = criterion_iii(r, d, h0)[0]
    else:
        raise ValueError(f"unknown case {case!r}; expected 'i', 'ii' or 'iii'")
    if not holds:
        raise ValueError(
            f"criterion ({case}) does not hold at rho0={rho0_alpha}, du0={du0_alpha}, h0={h0}"
        )
    if case in ("i", "ii"):
        return math.pi / abs(1.0 - h0)
    c = (1.0 + h0) * rho0_alpha
    disc = max(du0_alpha * du0_alpha - 2.0 * c, 0.0)
    return (-du0_alpha - math.sqrt(disc)) / c


def _case_iii_bounds(rho0, du0, h0, flags):
    c = (1.0 + h0) * rho0[flags]
    d = du0[flags]
    return (-d - np.sqrt(np.maximum(d * d - 2.0 * c, 0.0))) / c


@dataclass(frozen=True)
class Witness:
    alpha: float
    margin: float
    rho0: float
    du0: float


@dataclass(frozen=True)
class BlowupCriteriaReport:
    H0: float
    h0: float
    threshold_i: float
    flags_i: np.ndarray = field(repr=False)
    flags_ii: np.ndarray = field(repr=False)
    flags_iii: np.ndarray = field(repr=False)
    witnesses: dict
    T_upper: Optional[float]
    nodes: np.ndarray = field(repr=False)
    rho0: np.ndarray = field(repr=False)
    du0: np.ndarray = field(repr=False)

    @property
    def any_satisfied(self):
        return bool(self.flags_i.any() or self.flags_ii.any() or self.flags_iii.any())


def evaluate(rho0, u0, g):
    """Scan all three criteria over the grid nodes.

    H0 is the energy of the closed initial state on this grid.
    """
    s = initial_state(rho0, u0, g)
    H0 = energy(s, g)
    h0 = compute_h0(max(H0, 0.0))
    rho0 = s.rho
    du0 = derivative(s.u, g)

    flags = {
        "i": criterion_i(rho0, h0),
        "ii": criterion_ii(rho0, du0, h0),
        "iii": criterion_iii(rho0, du0, h0),
    }
    margins = dict(zip(("i", "ii", "iii"), _margins(rho0, du0, h0)))

    witnesses = {}
    bounds = []
    for case, f in flags.items():
        if not f.any():
            continue
        idx = np.flatnonzero(f)
        j = idx[np.argmax(margins[case][idx])]
        witnesses[case] = Witness(float(g.nodes[j]), float(margins[case][j]), float(rho0[j]), float(du0[j]))
        if case == "iii":
            bounds.append(float(np.min(_case_iii_bounds(rho0, du0, h0, f))))
        else:
            bounds.append(math.pi / abs(1.0 - h0))

    return BlowupCriteriaReport(
        H0=H0,
        h0=h0,
        threshold_i=threshold_i(h0),
        flags_i=flags["i"],
        flags_ii=flags["ii"],
        flags_iii=flags["iii"],
        witnesses=witnesses,
        T_upper=min(bounds) if bounds else None,
        nodes=g.nodes,
        rho0=rho0,
        du0=du0,
    )
