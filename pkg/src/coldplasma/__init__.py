"""Numerical laboratory for C^1 blow-up in the Gardner-Morikawa cold-plasma model.

The model evolves ion density ``rho`` and velocity ``u`` on the line, with the
transverse velocity difference ``v`` and magnetic field ``B`` slaved to
``rho`` through

    B_x = -rho v,    v_x = rho - B,

and far-field state ``(rho, u, v, B) -> (1, 0, 0, 1)``.
"""

from coldplasma.grid import Grid, make_grid, derivative, integrate, interpolate
from coldplasma.closure import ClosureSolution, close, solve_v, recover_B, closure_residuals
from coldplasma.dynamics import (
    FieldState,
    SimConfig,
    StepFailure,
    Termination,
    Trajectory,
    detect_blowup,
    energy,
    initial_state,
    run,
    step,
)
from coldplasma.criteria import (
    BlowupCriteriaReport,
    blowup_time_bound,
    compute_h0,
    criterion_i,
    criterion_ii,
    criterion_iii,
    evaluate,
)
from coldplasma.lagrange import CharacteristicTrace, fit_blowup_rate, mass_invariant_residual, trace
from coldplasma.diagnostics import DiagnosticsReport, check_B_bound, identity_residual, summarize

__version__ = "0.1.0"
