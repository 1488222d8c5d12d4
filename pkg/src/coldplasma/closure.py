"""Recover v and B from the density.

Eliminating B from ``B_x = -rho v`` and ``v_x = rho - B`` gives the
variable-coefficient Helmholtz problem

    v_xx - rho v = rho_x,

after which ``B = rho - v_x``.  Since rho > 0 the operator is negative
definite, so v is unique.

Two discretizations are provided.  ``method="fd"`` is the second-order
central-difference operator, a cyclic tridiagonal system solved directly.
``method="spectral"`` (the default) solves the Fourier-collocation operator
``D D - rho`` with conjugate gradients preconditioned by the FD solve; it is
the discrete operator consistent with the spectral derivative used
everywhere else, so the constraint identities hold to round-off.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded
from scipy.sparse.linalg import LinearOperator, cg

from coldplasma.grid import derivative

CG_RTOL = 1e-13
CG_MAXITER = 200


class ClosureError(RuntimeError):
    """The elliptic constraint could not be solved for the given density."""


@dataclass(frozen=True)
class ClosureSolution:
    v: np.ndarray
    B: np.ndarray
    residual_c: float
    residual_d: float


def solve_cyclic_tridiagonal(lower, diag, upper, rhs):
    """Solve a periodic tridiagonal system.

    Row ``j`` reads ``lower[j] y[j-1] + diag[j] y[j] + upper[j] y[j+1] = rhs[j]``
    with indices taken mod n.  The corner entries are removed by a rank-one
    (Sherman-Morrison) correction and the remaining tridiagonal systems are
    solved with LAPACK's banded solver.
    """
    lower = np.asarray(lower, dtype=float)
    diag = np.asarray(diag, dtype=float)
    upper = np.asarray(upper, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    n = diag.size
    alpha = upper[-1]  # A[n-1, 0]
    beta = lower[0]  # A[0, n-1]
    gamma = -diag[0]

    bb = diag.copy()
    bb[0] -= gamma
    bb[-1] -= alpha * beta / gamma
    ab = np.zeros((3, n))
    ab[0, 1:] = upper[:-1]
    ab[1] = bb
    ab[2, :-1] = lower[1:]

    corr = np.zeros(n)
    corr[0] = gamma
    corr[-1] = alpha
    sol = solve_banded((1, 1), ab, np.column_stack([rhs, corr]), check_finite=False)
    y, z = sol[:, 0], sol[:, 1]
    fact = (y[0] + beta * y[-1] / gamma) / (1.0 + z[0] + beta * z[-1] / gamma)
    return y - fact * z


def _fd_solve(rho, rhs, g):
    off = np.full(g.N, 1.0 / g.dx**2)
    return solve_cyclic_tridiagonal(off, -2.0 / g.dx**2 - rho, off, rhs)


def solve_v(rho, g, rhs=None, method="spectral"):
    """Solve ``v_xx - rho v = rhs`` on the periodic grid.

    ``rhs`` defaults to the spectral derivative of ``rho``.

    Raises
    ------
    ClosureError
        If rho is not strictly positive or the iteration stalls.
    """
    rho = np.asarray(rho, dtype=float)
    if not np.all(np.isfinite(rho)):
        raise ClosureError("density contains non-finite values")
    if rho.min() <= 0.0:
        raise ClosureError(f"density must be positive, min(rho) = {rho.min():.3e}")
    if rhs is None:
        rhs = derivative(rho, g)
    rhs = np.asarray(rhs, dtype=float)

    v0 = _fd_solve(rho, rhs, g)
    if method == "fd":
        return v0
    if method != "spectral":
        raise ValueError(f"unknown closure method {method!r}")
    if not np.any(rhs):
        return np.zeros(g.N)

    # CG needs an SPD operator, so solve (rho - D D) v = -rhs.
    def matvec(v):
        return rho * v - derivative(derivative(v, g), g)

    def precond(r):
        return -_fd_solve(rho, -r, g)

    A = LinearOperator((g.N, g.N), matvec=matvec, dtype=float)
    M = LinearOperator((g.N, g.N), matvec=precond, dtype=float)
    atol = CG_RTOL * np.linalg.norm(rhs)
    v, info = cg(A, -rhs, x0=v0, M=M, rtol=0.0, atol=atol, maxiter=CG_MAXITER)
    if info != 0:
        cond = rho.max() / rho.min()
        raise ClosureError(
            f"closure CG did not converge (info={info}); rho max/min ratio {cond:.3e}"
        )
    return v


def recover_B(rho, v, g):
    return np.asarray(rho, dtype=float) - derivative(v, g)


def closure_residuals(rho, v, B, g):
    """Max-norm residuals of ``B_x = -rho v`` and ``v_x = rho - B``."""
    rc = np.max(np.abs(derivative(B, g) + rho * v))
    rd = np.max(np.abs(derivative(v, g) - rho + B))
    return float(rc), float(rd)


def close(rho, g, method="spectral"):
    v = solve_v(rho, g, method=method)
    B = recover_B(rho, v, g)
    rc, rd = closure_residuals(rho, v, B, g)
    return ClosureSolution(v, B, rc, rd)
