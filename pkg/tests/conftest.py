import numpy as np
import pytest

from coldplasma import FieldState, SimConfig, Termination, Trajectory, make_grid, run


# (criterion, passed, detail) rows filled by test_acceptance.py
ACCEPTANCE = []


def record(criterion, checks):
    """Record one acceptance line; ``checks`` maps a label to (ok, detail)."""
    passed = all(ok for ok, _ in checks.values())
    detail = "; ".join(f"{k}: {d}{'' if ok else ' [FAIL]'}" for k, (ok, d) in checks.items())
    ACCEPTANCE.append((criterion, passed, detail))
    print(f"{'PASS' if passed else 'FAIL'} criterion {criterion}: {detail}")
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {criterion}: {detail}")


def sech(x):
    return 1.0 / np.cosh(x)


def example1_data(g):
    return 1.0 - 0.8 * sech(7.0 * g.nodes), np.zeros(g.N)


def example2_data(g):
    return 1.0 - 0.8 * sech(g.nodes), np.zeros(g.N)


@pytest.fixture(scope="session")
def grid():
    return make_grid(10.0, 2048)


@pytest.fixture(scope="session")
def traj1():
    cfg = SimConfig(t_end=2.2)
    g = cfg.grid()
    return run(cfg, *example1_data(g), g)


@pytest.fixture(scope="session")
def traj2():
    cfg = SimConfig(t_end=3.8, snapshot_times=(0.0, 3.0, 3.3, 3.7))
    g = cfg.grid()
    return run(cfg, *example2_data(g), g)


def frozen_trajectory(B_bar, r, dt, t_end, L=4.0, N=16):
    """Trajectory with u = v = 0, B = B_bar for all time and rho0 = r."""
    g = make_grid(L, N)
    cfg = SimConfig(L=L, N=N, dt=dt, t_end=t_end, snapshot_times=())
    n = int(round(t_end / dt))
    one = np.ones(N)
    states = tuple(FieldState(k * dt, r * one, 0 * one, 0 * one, B_bar * one) for k in range(n + 1))
    times = np.array([s.t for s in states])
    return Trajectory(
        grid=g,
        config=cfg,
        states=states,
        times=times,
        energies=np.zeros(n + 1),
        rho_max=np.full(n + 1, r),
        mass=np.zeros(n + 1),
        H0=0.0,
        h0=0.0,
        termination=Termination("reached_t_end", times[-1]),
        rho0=r * one,
        u0=0 * one,
    )
