import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from coldplasma.criteria import (
    blowup_time_bound,
    compute_h0,
    criterion_i,
    criterion_ii,
    criterion_iii,
    evaluate,
    threshold_i,
)
from coldplasma.grid import derivative

from conftest import example1_data, example2_data

positive = st.floats(1e-3, 5.0)
h0s = st.floats(0.0, 3.0)
slopes = st.floats(-10.0, 10.0)


class TestH0:
    def test_zero(self):
        assert compute_h0(0.0) == 0.0

    @pytest.mark.parametrize("H0, h0", [(0.0247, 0.2774), (0.4977, 2.4049)])
    def test_reference_values(self, H0, h0):
        assert compute_h0(H0) == pytest.approx(h0, abs=5e-4)

    def test_negative(self):
        with pytest.raises(ValueError):
            compute_h0(-1e-3)

    @given(st.floats(0, 100), st.floats(0, 100))
    def test_increasing(self, a, b):
        if a < b:
            assert compute_h0(a) < compute_h0(b)

    def test_inverse_at_one(self):
        # h0 = 1 exactly when H0 = 1/6
        H_star = brentq(lambda H: compute_h0(H) - 1.0, 0.0, 1.0, xtol=1e-15)
        assert H_star == pytest.approx(1 / 6, abs=1e-12)
        assert compute_h0(H_star * (1 - 1e-9)) < 1 < compute_h0(H_star * (1 + 1e-9))


class TestCriterionI:
    def test_example1_at_origin(self, grid):
        rho0, _ = example1_data(grid)
        flags = criterion_i(rho0, 0.2774)
        assert flags[grid.N // 2]
        assert rho0[grid.N // 2] == pytest.approx(0.2)
        assert threshold_i(0.2774) == pytest.approx(0.2044, abs=1e-4)

    def test_example2_blocked_by_h0(self, grid):
        rho0, _ = example2_data(grid)
        assert not criterion_i(rho0, 2.4049).any()
        assert rho0[grid.N // 2] < threshold_i(2.4049)

    def test_equilibrium(self):
        assert not criterion_i(np.ones(16), 0.0).any()

    @given(st.floats(0.0, 0.999))
    def test_threshold_range(self, h0):
        t = threshold_i(h0)
        assert 0 < t <= 0.5
        if h0 == 0.0:
            assert t == 0.5
        elif h0 > 1e-12:
            assert t < 0.5


class TestCriterionII:
    def test_zero_slope_with_positive_radicand(self):
        assert not criterion_ii(np.array([0.9]), np.array([0.0]), 0.1)[0]

    def test_equality_case(self):
        assert criterion_ii(np.array([1.0]), np.array([-1.0]), 0.0)[0]

    def test_negative_radicand_is_false(self):
        # 2 rho0 - 1 < 0 at h0 = 0; criterion (i) territory, not (ii)
        assert not criterion_ii(np.array([0.3]), np.array([-5.0]), 0.0)[0]

    def test_tanh_velocity_matches_bruteforce(self, grid):
        rho0 = example1_data(grid)[0]
        h0 = 0.2774
        for c in (0.05, 0.2, 1.0):
            du0 = derivative(-c * np.tanh(7 * grid.nodes), grid)
            flags = criterion_ii(rho0, du0, h0)
            expected = []
            for r, d in zip(rho0, du0):
                rad = 2 * (1 + h0) * r - (1 - h0) ** 2
                expected.append(rad >= 0 and -math.sqrt(rad) >= d)
            np.testing.assert_array_equal(flags, expected)
        assert flags.any()

    @settings(max_examples=300)
    @given(positive, st.floats(0.0, 0.999), slopes)
    def test_iii_implies_i_or_ii(self, r, h0, d):
        # the (iii) root is the larger one, so (iii) is the stronger demand
        r, d = np.array([r]), np.array([d])
        if criterion_iii(r, d, h0)[0]:
            assert criterion_i(r, h0)[0] or criterion_ii(r, d, h0)[0]

    def test_ii_does_not_imply_iii(self):
        r, d = np.array([0.5]), np.array([0.0])
        assert criterion_ii(r, d, 0.0)[0]
        assert not criterion_iii(r, d, 0.0)[0]

    def test_large_h0_disables(self):
        assert not criterion_ii(np.array([1.0]), np.array([-100.0]), 1.0)[0]


class TestCriterionIII:
    def test_zero_velocity(self, grid):
        assert not criterion_iii(example1_data(grid)[0], np.zeros(grid.N), 0.3).any()

    def test_equality_case(self):
        assert criterion_iii(np.array([0.5]), np.array([-1.0]), 0.0)[0]

    def test_no_h0_restriction(self):
        assert criterion_iii(np.array([0.5]), np.array([-10.0]), 5.0)[0]

    @given(st.lists(st.tuples(positive, slopes), min_size=2, max_size=20), st.randoms(), h0s)
    def test_permutation(self, pts, rnd, h0):
        r = np.array([p[0] for p in pts])
        d = np.array([p[1] for p in pts])
        perm = list(range(len(pts)))
        rnd.shuffle(perm)
        for crit in (criterion_ii, criterion_iii):
            np.testing.assert_array_equal(crit(r, d, h0)[perm], crit(r[perm], d[perm], h0))
        np.testing.assert_array_equal(criterion_i(r, h0)[perm], criterion_i(r[perm], h0))


class TestTimeBound:
    def test_case_i_value(self):
        h0 = 0.2774
        assert blowup_time_bound("i", 0.2, 0.0, h0) == pytest.approx(4.3475, abs=1e-3)

    def test_case_i_ode_oracle(self):
        # worst case of the comparison ODE: w'' = -a w + b, w(0) = 1, w'(0) = 0
        h0 = 0.2774
        a = (1 - h0) ** 2
        b = (1 + h0) * 0.2
        T = blowup_time_bound("i", 0.2, 0.0, h0)

        def hit_zero(t, y):
            return y[0]

        hit_zero.terminal = True
        sol = solve_ivp(lambda t, y: [y[1], -a * y[0] + b], (0, T), [1.0, 0.0], events=hit_zero, rtol=1e-11, atol=1e-12)
        assert sol.t_events[0].size == 1
        assert sol.t_events[0][0] <= T

    def test_case_iii_double_root(self):
        # c = (1 + h0) rho0 = 1/2, majorant t^2/4 - t + 1 = (t/2 - 1)^2
        t = blowup_time_bound("iii", 0.5, -1.0, 0.0)
        assert t == 2.0
        assert 0.25 * t * t - t + 1.0 == 0.0

    def test_case_iii_simple_root(self):
        t = blowup_time_bound("iii", 0.5, -2.0, 0.0)
        root = brentq(lambda s: 0.25 * s * s - 2.0 * s + 1.0, 0.0, 1.0, xtol=1e-15)
        assert t == pytest.approx(2 * (2 - math.sqrt(3)), abs=1e-12)
        assert abs(t - root) < 1e-10

    @settings(max_examples=200)
    @given(positive, h0s, st.floats(0.0, 10.0))
    def test_case_iii_closed_form_vs_rootfind(self, r, h0, extra):
        c = (1 + h0) * r
        d = -math.sqrt(2 * c) - extra - 1e-6
        t = blowup_time_bound("iii", r, d, h0)

        def majorant(s):
            return 0.5 * c * s * s + d * s + 1.0

        root = brentq(majorant, 0.0, -d / c, xtol=1e-14, rtol=1e-15)
        assert abs(t - root) < 1e-10 * max(1.0, root)

    @pytest.mark.parametrize(
        "case, r, d, h0",
        [("i", 0.3, 0.0, 0.2774), ("i", 0.1, 0.0, 1.5), ("ii", 1.0, 0.0, 0.0), ("iii", 0.5, -0.9, 0.0)],
    )
    def test_rejects_unsatisfied(self, case, r, d, h0):
        with pytest.raises(ValueError):
            blowup_time_bound(case, r, d, h0)

    def test_unknown_case(self):
        with pytest.raises(ValueError):
            blowup_time_bound("iv", 0.1, 0.0, 0.0)


class TestEvaluate:
    def test_example1(self, grid):
        rep = evaluate(*example1_data(grid), grid)
        assert rep.H0 == pytest.approx(0.0247, rel=0.02)
        assert rep.h0 == pytest.approx(0.2774, abs=5e-4)
        assert rep.threshold_i == pytest.approx(0.2044, abs=1e-3)
        assert rep.flags_i[grid.N // 2]
        assert rep.witnesses["i"].alpha == 0.0
        assert rep.T_upper == pytest.approx(4.35, abs=5e-3)

    def test_example2(self, grid):
        rep = evaluate(*example2_data(grid), grid)
        assert rep.H0 == pytest.approx(0.4977, rel=0.02)
        assert rep.h0 == pytest.approx(2.4049, abs=5e-4)
        assert rep.threshold_i == pytest.approx(0.2897, abs=1e-3)
        assert not rep.any_satisfied
        assert rep.T_upper is None
        assert rep.witnesses == {}

    def test_equilibrium(self, grid):
        rep = evaluate(np.ones(grid.N), np.zeros(grid.N), grid)
        assert rep.H0 == 0.0 and rep.h0 == 0.0
        assert not rep.any_satisfied

    def test_compressive_velocity(self, grid):
        # u0 = -5 x exp(-(x / 0.2)^2): u0'(0) = -5, small energy
        x = grid.nodes
        rep = evaluate(np.ones(grid.N), -5.0 * x * np.exp(-((x / 0.2) ** 2)), grid)
        assert rep.h0 < 1
        assert rep.flags_iii[grid.N // 2] and rep.flags_ii[grid.N // 2]
        assert not rep.flags_i.any()
        w = rep.witnesses["iii"]
        assert w.alpha == pytest.approx(0.0, abs=grid.dx)
        assert rep.T_upper == pytest.approx(blowup_time_bound("iii", w.rho0, w.du0, rep.h0), rel=1e-12)
        assert rep.T_upper < blowup_time_bound("ii", 1.0, w.du0, rep.h0)
