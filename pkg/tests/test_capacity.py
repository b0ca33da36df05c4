import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from csrgame.capacity import (
    augmented_run,
    brute_force_ip,
    check_eq_TD,
    check_equivalence,
    collapse_profile,
    expand_game,
    plan_capacity,
    solve_lp,
    validate_capacities,
)
from csrgame.dynamics import run_dynamics
from csrgame.game import MultiProfile, is_equilibrium, is_multi_equilibrium
from csrgame.graph import generate, load_graph
from csrgame.lp import solve_covering_lp

from conftest import connected_graphs


def scipy_lp(g, k):
    A = g.adjacency_matrix.astype(float)
    res = linprog(np.ones(g.n), A_ub=-A, b_ub=-(k - g.degrees), bounds=(0, None), method="highs")
    assert res.status == 0
    return res.fun


def ip_oracle(g, k, cap):
    A = g.adjacency_matrix
    need = k - g.degrees
    best = None
    for y in itertools.product(range(cap + 1), repeat=g.n):
        if (A @ np.array(y) >= need).all() and (best is None or sum(y) < best):
            best = sum(y)
    return best


class TestExpansion:
    def test_identity(self, cycle4):
        eg = expand_game(cycle4, (1, 1, 1, 1))
        assert eg.graph == cycle4 and eg.clone_of == (1, 2, 3, 4)

    def test_edge_21(self):
        eg = expand_game(generate("path", 2), (2, 1))
        assert eg.graph.edges == ((1, 2), (1, 3), (2, 3))
        assert eg.clones == ((1, 2), (3,))

    def test_k2_22_is_k4(self):
        eg = expand_game(generate("path", 2), (2, 2))
        assert eg.graph == generate("complete", 4)
        assert eg.C == 4 and eg.C_min == 2

    def test_validate(self):
        assert validate_capacities([1, 3], 2, 3) == (1, 3)
        with pytest.raises(ValueError):
            validate_capacities([1, 4], 2, 3)
        with pytest.raises(ValueError):
            validate_capacities([1], 2, 3)

    @settings(max_examples=60, deadline=None)
    @given(connected_graphs(max_n=10), st.data())
    def test_clone_degrees(self, g, data):
        C = data.draw(st.lists(st.integers(1, 3), min_size=g.n, max_size=g.n))
        eg = expand_game(g, C)
        assert eg.graph.n == sum(C)
        assert all(len(cl) == c for cl, c in zip(eg.clones, C))
        assert eg.graph.min_degree >= g.min_degree * min(C)
        # clones keep the original distances, except clones of one node sit at distance 1
        for a in range(1, eg.graph.n + 1):
            for b in range(a + 1, eg.graph.n + 1):
                u, v = eg.clone_of[a - 1], eg.clone_of[b - 1]
                assert eg.graph.distance(a, b) == (1 if u == v else g.distance(u, v))


class TestCollapse:
    def test_distinct(self):
        eg = expand_game(generate("path", 2), (2, 1))
        col = collapse_profile(eg, (1, 2, 1))
        assert col.multisets == ((1, 2), (1,)) and col.duplicated == ()
        assert col.profile == MultiProfile.of([[1, 2], [1]])

    def test_duplicated(self):
        eg = expand_game(generate("path", 2), (2, 1))
        col = collapse_profile(eg, (1, 1, 2))
        assert col.duplicated == (1,)
        with pytest.raises(ValueError):
            col.profile

    def test_identity(self, cycle4):
        eg = expand_game(cycle4, (1,) * 4)
        assert collapse_profile(eg, (1, 2, 1, 3)).profile.to_list() == [[1], [2], [1], [3]]

    def test_equivalence_identity(self, cycle4):
        eg = expand_game(cycle4, (1,) * 4)
        tr = run_dynamics(eg.graph, [1] * 4, 3)
        assert check_equivalence(cycle4, (1,) * 4, eg, tr.final_profile, 3)

    def test_equivalence_k2_22(self):
        g = generate("path", 2)
        eg = expand_game(g, (2, 2))
        # all-ones lands on a duplicated equilibrium here, so try seeded random starts
        assert collapse_profile(eg, run_dynamics(eg.graph, [1] * 4, 3).final_profile).duplicated
        clean = 0
        for seed in range(20):
            start = np.random.default_rng(seed).integers(1, 4, size=4).tolist()
            final = run_dynamics(eg.graph, start, 3).final_profile
            col = collapse_profile(eg, final)
            if col.duplicated:
                continue
            clean += 1
            assert check_equivalence(g, (2, 2), eg, final, 3)
            assert is_multi_equilibrium(g, col.profile, 3)
        assert clean > 0

    def test_equivalence_rejects_non_equilibrium(self):
        g = generate("path", 2)
        eg = expand_game(g, (2, 2))
        with pytest.raises(ValueError):
            check_equivalence(g, (2, 2), eg, (1, 1, 1, 1), 3)


class TestLP:
    def test_k6(self):
        sol = solve_lp(generate("complete", 6).adjacency_matrix, np.full(6, 5), 5)
        assert sol.status == "optimal" and sol.objective == pytest.approx(0, abs=1e-6)

    def test_star(self, star4):
        sol = solve_lp(star4.adjacency_matrix, star4.degrees, 3)
        assert sol.objective == pytest.approx(2, abs=1e-6)
        assert np.allclose(sol.y_star, [2, 0, 0, 0], atol=1e-6)

    def test_c5(self):
        g = generate("cycle", 5)
        sol = solve_lp(g.adjacency_matrix, g.degrees, 3)
        assert sol.objective == pytest.approx(2.5, abs=1e-6)
        assert np.allclose(sol.y_star, 0.5, atol=1e-6)
        # the dual certificate is feasible and closes the gap
        A = g.adjacency_matrix
        assert (sol.dual >= -1e-9).all() and (A.T @ sol.dual <= 1 + 1e-9).all()
        assert sol.dual_objective == pytest.approx(2.5, abs=1e-6)
        assert sol.base_capacity == 5

    def test_general_solver_infeasible(self):
        res = solve_covering_lp([1.0], [[0.0]], [1.0])
        assert res.status == "infeasible"

    def test_general_solver_unbounded(self):
        res = solve_covering_lp([-1.0], [[1.0]], [1.0])
        assert res.status == "unbounded"

    def test_general_solver_example(self):
        # min x + 2y  s.t. x + y >= 2, x - y >= -1
        res = solve_covering_lp([1, 2], [[1, 1], [1, -1]], [2, -1])
        assert res.status == "optimal" and res.objective == pytest.approx(2.0)
        assert res.dual_objective == pytest.approx(2.0)

    @settings(max_examples=80, deadline=None)
    @given(connected_graphs(min_n=2, max_n=12), st.integers(1, 7))
    def test_matches_scipy_and_duality(self, g, k):
        sol = solve_lp(g.adjacency_matrix, g.degrees, k)
        assert sol.objective == pytest.approx(scipy_lp(g, k), abs=1e-6)
        assert sol.dual_objective == pytest.approx(sol.objective, abs=1e-6)
        A = g.adjacency_matrix
        assert (A @ sol.y_star >= k - g.degrees - 1e-9).all() and (sol.y_star >= -1e-9).all()
        assert (sol.dual >= -1e-9).all() and (A.T @ sol.dual <= 1 + 1e-9).all()


class TestPlan:
    def test_c5(self):
        plan = plan_capacity(generate("cycle", 5), 3)
        assert list(plan.y_ceil) == [1] * 5 and plan.total_extra == 5
        assert plan.normalized == pytest.approx(0.5)
        assert plan.capacities == (2,) * 5

    def test_k6(self):
        plan = plan_capacity(generate("complete", 6), 5)
        assert plan.total_extra == 0 and plan.capacities == (1,) * 6

    def test_star(self, star4):
        plan = plan_capacity(star4, 3)
        assert list(plan.y_ceil) == [2, 0, 0, 0]
        assert plan.lambda_max == pytest.approx(np.sqrt(3), abs=1e-6)

    def test_json(self, star4):
        d = plan_capacity(star4, 3).to_dict()
        assert set(d) == {"y_star", "y_ceil", "total_extra", "normalized", "lambda_max"}

    def test_single_node_rejected(self):
        with pytest.raises(ValueError):
            plan_capacity(load_graph([], 1), 2)

    @settings(max_examples=60, deadline=None)
    @given(connected_graphs(min_n=2, max_n=12), st.integers(1, 6))
    def test_rounding_sandwich(self, g, k):
        plan = plan_capacity(g, k)
        A = g.adjacency_matrix
        assert (A @ plan.y_ceil >= k - g.degrees).all()
        assert (plan.y_ceil <= max(k - 1, 0)).all()
        ip = sum(brute_force_ip(g, k))
        assert plan.lp_objective - 1e-6 <= ip <= plan.total_extra


class TestBruteForceIP:
    def test_examples(self, path3):
        assert sum(brute_force_ip(generate("cycle", 5), 3)) == 3
        assert sum(brute_force_ip(generate("complete", 6), 5)) == 0
        assert brute_force_ip(path3, 2) == (0, 1, 0)

    def test_size_limit(self):
        with pytest.raises(ValueError):
            brute_force_ip(generate("path", 13), 2)

    @settings(max_examples=60, deadline=None)
    @given(connected_graphs(min_n=2, max_n=6), st.integers(1, 4))
    def test_matches_enumeration(self, g, k):
        cap = max(k - 1, 0)
        y = brute_force_ip(g, k)
        assert (g.adjacency_matrix @ np.array(y) >= k - g.degrees).all()
        assert sum(y) == ip_oracle(g, k, cap)


class TestStepBudgets:
    def test_identity_k4_is_plain_bound(self, cycle4):
        eg = expand_game(cycle4, (1,) * 4)
        tr = run_dynamics(eg.graph, [1] * 4, 4)
        assert check_eq_TD(tr, (1,) * 4, 4, cycle4)
        assert tr.T <= 4 * min(3, cycle4.diameter)

    def test_k2(self):
        g = generate("path", 4)
        C = (2, 1, 2, 1)
        eg = expand_game(g, C)
        tr = run_dynamics(eg.graph, [1] * eg.C, 2)
        assert tr.T <= eg.C and check_eq_TD(tr, C, 2, g)

    def test_rejects_non_lbr(self, cycle4):
        eg = expand_game(cycle4, (1,) * 4)
        with pytest.raises(ValueError):
            check_eq_TD(run_dynamics(eg.graph, [1] * 4, 2, "min_index"), (1,) * 4, 2, cycle4)

    def test_augmented_run(self):
        g = generate("cycle", 6)
        eg, tr = augmented_run(g, 4)
        D = eg.graph.diameter
        assert tr.terminated and tr.T <= 3 * (6 * 4) ** 3 * min(D, 3)
        assert is_equilibrium(eg.graph, tr.final_profile, 4)
