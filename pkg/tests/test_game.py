import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csrgame.game import (
    UNBOUNDED,
    MissingResource,
    MultiProfile,
    ProfileError,
    RadiusVector,
    best_responses,
    is_equilibrium,
    is_multi_equilibrium,
    is_multi_unsatisfied,
    is_unsatisfied,
    lex_compare,
    multi_best_response,
    nearest_other_holder,
    radii,
    radius_of,
    radius_vector,
    weighted_utility,
)
from csrgame.graph import generate, load_graph

from conftest import connected_graphs, graph_and_profile


def rho_oracle(g, P, i, o):
    """Direct scan over every other node."""
    ds = [g.distance(i, j) for j in range(1, g.n + 1) if j != i and P[j - 1] == o]
    return min(ds) if ds else math.inf


class TestNearestOtherHolder:
    def test_examples(self, triangle, path3):
        assert nearest_other_holder(triangle, (1, 1, 2), 1, 1) == 1
        assert nearest_other_holder(triangle, (1, 1, 2), 3, 2) == UNBOUNDED
        assert nearest_other_holder(path3, (1, 2, 1), 1, 1) == 2

    def test_radius_of(self, path3, cycle4):
        assert radius_of(path3, (1, 1, 1), 2) == 1
        assert radius_of(path3, (1, 2, 1), 2) == UNBOUNDED
        assert radius_of(cycle4, (1, 2, 1, 2), 1) == 2

    @settings(max_examples=100, deadline=None)
    @given(graph_and_profile())
    def test_radius_bounded_by_diameter(self, gpk):
        g, P, k = gpk
        for r in radii(g, P, k):
            assert math.isinf(r) or 1 <= r <= g.diameter


class TestBestResponse:
    def test_k3_all_one(self, triangle):
        assert best_responses(triangle, (1, 1, 1), 1, 2) == ({2}, UNBOUNDED)

    def test_path_middle(self, path3):
        assert best_responses(path3, (1, 1, 1), 2, 2) == ({2}, UNBOUNDED)

    def test_star_leaf(self, star4):
        # the centre holds resource 1 at distance 1, the only other holder of 2 is two hops away
        assert best_responses(star4, (1, 1, 2, 1), 4, 2) == ({2}, 2)

    def test_star_leaf_tie(self, star4):
        assert best_responses(star4, (3, 1, 2, 1), 4, 3) == ({1, 2}, 2)

    @settings(max_examples=150, deadline=None)
    @given(graph_and_profile(), st.data())
    def test_matches_exhaustive_scan(self, gpk, data):
        g, P, k = gpk
        i = data.draw(st.integers(1, g.n))
        vals = {o: rho_oracle(g, P, i, o) for o in range(1, k + 1)}
        best = max(vals.values())
        assert best_responses(g, P, i, k) == ({o for o, v in vals.items() if v == best}, best)


class TestEquilibrium:
    def test_unsatisfied_examples(self, triangle, path3):
        assert all(is_unsatisfied(triangle, (1, 1, 1), i, 2) for i in (1, 2, 3))
        assert not is_unsatisfied(triangle, (1, 2, 1), 2, 2)
        assert is_unsatisfied(path3, (1, 1, 2), 1, 2)

    def test_equilibrium_examples(self, triangle, path3):
        assert is_equilibrium(path3, (1, 2, 1), 2)
        assert not is_equilibrium(triangle, (1, 1, 1), 2)
        assert is_equilibrium(load_graph([], 1), (3,), 4)

    def test_bad_profiles(self, path3):
        with pytest.raises(ProfileError):
            is_equilibrium(path3, (1, 2), 2)
        with pytest.raises(ProfileError):
            is_equilibrium(path3, (1, 3, 1), 2)

    @settings(max_examples=200, deadline=None)
    @given(graph_and_profile(max_n=12, max_k=4))
    def test_matches_exhaustive_deviation(self, gpk):
        g, P, k = gpk
        deviates = False
        for i in range(1, g.n + 1):
            cur = rho_oracle(g, P, i, P[i - 1])
            if any(rho_oracle(g, P, i, o) > cur for o in range(1, k + 1)):
                deviates = True
        assert is_equilibrium(g, P, k) == (not deviates)

    def test_every_profile_small(self):
        # all 3^5 profiles on C5
        g = generate("cycle", 5)
        for P in itertools.product(range(1, 4), repeat=5):
            want = all(
                rho_oracle(g, P, i, P[i - 1]) >= max(rho_oracle(g, P, i, o) for o in (1, 2, 3)) for i in range(1, 6)
            )
            assert is_equilibrium(g, P, 3) == want


class TestRadiusVector:
    def test_examples(self, triangle, path3, cycle4):
        assert radius_vector(triangle, (1, 1, 1), 1) == RadiusVector((3,), 0)
        assert radius_vector(path3, (1, 2, 1), 2) == RadiusVector((0, 2), 1)
        assert radius_vector(cycle4, (1, 2, 1, 2), 2) == RadiusVector((0, 4), 0)

    def test_lex(self):
        assert lex_compare(RadiusVector((3, 0), 0), RadiusVector((1, 2), 0)) == 1
        assert lex_compare(RadiusVector((0, 4), 0), RadiusVector((0, 4), 0)) == 0
        assert lex_compare(RadiusVector((1, 1, 2), 0), RadiusVector((1, 2, 0), 0)) == -1

    def test_unbounded_is_lowest_significance(self):
        assert lex_compare(RadiusVector((1, 0), 5), RadiusVector((1, 1), 0)) == -1
        assert lex_compare(RadiusVector((1, 1), 1), RadiusVector((1, 1), 0)) == 1

    @settings(max_examples=100, deadline=None)
    @given(graph_and_profile())
    def test_counts_sum_to_n(self, gpk):
        g, P, k = gpk
        rv = radius_vector(g, P, k)
        assert rv.total == g.n and len(rv.counts) == g.diameter


class TestWeightedUtility:
    def test_example(self, path3):
        assert weighted_utility(path3, (1, 2, 1), 1, np.ones((3, 2))) == -1

    def test_zero_weights(self, cycle4):
        assert weighted_utility(cycle4, (1, 1, 1, 1), 2, np.zeros((4, 3))) == 0

    def test_single_resource(self, cycle4):
        assert all(weighted_utility(cycle4, (1, 1, 1, 1), i, np.ones((4, 1))) == 0 for i in range(1, 5))

    def test_missing(self, path3):
        with pytest.raises(MissingResource):
            weighted_utility(path3, (1, 1, 1), 1, np.ones((3, 2)))

    @settings(max_examples=60, deadline=None)
    @given(graph_and_profile(max_k=3), st.floats(0.1, 50), st.data())
    def test_linear_in_scale(self, gpk, c, data):
        g, P, k = gpk
        i = data.draw(st.integers(1, g.n))
        w = np.zeros((g.n, k))
        for o in set(P):
            w[:, o - 1] = data.draw(st.floats(0, 5))
        assert weighted_utility(g, P, i, c * w) == pytest.approx(c * weighted_utility(g, P, i, w))


def multi_oracle(g, mp, i, k):
    """Best subset by (number of unbounded picks, finite total) over all subsets."""
    held = mp.assignment[i - 1]
    rows = []
    for o in range(1, k + 1):
        ds = [g.distance(i, j) for j in range(1, g.n + 1) if j != i and o in mp.assignment[j - 1]]
        rows.append(min(ds) if ds else math.inf)

    def key(S):
        vals = [rows[o - 1] for o in S]
        return (sum(math.isinf(v) for v in vals), sum(v for v in vals if not math.isinf(v)))

    best = max(key(S) for S in itertools.combinations(range(1, k + 1), len(held)))
    return best, key(held)


@st.composite
def multi_instances(draw, max_n=8, max_k=6):
    g = draw(connected_graphs(max_n=max_n))
    k = draw(st.integers(1, max_k))
    sets = []
    for _ in range(g.n):
        c = draw(st.integers(1, k))
        sets.append(sorted(draw(st.permutations(range(1, k + 1)))[:c]))
    return g, MultiProfile.of(sets), k


class TestMulti:
    def test_k3_example(self, triangle):
        mp = MultiProfile.of([[1, 2]] * 3)
        assert multi_best_response(triangle, mp, 1, 3) == ({1, 3}, math.inf)

    def test_full_capacity(self, triangle):
        mp = MultiProfile.of([[1, 2, 3], [1], [2]])
        assert multi_best_response(triangle, mp, 1, 3)[0] == {1, 2, 3}
        assert not is_multi_unsatisfied(triangle, mp, 1, 3)

    def test_single_node(self):
        g = load_graph([], 1)
        assert multi_best_response(g, MultiProfile.of([[3, 4]]), 1, 4) == ({1, 2}, math.inf)

    def test_duplicate_rejected(self):
        with pytest.raises(ProfileError):
            MultiProfile.of([[1, 1]])

    @settings(max_examples=150, deadline=None)
    @given(multi_instances(), st.data())
    def test_greedy_matches_subset_enumeration(self, inst, data):
        g, mp, k = inst
        i = data.draw(st.integers(1, g.n))
        best, cur = multi_oracle(g, mp, i, k)
        S, _ = multi_best_response(g, mp, i, k)
        assert multi_oracle(g, MultiProfile.of([sorted(S) if j == i - 1 else sorted(s) for j, s in enumerate(mp.assignment)]), i, k)[1] == best
        # swap criterion and full-set improvement have the same fixed points
        assert is_multi_unsatisfied(g, mp, i, k) == (cur < best)

    @settings(max_examples=60, deadline=None)
    @given(graph_and_profile(max_k=4))
    def test_unit_capacity_agrees_with_single_game(self, gpk):
        g, P, k = gpk
        assert is_multi_equilibrium(g, MultiProfile.of([[o] for o in P]), k) == is_equilibrium(g, P, k)
