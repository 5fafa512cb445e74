import itertools
import random

import pytest
from hypothesis import given

from conftest import merge_trees, relabel, seeded_tree
from mergedist.errors import ScaleGuardError
from mergedist.metrics.barcodes import elder_barcode
from mergedist.metrics.interleaving import (
    LEAF_LIMIT,
    InterleavingWitness,
    candidate_epsilons,
    check_witness,
    interleaving_distance,
    interleaving_exists,
    optimal_interleaving,
)
from mergedist.metrics.wasserstein import wasserstein
from mergedist.trees import alive_nodes, leaves, nested

INF = float("inf")


def exhaustive_exists(M, N, eps, tol=1e-10):
    """Try every pair of leaf maps and accept the first that the checker passes."""
    M, N = M.normalized(), N.normalized()
    lm, ln = leaves(M), leaves(N)
    cm = [alive_nodes(N, M.by_id[v].height + eps + tol) for v in lm]
    cn = [alive_nodes(M, N.by_id[v].height + eps + tol) for v in ln]
    for phi in itertools.product(*cm):
        for psi in itertools.product(*cn):
            w = InterleavingWitness(eps, dict(zip(lm, phi)), dict(zip(ln, psi)), M, N)
            if not check_witness(w, tol):
                return True
    return False


class TestDecision:
    def test_strands(self):
        r = 3.0
        assert interleaving_exists(nested(0), nested(r), r) is not None
        assert interleaving_exists(nested(0), nested(r), r - 1e-9) is None

    def test_identity(self, three_leaf):
        w = interleaving_exists(three_leaf, relabel(three_leaf), 0)
        assert w is not None and check_witness(w) == []

    def test_pair_vs_strand(self):
        M, N = nested((2, [0, 1])), nested(0)
        assert interleaving_exists(M, N, 0.5) is not None
        assert interleaving_exists(M, N, 0.49) is None

    def test_negative_eps(self, three_leaf):
        with pytest.raises(ValueError):
            interleaving_exists(three_leaf, three_leaf, -1)

    def test_guard(self):
        big = nested((20, list(range(LEAF_LIMIT + 1))))
        with pytest.raises(ScaleGuardError):
            interleaving_exists(big, nested(0), 1)

    @pytest.mark.parametrize("seed", range(12))
    def test_matches_exhaustive_search(self, seed):
        rng = random.Random(seed)
        M, N = seeded_tree(rng.random(), 3), seeded_tree(rng.random(), 3)
        epss = candidate_epsilons(M, N)
        probes = sorted(set(epss) | {e + 0.1 for e in epss} | {max(e - 0.1, 0) for e in epss})
        for eps in probes[:10]:
            fast = interleaving_exists(M, N, eps) is not None
            assert fast == exhaustive_exists(M, N, eps), eps


class TestDistance:
    def test_strands(self):
        assert interleaving_distance(nested(0), nested(4)) == 4

    def test_self(self, three_leaf):
        assert interleaving_distance(three_leaf, relabel(three_leaf)) == 0

    def test_instability_pair(self, flat_vs_bumped):
        # three leaves at 0 merging at 1 against a single strand: a witness
        # sends every leaf to the strand and pulls it back at 2 eps >= 1
        M, N = flat_vs_bumped
        w = optimal_interleaving(M, N)
        assert w.epsilon == 0.5 and check_witness(w) == []
        assert interleaving_exists(M, N, 0.5 - 1e-9) is None

    def test_three_leaf_vs_strand(self, three_leaf):
        assert interleaving_distance(three_leaf, nested(0)) == 1.5

    def test_same_barcode_trees_are_apart(self):
        t1 = nested((4, [(3, [0, 2]), 1]))
        t2 = nested((4, [0, (3, [1, 2])]))
        assert interleaving_distance(t1, t2) > 0
        assert wasserstein(elder_barcode(t1), elder_barcode(t2), INF)[0] == 0

    @given(merge_trees(4), merge_trees(4))
    def test_witness_verifies_and_bounds_bottleneck(self, M, N):
        w = optimal_interleaving(M, N)
        assert check_witness(w) == []
        assert wasserstein(elder_barcode(M), elder_barcode(N), INF)[0] <= w.epsilon + 1e-9
        assert w.epsilon in candidate_epsilons(M, N)

    @given(merge_trees(4), merge_trees(4))
    def test_symmetric(self, M, N):
        assert interleaving_distance(M, N) == interleaving_distance(N, M)

    @given(merge_trees(3), merge_trees(3), merge_trees(3))
    def test_triangle(self, M, N, P):
        d = interleaving_distance
        assert d(M, P) <= d(M, N) + d(N, P) + 1e-9


class TestChecker:
    def test_rejects_bad_witness(self):
        M, N = nested((2, [0, 1])), nested(0)
        w = interleaving_exists(M, N, 0.5)
        bad = InterleavingWitness(0.4, w.phi, w.psi, w.m_tree, w.n_tree)
        assert check_witness(bad)

    def test_rejects_partial_leaf_map(self):
        M, N = nested((2, [0, 1])), nested(0)
        w = interleaving_exists(M, N, 0.5)
        first = next(iter(w.phi))
        bad = InterleavingWitness(0.5, {first: w.phi[first]}, w.psi, w.m_tree, w.n_tree)
        assert check_witness(bad)

    def test_tables_serialize(self, three_leaf):
        w = optimal_interleaving(three_leaf, nested(0))
        d = w.to_dict()
        assert d["epsilon"] == 1.5 and d["phi"] and d["psi"]
