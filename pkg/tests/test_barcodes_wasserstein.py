import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import merge_trees
from mergedist.errors import ScaleGuardError
from mergedist.fuzz import random_barcode_pair
from mergedist.metrics.barcodes import (
    Barcode,
    Interval,
    elder_barcode,
    rank_from_barcode,
    rank_from_tree,
)
from mergedist.metrics.wasserstein import (
    BRUTE_FORCE_LIMIT,
    deletion_cost,
    matching_cost,
    wasserstein,
    wasserstein_brute_force,
)
from mergedist.trees import nested, to_persistent_set

INF = math.inf


def B(*bars):
    return Barcode(tuple(Interval(*b) for b in bars))


class TestElder:
    def test_three_leaf_tree(self, three_leaf):
        assert elder_barcode(three_leaf) == B((0, INF), (1, 3), (2, 5))

    def test_strand(self):
        assert elder_barcode(nested(2)) == B((2, INF))

    def test_pair(self):
        assert elder_barcode(nested((2, [0, 1]))) == B((0, INF), (1, 2))

    def test_same_barcode_non_isomorphic(self):
        t1 = nested((4, [(3, [0, 2]), 1]))
        t2 = nested((4, [0, (3, [1, 2])]))
        assert elder_barcode(t1) == elder_barcode(t2)

    @given(merge_trees())
    def test_rank_oracle(self, t):
        bars = elder_barcode(t)
        ts = to_persistent_set(t).times
        probes = sorted(set(ts) | {x + 0.1 for x in ts} | {ts[0] - 1})
        for i, s in enumerate(probes):
            for u in probes[i:]:
                assert rank_from_barcode(bars, s, u) == rank_from_tree(t, s, u)

    @given(merge_trees())
    def test_one_bar_per_leaf(self, t):
        bars = elder_barcode(t)
        assert sum(not b.bounded for b in bars) == 1
        assert all(b.birth < b.death for b in bars)

    def test_dict_round_trip(self, three_leaf):
        bars = elder_barcode(three_leaf)
        assert Barcode.from_dict(bars.to_dict()) == bars


class TestWasserstein:
    def test_delete_one_bar(self):
        value, _ = wasserstein(B((0, INF), (1, 3)), B((0, INF)), 1)
        assert value == 2

    def test_identical(self, three_leaf):
        bars = elder_barcode(three_leaf)
        for p in (1, 2, INF):
            assert wasserstein(bars, bars, p)[0] == 0

    def test_pair_vs_late_strand(self):
        r = 10
        value, _ = wasserstein(B((0, INF), (0, 1)), B((r, INF)), 1)
        assert value == r + 1

    def test_three_leaf_vs_strand(self, three_leaf):
        # [0,inf) stays; deleting [1,3) costs 2 and [2,5) costs 3
        value, _ = wasserstein(elder_barcode(three_leaf), B((0, INF)), 1)
        assert value == 5 == wasserstein_brute_force(elder_barcode(three_leaf), B((0, INF)), 1)

    def test_deletion_l2(self):
        assert deletion_cost(Interval(0, 2), 2) == 2  # p-th power of the norm
        assert wasserstein(B((0, 2)), B(), 2)[0] == pytest.approx(math.sqrt(2))

    def test_empty(self):
        assert wasserstein(B(), B(), 1)[0] == 0 == wasserstein_brute_force(B(), B(), 1)

    def test_unbounded_count_mismatch(self):
        assert wasserstein(B((0, INF), (1, INF)), B((0, INF)), 1)[0] == INF

    def test_matching_cost_agrees(self, three_leaf):
        bars, other = elder_barcode(three_leaf), B((0, INF), (1, 2))
        for p in (1, 2, INF):
            value, m = wasserstein(bars, other, p)
            assert matching_cost(bars, other, m.pairs, p) == value

    @pytest.mark.parametrize("seed", range(40))
    def test_oracle(self, seed):
        b, c = random_barcode_pair(random.Random(seed))
        for p in (1, 2, INF):
            fast, slow = wasserstein(b, c, p)[0], wasserstein_brute_force(b, c, p)
            if p == INF or math.isinf(slow):
                assert fast == slow
            else:
                assert fast == pytest.approx(slow, abs=1e-9)

    @given(st.integers(0, 10**6))
    def test_metric_axioms(self, seed):
        rng = random.Random(seed)
        b, c = random_barcode_pair(rng)
        d, _ = random_barcode_pair(rng)
        for p in (1, 2, INF):
            bc = wasserstein(b, c, p)[0]
            assert bc == wasserstein(c, b, p)[0]
            assert bc >= 0 and wasserstein(b, b, p)[0] == 0
            bd, cd = wasserstein(b, d, p)[0], wasserstein(c, d, p)[0]
            if math.isfinite(bc) and math.isfinite(cd):
                assert bd <= bc + cd + 1e-9

    def test_monotone_in_p(self, three_leaf):
        vals = [wasserstein(elder_barcode(three_leaf), B((0.5, INF), (1, 2)), p)[0] for p in (1, 2, INF)]
        assert vals[0] >= vals[1] >= vals[2]

    def test_brute_force_guard(self):
        big = Barcode(tuple(Interval(i, i + 1) for i in range(BRUTE_FORCE_LIMIT + 1)))
        with pytest.raises(ScaleGuardError):
            wasserstein_brute_force(big, B(), 1)
