import math

import pytest
from hypothesis import given

from conftest import merge_trees, relabel
from mergedist.errors import InvalidTreeError, UnknownNodeError
from mergedist.trees import (
    MergeNode,
    MergeTree,
    alive_nodes,
    canonical_form,
    component_count_at,
    evolution_map,
    from_persistent_set,
    is_isomorphic,
    lca,
    leaves,
    merge_heights,
    nested,
    realization,
    sweep,
    to_persistent_set,
    validate,
)


def T(*nodes, root):
    return MergeTree(tuple(MergeNode(i, h, tuple(c)) for i, h, c in nodes), root)


class TestValidate:
    def test_single_leaf_is_valid(self):
        assert validate(nested(0)) == []

    def test_example_tree_is_valid(self, three_leaf):
        assert validate(three_leaf) == []

    def test_height_order(self):
        errs = validate(T(("a", 1, ["b"]), ("b", 3, []), root="a"))
        assert len(errs) == 1 and "height-order" in errs[0]

    @pytest.mark.parametrize(
        "nodes, root, needle",
        [
            ([("a", 1, ["b"]), ("a", 0, [])], "a", "duplicate"),
            ([("a", 1, ["b", "c"]), ("b", 0, [])], "a", "does not exist"),
            ([("a", 1, ["b"]), ("b", 0, [])], "z", "root"),
            ([("a", math.nan, ["b"]), ("b", 0, [])], "a", "finite"),
            ([("a", 2, ["b", "c"]), ("b", 1, ["c"]), ("c", 0, [])], "a", "parent"),
            ([("a", 1, ["b", "c"]), ("b", 0, []), ("c", 0, []), ("d", 0, [])], "a", "reach"),
        ],
    )
    def test_violations_are_reported(self, nodes, root, needle):
        errs = validate(T(*nodes, root=root))
        assert errs and any(needle in e for e in errs), errs

    def test_cycle(self):
        errs = validate(T(("a", 1, ["b"]), ("b", 1, ["a"]), root="a"))
        assert errs

    def test_normalized_raises_on_invalid(self):
        with pytest.raises(InvalidTreeError) as info:
            T(("a", 1, ["b"]), ("b", 3, []), root="a").normalized()
        assert info.value.violations

    def test_unknown_node(self, three_leaf):
        with pytest.raises(UnknownNodeError):
            three_leaf.node("nope")


class TestNormalize:
    def test_chain_nodes_removed(self):
        t = T(("r", 4, ["m"]), ("m", 3, ["a", "b"]), ("a", 0, []), ("b", 1, []), root="r")
        n = t.normalized()
        assert n.root == "m" and len(n) == 3

    def test_leaf_at_parent_height_dropped(self):
        n = nested((2, [0, 2, 1])).normalized()
        assert sorted(n.by_id[v].height for v in leaves(n)) == [0, 1]

    def test_internal_at_parent_height_spliced(self):
        n = nested((3, [(3, [0, 1]), 2])).normalized()
        assert len(n.by_id[n.root].children) == 3

    @given(merge_trees())
    def test_normalized_is_fixed_point(self, t):
        assert t.normalized() is t
        for node in t.nodes:
            assert node.is_leaf or len(node.children) >= 2


class TestPersistentSet:
    def test_three_leaf_critical_sets(self, three_leaf):
        ps = to_persistent_set(three_leaf)
        assert ps.times == (0, 1, 2, 3, 5)
        assert ps.sizes == (1, 2, 3, 2, 1)
        assert ps.is_minimal()

    def test_single_and_pair(self):
        assert to_persistent_set(nested(4)).times == (4,)
        ps = to_persistent_set(nested((2, [0, 1])))
        assert (ps.times, ps.sizes) == ((0, 1, 2), (1, 2, 1))

    def test_evolution_maps(self, three_leaf):
        ps = to_persistent_set(three_leaf)
        assert evolution_map(ps, 2, 5) == (0, 0, 0)
        assert evolution_map(ps, 2.5, 2.5) == (0, 1, 2)
        assert evolution_map(ps, -3, -1) == ()
        with pytest.raises(ValueError):
            evolution_map(ps, 3, 2)

    @given(merge_trees())
    def test_round_trip(self, t):
        back = from_persistent_set(to_persistent_set(t))
        assert len(back) == 1 and is_isomorphic(back.single(), t)

    @given(merge_trees())
    def test_functoriality(self, t):
        ps = to_persistent_set(t)
        ts = ps.times
        for i, s in enumerate(ts):
            for j in range(i, len(ts)):
                for k in range(j, len(ts)):
                    a = evolution_map(ps, s, ts[j])
                    b = evolution_map(ps, ts[j], ts[k])
                    assert tuple(b[x] for x in a) == evolution_map(ps, s, ts[k])

    @given(merge_trees())
    def test_sizes_match_counts(self, t):
        ps = to_persistent_set(t)
        for s, n in zip(ps.times, ps.sizes):
            assert component_count_at(t, s) == n == len(alive_nodes(t, s))


class TestQueries:
    def test_counts(self, three_leaf):
        assert component_count_at(three_leaf, 2.5) == 3
        assert component_count_at(three_leaf, 4) == 2
        assert component_count_at(three_leaf, -100) == 0

    def test_lca(self, three_leaf):
        assert lca(three_leaf, "n2", "n3") == ("n1", 3)
        assert lca(three_leaf, "n2", "n4") == ("n0", 5)
        assert lca(three_leaf, "n2", "n2") == ("n2", 0)

    def test_merge_heights(self, three_leaf):
        assert merge_heights(three_leaf) == [3, 5]

    def test_realization(self, three_leaf):
        r = realization(three_leaf)
        assert len(r["edges"]) == 4 and r["root_ray"] == [5, math.inf]


class TestIsomorphism:
    def test_permuted_ids(self, three_leaf):
        assert is_isomorphic(three_leaf, relabel(three_leaf))

    def test_different_merge_height(self):
        assert not is_isomorphic(nested((2, [0, 1])), nested((2.5, [0, 1])))

    def test_same_barcode_different_trees(self):
        t1 = nested((4, [(3, [0, 2]), 1]))
        t2 = nested((4, [0, (3, [1, 2])]))
        assert not is_isomorphic(t1, t2)

    @given(merge_trees())
    def test_relabel_invariance(self, t):
        assert canonical_form(t) == canonical_form(relabel(t))


class TestSweep:
    def test_multiway_merge(self):
        forest, pts = sweep([0, 2, 1], [(3, 0, 1), (3, 1, 2)])
        tree = forest.single()
        assert is_isomorphic(tree, nested((3, [0, 2, 1])))
        assert [p[0] for p in pts] == [0, 0, 0]

    def test_forest(self):
        forest, _ = sweep([0, 1], [])
        assert len(forest) == 2
        with pytest.raises(InvalidTreeError):
            forest.single()

    def test_union_before_birth(self):
        with pytest.raises(ValueError):
            sweep([0, 5], [(3, 0, 1)])
