import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from mergedist.fuzz import random_tree
from mergedist.trees import MergeNode, MergeTree, nested

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

GRID = 0.25


@st.composite
def tree_specs(draw, max_leaves: int = 5):
    """Nested specs with heights on a 0.25 grid; equal heights are allowed."""
    n = draw(st.integers(1, max_leaves))
    comps = [draw(st.integers(0, 8)) * GRID for _ in range(n)]
    comps = [(h, h) for h in comps]  # (spec, height)
    while len(comps) > 1:
        m = draw(st.integers(2, min(3, len(comps))))
        idx = draw(st.permutations(range(len(comps))))[:m]
        group = [comps[i] for i in idx]
        rest = [c for i, c in enumerate(comps) if i not in idx]
        h = max(g[1] for g in group) + draw(st.integers(0, 4)) * GRID
        rest.append(((h, [g[0] for g in group]), h))
        comps = rest
    return comps[0][0]


@st.composite
def merge_trees(draw, max_leaves: int = 5):
    return nested(draw(tree_specs(max_leaves))).normalized()


def seeded_tree(seed: int, max_leaves: int = 5) -> MergeTree:
    return random_tree(random.Random(seed), max_leaves)


@pytest.fixture
def three_leaf():
    return nested((5, [(3, [0, 1]), 2]))


@pytest.fixture
def flat_vs_bumped():
    """Sublevel trees of f = 0 and g on the subdivided 1-simplex."""
    return nested(0), nested((1, [0, 0, 0]))


@pytest.fixture
def strands_and_pair():
    r = 10
    return r, nested(0), nested((1, [0, 0])), nested(r)


def relabel(tree: MergeTree, prefix: str = "x") -> MergeTree:
    """Same tree with fresh ids and reversed child order."""
    ren = {n.id: f"{prefix}{i}" for i, n in enumerate(reversed(tree.nodes))}
    nodes = tuple(
        MergeNode(ren[n.id], n.height, tuple(ren[c] for c in reversed(n.children)))
        for n in reversed(tree.nodes)
    )
    return MergeTree(nodes, ren[tree.root])


# -- acceptance summary: one line per criterion in the terminal report ------------

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance" in report.nodeid and (report.when == "call" or report.outcome != "passed"):
        detail = dict(report.user_properties).get("detail", "")
        name = report.nodeid.split("::")[-1]
        _ACCEPTANCE[name] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, (status, detail) in sorted(_ACCEPTANCE.items()):
        terminalreporter.write_line(f"{status} {name}: {detail}")
