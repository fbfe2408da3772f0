from __future__ import annotations

import math
import random

import pytest

from fvskit.multigraph import MultiGraph, connected_components, induced, is_forest, minus
from fvskit.oracle import brute_min_fvs
from fvskit.separators import (
    build_constraint_bipartite,
    check_separation,
    check_three_way,
    decomposition_to_pace,
    forest_balanced_separator,
    three_way_separation,
    tree_decomposition_from_fvs,
    two_way_separation,
    validate_decomposition,
)

from conftest import mg, random_multigraph


def _random_forest(rng: random.Random, n: int) -> MultiGraph:
    g = MultiGraph.from_edges(range(n), [])
    for v in range(1, n):
        if rng.random() < 0.8:
            g.add_edge(v, rng.randrange(v))
    return g


# ---------------------------------------------------------------- separator


def test_balanced_separator_path():
    g = mg(9, [(i, i + 1) for i in range(8)])
    w = {v: 1 for v in range(9)}
    sep = forest_balanced_separator(g, w, beta=2)
    assert len(sep) <= 2
    rest = minus(g, sep)
    for comp in connected_components(rest):
        assert sum(w[v] for v in comp) * 2 <= 9


def test_balanced_separator_bound_holds_randomly():
    rng = random.Random(8)
    for _ in range(150):
        n = rng.randrange(1, 16)
        g = _random_forest(rng, n)
        w = {v: rng.randrange(0, 4) for v in g.vertices()}
        beta = rng.randrange(1, 5)
        sep = forest_balanced_separator(g, w, beta)
        assert len(sep) <= beta
        total = sum(w.values())
        for comp in connected_components(minus(g, sep)):
            assert sum(w[v] for v in comp) * beta <= total


def test_balanced_separator_rejects_cycles():
    with pytest.raises(ValueError):
        forest_balanced_separator(mg(3, [(0, 1), (1, 2), (0, 2)]), {0: 1, 1: 1, 2: 1}, 1)


def test_balanced_separator_zero_weights():
    g = _random_forest(random.Random(1), 8)
    assert forest_balanced_separator(g, {v: 0 for v in g.vertices()}, 3) == frozenset()


# ------------------------------------------------------- constraint network


def test_constraint_bipartite_shape():
    # triangle hub 0 over forest 1-2, 3
    g = mg(4, [(0, 1), (0, 2), (1, 2), (0, 3), (0, 3)])
    h = build_constraint_bipartite(g, f={0}, s_eps=frozenset())
    comp_nodes = [x for x in h.right if x[0] == "c"]
    sub_nodes = [x for x in h.right if x[0] == "e"]
    assert len(comp_nodes) == 2
    # the doubled 0-3 edge is f-to-forest, not f-internal: no subdivision nodes
    assert not sub_nodes
    assert h.left == (0,)
    # both forest components touch the hub
    assert all(h.adj[node] == frozenset({0}) for node in comp_nodes)
    assert sorted(sum((h.components[node] for node in comp_nodes), ())) == [1, 2, 3]


def test_constraint_bipartite_subdivides_f_internal_edges():
    g = mg(3, [(0, 1), (0, 1), (2, 2), (0, 2)])
    h = build_constraint_bipartite(g, f={0, 1, 2}, s_eps=frozenset())
    sub = sorted(x for x in h.right if x[0] == "e")
    # two copies of 0-1, the loop at 2, and 0-2
    assert len(sub) == 4


def test_two_way_separation_properties():
    rng = random.Random(17)
    for trial in range(120):
        g = random_multigraph(rng, n_max=9)
        _, f = brute_min_fvs(g)
        if rng.random() < 0.3:
            extra = [v for v in g.vertices() if v not in f]
            rng.shuffle(extra)
            f = frozenset(set(f) | set(extra[: rng.randrange(0, 3)]))
        sep = two_way_separation(g, f, rng)
        check_separation(g, sep)  # raises on violation
        assert sep.a | sep.b | sep.s == g.vertex_set()
        # forest parts of each side stay forests
        assert is_forest(induced(g, sorted(sep.a - f)))
        assert is_forest(induced(g, sorted(sep.b - f)))
        assert sep.balance == min(len(sep.a & f), len(sep.b & f))


def test_two_way_separation_crossing_check_fires():
    g = mg(2, [(0, 1)])
    from fvskit.separators import Separation
    bad = Separation(a=frozenset({0}), b=frozenset({1}), s=frozenset(),
                     s_eps=frozenset(), balance=0)
    with pytest.raises(ValueError):
        check_separation(g, bad)


def test_three_way_separation_properties():
    rng = random.Random(23)
    for trial in range(120):
        g = random_multigraph(rng, n_max=9)
        _, f = brute_min_fvs(g)
        sep = three_way_separation(g, f, rng)
        check_three_way(g, sep)
        classes = sep.by_index()
        all_verts = frozenset().union(*classes.values()) if classes else frozenset()
        assert all_verts == g.vertex_set()


def test_separation_balance_on_planted_split():
    """With f spread over many light components the separator stays empty and
    both sides catch a decent share of f."""
    from fvskit.generate import planted_fvs
    rng = random.Random(31)
    g, hubs = planted_fvs(forest_size=120, k=24, dbar_target=3.0, rng=rng)
    sep = two_way_separation(g, hubs, rng, budget=24)
    check_separation(g, sep)
    assert not sep.s_eps
    assert sep.balance >= 2


# --------------------------------------------------------- decompositions


def test_tree_decomposition_valid_and_bounded():
    rng = random.Random(41)
    for trial in range(60):
        g = random_multigraph(rng, n_max=10)
        k, f = brute_min_fvs(g)
        td = tree_decomposition_from_fvs(g, f, rng, budget=max(1, k))
        rep = validate_decomposition(g, td)
        assert rep.ok, rep.violation
        assert td.width <= max(1, k) + len(td.s_eps) + 1


def test_tree_decomposition_empty_graph():
    td = tree_decomposition_from_fvs(MultiGraph(), frozenset(), random.Random(0))
    assert validate_decomposition(MultiGraph(), td).ok


def test_validate_decomposition_catches_missing_edge():
    from fvskit.separators import TreeDecomposition
    g = mg(2, [(0, 1)])
    td = TreeDecomposition((frozenset({0}), frozenset({1})), ((0, 1),), frozenset())
    rep = validate_decomposition(g, td)
    assert not rep.ok and "edge" in rep.violation


def test_validate_decomposition_catches_broken_connectivity():
    from fvskit.separators import TreeDecomposition
    g = mg(3, [(0, 1), (1, 2)])
    td = TreeDecomposition(
        (frozenset({0, 1}), frozenset({1, 2}), frozenset({0, 2})),
        ((0, 1), (1, 2)),
        frozenset(),
    )
    rep = validate_decomposition(g, td)
    assert not rep.ok


def test_pace_output_shape():
    g = mg(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    td = tree_decomposition_from_fvs(g, {0}, random.Random(3), budget=1)
    text = decomposition_to_pace(td, g.n)
    lines = text.strip().splitlines()
    head = lines[0].split()
    assert head[:2] == ["s", "td"]
    assert int(head[2]) == len(td.bags)
    assert int(head[3]) == td.width + 1
    assert int(head[4]) == 4
    bag_lines = [ln for ln in lines[1:] if ln.startswith("b ")]
    assert len(bag_lines) == len(td.bags)
    for ln in bag_lines:
        ids = [int(t) for t in ln.split()[2:]]
        assert all(1 <= i <= 4 for i in ids)
