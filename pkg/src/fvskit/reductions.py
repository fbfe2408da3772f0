"""Budget-aware kernelization and the two vertex-sampling rules.

``reduce_exhaustive`` applies four rewrite rules to a fixpoint, always
restarting from the first rule after any change:

1. a vertex with a loop is forced into the solution (budget drops by 1),
2. multiplicities above 2 are trimmed to 2,
3. vertices of degree <= 1 are deleted,
4. a degree-2 vertex is deleted and its two edge endpoints joined.

Rule 4 can create a parallel pair or (when both endpoints coincide) a loop;
the restart guarantees rules 1-2 see those immediately.  The reduced graph
therefore has no loops, multiplicity <= 2, and minimum degree >= 3 whenever
the outcome is feasible.  Spending more budget on forced loops than available
flags infeasibility as data on the outcome, not as an exception.
"""
from __future__ import annotations

import dataclasses
import random
from typing import Dict, FrozenSet, Optional, Tuple

from .multigraph import MultiGraph


@dataclasses.dataclass(frozen=True)
class ReductionOutcome:
    graph: MultiGraph
    budget: int
    forced: FrozenSet[int]
    infeasible: bool


def reduce_exhaustive(g: MultiGraph, k: int) -> ReductionOutcome:
    h = g.copy()
    budget = k
    forced: set = set()
    while True:
        fired = False

        for v in h.vertices():
            if h.loops_at(v) > 0:
                h.remove_vertex(v)
                forced.add(v)
                budget -= 1
                fired = True
                break
        if fired:
            if budget < 0:
                return ReductionOutcome(h, budget, frozenset(forced), True)
            continue

        for u, v, mult in h.edges():
            if mult > 2:
                h.set_multiplicity(u, v, 2)
                fired = True
                break
        if fired:
            continue

        for v in h.vertices():
            if h.degree(v) <= 1:
                h.remove_vertex(v)
                fired = True
                break
        if fired:
            continue

        for v in h.vertices():
            if h.degree(v) == 2:
                ends = []
                for u in h.neighbors(v):
                    ends.extend([u] * h.multiplicity(v, u))
                x, y = ends  # exactly two endpoints; v has no loop here
                h.remove_vertex(v)
                h.add_edge(x, y)  # x == y produces a loop, caught by rule 1
                fired = True
                break
        if not fired:
            return ReductionOutcome(h, budget, frozenset(forced), False)


def degree_excess_weights(g: MultiGraph) -> Tuple[Dict[int, int], int]:
    """Per-vertex weight deg(v) - 3 and its total 2m - 3n.

    Only meaningful on reduced graphs (min degree >= 3); anything else is
    a caller bug and raises.
    """
    weights: Dict[int, int] = {}
    total = 0
    for v in g.vertices():
        d = g.degree(v)
        if d < 3:
            raise ValueError(f"degree_excess_weights needs min degree >= 3; deg({v}) = {d}")
        weights[v] = d - 3
        total += d - 3
    assert total == 2 * g.m - 3 * g.n
    return weights, total


def sample_degree_weighted(g: MultiGraph, rng: random.Random) -> Optional[int]:
    """Sample a vertex with probability (deg(v) - 3) / (2m - 3n).

    Returns None when the total weight is zero (the graph is 3-regular),
    which callers treat as a signal to switch strategies.
    """
    weights, total = degree_excess_weights(g)
    if total == 0:
        return None
    r = rng.randrange(total)
    acc = 0
    for v in g.vertices():
        acc += weights[v]
        if r < acc:
            return v
    raise AssertionError("unreachable: weights sum to total")


def sample_uniform(g: MultiGraph, rng: random.Random) -> int:
    """Uniform vertex sample; empty graphs are an error."""
    verts = g.vertices()
    if not verts:
        raise ValueError("cannot sample from an empty graph")
    return verts[rng.randrange(len(verts))]
