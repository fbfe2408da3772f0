"""Mod-2^t counting deciders over randomized separations.

The object being counted: partitions (F, L, R) of the vertex set with no
edge between L and R, bucketed by key (W, s, m') where W is the isolation
weight of F, s = |F| and m' = |E[L u R]| with multiplicity.  Summed over
the partitions extending a fixed F, the bucket total contributes 2^(#components
of g - F); a component count of exactly n - s - m' characterizes forests, so
a bucket is certified non-empty of forest solutions exactly when its total
is nonzero modulo 2^(n - s - m' + 1).  All arithmetic therefore lives in the
ring modulo 2^(n + 1), which contains every residue the accept test reads.

Isolation weights are drawn per attempt: omega uniform on 1..2n per vertex,
scaled as omega' = n^2 * omega + deg so that the degree of a minimum-weight
solution rides along in the key.  With a solution of size s present, some
bucket holds exactly one minimum solution with probability >= 1/2 per draw,
which makes its total odd at the scaled modulus - the accept event.

Tables are sparse dicts over packed (i, d, c, e) keys: i the plain
omega-sum of F so far, d its degree sum, c = |F| so far, e the edges counted
into m' so far.  Keys add componentwise, so convolution is integer addition
of packed keys.  Decision mode caps c at k and d at floor(dbar * k); buckets
beyond the caps can never be accepted, so dropping them early is sound.

Edge ownership is the load-bearing invariant of both deciders: every edge
and every vertex of the graph is accounted by exactly one stage (separator
assignment, one side's trace enumeration, or one anchored forest table), and
the stages couple only through the labels of the enumerated vertices.
"""
from __future__ import annotations

import dataclasses
import itertools
import math
import random
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .multigraph import MultiGraph, connected_components, induced, is_forest, minus
from .separators import Separation, ThreeWaySeparation

F_LBL, L_LBL, R_LBL = 0, 1, 2
_LABELS = (F_LBL, L_LBL, R_LBL)


@dataclasses.dataclass
class DeciderStats:
    calls: int = 0
    draws: int = 0
    accepts: int = 0

    def reset(self) -> None:
        self.calls = 0
        self.draws = 0
        self.accepts = 0


#: campaign-wide tally; tests read and reset it
STATS = DeciderStats()


@dataclasses.dataclass(frozen=True)
class IsolationWeights:
    omega: Dict[int, int]
    omega_prime: Dict[int, int]
    n: int


def draw_weights(g: MultiGraph, rng: random.Random) -> IsolationWeights:
    """omega uniform on {1..2n}; omega' = n^2 * omega + deg."""
    n = g.n
    omega = {v: rng.randint(1, 2 * n) for v in g.vertices()}
    omega_prime = {v: n * n * omega[v] + g.degree(v) for v in g.vertices()}
    return IsolationWeights(omega, omega_prime, n)


@dataclasses.dataclass(frozen=True)
class DeciderOutcome:
    accepted: bool
    key: Optional[Tuple[int, int, int, int]]  # (W, s, m_prime, d)
    draws_used: int


class _Packer:
    """Packs (i, d, c, e) into one int with enough headroom per field that
    packed keys from different stages add without carrying across fields."""

    __slots__ = ("i_cap", "d_cap", "c_cap", "e_cap",
                 "e_bits", "c_bits", "d_bits", "e_mask", "c_mask", "d_mask",
                 "c_shift", "d_shift", "i_shift")

    def __init__(self, i_cap: int, d_cap: int, c_cap: int, e_cap: int) -> None:
        self.i_cap, self.d_cap, self.c_cap, self.e_cap = i_cap, d_cap, c_cap, e_cap
        self.e_bits = max(1, e_cap.bit_length()) + 3
        self.c_bits = max(1, c_cap.bit_length()) + 3
        self.d_bits = max(1, d_cap.bit_length()) + 3
        self.e_mask = (1 << self.e_bits) - 1
        self.c_mask = (1 << self.c_bits) - 1
        self.d_mask = (1 << self.d_bits) - 1
        self.c_shift = self.e_bits
        self.d_shift = self.e_bits + self.c_bits
        self.i_shift = self.e_bits + self.c_bits + self.d_bits

    def pack(self, i: int, d: int, c: int, e: int) -> int:
        return (((i << self.d_bits | d) << self.c_bits | c) << self.e_bits) | e

    def unpack(self, p: int) -> Tuple[int, int, int, int]:
        e = p & self.e_mask
        c = (p >> self.c_shift) & self.c_mask
        d = (p >> self.d_shift) & self.d_mask
        return (p >> self.i_shift, d, c, e)

    def ok(self, p: int) -> bool:
        return (
            (p & self.e_mask) <= self.e_cap
            and ((p >> self.c_shift) & self.c_mask) <= self.c_cap
            and ((p >> self.d_shift) & self.d_mask) <= self.d_cap
            and (p >> self.i_shift) <= self.i_cap
        )


Table = Dict[int, int]


def _conv(ta: Table, tb: Table, packer: _Packer, mask: int) -> Table:
    if not ta or not tb:
        return {}
    if len(ta) < len(tb):
        ta, tb = tb, ta
    out: Table = {}
    ok = packer.ok
    get = out.get
    for pb, cb in tb.items():
        for pa, ca in ta.items():
            key = pa + pb
            if ok(key):
                out[key] = (get(key, 0) + ca * cb) & mask
    return {k: v for k, v in out.items() if v}


def _union_into(dst: Table, src: Table, mask: int) -> None:
    for k, v in src.items():
        nv = (dst.get(k, 0) + v) & mask
        if nv:
            dst[k] = nv
        elif k in dst:
            del dst[k]


def _merge3(tabs: Sequence[Table], mask: int) -> Table:
    out: Table = {}
    for t in tabs:
        _union_into(out, t, mask)
    return out


def _shift_e(t: Table, delta: int, packer: _Packer) -> Table:
    # e is the lowest field, so shifting it is plain integer addition
    return {k + delta: v for k, v in t.items() if packer.ok(k + delta)}


# ----------------------------------------------------------------------
# anchored forest tables


class _CompStructure:
    """Rooted layout of one forest component plus its trace interface."""

    __slots__ = ("postorder", "children", "iface", "trace_nbrs")

    def __init__(self, sub: MultiGraph, comp: List[int], trace_nbrs: Dict[int, List[Tuple[int, int]]]):
        root = comp[0]
        parent: Dict[int, Optional[int]] = {root: None}
        children: Dict[int, List[int]] = {v: [] for v in comp}
        order: List[int] = []
        stack = [root]
        while stack:
            v = stack.pop()
            order.append(v)
            for u in sorted(sub.neighbors(v), reverse=True):
                if u == v:
                    raise ValueError("loop inside the forest part; f is not an FVS")
                if u not in parent:
                    if sub.multiplicity(v, u) != 1:
                        raise ValueError("parallel edge inside the forest part; f is not an FVS")
                    parent[u] = v
                    children[v].append(u)
                    stack.append(u)
        for v in comp:
            children[v].sort()
        self.postorder = order[::-1]  # children strictly before parents
        self.children = children
        self.trace_nbrs = {v: trace_nbrs.get(v, []) for v in comp}
        seen: Set[int] = set()
        for v in comp:
            for t, _ in self.trace_nbrs[v]:
                seen.add(t)
        self.iface = tuple(sorted(seen))


def _component_table(
    comp: _CompStructure,
    labels: Dict[int, int],
    wts: IsolationWeights,
    degs: Dict[int, int],
    packer: _Packer,
    mask: int,
    forced: FrozenSet[int],
) -> Table:
    """Sum over label assignments of one forest component.

    Per vertex the three labels contribute:
      F: (omega, deg, 1, 0) regardless of surroundings,
      L: (0, 0, 0, multiplicity of edges to L-labelled trace), barred when any
         R-labelled trace neighbor exists (the edge would cross), and
      R: symmetrically.
    Tree edges are settled at the parent: same-side child adds one to e,
    F on either end adds nothing, opposite sides are barred.
    """
    tabs: Dict[int, Tuple[Table, Table, Table]] = {}
    for v in comp.postorder:
        e_to_l = e_to_r = 0
        for t, mult in comp.trace_nbrs[v]:
            lab = labels[t]
            if lab == L_LBL:
                e_to_l += mult
            elif lab == R_LBL:
                e_to_r += mult
        t_f: Table = {}
        if 1 <= packer.c_cap and wts.omega[v] <= packer.i_cap and degs[v] <= packer.d_cap:
            t_f = {packer.pack(wts.omega[v], degs[v], 1, 0): 1}
        t_l: Table = {}
        t_r: Table = {}
        if v not in forced:
            if e_to_r == 0 and e_to_l <= packer.e_cap:
                t_l = {packer.pack(0, 0, 0, e_to_l): 1}
            if e_to_l == 0 and e_to_r <= packer.e_cap:
                t_r = {packer.pack(0, 0, 0, e_to_r): 1}
        for u in comp.children[v]:
            cf, cl, cr = tabs.pop(u)
            any_side = _merge3((cf, cl, cr), mask)
            same_l = _merge3((cf, _shift_e(cl, 1, packer)), mask)
            same_r = _merge3((cf, _shift_e(cr, 1, packer)), mask)
            t_f = _conv(t_f, any_side, packer, mask)
            t_l = _conv(t_l, same_l, packer, mask)
            t_r = _conv(t_r, same_r, packer, mask)
        tabs[v] = (t_f, t_l, t_r)
    return _merge3(tabs[comp.postorder[-1]], mask)


def _trace_term(
    verts: Sequence[int],
    edges: Sequence[Tuple[int, int, int]],
    labels: Dict[int, int],
    wts: IsolationWeights,
    degs: Dict[int, int],
    packer: _Packer,
) -> Optional[int]:
    """Packed (i, d, c, e) of a fully-labelled trace slice; None when an
    owned edge crosses L-R or a cap is exceeded."""
    i = d = c = e = 0
    for v in verts:
        if labels[v] == F_LBL:
            i += wts.omega[v]
            d += degs[v]
            c += 1
    for u, v, mult in edges:
        lu = labels[u]
        lv = labels[v]
        if lu == F_LBL or lv == F_LBL:
            continue
        if lu != lv:
            return None
        e += mult
    if i > packer.i_cap or d > packer.d_cap or c > packer.c_cap or e > packer.e_cap:
        return None
    return packer.pack(i, d, c, e)


def _assignments(verts: Sequence[int], forced: FrozenSet[int]):
    """All label tuples for ``verts``, with forced vertices pinned to F."""
    domains = [(F_LBL,) if v in forced else _LABELS for v in verts]
    return itertools.product(*domains)


def _build_forest_side(
    g: MultiGraph,
    forest_verts: List[int],
    trace: Set[int],
) -> List[_CompStructure]:
    """Component structures of g[forest_verts] plus each vertex's trace
    neighbor list (the anchors)."""
    sub = induced(g, forest_verts)
    trace_nbrs: Dict[int, List[Tuple[int, int]]] = {}
    for v in forest_verts:
        lst = [(t, g.multiplicity(v, t)) for t in g.neighbors(v) if t in trace]
        if lst:
            trace_nbrs[v] = lst
    return [_CompStructure(sub, comp, trace_nbrs) for comp in connected_components(sub)]


# ----------------------------------------------------------------------
# plain anchored-forest counting (fixed trace labels, no enumeration)


def forest_dp_table(
    g: MultiGraph,
    wts: IsolationWeights,
    f_part: Iterable[int],
    l_part: Iterable[int],
    r_part: Iterable[int],
) -> Dict[Tuple[int, int, int], int]:
    """Per-key totals of partitions extending the given labels, keyed by
    (W, s, m') and reduced modulo 2^(n+1).

    The unlabelled remainder must induce a forest; otherwise ValueError.
    """
    f_set, l_set, r_set = frozenset(f_part), frozenset(l_part), frozenset(r_part)
    trace = f_set | l_set | r_set
    if len(f_set) + len(l_set) + len(r_set) != len(trace):
        raise ValueError("F, L, R overlap")
    for v in trace:
        if not g.has_vertex(v):
            raise KeyError(f"vertex {v} not in graph")
    forest_verts = [v for v in g.vertices() if v not in trace]
    if not is_forest(induced(g, forest_verts)):
        raise ValueError("g minus the trace is not a forest")
    n = g.n
    mask = (1 << (n + 1)) - 1
    degs = {v: g.degree(v) for v in g.vertices()}
    two_m = sum(degs.values())
    packer = _Packer(i_cap=2 * n * n, d_cap=two_m, c_cap=n, e_cap=g.m)
    labels = {v: F_LBL for v in f_set}
    labels.update({v: L_LBL for v in l_set})
    labels.update({v: R_LBL for v in r_set})

    trace_edges = [(u, v, mult) for u, v, mult in g.edges() if u in trace and v in trace]
    term = _trace_term(sorted(trace), trace_edges, labels, wts, degs, packer)
    if term is None:
        return {}
    acc: Table = {term: 1}
    for comp in _build_forest_side(g, forest_verts, set(trace)):
        tbl = _component_table(comp, labels, wts, degs, packer, mask, frozenset())
        acc = _conv(acc, tbl, packer, mask)
        if not acc:
            return {}
    out: Dict[Tuple[int, int, int], int] = {}
    for p, cnt in acc.items():
        i, d, c, e = packer.unpack(p)
        key = (n * n * i + d, c, e)
        nv = (out.get(key, 0) + cnt) & mask
        if nv:
            out[key] = nv
        elif key in out:
            del out[key]
    return out


def forest_dp(
    g: MultiGraph,
    wts: IsolationWeights,
    f_part: Iterable[int],
    l_part: Iterable[int],
    r_part: Iterable[int],
    s: int,
    m_prime: int,
    w_target: int,
) -> int:
    """Ring count of partitions extending (F, L, R) at one key."""
    return forest_dp_table(g, wts, f_part, l_part, r_part).get((w_target, s, m_prime), 0)


# ----------------------------------------------------------------------
# two-way decider


class _TwoWayLayout:
    """Edge/vertex ownership for one (graph, f, separation) triple."""

    __slots__ = ("s_order", "s_edges", "sides", "degs", "n", "m")

    def __init__(self, g: MultiGraph, fset: FrozenSet[int], sep: Separation):
        self.n = g.n
        self.m = g.m
        self.degs = {v: g.degree(v) for v in g.vertices()}
        self.s_order = sorted(sep.s)
        zone: Dict[int, int] = {}
        for v in sep.s:
            zone[v] = 0
        for v in sep.a:
            zone[v] = 1
        for v in sep.b:
            zone[v] = 2
        self.s_edges: List[Tuple[int, int, int]] = []
        side_edges: Tuple[List, List] = ([], [])
        for u, v, mult in g.edges():
            zu, zv = zone[u], zone[v]
            if zu == 0 and zv == 0:
                self.s_edges.append((u, v, mult))
            elif {zu, zv} == {1, 2}:
                raise ValueError(f"edge {u}-{v} crosses the separation")
        self.sides = []
        for idx, side_set in enumerate((sep.a, sep.b)):
            f_side = sorted(side_set & fset)
            forest = sorted(side_set - fset)
            trace = set(f_side) | set(self.s_order)
            comps = _build_forest_side(g, forest, trace)
            owned: List[Tuple[int, int, int]] = []
            f_side_set = set(f_side)
            for u, v, mult in g.edges():
                if u in f_side_set and (v in f_side_set or zone[v] == 0):
                    owned.append((u, v, mult))
                elif v in f_side_set and zone[u] == 0:
                    owned.append((u, v, mult))
            rel = set()
            for comp in comps:
                rel.update(t for t in comp.iface if zone[t] == 0)
            for u, v, _ in owned:
                if zone[u] == 0:
                    rel.add(u)
                if zone[v] == 0:
                    rel.add(v)
            self.sides.append((f_side, comps, owned, sorted(rel)))


def count_tables_two_way(
    g: MultiGraph,
    f: Iterable[int],
    sep: Separation,
    wts: IsolationWeights,
    *,
    c_cap: int,
    d_cap: int,
    e_cap: int,
    forced: FrozenSet[int] = frozenset(),
    layout: Optional[_TwoWayLayout] = None,
) -> Tuple[Table, _Packer]:
    """One full per-key table for a fixed weight draw.

    Stage structure: enumerate separator labels; per side, enumerate that
    side's f-vertices and extend by the anchored tables of the side's
    forest components; combine the two side tables under the separator term.
    """
    fset = frozenset(f)
    lay = layout if layout is not None else _TwoWayLayout(g, fset, sep)
    n = lay.n
    mask = (1 << (n + 1)) - 1
    packer = _Packer(i_cap=2 * n * min(c_cap, n) if n else 0,
                     d_cap=d_cap, c_cap=c_cap, e_cap=e_cap)
    degs = lay.degs
    labels: Dict[int, int] = {}
    comp_memo: Dict[Tuple, Table] = {}
    side_memo: Tuple[Dict, Dict] = ({}, {})

    def side_table(idx: int) -> Table:
        f_side, comps, owned, rel = lay.sides[idx]
        memo_key = tuple(labels[t] for t in rel)
        cached = side_memo[idx].get(memo_key)
        if cached is not None:
            return cached
        out: Table = {}
        for assign in _assignments(f_side, forced):
            for v, lab in zip(f_side, assign):
                labels[v] = lab
            term = _trace_term(f_side, owned, labels, wts, degs, packer)
            if term is None:
                continue
            acc: Table = {term: 1}
            for ci, comp in enumerate(comps):
                ck = (idx, ci, tuple(labels[t] for t in comp.iface))
                tbl = comp_memo.get(ck)
                if tbl is None:
                    tbl = _component_table(comp, labels, wts, degs, packer, mask, forced)
                    comp_memo[ck] = tbl
                acc = _conv(acc, tbl, packer, mask)
                if not acc:
                    break
            _union_into(out, acc, mask)
        side_memo[idx][memo_key] = out
        return out

    out: Table = {}
    ok = packer.ok
    for sigma in _assignments(lay.s_order, forced):
        for v, lab in zip(lay.s_order, sigma):
            labels[v] = lab
        term_s = _trace_term(lay.s_order, lay.s_edges, labels, wts, degs, packer)
        if term_s is None:
            continue
        ta = side_table(0)
        if not ta:
            continue
        tb = side_table(1)
        if not tb:
            continue
        for pa, ca in ta.items():
            base = term_s + pa
            cab = ca
            for pb, cb in tb.items():
                key = base + pb
                if ok(key):
                    nv = (out.get(key, 0) + cab * cb) & mask
                    if nv:
                        out[key] = nv
                    elif key in out:
                        del out[key]
    return out, packer


def _scan_accept(
    table: Table,
    packer: _Packer,
    n: int,
    k: int,
    d_limit: int,
) -> Optional[Tuple[int, int, int, int]]:
    for p in sorted(table):
        i, d, c, e = packer.unpack(p)
        if c > k or d > d_limit:
            continue
        exp = n - c - e + 1
        if exp <= 0:
            continue
        if table[p] & ((1 << exp) - 1):
            return (n * n * i + d, c, e, d)
    return None


def _table_to_keys(table: Table, packer: _Packer, n: int, mask: int) -> Dict[Tuple[int, int, int], int]:
    out: Dict[Tuple[int, int, int], int] = {}
    for p, cnt in table.items():
        i, d, c, e = packer.unpack(p)
        key = (n * n * i + d, c, e)
        nv = (out.get(key, 0) + cnt) & mask
        if nv:
            out[key] = nv
        elif key in out:
            del out[key]
    return out


def count_simple_separation(
    g: MultiGraph,
    f: Iterable[int],
    k: int,
    dbar: float,
    sep: Separation,
    rng: Optional[random.Random] = None,
    *,
    draws: Optional[int] = None,
    forced: Iterable[int] = (),
    weights: Optional[IsolationWeights] = None,
    full_tables: bool = False,
    stats: DeciderStats = STATS,
):
    """Two-way decider.

    Decision mode returns a DeciderOutcome after up to ``draws`` independent
    weight draws (default 2n).  With ``full_tables`` (requires ``weights``)
    it instead returns uncapped per-key totals for that single draw, the
    form the brute-force tally can be compared against.
    """
    fset = frozenset(f)
    forced_set = frozenset(forced)
    n = g.n
    if n > 62:
        raise ValueError("counting deciders support n <= 62")
    mask = (1 << (n + 1)) - 1
    layout = _TwoWayLayout(g, fset, sep)
    if full_tables:
        if weights is None:
            raise ValueError("full_tables mode needs explicit weights")
        two_m = sum(layout.degs.values())
        table, packer = count_tables_two_way(
            g, fset, sep, weights,
            c_cap=n, d_cap=max(1, two_m), e_cap=max(1, g.m),
            forced=forced_set, layout=layout,
        )
        return _table_to_keys(table, packer, n, mask)

    if weights is None and rng is None:
        raise ValueError("decision mode needs an rng or explicit weights")
    stats.calls += 1
    d_limit = math.floor(dbar * k)
    two_m = sum(layout.degs.values())
    c_cap = min(k, n)
    d_cap = min(d_limit, two_m)
    e_cap = min(n, g.m) if g.m else 0
    total_draws = draws if draws is not None else max(1, 2 * n)
    used = 0
    for t in range(total_draws):
        wts = weights if weights is not None else draw_weights(g, rng)
        table, packer = count_tables_two_way(
            g, fset, sep, wts,
            c_cap=c_cap, d_cap=max(d_cap, 0), e_cap=e_cap,
            forced=forced_set, layout=layout,
        )
        stats.draws += 1
        used = t + 1
        key = _scan_accept(table, packer, n, k, d_limit)
        if key is not None:
            stats.accepts += 1
            return DeciderOutcome(True, key, used)
        if weights is not None:
            break  # fixed weights: further draws are identical
    return DeciderOutcome(False, None, used)


# ----------------------------------------------------------------------
# three-way decider


@dataclasses.dataclass
class TriPartiteWeightedGraph:
    """Complete tripartite weight structure: w_xy[x, y] etc. carry the ring
    weight of the edge between class members x and y."""

    w_xy: np.ndarray
    w_xz: np.ndarray
    w_yz: np.ndarray


def triangle_weighted_sum(h: TriPartiteWeightedGraph, method: str = "matrix") -> int:
    """Sum over all triangles (x, y, z) of the product of the three edge
    weights.  ``matrix`` contracts via one matrix product (this is where a
    fast multiplication routine would slot in); ``loops`` is the cubic
    reference.  Overflow wraps modulo 2^64, which is harmless for ring use.
    """
    if method == "loops":
        nx, ny = h.w_xy.shape
        nz = h.w_xz.shape[1]
        total = 0
        for x in range(nx):
            for y in range(ny):
                wxy = int(h.w_xy[x, y])
                if wxy == 0:
                    continue
                for z in range(nz):
                    total += wxy * int(h.w_xz[x, z]) * int(h.w_yz[y, z])
        return total & ((1 << 64) - 1)
    if method != "matrix":
        raise ValueError(f"unknown method {method!r}")
    acc = h.w_xz @ h.w_yz.T  # [x, y] = sum_z w_xz * w_yz
    return int((h.w_xy * acc).sum()) & ((1 << 64) - 1)


class _ThreeWayLayout:
    """Ownership for the seven-class separation.

    Side i owns: its own class S_i (f-part enumerated, forest part via
    anchored tables), every edge incident to S_i, plus - cyclically - the
    vertex terms and internal edges of one pairwise class and its edges to
    the global class (S_12 -> side 1, S_23 -> side 2, S_13 -> side 3) and
    the cross-pair edges that share its index.  The global class S_123
    owns itself and its internal edges.
    """

    __slots__ = ("s123", "s123_edges", "pair_orders", "sides", "degs", "n")

    def __init__(self, g: MultiGraph, fset: FrozenSet[int], sep: ThreeWaySeparation):
        self.n = g.n
        self.degs = {v: g.degree(v) for v in g.vertices()}
        cls = {
            "1": sep.s1, "2": sep.s2, "3": sep.s3,
            "12": sep.s12, "13": sep.s13, "23": sep.s23,
            "123": sep.s123,
        }
        zone: Dict[int, str] = {}
        for name, verts in cls.items():
            for v in verts:
                zone[v] = name
        self.s123 = sorted(sep.s123)
        self.pair_orders = {name: sorted(cls[name]) for name in ("12", "13", "23")}
        edges_by_owner: Dict[str, List[Tuple[int, int, int]]] = {
            "1": [], "2": [], "3": [], "g": [],
        }
        pair_owner = {"12": "1", "23": "2", "13": "3"}
        cross_owner = {
            frozenset(("12", "13")): "1",
            frozenset(("12", "23")): "2",
            frozenset(("13", "23")): "3",
        }
        for u, v, mult in g.edges():
            zu, zv = zone[u], zone[v]
            su, sv = set(zu), set(zv)
            if not (su & sv):
                raise ValueError(f"edge {u}-{v} joins disjoint classes {zu}/{zv}")
            if zu == "123" and zv == "123":
                edges_by_owner["g"].append((u, v, mult))
            elif zu in ("1", "2", "3"):
                edges_by_owner[zu].append((u, v, mult))
            elif zv in ("1", "2", "3"):
                edges_by_owner[zv].append((u, v, mult))
            elif zu == zv:  # pairwise internal
                edges_by_owner[pair_owner[zu]].append((u, v, mult))
            elif "123" in (zu, zv):  # pairwise to global
                pair = zu if zv == "123" else zv
                edges_by_owner[pair_owner[pair]].append((u, v, mult))
            else:  # cross-pair
                edges_by_owner[cross_owner[frozenset((zu, zv))]].append((u, v, mult))
        self.s123_edges = edges_by_owner["g"]
        owned_pair = {"1": "12", "2": "23", "3": "13"}
        self.sides = []
        for i, name in enumerate(("1", "2", "3")):
            own = cls[name]
            f_side = sorted(own & fset)
            forest = own - fset
            pairs = [p for p in ("12", "13", "23") if name in p]
            trace = set(f_side) | set(self.s123)
            for p in pairs:
                trace |= cls[p]
            comps = _build_forest_side(g, sorted(forest), trace)
            # edges with a forest-part endpoint are settled inside the
            # anchored tables, not in the side's trace term
            owned = [e for e in edges_by_owner[name]
                     if e[0] not in forest and e[1] not in forest]
            extra_verts = sorted(cls[owned_pair[name]])
            self.sides.append((f_side, comps, owned, extra_verts, pairs))


def count_tables_three_way(
    g: MultiGraph,
    f: Iterable[int],
    sep: ThreeWaySeparation,
    wts: IsolationWeights,
    *,
    c_cap: int,
    d_cap: int,
    e_cap: int,
    forced: FrozenSet[int] = frozenset(),
    layout: Optional[_ThreeWayLayout] = None,
) -> Tuple[Table, _Packer]:
    """Per-key table via the tripartite contraction.

    For each labelling of the global class, each side yields a table per
    assignment pair of its two adjacent pairwise classes; stacking those as
    matrices over (pair assignment x pair assignment) per key turns the sum
    over the three pairwise classes into triangle-weighted sums, evaluated
    batched over all key splits in one einsum.
    """
    fset = frozenset(f)
    lay = layout if layout is not None else _ThreeWayLayout(g, fset, sep)
    n = lay.n
    mask = (1 << (n + 1)) - 1
    packer = _Packer(i_cap=2 * n * min(c_cap, n) if n else 0,
                     d_cap=d_cap, c_cap=c_cap, e_cap=e_cap)
    degs = lay.degs
    labels: Dict[int, int] = {}

    pair_assign = {
        name: list(_assignments(lay.pair_orders[name], forced))
        for name in ("12", "13", "23")
    }
    pair_dim = {name: len(pair_assign[name]) for name in pair_assign}
    comp_memo: Dict[Tuple, Table] = {}

    out: Table = {}
    for sigma in _assignments(lay.s123, forced):
        for v, lab in zip(lay.s123, sigma):
            labels[v] = lab
        term_g = _trace_term(lay.s123, lay.s123_edges, labels, wts, degs, packer)
        if term_g is None:
            continue

        side_maps: List[Dict[Tuple[int, int], Table]] = []
        feasible = True
        for i in range(3):
            f_side, comps, owned, extra_verts, pairs = lay.sides[i]
            pa, pb = pairs
            tables: Dict[Tuple[int, int], Table] = {}
            for ia, assign_a in enumerate(pair_assign[pa]):
                for v, lab in zip(lay.pair_orders[pa], assign_a):
                    labels[v] = lab
                for ib, assign_b in enumerate(pair_assign[pb]):
                    for v, lab in zip(lay.pair_orders[pb], assign_b):
                        labels[v] = lab
                    side_tbl: Table = {}
                    for assign_f in _assignments(f_side, forced):
                        for v, lab in zip(f_side, assign_f):
                            labels[v] = lab
                        term = _trace_term(
                            list(f_side) + extra_verts, owned, labels, wts, degs, packer
                        )
                        if term is None:
                            continue
                        acc: Table = {term: 1}
                        for ci, comp in enumerate(comps):
                            ck = (i, ci, tuple(labels[t] for t in comp.iface))
                            tbl = comp_memo.get(ck)
                            if tbl is None:
                                tbl = _component_table(
                                    comp, labels, wts, degs, packer, mask, forced
                                )
                                comp_memo[ck] = tbl
                            acc = _conv(acc, tbl, packer, mask)
                            if not acc:
                                break
                        _union_into(side_tbl, acc, mask)
                    if side_tbl:
                        tables[(ia, ib)] = side_tbl
            if not tables:
                feasible = False
                break
            side_maps.append(tables)
        if not feasible:
            continue

        # vertex terms of each pairwise class belong to exactly one side:
        # S_12 to side 1, S_23 to side 2, S_13 to side 3.  They were included
        # above through ``extra_verts`` in that side's trace term.

        # stack per-side tables into (key, pair, pair) arrays
        keysets = [sorted({k for t in m.values() for k in t}) for m in side_maps]
        if any(not ks for ks in keysets):
            continue
        kindex = [{k: j for j, k in enumerate(ks)} for ks in keysets]
        a1 = np.zeros((len(keysets[0]), pair_dim["12"], pair_dim["13"]), dtype=np.int64)
        a2 = np.zeros((len(keysets[1]), pair_dim["12"], pair_dim["23"]), dtype=np.int64)
        a3 = np.zeros((len(keysets[2]), pair_dim["13"], pair_dim["23"]), dtype=np.int64)
        for (ia, ib), t in side_maps[0].items():
            for k, cnt in t.items():
                a1[kindex[0][k], ia, ib] = cnt
        for (ia, ib), t in side_maps[1].items():
            for k, cnt in t.items():
                a2[kindex[1][k], ia, ib] = cnt
        for (ia, ib), t in side_maps[2].items():
            for k, cnt in t.items():
                a3[kindex[2][k], ia, ib] = cnt
        # batched triangle-weighted sums: one (x, y, z) contraction per key split
        tri = np.einsum("axy,bxz,cyz->abc", a1, a2, a3, optimize=True)
        for ak, bk, ck_ in zip(*np.nonzero(tri)):
            key = term_g + keysets[0][ak] + keysets[1][bk] + keysets[2][ck_]
            if packer.ok(key):
                nv = (out.get(key, 0) + int(tri[ak, bk, ck_])) & mask
                if nv:
                    out[key] = nv
                elif key in out:
                    del out[key]
    return out, packer


def count_three_way(
    g: MultiGraph,
    f: Iterable[int],
    k: int,
    dbar: float,
    sep: ThreeWaySeparation,
    rng: Optional[random.Random] = None,
    *,
    draws: Optional[int] = None,
    forced: Iterable[int] = (),
    weights: Optional[IsolationWeights] = None,
    full_tables: bool = False,
    stats: DeciderStats = STATS,
):
    """Three-way decider; same contract as count_simple_separation."""
    fset = frozenset(f)
    forced_set = frozenset(forced)
    n = g.n
    if n > 62:
        raise ValueError("counting deciders support n <= 62")
    mask = (1 << (n + 1)) - 1
    layout = _ThreeWayLayout(g, fset, sep)
    if full_tables:
        if weights is None:
            raise ValueError("full_tables mode needs explicit weights")
        two_m = sum(layout.degs.values())
        table, packer = count_tables_three_way(
            g, fset, sep, weights,
            c_cap=n, d_cap=max(1, two_m), e_cap=max(1, g.m),
            forced=forced_set, layout=layout,
        )
        return _table_to_keys(table, packer, n, mask)

    if weights is None and rng is None:
        raise ValueError("decision mode needs an rng or explicit weights")
    stats.calls += 1
    d_limit = math.floor(dbar * k)
    two_m = sum(layout.degs.values())
    c_cap = min(k, n)
    d_cap = min(d_limit, two_m)
    e_cap = min(n, g.m) if g.m else 0
    total_draws = draws if draws is not None else max(1, 2 * n)
    used = 0
    for t in range(total_draws):
        wts = weights if weights is not None else draw_weights(g, rng)
        table, packer = count_tables_three_way(
            g, fset, sep, wts,
            c_cap=c_cap, d_cap=max(d_cap, 0), e_cap=e_cap,
            forced=forced_set, layout=layout,
        )
        stats.draws += 1
        used = t + 1
        key = _scan_accept(table, packer, n, k, d_limit)
        if key is not None:
            stats.accepts += 1
            return DeciderOutcome(True, key, used)
        if weights is not None:
            break
    return DeciderOutcome(False, None, used)


# ----------------------------------------------------------------------
# witness extraction


def reconstruct_witness(
    decide: Callable[..., DeciderOutcome],
    g: MultiGraph,
    k: int,
    dbar: float,
    rng: random.Random,
    *,
    passes: int = 4,
    probe_draws: int = 4,
) -> Optional[FrozenSet[int]]:
    """Self-reduction: grow a forced set vertex by vertex, keeping a vertex
    exactly when the decider still accepts with it pinned into F.

    ``decide(forced=..., draws=...)`` must run the underlying decider with
    the given vertices pinned.  A vertex in every surviving solution is kept
    with probability >= 1 - 2^-probe_draws per pass; extra passes mop up
    unlucky rejections.  The returned set is verified outright - forest
    check, size, degree load - so the caller can trust it.
    """
    d_limit = math.floor(dbar * k)

    def valid(cand: Set[int]) -> bool:
        return (
            len(cand) <= k
            and sum(g.degree(v) for v in cand) <= d_limit
            and is_forest(minus(g, cand))
        )

    if not decide(forced=frozenset(), draws=None).accepted:
        return None
    forced: Set[int] = set()
    for _ in range(max(1, passes)):
        if valid(forced):
            return frozenset(forced)
        for v in g.vertices():
            if v in forced or len(forced) >= k:
                continue
            if decide(forced=frozenset(forced | {v}), draws=probe_draws).accepted:
                forced.add(v)
                if valid(forced):
                    return frozenset(forced)
    return frozenset(forced) if valid(forced) else None
