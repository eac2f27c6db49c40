"""Cayley graphs of finite A-generated groups and their subgraphs.

The Cayley graph of G has the elements as vertices and one positive edge
(g, a) from g to g*a per element and base letter; inverse edges are
implicit.  Subgraphs are value objects holding a vertex set and a set of
positive edges over a fixed group.

This module computes path spans with signed traversal counts, the
covering subgraph of a folded basepointed graph (the part of the Cayley
graph swept out by paths from 1 whose labels are readable in the given
graph from its basepoint), connected components, border edge sets of a
vertex set, and the two-edge connectivity check used to route spanning
trees around a chosen edge pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .groups import FinGroup
from .stallings import LabeledGraph, transition_maps

Edge = Tuple[int, int]                  # (element id, base letter)
TraversalCount = Dict[Edge, int]        # signed traversal counts


@dataclass(frozen=True)
class CayleySubgraph:
    """Subgraph of the Cayley graph of `group`: element-id vertices plus
    positive edges (g, a); both endpoints of every edge are vertices."""

    group: FinGroup
    vertices: frozenset
    pos_edges: frozenset

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "pos_edges", frozenset(self.pos_edges))
        for g, a in self.pos_edges:
            if g not in self.vertices or self.group.step(g, a) not in self.vertices:
                raise ValueError("edge (%d, %d) has an endpoint outside the "
                                 "vertex set" % (g, a))

    def dst(self, e: Edge) -> int:
        return self.group.step(e[0], e[1])

    def __contains__(self, e: Edge) -> bool:
        return e in self.pos_edges


def cayley_graph(G: FinGroup) -> CayleySubgraph:
    """The full Cayley graph: |G| vertices, |G|*|A| positive edges."""
    n = G.order()
    edges = frozenset((g, a) for g in range(n) for a in range(1, G.n_letters + 1))
    return CayleySubgraph(G, frozenset(range(n)), edges)


def path_span(G: FinGroup, start: int, w: Sequence[int]
              ) -> Tuple[CayleySubgraph, int, TraversalCount]:
    """Walk w from start: the subgraph spanned by the traversed edges,
    the endpoint, and per-edge signed traversal counts (+1 forward, -1
    backward across each positive edge)."""
    counts: TraversalCount = {}
    vertices = {start}
    cur = start
    for x in w:
        if x > 0:
            e = (cur, x)
            cur = G.step(cur, x)
            counts[e] = counts.get(e, 0) + 1
        else:
            cur = G.step(cur, x)
            e = (cur, -x)
            counts[e] = counts.get(e, 0) - 1
        vertices.add(cur)
    return (CayleySubgraph(G, frozenset(vertices), frozenset(counts)),
            cur, counts)


def covering_subgraph(A: LabeledGraph, G: FinGroup) -> CayleySubgraph:
    """Subgraph of the Cayley graph spanned by all edges lying on some
    path from 1 whose label is readable in A from its basepoint.

    Computed as the projection of the product graph A x Gamma(G)
    restricted to the states reachable from (basepoint, 1): a Cayley
    edge belongs to the span iff some reachable product state traverses
    it.  Always connected and contains 1.
    """
    if A.basepoint is None:
        raise ValueError("covering subgraph needs a basepointed graph")
    if A.n_letters != G.n_letters:
        raise ValueError("alphabet sizes differ")
    out, inn = transition_maps(A)
    start = (A.basepoint, 0)
    seen = {start}
    queue = [start]
    vertices = {0}
    edges = set()
    while queue:
        p, g = queue.pop()
        for a in range(1, A.n_letters + 1):
            q = out.get((p, a))
            if q is not None:
                edges.add((g, a))
                s = (q, G.step(g, a))
                vertices.add(s[1])
                if s not in seen:
                    seen.add(s)
                    queue.append(s)
            q = inn.get((p, a))
            if q is not None:
                h = G.step(g, -a)
                edges.add((h, a))
                s = (q, h)
                vertices.add(h)
                if s not in seen:
                    seen.add(s)
                    queue.append(s)
    return CayleySubgraph(G, frozenset(vertices), frozenset(edges))


def components(X: CayleySubgraph) -> List[frozenset]:
    """Connected components (undirected over included edges); isolated
    vertices are singletons.  Sorted by smallest member."""
    adj: Dict[int, List[int]] = {v: [] for v in X.vertices}
    for e in X.pos_edges:
        d = X.dst(e)
        adj[e[0]].append(d)
        adj[d].append(e[0])
    seen = set()
    comps = []
    for v in X.vertices:
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        seen.add(v)
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        comps.append(frozenset(comp))
    return sorted(comps, key=min)


def component_of(X: CayleySubgraph, v: int) -> frozenset:
    """The component of v in X."""
    for comp in components(X):
        if v in comp:
            return comp
    raise ValueError("vertex %d not in subgraph" % v)


def intersect(X: CayleySubgraph, Y: CayleySubgraph) -> CayleySubgraph:
    if X.group is not Y.group:
        raise ValueError("subgraphs live over different groups")
    return CayleySubgraph(X.group, X.vertices & Y.vertices,
                          X.pos_edges & Y.pos_edges)


def union(X: CayleySubgraph, Y: CayleySubgraph) -> CayleySubgraph:
    if X.group is not Y.group:
        raise ValueError("subgraphs live over different groups")
    return CayleySubgraph(X.group, X.vertices | Y.vertices,
                          X.pos_edges | Y.pos_edges)


def translate(g: int, X: CayleySubgraph) -> CayleySubgraph:
    """Left translation g*X: vertex x -> g*x, edge (x, a) -> (g*x, a)."""
    G = X.group
    return CayleySubgraph(G,
                          frozenset(G.mul_ids(g, v) for v in X.vertices),
                          frozenset((G.mul_ids(g, x), a) for x, a in X.pos_edges))


def borders(X: CayleySubgraph, Z: Iterable[int]
            ) -> Tuple[frozenset, frozenset]:
    """(D, C): positive edges of X leaving Z (source in Z, target out)
    and entering Z (source out, target in).  Loops at Z never appear."""
    zset = set(Z)
    if not zset <= set(X.vertices):
        raise ValueError("Z must be a subset of the vertices of X")
    D, C = set(), set()
    for e in X.pos_edges:
        s_in = e[0] in zset
        t_in = X.dst(e) in zset
        if s_in and not t_in:
            D.add(e)
        elif t_in and not s_in:
            C.add(e)
    return frozenset(D), frozenset(C)


def connected_without_two_edges(G: FinGroup, e: Edge, f: Edge) -> bool:
    """Whether the Cayley graph stays connected after deleting the
    inverse-closed pairs of two distinct positive edges.  Requires the
    separated generation property (>= 2 letters, distinct nonidentity
    images), under which this always holds."""
    if not G.separated():
        raise ValueError("group does not satisfy the separated generation "
                         "property")
    if e == f:
        raise ValueError("edges must be distinct")
    n = G.order()
    seen = [False] * n
    seen[0] = True
    stack = [0]
    count = 1
    while stack:
        g = stack.pop()
        for a in range(1, G.n_letters + 1):
            for edge, h in (((g, a), G.step(g, a)),
                            ((G.step(g, -a), a), G.step(g, -a))):
                if edge == e or edge == f or seen[h]:
                    continue
                seen[h] = True
                count += 1
                stack.append(h)
    return count == n


def subgraph_to_dot(X: CayleySubgraph, name: str = "X",
                    z: Optional[Iterable[int]] = None,
                    d_edges: Optional[Iterable[Edge]] = None,
                    c_edges: Optional[Iterable[Edge]] = None) -> str:
    """DOT rendering with an optional highlighted vertex class Z and
    border edge classes D (leaving) and C (entering)."""
    zset = set(z or ())
    dset = set(d_edges or ())
    cset = set(c_edges or ())
    names = X.group.alphabet
    lines = ["digraph %s {" % name]
    for v in sorted(X.vertices):
        style = ' [style=filled, fillcolor=lightblue]' if v in zset else ""
        lines.append('  "%d"%s;' % (v, style))
    for edge in sorted(X.pos_edges):
        g, a = edge
        color = ""
        if edge in dset:
            color = ', color=red'
        elif edge in cset:
            color = ', color=blue'
        lines.append('  "%d" -> "%d" [label="%s"%s];'
                     % (g, X.dst(edge), names[a - 1], color))
    lines.append("}")
    return "\n".join(lines)
