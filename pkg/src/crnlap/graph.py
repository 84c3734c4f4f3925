"""Labeled digraphs, strong connectivity, arborescences, cycles, auxiliary trees.

Vertex ids are opaque strings mapped to dense indices in declaration order;
all matrices produced here and downstream use that dense order.  Strongly
connected components are computed once at construction and kept in a
canonical order (ascending minimal vertex id) so that block layouts are
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadOrderError,
    DuplicateEdgeError,
    DuplicateVertexError,
    InvalidAuxTreeError,
    NonPositiveLabelError,
    RootNotInGraphError,
    RootOutsideComponentError,
    SelfLoopError,
    UnknownEndpointError,
)

Edge = tuple[str, str]


def _coerce_label(value) -> Fraction | float:
    """Rational labels stay exact; floats switch the graph to float mode."""
    if isinstance(value, bool):
        raise NonPositiveLabelError(f"label {value!r} is not a number")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        return value
    raise NonPositiveLabelError(f"label {value!r} is not a number")


class LabeledDigraph:
    """Simple directed graph with positive edge labels (rate constants).

    Immutable after construction.  The SCC partition is computed eagerly;
    `exact` is True when every label is rational (int or Fraction), in which
    case downstream matrix computations run in exact arithmetic.
    """

    def __init__(self, vertices: Sequence, edges: Iterable[tuple]):
        ids = [str(v) for v in vertices]
        if len(set(ids)) != len(ids):
            seen = set()
            dup = next(v for v in ids if v in seen or seen.add(v))
            raise DuplicateVertexError(f"duplicate vertex id {dup!r}")
        self.vertex_ids: tuple[str, ...] = tuple(ids)
        self.index: dict[str, int] = {v: i for i, v in enumerate(ids)}

        edge_list: list[Edge] = []
        labels: dict[Edge, Fraction | float] = {}
        for src, dst, label in edges:
            s, d = str(src), str(dst)
            if s not in self.index:
                raise UnknownEndpointError(f"edge source {s!r} is not a vertex")
            if d not in self.index:
                raise UnknownEndpointError(f"edge target {d!r} is not a vertex")
            if s == d:
                raise SelfLoopError(f"self-loop at vertex {s!r}")
            if (s, d) in labels:
                raise DuplicateEdgeError(f"duplicate edge {s!r} -> {d!r}")
            k = _coerce_label(label)
            if k <= 0:
                raise NonPositiveLabelError(f"label of edge {s}->{d} must be > 0")
            edge_list.append((s, d))
            labels[(s, d)] = k
        self.edges: tuple[Edge, ...] = tuple(edge_list)
        self.exact: bool = all(isinstance(k, Fraction) for k in labels.values())
        if not self.exact:
            labels = {e: float(k) for e, k in labels.items()}
        self.labels: dict[Edge, Fraction | float] = labels

        self._out: list[list[int]] = [[] for _ in ids]
        for s, d in self.edges:
            self._out[self.index[s]].append(self.index[d])
        self.scc_partition: tuple[frozenset[str], ...] = self._compute_sccs()
        self.component_index: dict[str, int] = {}
        for ci, comp in enumerate(self.scc_partition):
            for v in comp:
                self.component_index[v] = ci

    # -- structure -------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_ids)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_components(self) -> int:
        return len(self.scc_partition)

    def component_vertices(self, ci: int) -> list[str]:
        """Vertices of component `ci` in declaration order."""
        comp = self.scc_partition[ci]
        return [v for v in self.vertex_ids if v in comp]

    def component_edges(self, ci: int) -> list[Edge]:
        comp = self.scc_partition[ci]
        return [(s, d) for (s, d) in self.edges if s in comp and d in comp]

    def has_strongly_connected_components(self) -> bool:
        """True when no edge leaves its SCC (weak reversibility of networks)."""
        return all(
            self.component_index[s] == self.component_index[d] for s, d in self.edges
        )

    def _compute_sccs(self) -> tuple[frozenset[str], ...]:
        n = self.n_vertices
        index = [-1] * n
        low = [0] * n
        on_stack = [False] * n
        stack: list[int] = []
        comps: list[frozenset[str]] = []
        counter = 0
        for start in range(n):
            if index[start] != -1:
                continue
            work: list[list[int]] = [[start, 0]]
            while work:
                v, ei = work[-1]
                if ei == 0:
                    index[v] = low[v] = counter
                    counter += 1
                    stack.append(v)
                    on_stack[v] = True
                advanced = False
                while ei < len(self._out[v]):
                    w = self._out[v][ei]
                    ei += 1
                    if index[w] == -1:
                        work[-1][1] = ei
                        work.append([w, 0])
                        advanced = True
                        break
                    if on_stack[w]:
                        low[v] = min(low[v], index[w])
                if advanced:
                    continue
                work.pop()
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp.append(w)
                        if w == v:
                            break
                    comps.append(frozenset(self.vertex_ids[i] for i in comp))
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[v])
        comps.sort(key=lambda c: min(c))
        return tuple(comps)

    def __repr__(self) -> str:  # pragma: no cover
        return f"LabeledDigraph({self.n_vertices} vertices, {self.n_edges} edges)"


def build_digraph(vertices: Sequence, edges: Iterable[tuple]) -> LabeledDigraph:
    """Construct a labeled digraph from (source, target, label) triples."""
    return LabeledDigraph(vertices, edges)


def scc_partition(g: LabeledDigraph) -> list[set[str]]:
    """Strongly connected components, ascending by minimal vertex id."""
    return [set(c) for c in g.scc_partition]


# -- arborescences and cycles --------------------------------------------


@dataclass(frozen=True)
class Arborescence:
    """Spanning in-tree of one component: every non-root vertex has exactly
    one outgoing edge and all paths lead to the root."""

    root: str
    edges: frozenset[Edge]


def enumerate_arborescences(g: LabeledDigraph, root) -> list[Arborescence]:
    """All spanning trees of root's component, directed towards the root.

    Exhaustive backtracking over out-edge choices; intended for component
    sizes up to ~10.
    """
    root = str(root)
    if root not in g.index:
        raise RootNotInGraphError(f"root {root!r} is not a vertex")
    comp = g.scc_partition[g.component_index[root]]
    others = [v for v in g.vertex_ids if v in comp and v != root]
    choices = {
        v: [(v, d) for (s, d) in g.edges if s == v and d in comp] for v in others
    }
    result: list[Arborescence] = []

    def extend(i: int, succ: dict[str, str], chosen: list[Edge]) -> None:
        if i == len(others):
            result.append(Arborescence(root, frozenset(chosen)))
            return
        v = others[i]
        for (s, d) in choices[v]:
            # following successors from d must not loop back to v
            w, ok = d, True
            while w in succ:
                w = succ[w]
                if w == v:
                    ok = False
                    break
            if ok:
                succ[v] = d
                chosen.append((s, d))
                extend(i + 1, succ, chosen)
                chosen.pop()
                del succ[v]

    extend(0, {}, [])
    return result


@dataclass(frozen=True)
class Cycle:
    """Directed simple cycle, stored rotated so the smallest vertex leads."""

    edges: tuple[Edge, ...]
    vertices: frozenset[str]

    @staticmethod
    def from_vertex_seq(seq: Sequence[str]) -> "Cycle":
        pivot = min(range(len(seq)), key=lambda i: seq[i])
        rotated = list(seq[pivot:]) + list(seq[:pivot])
        edges = tuple(
            (rotated[i], rotated[(i + 1) % len(rotated)]) for i in range(len(rotated))
        )
        return Cycle(edges=edges, vertices=frozenset(rotated))

    @property
    def vertex_seq(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.edges)


def enumerate_cycles(g: LabeledDigraph) -> list[Cycle]:
    """All directed simple cycles, sorted lexicographically by vertex sequence.

    Each cycle is found once by only exploring vertices >= the start vertex,
    so the start is the cycle's minimum.
    """
    order = sorted(g.vertex_ids)
    pos = {v: i for i, v in enumerate(order)}
    out = {v: sorted(d for (s, d) in g.edges if s == v) for v in g.vertex_ids}
    cycles: list[Cycle] = []

    def walk(start: str, v: str, path: list[str], visited: set[str]) -> None:
        for d in out[v]:
            if d == start:
                cycles.append(Cycle.from_vertex_seq(path))
            elif pos[d] > pos[start] and d not in visited:
                visited.add(d)
                path.append(d)
                walk(start, d, path, visited)
                path.pop()
                visited.remove(d)

    for start in order:
        walk(start, start, [start], {start})
    cycles.sort(key=lambda c: c.vertex_seq)
    return cycles


# -- incidence matrices ----------------------------------------------------


def incidence_matrices(g: LabeledDigraph) -> tuple[np.ndarray, np.ndarray]:
    """(incidence, source) matrices, V x E, columns in edge declaration order.

    Entries are exact integers in object arrays so they compose with both
    rational and float arithmetic downstream.
    """
    n, m = g.n_vertices, g.n_edges
    inc = np.zeros((n, m), dtype=object)
    src = np.zeros((n, m), dtype=object)
    for j, (s, d) in enumerate(g.edges):
        inc[g.index[s], j] = -1
        inc[g.index[d], j] = 1
        src[g.index[s], j] = 1
    return inc, src


def aux_incidence(g: LabeledDigraph, aux: "AuxTree") -> np.ndarray:
    """Incidence matrix of an auxiliary tree, V x |aux.edges|."""
    n = g.n_vertices
    inc = np.zeros((n, len(aux.edges)), dtype=object)
    for j, (s, d) in enumerate(aux.edges):
        inc[g.index[s], j] = -1
        inc[g.index[d], j] = 1
    return inc


# -- auxiliary trees --------------------------------------------------------


@dataclass(frozen=True)
class AuxTree:
    """Spanning tree per component encoding a partial order on vertices.

    `kind` is "chain" (total order), "star" (common maximum) or "general".
    Edges need not belong to the host graph.  `component_map` gives, per
    edge, the canonical component index.
    """

    edges: tuple[Edge, ...]
    kind: str
    component_map: tuple[int, ...] = field(default=())

    def component_edge_indices(self, ci: int) -> list[int]:
        return [j for j, c in enumerate(self.component_map) if c == ci]


@dataclass(frozen=True)
class AuxTreeReport:
    ok: bool
    violation: str | None = None


def make_aux_tree(g: LabeledDigraph, kind: str, spec) -> AuxTree:
    """Build a chain or star auxiliary tree from per-component specs.

    For kind="chain", `spec` is a sequence of vertex orders (one per
    component, in any order); for kind="star", a sequence of roots.  Every
    component must be covered exactly once.
    """
    if kind not in ("chain", "star"):
        raise BadOrderError(f"unknown aux tree kind {kind!r}")
    edges: list[Edge] = []
    comp_map: list[int] = []
    covered: set[int] = set()
    if kind == "chain":
        for order in spec:
            order = [str(v) for v in order]
            for v in order:
                if v not in g.index:
                    raise BadOrderError(f"unknown vertex {v!r} in chain order")
            ci = g.component_index[order[0]]
            comp = g.scc_partition[ci]
            if set(order) != set(comp) or len(order) != len(comp):
                raise BadOrderError(
                    f"chain order {order} is not a permutation of component {sorted(comp)}"
                )
            if ci in covered:
                raise BadOrderError(f"component {sorted(comp)} specified twice")
            covered.add(ci)
            for a, b in zip(order, order[1:]):
                edges.append((a, b))
                comp_map.append(ci)
    else:
        for root in spec:
            root = str(root)
            if root not in g.index:
                raise RootOutsideComponentError(f"unknown star root {root!r}")
            ci = g.component_index[root]
            if ci in covered:
                comp = g.scc_partition[ci]
                raise BadOrderError(f"component {sorted(comp)} specified twice")
            covered.add(ci)
            for v in g.component_vertices(ci):
                if v != root:
                    edges.append((v, root))
                    comp_map.append(ci)
    if covered != set(range(g.n_components)):
        missing = sorted(set(range(g.n_components)) - covered)
        names = [sorted(g.scc_partition[ci]) for ci in missing]
        raise BadOrderError(f"spec does not cover components {names}")
    # group edges by canonical component so core matrices come out block-diagonal
    keyed = sorted(range(len(edges)), key=lambda j: (comp_map[j], j))
    return AuxTree(
        edges=tuple(edges[j] for j in keyed),
        kind=kind,
        component_map=tuple(comp_map[j] for j in keyed),
    )


def general_aux_tree(g: LabeledDigraph, edges: Iterable[Edge]) -> AuxTree:
    """Wrap arbitrary edges as a general auxiliary tree (validated)."""
    es = tuple((str(a), str(b)) for a, b in edges)
    comp_map = []
    for (a, b) in es:
        if a not in g.index or b not in g.index:
            raise InvalidAuxTreeError(f"edge {a}->{b} has an unknown endpoint")
        comp_map.append(g.component_index[a])
    keyed = sorted(range(len(es)), key=lambda j: (comp_map[j], j))
    aux = AuxTree(
        edges=tuple(es[j] for j in keyed),
        kind="general",
        component_map=tuple(comp_map[j] for j in keyed),
    )
    report = validate_aux_tree(g, aux)
    if not report.ok:
        raise InvalidAuxTreeError(report.violation)
    return aux


def validate_aux_tree(g: LabeledDigraph, aux: AuxTree) -> AuxTreeReport:
    """Check all auxiliary-tree invariants against g's SCC partition.

    Returns the first violated invariant as a report instead of raising.
    """
    for (a, b) in aux.edges:
        if a not in g.index or b not in g.index:
            return AuxTreeReport(False, f"edge {a}->{b} has an unknown endpoint")
        if a == b:
            return AuxTreeReport(False, f"self-loop {a}->{b}")
    if len(set(aux.edges)) != len(aux.edges):
        return AuxTreeReport(False, "duplicate aux edge")
    for (a, b) in aux.edges:
        if g.component_index[a] != g.component_index[b]:
            return AuxTreeReport(False, f"edge {a}->{b} crosses components")
    for ci in range(g.n_components):
        comp = g.scc_partition[ci]
        comp_edges = [(a, b) for (a, b) in aux.edges if a in comp]
        if len(comp_edges) != len(comp) - 1:
            return AuxTreeReport(
                False,
                f"component {sorted(comp)} has {len(comp_edges)} aux edges, "
                f"expected {len(comp) - 1}",
            )
        # undirected acyclicity via union-find; count + acyclic => spanning tree
        parent = {v: v for v in comp}

        def find(v: str) -> str:
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for (a, b) in comp_edges:
            ra, rb = find(a), find(b)
            if ra == rb:
                return AuxTreeReport(
                    False, f"aux edges contain an undirected cycle in {sorted(comp)}"
                )
            parent[ra] = rb
        if aux.kind == "chain" and comp_edges:
            out_deg: dict[str, int] = {}
            in_deg: dict[str, int] = {}
            for (a, b) in comp_edges:
                out_deg[a] = out_deg.get(a, 0) + 1
                in_deg[b] = in_deg.get(b, 0) + 1
            if max(out_deg.values()) > 1 or max(in_deg.values()) > 1:
                return AuxTreeReport(
                    False, f"chain edges in {sorted(comp)} do not form a path"
                )
        if aux.kind == "star" and comp_edges:
            targets = {b for (_, b) in comp_edges}
            sources = [a for (a, _) in comp_edges]
            if len(targets) != 1 or len(set(sources)) != len(sources):
                return AuxTreeReport(
                    False, f"star edges in {sorted(comp)} do not share a single root"
                )
            root = next(iter(targets))
            if root in sources:
                return AuxTreeReport(False, f"star root {root} is also a source")
    if aux.component_map and len(aux.component_map) == len(aux.edges):
        for (a, _), ci in zip(aux.edges, aux.component_map):
            if g.component_index[a] != ci:
                return AuxTreeReport(False, "component_map is inconsistent")
    return AuxTreeReport(True)


def chain_order(g: LabeledDigraph, aux: AuxTree, ci: int) -> list[str]:
    """Recover the vertex order i1..im encoded by a chain component."""
    comp = g.scc_partition[ci]
    comp_edges = [(a, b) for (a, b) in aux.edges if a in comp]
    if not comp_edges:
        return g.component_vertices(ci)
    succ = dict(comp_edges)
    targets = set(succ.values())
    start = next(v for v in succ if v not in targets)
    order = [start]
    while order[-1] in succ:
        order.append(succ[order[-1]])
    return order


def default_chain_aux(g: LabeledDigraph) -> AuxTree:
    """Chain aux tree using declaration order within each component."""
    return make_aux_tree(
        g, "chain", [g.component_vertices(ci) for ci in range(g.n_components)]
    )
