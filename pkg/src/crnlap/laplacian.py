"""Laplacian matrix, tree constants, core-matrix and cycle decompositions.

All identities here are exact in rational mode; float mode carries a
relative residual tolerance of 1e-12.  The core matrix of a labeled digraph
G_k for an auxiliary tree with incidence matrix I_aux is the unique
invertible matrix A_core with

    A_k diag(K_k) = -I_aux @ A_core @ I_aux.T
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exact
from .errors import InvalidAuxTreeError, NotStronglyConnectedError
from .graph import (
    AuxTree,
    Cycle,
    LabeledDigraph,
    aux_incidence,
    chain_order,
    enumerate_arborescences,
    enumerate_cycles,
    incidence_matrices,
    validate_aux_tree,
)

FLOAT_RESIDUAL_RTOL = 1e-12


def _require_scc(g: LabeledDigraph) -> None:
    if not g.has_strongly_connected_components():
        raise NotStronglyConnectedError(
            "graph has edges between strongly connected components"
        )


def _label_vector(g: LabeledDigraph) -> np.ndarray:
    if g.exact:
        return np.array([g.labels[e] for e in g.edges], dtype=object)
    return np.array([g.labels[e] for e in g.edges], dtype=float)


def laplacian_matrix(g: LabeledDigraph) -> np.ndarray:
    """A_k = incidence @ diag(labels) @ source.T; columns sum to zero."""
    inc, src = incidence_matrices(g)
    k = _label_vector(g)
    if g.exact:
        return (inc * k[np.newaxis, :]) @ src.T
    return (exact.to_float(inc) * k[np.newaxis, :]) @ exact.to_float(src).T


@dataclass(frozen=True)
class TreeConstants:
    """Per-vertex sums, over spanning in-trees rooted there, of label products.

    Spans the kernel of the Laplacian on each strongly connected component.
    """

    values: np.ndarray  # dense vertex order; Fractions in exact mode
    backend: str

    def as_float(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def tree_constants(g: LabeledDigraph, backend: str = "enumeration") -> TreeConstants:
    """Tree constants via arborescence enumeration or matrix minors."""
    _require_scc(g)
    if backend not in ("enumeration", "minors"):
        raise ValueError(f"unknown backend {backend!r}")
    n = g.n_vertices
    values = np.empty(n, dtype=object)
    if backend == "enumeration":
        for v in g.vertex_ids:
            total = Fraction(0) if g.exact else 0.0
            for arb in enumerate_arborescences(g, v):
                prod = Fraction(1) if g.exact else 1.0
                for e in arb.edges:
                    prod *= g.labels[e]
                total += prod
            values[g.index[v]] = total
    else:
        a = laplacian_matrix(g)
        for ci in range(g.n_components):
            verts = g.component_vertices(ci)
            idx = [g.index[v] for v in verts]
            neg_a = -(a[np.ix_(idx, idx)])
            for pos, v in enumerate(verts):
                keep = [p for p in range(len(verts)) if p != pos]
                minor = neg_a[np.ix_(keep, keep)]
                if g.exact:
                    values[g.index[v]] = exact.det(minor)
                else:
                    values[g.index[v]] = (
                        float(np.linalg.det(np.asarray(minor, dtype=float)))
                        if minor.size
                        else 1.0
                    )
    if not g.exact:
        values = np.asarray(values, dtype=float)
    return TreeConstants(values=values, backend=backend)


# -- core matrix -----------------------------------------------------------


@dataclass(frozen=True)
class CoreDecomposition:
    """Core matrix with its ingredients and the verification residual."""

    aux: AuxTree
    core: np.ndarray  # |aux.edges| x |aux.edges|
    laplacian: np.ndarray  # V x V
    tree_constants: TreeConstants
    residual: float  # max |A_k diag(K) + I_aux core I_aux.T|

    @property
    def exact(self) -> bool:
        return exact.is_exact(self.core)


def _chain_left_inverse(g: LabeledDigraph, aux: AuxTree) -> np.ndarray:
    """J with J @ I_aux = -Identity: row (i->i') has ones at vertices <= i."""
    j = np.zeros((len(aux.edges), g.n_vertices), dtype=object)
    for ci in range(g.n_components):
        order = chain_order(g, aux, ci)
        rank_of = {v: t for t, v in enumerate(order)}
        for r in aux.component_edge_indices(ci):
            src = aux.edges[r][0]
            for v in order:
                if rank_of[v] <= rank_of[src]:
                    j[r, g.index[v]] = 1
    return j


def _star_left_inverse(g: LabeledDigraph, aux: AuxTree) -> np.ndarray:
    """J with J @ I_aux = +Identity: row (i->root) has ones except at i."""
    j = np.zeros((len(aux.edges), g.n_vertices), dtype=object)
    for ci in range(g.n_components):
        verts = g.component_vertices(ci)
        for r in aux.component_edge_indices(ci):
            src = aux.edges[r][0]
            for v in verts:
                if v != src:
                    j[r, g.index[v]] = 1
    return j


def _general_left_inverse(g: LabeledDigraph, aux: AuxTree) -> np.ndarray:
    """Exact L with L @ I_aux = -Identity, by Gaussian elimination per column."""
    inc = aux_incidence(g, aux)
    m = len(aux.edges)
    l = np.zeros((m, g.n_vertices), dtype=object)
    for r in range(m):
        rhs = np.zeros(m, dtype=object)
        rhs[r] = Fraction(-1)
        col = exact.solve(inc.T.astype(object), rhs)
        if col is None:  # unreachable for a valid tree: I_aux has full column rank
            raise InvalidAuxTreeError("aux incidence matrix is rank deficient")
        l[r, :] = col
    return l


def core_matrix(
    g: LabeledDigraph, aux: AuxTree, consts: TreeConstants | None = None
) -> CoreDecomposition:
    """Decompose A_k diag(K_k) = -I_aux @ core @ I_aux.T for the given tree.

    The core is computed as -J (A_k diag K) J.T with the kind-specific
    generalized left-inverse J; the defining identity is re-verified and its
    max-abs residual stored (exactly zero in rational mode).  Precomputed
    tree constants may be passed to avoid re-enumeration.
    """
    _require_scc(g)
    report = validate_aux_tree(g, aux)
    if not report.ok:
        raise InvalidAuxTreeError(report.violation)
    a = laplacian_matrix(g)
    if consts is None:
        consts = tree_constants(g, backend="enumeration")
    if aux.kind == "chain":
        j = _chain_left_inverse(g, aux)
    elif aux.kind == "star":
        j = _star_left_inverse(g, aux)
    else:
        j = _general_left_inverse(g, aux)
    inc = aux_incidence(g, aux)
    if g.exact:
        m = a * consts.values[np.newaxis, :]
        core = -(j @ m @ j.T)
        res = m + inc @ core @ inc.T
        residual = float(max((abs(v) for v in res.flat), default=0))
    else:
        m = a * consts.as_float()[np.newaxis, :]
        jf, incf = exact.to_float(j), exact.to_float(inc)
        core = -(jf @ m @ jf.T)
        res = m + incf @ core @ incf.T
        residual = float(np.max(np.abs(res))) if res.size else 0.0
    return CoreDecomposition(
        aux=aux, core=core, laplacian=a, tree_constants=consts, residual=residual
    )


@dataclass(frozen=True)
class DecompositionReport:
    residual_ok: bool
    invertible: bool
    chain_signs_ok: bool | None
    star_signs_ok: bool | None

    @property
    def passed(self) -> bool:
        return (
            self.residual_ok
            and self.invertible
            and self.chain_signs_ok is not False
            and self.star_signs_ok is not False
        )


def verify_core_decomposition(
    d: CoreDecomposition, tol: float | None = None
) -> DecompositionReport:
    """Check residual, invertibility, and kind-specific sign structure."""
    core = d.core
    if d.exact:
        scale_tol = 0.0
    else:
        m = d.laplacian * d.tree_constants.as_float()[np.newaxis, :]
        scale = float(np.max(np.abs(m))) if m.size else 0.0
        scale_tol = (tol if tol is not None else FLOAT_RESIDUAL_RTOL) * scale
    residual_ok = d.residual <= scale_tol

    invertible = True
    n_comp = max(d.aux.component_map, default=-1) + 1
    for ci in range(n_comp):
        idx = d.aux.component_edge_indices(ci)
        if not idx:
            continue
        block = core[np.ix_(idx, idx)]
        if d.exact:
            invertible = invertible and exact.det(block) != 0
        else:
            invertible = invertible and np.linalg.matrix_rank(block) == len(idx)

    chain_ok: bool | None = None
    star_ok: bool | None = None
    m_e = len(d.aux.edges)
    if d.aux.kind == "chain":
        if d.exact:
            chain_ok = all(core[i, j] >= 0 for i in range(m_e) for j in range(m_e))
        else:
            entry_scale = float(np.max(np.abs(core))) if core.size else 0.0
            chain_ok = bool(np.all(np.asarray(core, dtype=float) >= -1e-12 * entry_scale))
        chain_ok = chain_ok and all(core[i, i] > 0 for i in range(m_e))
    elif d.aux.kind == "star":
        star_ok = all(core[i, i] > 0 for i in range(m_e)) and all(
            core[i, j] <= 0 for i in range(m_e) for j in range(m_e) if i != j
        )
        if star_ok:
            for i in range(m_e):
                row = sum(abs(core[i, j]) for j in range(m_e) if j != i)
                col = sum(abs(core[j, i]) for j in range(m_e) if j != i)
                if abs(core[i, i]) < row or abs(core[i, i]) < col:
                    star_ok = False
                    break
    return DecompositionReport(
        residual_ok=bool(residual_ok),
        invertible=bool(invertible),
        chain_signs_ok=chain_ok,
        star_signs_ok=star_ok,
    )


# -- cycle decomposition ----------------------------------------------------


@dataclass(frozen=True)
class CycleDecomposition:
    """A_k diag(K_k) as the unique positive sum of unit-label cycle Laplacians."""

    terms: tuple[tuple[Cycle, Fraction | float], ...]


def cycle_laplacian(g: LabeledDigraph, cycle: Cycle) -> np.ndarray:
    """Unit-label Laplacian of a cycle, embedded in the full vertex space."""
    n = g.n_vertices
    a = np.zeros((n, n), dtype=object)
    for (s, d) in cycle.edges:
        a[g.index[d], g.index[s]] = 1
        a[g.index[s], g.index[s]] = -1
    return a


def _cycle_coefficient(g: LabeledDigraph, cycle: Cycle) -> Fraction | float:
    """Sum over subgraphs where the cycle is the only cycle and every vertex
    of its component has out-degree one, of edge-label products."""
    ci = g.component_index[next(iter(cycle.vertices))]
    comp = g.scc_partition[ci]
    free = [v for v in g.component_vertices(ci) if v not in cycle.vertices]
    choices = {
        v: [(v, d) for (s, d) in g.edges if s == v and d in comp] for v in free
    }
    base = Fraction(1) if g.exact else 1.0
    for e in cycle.edges:
        base *= g.labels[e]
    total = Fraction(0) if g.exact else 0.0

    def reaches_cycle(succ: dict[str, str], start: str) -> bool:
        seen = set()
        v = start
        while v in succ:
            if v in seen:
                return False
            seen.add(v)
            v = succ[v]
        return v in cycle.vertices

    def extend(i: int, succ: dict[str, str], prod) -> None:
        nonlocal total
        if i == len(free):
            if all(reaches_cycle(succ, v) for v in free):
                total += prod
            return
        v = free[i]
        for (s, d) in choices[v]:
            succ[v] = d
            extend(i + 1, succ, prod * g.labels[(s, d)])
            del succ[v]

    extend(0, {}, base)
    return total


def cycle_decomposition(g: LabeledDigraph) -> CycleDecomposition:
    """One positive coefficient per simple cycle; the weighted unit-label
    cycle Laplacians sum exactly to A_k diag(K_k)."""
    _require_scc(g)
    terms = tuple(
        (cycle, _cycle_coefficient(g, cycle)) for cycle in enumerate_cycles(g)
    )
    return CycleDecomposition(terms=terms)


def cycle_reconstruction(g: LabeledDigraph, dec: CycleDecomposition) -> np.ndarray:
    """Sum of the weighted cycle Laplacians (should equal A_k diag K_k)."""
    n = g.n_vertices
    total = np.zeros((n, n), dtype=object)
    for cycle, coeff in dec.terms:
        total = total + coeff * cycle_laplacian(g, cycle)
    if not g.exact:
        total = np.asarray(total, dtype=float)
    return total
