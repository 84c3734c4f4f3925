import random
from fractions import Fraction

import pytest

from crnlap import (
    build_digraph,
    enumerate_arborescences,
    enumerate_cycles,
    incidence_matrices,
    make_aux_tree,
    scc_partition,
    validate_aux_tree,
)
from crnlap import exact
from crnlap.errors import (
    BadOrderError,
    DuplicateVertexError,
    NonPositiveLabelError,
    RootNotInGraphError,
    SelfLoopError,
    UnknownEndpointError,
)
from crnlap.graph import aux_incidence, general_aux_tree

from generators import random_general_aux, random_scc_digraph, random_star_aux
from oracles import brute_arborescences, brute_cycles, brute_sccs


class TestBuildDigraph:
    def test_running_example_single_scc(self, running_graph):
        assert scc_partition(running_graph) == [{"1", "2", "3"}]
        assert running_graph.n_edges == 4
        assert running_graph.exact

    def test_single_vertex_no_edges(self):
        g = build_digraph(["1"], [])
        assert scc_partition(g) == [{"1"}]

    def test_two_cycles_two_sccs(self):
        edges = [(1, 2, 1), (2, 3, 1), (3, 1, 1), (4, 5, 1), (5, 4, 1)]
        g = build_digraph([1, 2, 3, 4, 5], edges)
        expected = brute_sccs(g.vertex_ids, g.edges)
        assert scc_partition(g) == expected
        assert len(expected) == 2

    def test_duplicate_vertex(self):
        with pytest.raises(DuplicateVertexError):
            build_digraph(["1", "1"], [])

    def test_unknown_endpoint(self):
        with pytest.raises(UnknownEndpointError):
            build_digraph(["1"], [("1", "2", 1)])

    def test_self_loop(self):
        with pytest.raises(SelfLoopError):
            build_digraph(["1", "2"], [("1", "1", 1)])

    def test_non_positive_label(self):
        with pytest.raises(NonPositiveLabelError):
            build_digraph(["1", "2"], [("1", "2", 0)])
        with pytest.raises(NonPositiveLabelError):
            build_digraph(["1", "2"], [("1", "2", Fraction(-1, 2))])

    def test_float_labels_switch_mode(self):
        g = build_digraph(["1", "2"], [("1", "2", 0.5), ("2", "1", 1)])
        assert not g.exact


class TestSccPartition:
    def test_dag_gives_singletons(self):
        g = build_digraph([1, 2, 3], [(1, 2, 1), (2, 3, 1)])
        assert scc_partition(g) == [{"1"}, {"2"}, {"3"}]

    def test_matches_bruteforce_on_random_graphs(self):
        rng = random.Random(20240701)
        for _ in range(60):
            n = rng.randint(1, 6)
            ids = [str(i) for i in range(1, n + 1)]
            edges = [
                (a, b, 1)
                for a in ids
                for b in ids
                if a != b and rng.random() < 0.3
            ]
            g = build_digraph(ids, edges)
            assert scc_partition(g) == brute_sccs(g.vertex_ids, g.edges)


class TestArborescences:
    def test_running_example_root1(self, running_graph):
        arbs = enumerate_arborescences(running_graph, "1")
        got = {a.edges for a in arbs}
        assert got == brute_arborescences(running_graph, "1")
        assert got == {
            frozenset({("2", "1"), ("3", "1")}),
            frozenset({("2", "3"), ("3", "1")}),
        }

    def test_running_example_root2(self, running_graph):
        arbs = enumerate_arborescences(running_graph, "2")
        assert {a.edges for a in arbs} == {frozenset({("1", "2"), ("3", "1")})}

    def test_two_cycle(self):
        g = build_digraph([1, 2], [(1, 2, 1), (2, 1, 1)])
        arbs = enumerate_arborescences(g, 1)
        assert [a.edges for a in arbs] == [frozenset({("2", "1")})]

    def test_unknown_root(self, running_graph):
        with pytest.raises(RootNotInGraphError):
            enumerate_arborescences(running_graph, "9")

    def test_matches_bruteforce(self):
        rng = random.Random(4)
        for _ in range(25):
            g = random_scc_digraph(rng, n_max=6)
            for v in g.vertex_ids:
                got = {a.edges for a in enumerate_arborescences(g, v)}
                assert got == brute_arborescences(g, v)
                for a in got:
                    # independent verifier: out-degree one off the root, acyclic
                    sources = sorted(s for (s, _) in a)
                    comp = g.scc_partition[g.component_index[v]]
                    assert sources == sorted(u for u in comp if u != v)
                    succ = dict(a)
                    for u in succ:
                        seen, w = set(), u
                        while w in succ:
                            assert w not in seen
                            seen.add(w)
                            w = succ[w]


class TestCycles:
    def test_running_example(self, running_graph):
        cycles = enumerate_cycles(running_graph)
        seqs = [c.vertex_seq for c in cycles]
        assert seqs == [("1", "2"), ("1", "2", "3")]

    def test_acyclic_graph(self):
        g = build_digraph([1, 2, 3], [(1, 2, 1), (1, 3, 1), (2, 3, 1)])
        assert enumerate_cycles(g) == []

    def test_complete_symmetric_on_three(self):
        edges = [(a, b, 1) for a in "123" for b in "123" if a != b]
        g = build_digraph(["1", "2", "3"], edges)
        cycles = enumerate_cycles(g)
        assert len(cycles) == 5  # three 2-cycles, two 3-cycles
        assert {frozenset(c.edges) for c in cycles} == brute_cycles(g)

    def test_matches_bruteforce(self):
        rng = random.Random(11)
        for _ in range(25):
            g = random_scc_digraph(rng, n_max=6)
            got = {frozenset(c.edges) for c in enumerate_cycles(g)}
            assert got == brute_cycles(g)


class TestIncidence:
    def test_single_edge(self):
        g = build_digraph([1, 2], [(1, 2, 1), (2, 1, 1)])
        inc, src = incidence_matrices(g)
        assert inc[:, 0].tolist() == [-1, 1]
        assert src[:, 0].tolist() == [1, 0]

    def test_empty_edge_set(self):
        g = build_digraph([1], [])
        inc, src = incidence_matrices(g)
        assert inc.shape == (1, 0) and src.shape == (1, 0)

    def test_running_example_columns_sum_zero(self, running_graph):
        inc, src = incidence_matrices(running_graph)
        assert inc.shape == (3, 4) and src.shape == (3, 4)
        assert all(sum(inc[:, j]) == 0 for j in range(4))
        assert all(sum(src[:, j]) == 1 for j in range(4))

    def test_aux_incidence_rank(self):
        rng = random.Random(7)
        for _ in range(20):
            g = random_scc_digraph(rng, n_max=6)
            aux = random_general_aux(rng, g)
            inc = aux_incidence(g, aux)
            assert exact.rank(inc) == g.n_vertices - g.n_components
            assert exact.nullspace(inc).shape[1] == 0


class TestAuxTrees:
    def test_chain_from_order(self, running_graph):
        aux = make_aux_tree(running_graph, "chain", [["1", "2", "3"]])
        assert aux.edges == (("1", "2"), ("2", "3"))
        assert aux.kind == "chain"

    def test_star_from_root(self, running_graph):
        aux = make_aux_tree(running_graph, "star", ["1"])
        assert set(aux.edges) == {("2", "1"), ("3", "1")}

    def test_single_vertex_component_contributes_nothing(self):
        g = build_digraph([1, 2, 3], [(1, 2, 1), (2, 1, 1)])
        aux = make_aux_tree(g, "chain", [["1", "2"], ["3"]])
        assert aux.edges == (("1", "2"),)

    def test_bad_order_rejected(self, running_graph):
        with pytest.raises(BadOrderError):
            make_aux_tree(running_graph, "chain", [["1", "2"]])
        with pytest.raises(BadOrderError):
            make_aux_tree(running_graph, "chain", [["1", "2", "2"]])

    def test_validate_ok_chain(self, running_graph):
        aux = make_aux_tree(running_graph, "chain", [["1", "2", "3"]])
        assert validate_aux_tree(running_graph, aux).ok

    def test_cycle_is_not_a_tree(self, running_graph):
        from crnlap.graph import AuxTree

        bad = AuxTree(
            edges=(("1", "2"), ("2", "3"), ("3", "1")),
            kind="general",
            component_map=(0, 0, 0),
        )
        report = validate_aux_tree(running_graph, bad)
        assert not report.ok
        assert "aux edges" in report.violation or "cycle" in report.violation

    def test_edges_outside_host_graph_allowed(self, running_graph):
        aux = general_aux_tree(running_graph, [("1", "3"), ("3", "2")])
        assert validate_aux_tree(running_graph, aux).ok

    def test_generated_trees_always_validate(self):
        rng = random.Random(99)
        for _ in range(30):
            g = random_scc_digraph(rng, n_max=6)
            for aux in (
                random_general_aux(rng, g),
                random_star_aux(rng, g),
            ):
                assert validate_aux_tree(g, aux).ok
