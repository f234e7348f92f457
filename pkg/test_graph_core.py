#!/usr/bin/env python3
"""
Tests for oriented and Serre graphs, balls and the rooted distance.
"""

import sys
from fractions import Fraction

import numpy as np
import pytest

from families import cycle, de_bruijn, spider_web
from graph_core import (
    Edge,
    MarkedGraph,
    OrientedGraph,
    SerreGraph,
    Vertex,
    adjacency_matrix,
    ball,
    choose_orientation,
    disjoint_union,
    distances_from,
    invert_label,
    relabel,
    rooted_distance,
    subgraph,
    underlying,
)
from utils import InvalidGraphError


def small_graph() -> OrientedGraph:
    return OrientedGraph.build(["a", "b", "c"], [(0, 1, "x"), (1, 2, "y"), (2, 0, "x"), (1, 1, "z")])


def test_build_and_adjacency_lists():
    g = small_graph()
    assert (g.n, g.m) == (3, 4)
    assert g.out_edges(1) == (1, 3)
    assert g.in_edges(1) == (0, 3)
    assert g.vertex_id("c") == 2
    assert g.out_edge_by_label(1, "z") == 3
    assert g.labels() == ["x", "y", "z"]


def test_dense_ids_are_enforced():
    with pytest.raises(InvalidGraphError):
        OrientedGraph([Vertex(1)], [])
    with pytest.raises(InvalidGraphError):
        OrientedGraph([Vertex(0)], [Edge(0, 0, 3)])


def test_underlying_pairs_every_edge_with_a_formal_inverse():
    g = small_graph()
    s = underlying(g)
    assert s.m == 2 * g.m
    assert s.pairs() == [(i, g.m + i) for i in range(g.m)]
    assert s.edges[g.m].src == 1 and s.edges[g.m].dst == 0
    assert s.edges[g.m].label == "x^-1"
    assert invert_label(invert_label("x")) == "x"
    # a loop pair contributes two half-edges at its vertex
    assert s.degree(1) == 4


def test_serre_involution_is_validated():
    with pytest.raises(InvalidGraphError):
        SerreGraph([Vertex(0)], [Edge(0, 0, 0, inverse=0)])
    with pytest.raises(InvalidGraphError):
        SerreGraph([Vertex(0), Vertex(1)], [Edge(0, 0, 1, inverse=1), Edge(1, 0, 1, inverse=0)])


def test_choose_orientation_inverts_underlying():
    g = small_graph()
    assert choose_orientation(underlying(g)) == g


def test_adjacency_matrix_counts_parallel_edges():
    g = OrientedGraph.build(["0", "1"], [(0, 1), (0, 1), (1, 1)])
    assert adjacency_matrix(g).tolist() == [[0, 2], [0, 1]]
    assert np.array_equal(adjacency_matrix(cycle(3)), np.roll(np.eye(3, dtype=int), 1, axis=1))


def test_dict_round_trip_keeps_structure_and_attrs():
    g = underlying(de_bruijn(2, 2))
    h = SerreGraph.from_dict(g.to_dict())
    assert h == g
    assert h.attrs == {"family": "debruijn", "k": 2, "n": 2}


def test_subgraph_and_disjoint_union():
    g = de_bruijn(2, 2)
    induced = subgraph(g, [0, 1])
    assert induced.graph.n == 2
    assert [(e.src, e.dst) for e in induced.graph.edges] == [(0, 0), (0, 1)]
    union = disjoint_union([cycle(2), cycle(3)])
    assert (union.n, union.m) == (5, 5)
    assert union.edges[2].src == 2


def test_relabel_keeps_unmapped_labels():
    g = relabel(small_graph(), {"x": "w"})
    assert [e.label for e in g.edges] == ["w", "y", "w", "z"]


def test_radius_zero_ball_is_the_bare_root():
    g = spider_web(2, 2, 1)
    b = ball(g, 0, 0)
    assert (b.graph.n, b.graph.m, b.root) == (1, 0, 0)


def test_ball_of_cycle():
    b = ball(cycle(5), 0, 1)
    assert b.source_vertices == (0, 1, 4)
    assert b.graph.m == 2
    assert distances_from(cycle(5), 0) == {0: 0, 1: 1, 4: 1, 2: 2, 3: 2}


def test_rooted_distance():
    c5, c6 = cycle(5), cycle(6)
    assert rooted_distance(MarkedGraph(c5, 0), MarkedGraph(c5, 3)) == 0
    assert rooted_distance(MarkedGraph(c5, 0), MarkedGraph(c6, 0)) == Fraction(1, 3)
    assert rooted_distance(MarkedGraph(c5, 0), MarkedGraph(c6, 0), max_radius=1) == Fraction(1, 2)


def test_rooted_distance_is_a_pseudometric():
    rooted = [
        MarkedGraph(cycle(5), 0), MarkedGraph(cycle(6), 0),
        MarkedGraph(de_bruijn(2, 1), 0), MarkedGraph(de_bruijn(2, 2), 0), MarkedGraph(de_bruijn(2, 2), 1),
        MarkedGraph(spider_web(2, 2, 1), 0), MarkedGraph(spider_web(2, 2, 1), 1),
    ]
    d = [[rooted_distance(a, b) for b in rooted] for a in rooted]
    for i in range(len(rooted)):
        assert d[i][i] == 0
        for j in range(len(rooted)):
            assert d[i][j] == d[j][i]
            assert d[i][j] >= rooted_distance(rooted[i], rooted[j], mode="underlying")
            for k in range(len(rooted)):
                assert d[i][k] <= d[i][j] + d[j][k]


def test_rooted_distance_separates_loop_roots():
    g = spider_web(2, 2, 1)
    loop, plain = g.vertex_id("00:0"), g.vertex_id("01:0")
    assert rooted_distance(MarkedGraph(g, loop), MarkedGraph(g, plain)) == 1


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
