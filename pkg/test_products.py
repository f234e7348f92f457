#!/usr/bin/env python3
"""
Tests for morphisms, tensor products, line graphs and the explicit isomorphisms.
"""

import random
import sys

import numpy as np
import pytest

from families import cycle, de_bruijn
from graph_core import OrientedGraph, adjacency_matrix, underlying
from lamplighter import schreier_level_graph
from morphisms import drop_first_symbol, find_iso, is_covering, prefix_truncation, slice_projection
from products import (
    GraphMorphism,
    de_bruijn_line_iso,
    gamma_line_iso,
    identity_morphism,
    line_graph,
    line_morphism,
    line_tensor_iso,
    morphism_tensor,
    spiderweb_line_iso,
    spiderweb_tensor_iso,
    tensor,
)
from utils import InvalidGraphError


def random_graph(rng: random.Random, n_max: int) -> OrientedGraph:
    n = rng.randint(1, n_max)
    arcs = [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, 2 * n))]
    return OrientedGraph.build([str(i) for i in range(n)], arcs)


def test_tensor_adjacency_is_kronecker():
    rng = random.Random(7)
    for _ in range(25):
        g, h = random_graph(rng, 6), random_graph(rng, 6)
        assert np.array_equal(adjacency_matrix(tensor(g, h)),
                              np.kron(adjacency_matrix(g), adjacency_matrix(h)))


def test_tensor_is_commutative_up_to_strong_isomorphism():
    rng = random.Random(13)
    for _ in range(15):
        g, h = random_graph(rng, 4), random_graph(rng, 4)
        assert find_iso(tensor(g, h), tensor(h, g), "strong").found


def test_tensor_of_coverings_is_a_covering():
    first = prefix_truncation(2, 1)
    assert is_covering(morphism_tensor(first, identity_morphism(cycle(3))))
    assert is_covering(morphism_tensor(first, slice_projection(2, 1, 2, 2)))
    assert not is_covering(morphism_tensor(drop_first_symbol(2, 2), identity_morphism(cycle(2))))


def test_stars_of_a_tensor_are_products_of_stars():
    rng = random.Random(5)
    for _ in range(10):
        g, h = random_graph(rng, 5), random_graph(rng, 5)
        t = tensor(g, h)
        for v in range(g.n):
            for w in range(h.n):
                assert t.out_degree(v * h.n + w) == g.out_degree(v) * h.out_degree(w)
                assert t.in_degree(v * h.n + w) == g.in_degree(v) * h.in_degree(w)
    s = tensor(underlying(cycle(3)), underlying(cycle(4)))
    assert all(s.degree(x) == 4 for x in range(s.n))


def test_tensor_with_cycle_keeps_left_labels():
    t = tensor(de_bruijn(2, 1), cycle(3))
    assert {e.label for e in t.edges} == {"R_0", "R_1"}
    t = tensor(de_bruijn(2, 1), de_bruijn(2, 1))
    assert "(R_0,R_1)" in {e.label for e in t.edges}


def test_tensor_of_serre_graphs_pairs_inverses():
    t = tensor(underlying(cycle(3)), underlying(cycle(2)))
    assert not t.directed
    assert t.m == 6 * 4


def test_mixed_tensor_is_rejected():
    with pytest.raises(InvalidGraphError):
        tensor(cycle(2), underlying(cycle(2)))


def test_line_graph_counts():
    g = de_bruijn(2, 2)
    lg = line_graph(g)
    assert lg.n == g.m
    assert lg.m == sum(g.in_degree(v) * g.out_degree(v) for v in range(g.n))


def test_spider_web_is_de_bruijn_tensor_cycle():
    for k in (2, 3):
        for N in range(4):
            for M in range(1, 5):
                assert spiderweb_tensor_iso(k, N, M).is_isomorphism("strong")


def test_explicit_line_graph_isomorphisms():
    for k in (2, 3):
        for N in range(4):
            assert de_bruijn_line_iso(k, N).is_isomorphism("weak")
            assert gamma_line_iso(k, N).is_isomorphism("weak")
    assert spiderweb_line_iso(2, 2, 3).is_isomorphism("weak")


def test_line_of_tensor_is_tensor_of_lines():
    rng = random.Random(11)
    for _ in range(15):
        g, h = random_graph(rng, 5), random_graph(rng, 5)
        assert line_tensor_iso(g, h).is_isomorphism("weak")


def test_morphism_composition_and_inverse():
    phi = spiderweb_tensor_iso(2, 2, 3)
    back = phi.inverse()
    assert phi.followed_by(back).vertex_map == identity_morphism(phi.source).vertex_map
    assert back.is_isomorphism("strong")
    assert phi.vertex_image_name("01:2") == "(01,2)"


def test_functoriality():
    g = de_bruijn(2, 2)
    ident = identity_morphism(g)
    assert line_morphism(ident).is_isomorphism("strong")
    product = morphism_tensor(ident, identity_morphism(cycle(2)))
    assert product.is_isomorphism("strong")


def test_non_morphism_is_detected():
    g = cycle(3)
    bad = GraphMorphism(g, g, (0, 0, 0), (0, 1, 2))
    assert not bad.is_morphism()
    assert not bad.is_isomorphism()


def test_mixed_orientation_is_not_a_morphism():
    loop = cycle(1)
    serre_loop = underlying(loop)
    double_loop = OrientedGraph.build(["0"], [(0, 0), (0, 0)])
    assert not GraphMorphism(serre_loop, double_loop, (0,), (0, 1)).is_morphism()
    assert not GraphMorphism(loop, serre_loop, (0,), (0,)).is_morphism()
    assert GraphMorphism(loop, double_loop, (0,), (1,)).is_morphism()


def test_gamma_line_iso_lands_on_the_next_level():
    phi = gamma_line_iso(2, 2)
    assert phi.target == schreier_level_graph(2, 3)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
