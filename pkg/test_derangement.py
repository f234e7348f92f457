#!/usr/bin/env python3
"""
Tests for path signatures, graph derangement and components of tensor products.
"""

import math
import random
import sys

import pytest

from derangement import (
    Path,
    closed_path_derangements,
    components,
    count_paths_by_signature,
    graph_derangement,
    path_derangement,
    path_lifting_check,
    predict_components,
    tensor_cycle_iso,
    walks,
)
from families import INFINITY, cycle, de_bruijn, spider_web
from graph_core import OrientedGraph, disjoint_union, subgraph, underlying
from morphisms import find_iso
from products import tensor
from utils import DisconnectedGraphError, InvalidGraphError, NotIsomorphicError


def random_connected_graph(rng: random.Random, n_max: int) -> OrientedGraph:
    n = rng.randint(1, n_max)
    arcs = [(rng.randrange(v), v) if rng.random() < 0.5 else (v, rng.randrange(v)) for v in range(1, n)]
    arcs += [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, n))]
    return OrientedGraph.build([str(i) for i in range(n)], arcs)


def test_path_signature_and_reverse():
    s = underlying(cycle(3))
    p = Path(s, (0, 1, 2), 0)
    assert p.is_valid() and p.is_closed() and p.is_reduced()
    assert p.signature() == (1, 1, 1)
    assert path_derangement(p) == 3
    back = p.reverse()
    assert back.signature() == (-1, -1, -1)
    assert back.reverse() == p
    assert not Path(s, (0, 3), 0).is_reduced()
    with pytest.raises(InvalidGraphError):
        Path(cycle(3), (0,), 0).reverse()


def test_walks_count_every_direction():
    # each vertex of a cycle has one outgoing and one incoming edge
    assert len(list(walks(cycle(5), 0, 3))) == 8
    assert len(list(walks(cycle(5), 0, 3, reduced=True))) == 2


def test_cycle_derangement():
    assert 3 in closed_path_derangements(cycle(3), 0, 3)
    assert graph_derangement(cycle(6)) == 6
    assert graph_derangement(de_bruijn(2, 2)) == 1
    assert graph_derangement(OrientedGraph.build(["a", "b"], [(0, 1)])) == 0


def test_derangement_matches_closed_path_oracle():
    rng = random.Random(13)
    for _ in range(40):
        g = random_connected_graph(rng, 6)
        found = closed_path_derangements(g, 0, 2 * g.n + 2)
        assert math.gcd(*found, 0) == graph_derangement(g)


def test_disconnected_graph_is_rejected():
    with pytest.raises(DisconnectedGraphError):
        graph_derangement(disjoint_union([cycle(2), cycle(3)]))


def test_rank_isomorphism():
    phi = tensor_cycle_iso(cycle(6), 0, 3)
    assert phi.is_isomorphism("weak")
    with pytest.raises(NotIsomorphicError):
        tensor_cycle_iso(de_bruijn(2, 2), 0, 2)


def test_component_formulas_disagree_on_cycle_four():
    prediction = predict_components(cycle(4), 10)
    assert (prediction.canonical, prediction.residue_formula) == (2, 4)
    assert prediction.discrepancy
    assert len(components(tensor(cycle(4), cycle(10)))) == 2
    data = prediction.to_dict()
    assert data["discrepancy"] is True
    assert (data["canonical"], data["paper_formula"]) == (2, 4)


def test_component_count_follows_gcd():
    rng = random.Random(17)
    graphs = [de_bruijn(2, n) for n in (1, 2, 3)] + [cycle(n) for n in range(1, 9)]
    graphs += [random_connected_graph(rng, 5) for _ in range(10)]
    for g in graphs:
        for M in range(1, 13):
            prediction = predict_components(g, M)
            assert len(components(tensor(g, cycle(M)))) == prediction.canonical


def test_components_of_a_cycle_tensor_are_isomorphic():
    rng = random.Random(29)
    graphs = [de_bruijn(2, 2), cycle(4), cycle(6)] + [random_connected_graph(rng, 5) for _ in range(5)]
    for g in graphs:
        for M in (2, 3, 4, 6):
            product = tensor(g, cycle(M))
            parts = [subgraph(product, block).graph for block in components(product)]
            for other in parts[1:]:
                assert find_iso(parts[0], other, "strong").found


def test_infinite_cycle_prediction():
    assert predict_components(cycle(3), INFINITY).canonical == 3
    tree = OrientedGraph.build(["a", "b"], [(0, 1)])
    assert predict_components(tree, INFINITY).canonical == INFINITY
    assert predict_components(tree, INFINITY).to_dict()["canonical"] == "inf"


def test_spider_web_is_connected():
    for k, N, M in ((2, 2, 3), (3, 1, 4), (2, 3, 5)):
        assert len(components(spider_web(k, N, M))) == 1


def test_signature_counts_and_path_lifting():
    counts = count_paths_by_signature(cycle(4), 0, (1, 1, -1))
    assert counts == {1: 1}
    assert path_lifting_check(de_bruijn(2, 1), cycle(3), 3)
    assert path_lifting_check(cycle(2), cycle(3), 4)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
