#!/usr/bin/env python3
"""
Tests for canonical ball forms, root measures and convergence toward the lamplighter limit.
"""

import random
import sys

import pytest

from families import cycle, de_bruijn, spider_web
from graph_core import MarkedGraph, OrientedGraph
from lamplighter import cayley_ball, schreier_level_graph
from limits import (
    ball_form,
    canonical_ball_form,
    cayley_tensor_ball,
    convergence_report,
    empirical_root_measure,
    labeled_stabilization,
    match_fraction,
    product_distance_bound_check,
)
from morphisms import find_iso
from utils import InvalidParameterError


def test_ball_forms_depend_on_mode():
    g = de_bruijn(2, 1)
    assert ball_form(g, 0, 1, "labeled") != ball_form(g, 1, 1, "labeled")
    assert ball_form(g, 0, 1) == ball_form(g, 1, 1)


def test_ball_form_records_the_root():
    path = OrientedGraph.build(["a", "b", "c"], [(0, 1), (1, 2)])
    assert canonical_ball_form(path, 0, "underlying") != canonical_ball_form(path, 1, "underlying")
    assert canonical_ball_form(path, 0, "underlying") == canonical_ball_form(path, 2, "underlying")
    assert empirical_root_measure(path, 2, "underlying").class_count() == 2
    assert empirical_root_measure(path, 2).class_count() == 3


def test_empirical_root_measure():
    assert empirical_root_measure(cycle(5), 1).dirac
    mixed = empirical_root_measure(spider_web(2, 2, 1), 1)
    assert mixed.class_count() >= 2
    assert sum(mixed.classes.values()) == 1
    assert mixed.to_dict()["total"] == 4


def test_spider_web_and_schreier_balls_agree():
    for N in range(1, 5):
        for r in range(3):
            web = empirical_root_measure(spider_web(2, N, 1), r)
            gamma = empirical_root_measure(schreier_level_graph(2, N), r)
            assert set(web.classes) == set(gamma.classes)


def test_match_fraction():
    reference = cayley_ball(2, 1)
    assert match_fraction(spider_web(2, 2, 2), 0, reference) == 1
    assert match_fraction(spider_web(2, 3, 3), 1, reference) == 1
    assert match_fraction(spider_web(2, 2, 2), 1, reference) < 1
    with pytest.raises(InvalidParameterError):
        match_fraction(spider_web(2, 2, 2), 2, reference)


def test_product_distance_bound():
    same = (MarkedGraph(cycle(4), 0),) * 4
    b2, b3, c3 = de_bruijn(2, 2), de_bruijn(2, 3), cycle(3)
    mixed = (MarkedGraph(b2, 0), MarkedGraph(b3, 0), MarkedGraph(c3, 0), MarkedGraph(c3, 0))
    report = product_distance_bound_check([same, mixed])
    assert report.all_hold
    assert report.rows[0].left == 0


def test_cayley_tensor_ball_is_the_cayley_ball():
    for r in range(3):
        reference = cayley_ball(2, r)
        for M in (2, 3):
            product_ball = cayley_tensor_ball(2, r, M)
            result = find_iso(product_ball.graph, reference.graph, "strong",
                              roots=(product_ball.root, reference.root))
            assert result.found


def random_rooted_graph(rng: random.Random, n_max: int) -> MarkedGraph:
    n = rng.randint(1, n_max)
    arcs = [(rng.randrange(v), v) if rng.random() < 0.5 else (v, rng.randrange(v)) for v in range(1, n)]
    arcs += [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, n))]
    return MarkedGraph(OrientedGraph.build([str(i) for i in range(n)], arcs), rng.randrange(n))


def test_product_distance_bound_on_random_quadruples():
    rng = random.Random(23)
    samples = [tuple(random_rooted_graph(rng, 4) for _ in range(4)) for _ in range(50)]
    report = product_distance_bound_check(samples)
    assert len(report.rows) == 50
    assert report.all_hold


def test_convergence_report_rows():
    rows = convergence_report(2, [(2, 2), (3, 3)], 1)
    assert [(row.n, row.m, row.r) for row in rows] == [(2, 2, 0), (2, 2, 1), (3, 3, 0), (3, 3, 1)]
    assert all(row.match_fraction == 1 for row in rows if row.r == 0)
    assert rows[3].match_fraction == 1
    assert rows[0].to_dict()["N"] == 2


def test_labeled_balls_stabilize():
    assert labeled_stabilization(2, 0, 3) == 0
    assert labeled_stabilization(2, 1, 5) == 2
    assert labeled_stabilization(2, 2, 6) is not None


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
