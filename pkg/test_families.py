#!/usr/bin/env python3
"""
Tests for the graph family constructors.
"""

import sys

import pytest

from families import (
    INFINITY,
    cycle,
    de_bruijn,
    parse_spiderweb_name,
    rose,
    spider_web,
    theta_graph,
    theta_graph_M,
    theta_path_counts,
    word_index,
)
from utils import InvalidParameterError, check_alphabet


def test_de_bruijn_shape_and_edges():
    g = de_bruijn(2, 3)
    assert (g.n, g.m) == (8, 16)
    assert all(g.out_degree(v) == 2 and g.in_degree(v) == 2 for v in range(g.n))
    e = g.edges[g.out_edge_by_label(g.vertex_id("011"), "R_1")]
    assert g.name(e.dst) == "111"
    assert word_index((0, 1, 1), 2) == g.vertex_id("011")


def test_rose_is_level_zero():
    g = rose(3)
    assert (g.n, g.m) == (1, 3)
    assert [e.label for e in g.edges] == ["R_0", "R_1", "R_2"]


def test_spider_web_sizes():
    for k, N, M in ((2, 3, 3), (3, 2, 4), (2, 0, 5)):
        g = spider_web(k, N, M)
        assert g.n == M * k ** N
        assert g.m == k * g.n
    g = spider_web(2, 2, 3)
    e = g.edges[g.out_edge_by_label(g.vertex_id("01:2"), "R_0")]
    assert g.name(e.dst) == "10:0"
    assert parse_spiderweb_name("01:2") == ((0, 1), 2)


def test_infinite_spider_web_window():
    g = spider_web(2, 2, INFINITY, window=2)
    assert g.n == 5 * 4
    assert g.m == 4 * 4 * 2
    assert g.attrs["segment"] is True
    assert g.out_degree(g.vertex_id("00:2")) == 0
    assert g.in_degree(g.vertex_id("00:-2")) == 0


def test_cycle_and_line_window():
    loop = cycle(1)
    assert loop.edges[0].src == loop.edges[0].dst == 0
    line = cycle(INFINITY, window=3)
    assert (line.n, line.m) == (7, 6)
    with pytest.raises(InvalidParameterError):
        cycle(INFINITY)
    with pytest.raises(InvalidParameterError):
        cycle(0)


def test_theta_graphs():
    g = theta_graph(2, 3)
    assert g.n == 8
    assert theta_path_counts(2, 3) == [(0, 2), (1, 1), (2, 1)]
    isolated = [v for v in range(g.n) if g.out_degree(v) == g.in_degree(v) == 0]
    assert len(isolated) == 2

    g = theta_graph_M(2, 3, 2)
    assert g.n == 16
    isolated = [v for v in range(g.n) if g.out_degree(v) == g.in_degree(v) == 0]
    assert len(isolated) == 4
    assert all(e.weight == 2 for e in g.edges)
    for k in (2, 3):
        for N in range(1, 6):
            assert theta_graph(k, N).n == k ** N


def test_parameter_validation():
    with pytest.raises(InvalidParameterError):
        check_alphabet(1)
    with pytest.raises(InvalidParameterError):
        check_alphabet(37)
    with pytest.raises(InvalidParameterError):
        de_bruijn(2, -1)
    with pytest.raises(InvalidParameterError):
        spider_web(2, 2, 0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
