#!/usr/bin/env python3
"""
Tests for JSON/DOT interchange and the named graph store.
"""

import sys

import pytest

from families import de_bruijn, spider_web, theta_graph_M
from graph_core import underlying
from graph_storage import (
    GraphStorage,
    graph_from_dot,
    graph_from_json,
    graph_to_dot,
    graph_to_json,
    read_graph,
    write_graph,
)
from utils import InvalidGraphError


def test_dot_export_of_spider_web_has_every_node():
    text = graph_to_dot(spider_web(2, 3, 3))
    node_lines = [line for line in text.splitlines() if line.strip().startswith("n") and "->" not in line]
    assert len(node_lines) == 24
    assert 'label="000:0"' in text


def test_dot_and_json_read_back_exactly():
    for g in (underlying(de_bruijn(2, 2)), theta_graph_M(2, 3, 2), de_bruijn(3, 0)):
        assert graph_from_dot(graph_to_dot(g)) == g
        assert graph_from_json(graph_to_json(g)) == g
    weighted = graph_from_dot(graph_to_dot(theta_graph_M(2, 2, 1)))
    assert {e.weight for e in weighted.edges} == {2}


def test_malformed_input_is_rejected():
    with pytest.raises(InvalidGraphError):
        graph_from_json("{not json")
    with pytest.raises(InvalidGraphError):
        graph_from_dot("digraph G {\n  this is not dot;\n}\n")


def test_write_graph_picks_format_by_suffix(tmp_path):
    g = de_bruijn(2, 1)
    write_graph(tmp_path / "b.dot", g)
    write_graph(tmp_path / "b.json", g)
    assert (tmp_path / "b.dot").read_text().startswith("digraph")
    assert read_graph(tmp_path / "b.dot") == read_graph(tmp_path / "b.json") == g


def test_graph_storage(tmp_path):
    storage = GraphStorage(tmp_path / "graphs")
    assert storage.save_graph("bruijn", de_bruijn(2, 2))
    assert storage.save_graph("web", spider_web(2, 1, 2))
    assert storage.list_graphs() == ["bruijn", "web"]
    assert storage.get_graph("bruijn") == de_bruijn(2, 2)
    assert storage.get_graph("missing") is None

    stats = storage.get_storage_stats()
    assert stats["total_graphs"] == 2
    assert stats["graphs_by_family"] == {"debruijn": 1, "spiderweb": 1}

    assert storage.delete_graph("web")
    assert not storage.delete_graph("web")
    assert not storage.save_graph("../escape", de_bruijn(2, 1))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
