#!/usr/bin/env python3
"""
Tests for isomorphism search, coverings, transitivity and Euler/Hamilton paths.
"""

import itertools
import sys

import pytest

from families import cycle, de_bruijn, spider_web
from graph_core import OrientedGraph, relabel
from lamplighter import cbar_label, schreier_level_graph
from morphisms import (
    SearchLimits,
    SearchStatus,
    automorphism_orbits,
    closed_path_census,
    de_bruijn_sequence,
    drop_first_symbol,
    eulerian_circuit,
    find_iso,
    gamma_bruijn_iso,
    hamiltonian_cycle,
    is_vertex_transitive,
    is_covering,
    orbit_closure,
    prefix_truncation,
    slice_projection,
    spiderweb_hamiltonian_cycle,
    transitivity_witnesses,
    verify_path,
)
from utils import InvalidParameterError, UnbalancedGraphError


def test_find_iso_on_small_families():
    result = find_iso(spider_web(2, 2, 1), de_bruijn(2, 2), "strong")
    assert result.found and result.witness.verify()
    back = result.witness.morphism.inverse()
    assert back.is_isomorphism("strong")
    assert back.followed_by(result.witness.morphism).vertex_map == tuple(range(back.source.n))
    assert find_iso(cycle(5), cycle(6)).status is SearchStatus.NONE
    rooted = find_iso(cycle(4), cycle(4), roots=(0, 2))
    assert rooted.found and rooted.witness.morphism.vertex_map[0] == 2


def test_schreier_and_de_bruijn_are_weakly_isomorphic():
    for k in (2, 3):
        for N in range(4):
            assert gamma_bruijn_iso(k, N).verify()


def test_no_label_bijection_makes_them_strongly_isomorphic():
    for N in (2, 3):
        gamma = schreier_level_graph(2, N)
        for perm in itertools.permutations(range(2)):
            mapping = {f"R_{i}": cbar_label(perm[i]) for i in range(2)}
            result = find_iso(relabel(de_bruijn(2, N), mapping), gamma, "strong")
            assert result.status is SearchStatus.NONE


def test_coverings():
    for N in range(4):
        assert is_covering(prefix_truncation(2, N))
    assert is_covering(slice_projection(2, 2, 3, 2))
    phi = drop_first_symbol(2, 2)
    assert phi.is_morphism() and not is_covering(phi)


def test_vertex_transitivity_needs_enough_slices():
    for N in range(1, 4):
        for M in range(1, 4):
            assert automorphism_orbits(spider_web(2, N, M)).is_transitive == (M >= N)
    assert is_vertex_transitive(cycle(5)) is True


def test_transitivity_witnesses_generate_one_orbit():
    T, psi = transitivity_witnesses(2, 3, 3)
    assert orbit_closure([T, psi], 0) == set(range(T.source.n))
    with pytest.raises(InvalidParameterError):
        transitivity_witnesses(2, 3, 2)


def test_closed_path_census_separates_vertices():
    g = spider_web(2, 3, 2)
    loop_root, other = g.vertex_id("000:0"), g.vertex_id("100:0")
    assert closed_path_census(g, loop_root, 2, lambda d: d != 0) == 2
    assert closed_path_census(g, other, 2, lambda d: d != 0) == 0
    for length in range(1, 5):
        assert len({closed_path_census(g, v, length, 0) for v in range(g.n)}) == 1


def test_euler_circuits():
    for N, M in ((1, 1), (2, 3), (3, 2)):
        g = spider_web(2, N, M)
        assert verify_path(eulerian_circuit(g), "euler")
    with pytest.raises(UnbalancedGraphError):
        eulerian_circuit(OrientedGraph.build(["a", "b"], [(0, 1)]))


def test_hamiltonian_cycles():
    for N, M in ((0, 3), (1, 2), (2, 3), (3, 1)):
        assert verify_path(spiderweb_hamiltonian_cycle(2, N, M), "hamilton")
    assert hamiltonian_cycle(cycle(5)).status is SearchStatus.FOUND
    assert hamiltonian_cycle(OrientedGraph.build(["a", "b"], [(0, 1)])).status is SearchStatus.NONE
    capped = hamiltonian_cycle(spider_web(2, 3, 3), SearchLimits(max_nodes=1))
    assert capped.status is SearchStatus.UNDECIDED


def test_de_bruijn_sequence_contains_every_word_once():
    for k, N in ((2, 3), (3, 2)):
        s = de_bruijn_sequence(k, N)
        assert len(s) == k ** N
        windows = {(s + s)[i:i + N] for i in range(len(s))}
        assert len(windows) == k ** N


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
