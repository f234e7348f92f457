#!/usr/bin/env python3
"""
Tests for lamplighter arithmetic, its actions and the derived graphs.
"""

import random
import sys
from collections import deque
from fractions import Fraction

import pytest

from families import cycle, spider_web
from lamplighter import (
    LampElement,
    act_level,
    cayley_ball,
    evaluate,
    exp_X,
    finite_quotient_cayley,
    h_predicate,
    in_H,
    in_W,
    kesten_measure,
    normality_report,
    parse_word,
    random_element,
    random_word,
    relators_cbar,
    relators_classical,
    schreier_level_graph,
    subgroup_triple,
    sw_action,
    sw_action_graph,
    w_is_normal,
    w_predicate,
    word_power,
)
from morphisms import find_iso
from products import tensor
from utils import GroupMismatchError, InvalidParameterError


def test_relators_evaluate_to_identity():
    for k in (2, 3, 6):
        assert evaluate(word_power((("c", 1),), k), k).is_identity()
        assert all(evaluate(w, k).is_identity() for w in relators_classical(k, 6))
        assert all(evaluate(w, k).is_identity() for w in relators_cbar(k, 6))


def test_cbar_generators():
    for k in (2, 3):
        assert evaluate(parse_word("cbar_1 b^-1"), k) == LampElement.c(k)
        assert exp_X(parse_word("cbar_1")) == 1
        assert exp_X(word_power(parse_word("cbar_1 b^-1"), k)) == 0
    assert parse_word("") == ()
    with pytest.raises(InvalidParameterError):
        parse_word("d^2")


def test_group_laws_on_random_triples():
    rng = random.Random(3)
    for _ in range(200):
        k = rng.choice((2, 3, 5))
        a, b, c = (random_element(k, rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert (a * a.inverse()).is_identity()
        assert a * LampElement.identity(k) == a


def test_exp_X_of_words_matches_shift():
    rng = random.Random(5)
    for _ in range(200):
        k = rng.choice((2, 3))
        word = random_word(k, rng, 10)
        assert exp_X(word) == exp_X(evaluate(word, k))


def test_mismatched_groups_do_not_multiply():
    with pytest.raises(GroupMismatchError):
        LampElement.b(2) * LampElement.b(3)


def test_level_action():
    orbit = ["00"]
    for _ in range(4):
        orbit.append(act_level("cbar_1", orbit[-1], 2))
    assert orbit == ["00", "10", "01", "11", "00"]
    assert act_level("cbar_0", "0000", 2) == "0000"


def test_level_action_is_a_homomorphism():
    rng = random.Random(9)
    for _ in range(500):
        k = rng.choice((2, 3))
        g, h = random_element(k, rng, 3, 3), random_element(k, rng, 3, 3)
        x = "".join(str(rng.randrange(k)) for _ in range(rng.randint(1, 5)))
        assert act_level(g * h, x) == act_level(g, act_level(h, x))


def test_action_by_prefixes_is_consistent():
    rng = random.Random(1)
    for _ in range(100):
        g = random_element(2, rng)
        x = "".join(str(rng.randrange(2)) for _ in range(6))
        assert act_level(g, x)[:4] == act_level(g, x[:4])


def test_spherical_transitivity():
    for N in range(7):
        seen, queue = {"0" * N}, deque(["0" * N])
        while queue:
            x = queue.popleft()
            for name in ("cbar_0", "cbar_1"):
                y = act_level(name, x, 2)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        assert len(seen) == 2 ** N


def test_schreier_level_one_is_complete_with_loops():
    g = schreier_level_graph(2, 1)
    assert sorted((e.src, e.dst) for e in g.edges) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    g = schreier_level_graph(3, 3)
    assert all(g.in_degree(v) == g.out_degree(v) == 3 for v in range(g.n))


def test_subgroup_predicates():
    b, c = LampElement.b(2), LampElement.c(2)
    assert in_W(b, 2, 1) and not in_W(b, 2, 2)
    assert in_H(b ** 3, 2, 3) and not in_H(c, 2, 3)
    g = evaluate(parse_word("c b^2 c b^-2"), 2)
    assert in_H(g, 2, 2)
    assert sw_action(g, ("00", 0), 2, 2, 2) == ("00", 0)


def test_stabilizer_of_base_vertex_is_h():
    rng = random.Random(2)
    for _ in range(500):
        g = random_element(2, rng)
        fixed = sw_action(g, ("00", 0), 2, 2, 2) == ("00", 0)
        assert fixed == in_H(g, 2, 2)


def test_w_with_trivial_shift_condition_is_the_level_stabilizer():
    rng = random.Random(4)
    for _ in range(200):
        g = random_element(2, rng)
        assert in_W(g, 3, 1) == (act_level(g, "000") == "000")


def test_spider_web_action():
    assert sw_action("b", ("10", 0), 2, 2, 3) == ("01", 2)
    assert sw_action("c", ("10", 1), 2, 2, 3) == ("00", 1)
    for N in range(1, 4):
        for M in range(1, 4):
            assert find_iso(sw_action_graph(2, N, M), spider_web(2, N, M), "weak").found


def test_normality_follows_divisibility():
    assert normality_report(h_predicate(2, 2), 2, 6).is_normal_evidence
    report = normality_report(h_predicate(2, 3), 2, 6)
    assert not report.is_normal_evidence
    g, h, conjugate = report.witness
    assert in_H(h, 2, 3) and not in_H(conjugate, 2, 3)
    assert not normality_report(w_predicate(2, 1), 2, 6).is_normal_evidence


def test_w_normality_on_level_one():
    for M in range(1, 5):
        assert normality_report(w_predicate(1, M), 2, 6).is_normal_evidence


def test_w_escapes_under_c_when_b_power_moves_the_level():
    b, c = LampElement.b(2), LampElement.c(2)
    for N in (2, 3):
        for M in (1, 3):
            assert not w_is_normal(2, N, M)
            h = b ** M
            assert in_W(h, N, M) and not in_W(h.conjugate(c), N, M)
            report = normality_report(w_predicate(N, M), 2, 6)
            assert not report.is_normal_evidence
            _, member, conjugate = report.witness
            assert in_W(member, N, M) and not in_W(conjugate, N, M)


def test_w_normality_grid():
    # b^2 is trivial on level 2 and b^4 on level 3
    assert w_is_normal(2, 2, 2) and w_is_normal(2, 2, 4) and w_is_normal(2, 3, 4)
    assert not w_is_normal(2, 3, 2)
    for N in range(1, 4):
        for M in range(1, 5):
            report = normality_report(w_predicate(N, M), 2, 6)
            assert report.is_normal_evidence == w_is_normal(2, N, M)


def test_schreier_tensor_cycle_is_the_action_graph():
    for N in range(1, 4):
        for M in (2, 3):
            assert find_iso(tensor(schreier_level_graph(2, N), cycle(M)), sw_action_graph(2, N, M), "weak").found


def test_subgroup_triples_have_shift_m():
    for M in (1, 2, 3):
        assert subgroup_triple(h_predicate(2, M), 2).s == M
        assert subgroup_triple(w_predicate(2, M), 2).s == M
    triple = subgroup_triple(h_predicate(2, 2), 2)
    rng = random.Random(6)
    samples = [LampElement.from_lamps(2, {p: 1 for p in rng.sample(range(-4, 5), 2)}) for _ in range(50)]
    assert triple.check_samples(h_predicate(2, 2), samples)


def test_finite_quotient_cayley():
    for k in (2, 3):
        for N in (1, 2):
            for l in (1, 2):
                assert finite_quotient_cayley(k, N, l).n == k ** N * N * l
    assert find_iso(finite_quotient_cayley(2, 2, 1), spider_web(2, 2, 2), "weak").found
    assert find_iso(finite_quotient_cayley(2, 1, 3), spider_web(2, 1, 3), "weak").found


def test_cayley_ball():
    b = cayley_ball(2, 0)
    assert (b.graph.n, b.graph.m) == (1, 0)
    b = cayley_ball(2, 1)
    assert (b.graph.n, b.graph.m) == (5, 4)
    b = cayley_ball(3, 2)
    interior = [v for v in range(b.graph.n) if b.graph.out_degree(v) == 3 and b.graph.in_degree(v) == 3]
    assert 0 in interior


def test_kesten_measure():
    mu = kesten_measure(2, 30)
    assert mu.atoms[(1, 2)] == Fraction(1, 3)
    assert mu.atoms[(1, 3)] == mu.atoms[(2, 3)] == Fraction(1, 7)
    for k in (2, 3):
        assert abs(1 - kesten_measure(k, 30).total_mass()) < Fraction(1, 10 ** 6)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
