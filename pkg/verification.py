"""
Verification coordinator.
Runs the verification suites, times every check and collects results for the JSON report.
"""

import itertools
import json
import logging
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from derangement import components, path_lifting_check, predict_components, tensor_cycle_iso
from families import cycle, de_bruijn, spider_web
from graph_core import OrientedGraph, adjacency_matrix, relabel
from lamplighter import (
    act_level,
    cayley_ball,
    cbar_label,
    evaluate,
    exp_X,
    finite_quotient_cayley,
    h_predicate,
    in_H,
    kesten_measure,
    normality_report,
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
)
from limits import (
    cayley_tensor_ball,
    convergence_report,
    empirical_root_measure,
    labeled_stabilization,
    match_fraction,
)
from morphisms import (
    SearchLimits,
    SearchStatus,
    automorphism_orbits,
    closed_path_census,
    drop_first_symbol,
    eulerian_circuit,
    find_iso,
    gamma_bruijn_iso,
    is_covering,
    orbit_closure,
    prefix_truncation,
    slice_projection,
    spiderweb_hamiltonian_cycle,
    transitivity_witnesses,
    verify_path,
)
from products import (
    de_bruijn_line_iso,
    gamma_line_iso,
    line_tensor_iso,
    spiderweb_tensor_iso,
    tensor,
)
from spectra import (
    closed_form_spectrum,
    exact_charpoly,
    measure_distance,
    spectra_agree,
    spiderweb_charpoly,
    theta_charpoly,
)
from utils import InvalidParameterError, get_timestamp


SUITES = ("tensor", "debruijn", "schreier", "spectra", "transitivity", "coverings", "convergence")

Outcome = Union[bool, None, Tuple[Optional[bool], Any]]


@dataclass
class CheckResult:
    """One verified statement with its parameters and outcome."""

    suite: str
    check: str
    params: Dict[str, Any]
    status: str
    witness: Optional[Any] = None
    runtime_ms: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "suite": self.suite,
            "check": self.check,
            "params": self.params,
            "status": self.status,
            "runtime_ms": round(self.runtime_ms, 3),
        }
        if self.witness is not None:
            data["witness"] = self.witness
        return data


@dataclass
class SuiteParams:
    """Grid overrides; None keeps each suite's own default range."""

    ks: Optional[Tuple[int, ...]] = None
    n_max: Optional[int] = None
    m_max: Optional[int] = None
    bound: int = 6
    samples: int = 10_000
    r_max: int = 2
    q_max: int = 30


def random_oriented_graph(rng: random.Random, max_vertices: int, connected: bool = False) -> OrientedGraph:
    """Small random multigraph with loops; optionally forced connected by a spanning path."""
    n = rng.randint(1, max_vertices)
    arcs = [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, 2 * n))]
    if connected:
        arcs.extend((i, i + 1) if rng.random() < 0.5 else (i + 1, i) for i in range(n - 1))
    return OrientedGraph.build([str(i) for i in range(n)], arcs)


class VerificationCoordinator:
    """
    Coordinates the verification suites and collects their results.
    """

    def __init__(self, params: Optional[SuiteParams] = None, seed: int = 0,
                 limits: SearchLimits = SearchLimits()):
        """
        Initialize the coordinator.

        Args:
            params: grid overrides
            seed: seed for every randomized check
            limits: caps for isomorphism and Hamiltonian searches
        """
        self.params = params or SuiteParams()
        self.seed = seed
        self.rng = random.Random(seed)
        self.limits = limits
        self.results: List[CheckResult] = []
        self._suite = ""
        self._suites: Dict[str, Callable[[], None]] = {
            "tensor": self._suite_tensor,
            "debruijn": self._suite_debruijn,
            "schreier": self._suite_schreier,
            "spectra": self._suite_spectra,
            "transitivity": self._suite_transitivity,
            "coverings": self._suite_coverings,
            "convergence": self._suite_convergence,
        }
        logging.info(f"Verification coordinator initialized (seed={seed})")

    def run(self, suite: str) -> List[CheckResult]:
        """
        Run one suite, or every suite for "all".

        Args:
            suite: suite name or "all"

        Returns:
            Results of the checks run by this call
        """
        names = SUITES if suite == "all" else (suite,)
        for name in names:
            if name not in self._suites:
                raise InvalidParameterError(f"unknown suite {name!r}; expected one of {SUITES} or 'all'")
        start = len(self.results)
        for name in names:
            print(f"🔎 Running suite: {name}")
            logging.info(f"Running suite {name}")
            self._suite = name
            self._suites[name]()
        return self.results[start:]

    def _ks(self, default: Sequence[int]) -> Tuple[int, ...]:
        return tuple(self.params.ks) if self.params.ks else tuple(default)

    def _n(self, default: int) -> int:
        return self.params.n_max if self.params.n_max is not None else default

    def _m(self, default: int) -> int:
        return self.params.m_max if self.params.m_max is not None else default

    def _check(self, check: str, params: Dict[str, Any], fn: Callable[[], Outcome]) -> CheckResult:
        """Run fn, map its outcome to a status and record the timed result."""
        started = time.perf_counter()
        witness = None
        try:
            outcome = fn()
            if isinstance(outcome, tuple):
                outcome, witness = outcome
            status = "undecided" if outcome is None else ("pass" if outcome else "fail")
        except Exception as e:
            logging.error(f"Check {self._suite}/{check} {params} raised: {e}")
            status, witness = "error", str(e)
        result = CheckResult(self._suite, check, params, status, witness,
                             (time.perf_counter() - started) * 1000.0)
        if status != "pass":
            logging.warning(f"{self._suite}/{check} {params}: {status}")
        self.results.append(result)
        return result

    def _suite_tensor(self):
        for k in self._ks((2, 3)):
            for N in range(self._n(4) + 1):
                for M in range(1, self._m(6) + 1):
                    self._check("spiderweb_is_debruijn_tensor_cycle", {"k": k, "N": N, "M": M},
                                lambda: spiderweb_tensor_iso(k, N, M).is_isomorphism("strong"))

        for _ in range(20):
            g = random_oriented_graph(self.rng, 8)
            h = random_oriented_graph(self.rng, 8)
            self._check("kronecker_adjacency", {"n_g": g.n, "n_h": h.n},
                        lambda: bool(np.array_equal(adjacency_matrix(tensor(g, h)),
                                                    np.kron(adjacency_matrix(g), adjacency_matrix(h)))))
        for _ in range(20):
            g = random_oriented_graph(self.rng, 6)
            h = random_oriented_graph(self.rng, 6)
            self._check("line_of_tensor", {"n_g": g.n, "n_h": h.n},
                        lambda: line_tensor_iso(g, h).is_isomorphism("weak"))
        self._check("path_lifting", {"g": "debruijn(2,1)", "h": "cycle(3)", "max_len": 4},
                    lambda: path_lifting_check(de_bruijn(2, 1), cycle(3), 4))

        bases = [("debruijn", N, de_bruijn(2, N)) for N in range(1, 4)]
        bases += [("cycle", d, cycle(d)) for d in range(1, 13)]
        bases += [("random", i, random_oriented_graph(self.rng, 8, connected=True)) for i in range(10)]
        for family, size, g in bases:
            for M in range(1, 13):
                self._check("component_count", {"family": family, "size": size, "M": M},
                            lambda: self._components_match(g, M))
        self._check("component_formula_discrepancy", {"family": "cycle", "size": 4, "M": 10},
                    lambda: self._discrepancy_report(cycle(4), 10))
        self._check("rank_isomorphism", {"family": "cycle", "size": 6, "M": 3},
                    lambda: tensor_cycle_iso(cycle(6), 0, 3).is_isomorphism("strong"))

    def _components_match(self, g: OrientedGraph, M: int) -> Tuple[bool, Dict[str, Any]]:
        prediction = predict_components(g, M)
        count = len(components(tensor(g, cycle(M))))
        return count == prediction.canonical, {"union_find": count, **prediction.to_dict()}

    def _discrepancy_report(self, g: OrientedGraph, M: int) -> Tuple[bool, Dict[str, Any]]:
        prediction = predict_components(g, M)
        count = len(components(tensor(g, cycle(M))))
        report = {"union_find": count, **prediction.to_dict()}
        return prediction.discrepancy and count == prediction.canonical, report

    def _suite_debruijn(self):
        for k in self._ks((2, 3)):
            for N in range(1, self._n(4) + 1):
                self._check("debruijn_line_iso", {"k": k, "N": N},
                            lambda: de_bruijn_line_iso(k, N).is_isomorphism("weak"))
                self._check("gamma_line_iso", {"k": k, "N": N},
                            lambda: gamma_line_iso(k, N).is_isomorphism("weak"))
            for N in range(min(self._n(3), 3) + 1):
                self._check("spiderweb_one_slice_is_debruijn", {"k": k, "N": N},
                            lambda: self._search(spider_web(k, N, 1), de_bruijn(k, N), "strong"))

    def _search(self, g, h, kind: str, expect: bool = True) -> Tuple[Optional[bool], str]:
        result = find_iso(g, h, kind, limits=self.limits)
        if result.status is SearchStatus.UNDECIDED:
            return None, "undecided"
        return result.found == expect, result.status.value

    def _suite_schreier(self):
        ks = self._ks((2, 3))
        for k in ks:
            for N in range(self._n(4) + 1):
                self._check("gamma_bruijn_weak_iso", {"k": k, "N": N},
                            lambda: gamma_bruijn_iso(k, N).verify())
        for N in (2, 3):
            self._check("gamma_bruijn_not_strong", {"k": 2, "N": N},
                        lambda: self._no_strong_relabeling(2, N))

        for k in sorted(set(ks) | {6}):
            self._check("classical_relators", {"k": k},
                        lambda: all(evaluate(w, k).is_identity() for w in relators_classical(k, 6)))
            self._check("cbar_relators", {"k": k},
                        lambda: all(evaluate(w, k).is_identity() for w in relators_cbar(k, 6)))
        self._check("exp_X_agrees", {"words": 200},
                    lambda: all(exp_X(w) == exp_X(evaluate(w, k))
                                for k in ks for w in (random_word(k, self.rng, 12) for _ in range(100))))
        self._check("level_action_homomorphism", {"samples": self.params.samples},
                    lambda: self._action_samples(ks))

        for N in range(1, min(self._n(3), 3) + 1):
            for M in range(1, min(self._m(4), 4) + 1):
                self._check("h_normal_iff_n_divides_m", {"k": 2, "N": N, "M": M, "bound": self.params.bound},
                            lambda: self._normality(N, M))
                self._check("w_normal_iff_b_power_trivial", {"k": 2, "N": N, "M": M, "bound": self.params.bound},
                            lambda: self._w_normality(N, M))
                self._check("triple_shift_is_m", {"k": 2, "N": N, "M": M},
                            lambda: subgroup_triple(h_predicate(N, M), 2).s == M
                            and subgroup_triple(w_predicate(N, M), 2).s == M)
        self._check("stabilizer_is_h", {"k": 2, "N": 2, "M": 2, "samples": 500},
                    lambda: self._stabilizer_samples(2, 2, 2, 500))
        for N in range(1, 4):
            for M in range(1, 4):
                self._check("action_graph_is_spiderweb", {"k": 2, "N": N, "M": M},
                            lambda: self._search(sw_action_graph(2, N, M), spider_web(2, N, M), "weak"))
                self._check("schreier_tensor_is_action_graph", {"k": 2, "N": N, "M": M},
                            lambda: self._search(tensor(schreier_level_graph(2, N), cycle(M)),
                                                 sw_action_graph(2, N, M), "weak"))
        for k, N, l in ((2, 2, 1), (2, 1, 3), (3, 1, 2), (2, 2, 2)):
            self._check("finite_quotient_cayley", {"k": k, "N": N, "l": l},
                        lambda: self._search(finite_quotient_cayley(k, N, l), spider_web(k, N, N * l), "weak"))

    def _no_strong_relabeling(self, k: int, N: int) -> Tuple[Optional[bool], int]:
        gamma = schreier_level_graph(k, N)
        tried = 0
        for perm in itertools.permutations(range(k)):
            mapping = {f"R_{i}": cbar_label(perm[i]) for i in range(k)}
            result = find_iso(relabel(de_bruijn(k, N), mapping), gamma, "strong", limits=self.limits)
            tried += 1
            if result.status is SearchStatus.UNDECIDED:
                return None, tried
            if result.found:
                return False, tried
        return True, tried

    def _action_samples(self, ks: Sequence[int]) -> bool:
        for _ in range(self.params.samples):
            k = self.rng.choice(ks)
            N = self.rng.randint(1, 6)
            g = random_element(k, self.rng, support=3, max_shift=3)
            h = random_element(k, self.rng, support=3, max_shift=3)
            x = "".join(str(self.rng.randrange(k)) for _ in range(N))
            if act_level(g * h, x) != act_level(g, act_level(h, x)):
                logging.info(f"Action is not a homomorphism at g={g}, h={h}, x={x}")
                return False
        return True

    def _normality(self, N: int, M: int) -> Tuple[bool, Dict[str, Any]]:
        report = normality_report(h_predicate(N, M), 2, self.params.bound)
        return report.is_normal_evidence == (M % N == 0), report.to_dict()

    def _w_normality(self, N: int, M: int) -> Tuple[bool, Dict[str, Any]]:
        report = normality_report(w_predicate(N, M), 2, self.params.bound)
        return report.is_normal_evidence == w_is_normal(2, N, M), report.to_dict()

    def _stabilizer_samples(self, k: int, N: int, M: int, samples: int) -> bool:
        base = ("0" * N, 0)
        for _ in range(samples):
            g = random_element(k, self.rng)
            if (sw_action(g, base, k, N, M) == base) != in_H(g, N, M):
                logging.info(f"Stabilizer and H disagree at {g}")
                return False
        return True

    def _suite_spectra(self):
        ks = self._ks((2, 3))
        for k in ks:
            for N in range(self._n(4) + 1):
                for M in range(1, self._m(6) + 1):
                    params = {"k": k, "N": N, "M": M}
                    if M * k ** N <= 64:
                        self._check("exact_charpoly", params,
                                    lambda: spiderweb_charpoly(k, N, M).expand() == exact_charpoly(spider_web(k, N, M)))
                    self._check("closed_form_vs_numeric", params, lambda: spectra_agree(k, N, M))
                    self._check("multiplicity_total", params,
                                lambda: closed_form_spectrum(k, N, M).size == M * k ** N
                                and spiderweb_charpoly(k, N, M).degree == M * k ** N)
                    self._check("minus_2k_iff_m_even", params,
                                lambda: ((1, 1) in closed_form_spectrum(k, N, M).atoms) == (M % 2 == 0))
            for N, M in ((1, 1), (2, 2), (3, 2)):
                self._check("theta_reduction", {"k": k, "N": N, "M": M},
                            lambda: theta_charpoly(k, N, M) == spiderweb_charpoly(k, N, M).expand())
        for k in ks:
            self._check("kesten_mass", {"k": k, "q_max": self.params.q_max},
                        lambda: abs(1 - kesten_measure(k, self.params.q_max).total_mass()) < Fraction(1, 10 ** 6))
        self._check("spectral_distance_decreases", {"k": 2, "N": [2, 6]}, self._spectral_distance)

    def _spectral_distance(self) -> Tuple[bool, Dict[str, float]]:
        kesten = kesten_measure(2, self.params.q_max)
        small = measure_distance(closed_form_spectrum(2, 2, 2), kesten)
        large = measure_distance(closed_form_spectrum(2, 6, 6), kesten)
        return large < small, {"N=2": float(small), "N=6": float(large)}

    def _suite_transitivity(self):
        for N in range(1, min(self._n(3), 3) + 1):
            for M in range(1, min(self._m(4), 4) + 1):
                params = {"k": 2, "N": N, "M": M}
                self._check("transitive_iff_m_ge_n", params, lambda: self._transitive(N, M))
                self._check("witnesses_iff_m_ge_n", params, lambda: self._witnesses(2, N, M))
        base = spider_web(2, 3, 2)
        loop_root = base.vertex_id("000:0")
        other_root = base.vertex_id("100:0")
        self._check("nonzero_derangement_census", {"k": 2, "N": 3, "M": 2, "length": 2},
                    lambda: closed_path_census(base, loop_root, 2, lambda d: d != 0) > 0
                    and closed_path_census(base, other_root, 2, lambda d: d != 0) == 0)
        for length in range(1, 5):
            self._check("zero_derangement_census_uniform", {"k": 2, "N": 3, "M": 2, "length": length},
                        lambda: len({closed_path_census(base, v, length, 0) for v in range(base.n)}) == 1)

    def _transitive(self, N: int, M: int) -> Tuple[Optional[bool], Dict[str, Any]]:
        result = automorphism_orbits(spider_web(2, N, M), limits=self.limits)
        verdict = result.is_transitive
        witness = {"orbits": len(result.orbits)}
        if verdict is None:
            return None, witness
        return verdict == (M >= N), witness

    def _witnesses(self, k: int, N: int, M: int) -> bool:
        try:
            T, psi = transitivity_witnesses(k, N, M)
        except InvalidParameterError:
            return M < N
        return M >= N and len(orbit_closure([T, psi], 0)) == T.source.n

    def _suite_coverings(self):
        for N in range(min(self._n(4), 4) + 1):
            self._check("prefix_truncation_covers", {"k": 2, "N": N}, lambda: is_covering(prefix_truncation(2, N)))
        for N in range(min(self._n(3), 3) + 1):
            for M in range(1, min(self._m(3), 3) + 1):
                self._check("slice_projection_covers", {"k": 2, "N": N, "M": M},
                            lambda: is_covering(slice_projection(2, N, M, 2)))
        self._check("drop_first_symbol_not_covering", {"k": 2, "N": 2},
                    lambda: not is_covering(drop_first_symbol(2, 2)))
        for N in range(min(self._n(3), 3) + 1):
            for M in range(1, min(self._m(3), 3) + 1):
                params = {"k": 2, "N": N, "M": M}
                self._check("euler_circuit", params,
                            lambda: verify_path(eulerian_circuit(spider_web(2, N, M)), "euler"))
                self._check("hamiltonian_cycle", params,
                            lambda: verify_path(spiderweb_hamiltonian_cycle(2, N, M), "hamilton"))

    def _suite_convergence(self):
        r_max = self.params.r_max
        pairs = [(2, 2), (4, 4), (8, 8)]
        rows = convergence_report(2, pairs, r_max, self.params.q_max)
        by_radius: Dict[int, List[Fraction]] = {}
        for row in rows:
            by_radius.setdefault(row.r, []).append(row.match_fraction)
        for r, fractions in sorted(by_radius.items()):
            self._check("match_fraction_non_decreasing", {"k": 2, "r": r, "pairs": pairs},
                        lambda: (all(a <= b for a, b in zip(fractions, fractions[1:])),
                                 [float(f) for f in fractions]))
        self._check("spiderweb_8_8_matches_cayley", {"k": 2, "r": 2},
                    lambda: match_fraction(spider_web(2, 8, 8), 2, cayley_ball(2, 2)) == 1)
        for N in range(1, 5):
            for r in range(3):
                self._check("bruijn_gamma_same_balls", {"k": 2, "N": N, "r": r},
                            lambda: empirical_root_measure(de_bruijn(2, N), r).classes
                            == empirical_root_measure(schreier_level_graph(2, N), r).classes)
        for N, M in ((2, 2), (3, 3)):
            self._check("transitive_dirac", {"k": 2, "N": N, "M": M, "r": 2},
                        lambda: empirical_root_measure(spider_web(2, N, M), 2).dirac)
        for r in range(min(r_max, 3) + 1):
            for M in (2, 3):
                self._check("cayley_tensor_ball_is_cayley_ball", {"k": 2, "r": r, "M": M},
                            lambda: self._cayley_tensor_ball_matches(2, r, M))
        for r in range(3):
            self._check("labeled_balls_stabilize", {"k": 2, "r": r, "n_max": 6},
                        lambda: (labeled_stabilization(2, r, 6) is not None, labeled_stabilization(2, r, 6)))

    def _cayley_tensor_ball_matches(self, k: int, r: int, M: int) -> Tuple[Optional[bool], str]:
        product_ball, reference = cayley_tensor_ball(k, r, M), cayley_ball(k, r)
        result = find_iso(product_ball.graph, reference.graph, "strong",
                          roots=(product_ball.root, reference.root), limits=self.limits)
        if result.status is SearchStatus.UNDECIDED:
            return None, "undecided"
        return result.found, result.status.value


def summarize(results: Sequence[CheckResult]) -> Dict[str, int]:
    counts = {"pass": 0, "fail": 0, "undecided": 0, "error": 0}
    for result in results:
        counts[result.status] += 1
    return counts


def exit_code(results: Sequence[CheckResult]) -> int:
    """0 when every check passed, 1 on failures or errors, 3 when only undecided checks remain."""
    counts = summarize(results)
    if counts["fail"] or counts["error"]:
        return 1
    if counts["undecided"]:
        return 3
    return 0


def save_report(results: Sequence[CheckResult], path: Path, seed: int) -> bool:
    """
    Write the JSON report.

    Args:
        results: check results
        path: output file
        seed: seed used for the run

    Returns:
        True if saved successfully, False otherwise
    """
    report = {
        "created_at": get_timestamp(),
        "seed": seed,
        "summary": summarize(results),
        "checks": [result.to_dict() for result in results],
    }
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(report, f, indent=2, ensure_ascii=False, default=str)
        logging.info(f"Saved report with {len(results)} checks to {path}")
        return True
    except OSError as e:
        logging.error(f"Error saving report to {path}: {e}")
        return False
