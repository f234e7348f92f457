"""
Benjamini-Schramm statistics.
Canonical forms of rooted balls, empirical root measures of finite graphs,
comparison with lamplighter Cayley balls and the convergence report.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from networkx.utils import UnionFind

from derangement import as_serre
from families import cycle, spider_web
from graph_core import BaseGraph, MarkedGraph, RootedBall, ball, rooted_distance
from lamplighter import cayley_ball, kesten_measure, schreier_level_graph
from morphisms import SearchLimits, edge_keys, individualize, initial_colors, refine_colors, target_cell
from products import tensor
from spectra import closed_form_spectrum, measure_distance
from utils import GraphAlgebraError, InvalidParameterError


BallForm = Tuple
MODES = ("oriented", "labeled", "underlying")

_form_cache: Dict[tuple, BallForm] = {}
_FORM_CACHE_LIMIT = 200_000


def _prepare(graph: BaseGraph, mode: str) -> Tuple[BaseGraph, str]:
    if mode not in MODES:
        raise InvalidParameterError(f"unknown ball mode {mode!r}; expected one of {MODES}")
    if mode == "underlying":
        return as_serre(graph), "weak"
    return graph, "strong" if mode == "labeled" else "weak"


def _serialize(g: BaseGraph, root: int, colors: List[int], keys: List[str]) -> Tuple[BallForm, Tuple[int, ...]]:
    rank = {c: i for i, c in enumerate(sorted(colors))}
    labeling = tuple(rank[c] for c in colors)
    edges = tuple(sorted((labeling[e.src], labeling[e.dst], keys[e.id]) for e in g.edges))
    return (g.directed, g.n, labeling[root], edges), labeling


def canonical_ball_form(graph: BaseGraph, root: int, mode: str = "oriented",
                        limits: SearchLimits = SearchLimits()) -> BallForm:
    """
    Canonical serialization of a rooted graph.

    Refinement, then individualization over the smallest non-singleton cell;
    the smallest serialization over all leaves is canonical. Branches in the
    same orbit of automorphisms already found (fixing the current prefix) are
    skipped.

    Args:
        graph: finite graph, usually a ball
        root: root vertex
        mode: "oriented", "labeled" or "underlying"
        limits: node cap for the search

    Returns:
        Hashable form; equal forms mean isomorphic rooted graphs
    """
    g, kind = _prepare(graph, mode)
    keys = edge_keys(g, kind)
    cache_key = (mode, g.directed, g.n, root,
                 tuple((e.src, e.dst, keys[e.id]) for e in g.edges),
                 tuple(e.inverse for e in g.edges))
    if cache_key in _form_cache:
        return _form_cache[cache_key]

    leaves: Dict[BallForm, Tuple[int, ...]] = {}
    automorphisms: List[Tuple[int, ...]] = []
    best: List[Optional[BallForm]] = [None]
    nodes = [0]

    def same_orbit(v: int, explored: Sequence[int], prefix: Sequence[int]) -> bool:
        fixing = [s for s in automorphisms if all(s[p] == p for p in prefix)]
        if not fixing:
            return False
        orbits = UnionFind(range(g.n))
        for s in fixing:
            for u, image in enumerate(s):
                orbits.union(u, image)
        return any(orbits[v] == orbits[u] for u in explored)

    def search(colors: List[int], prefix: List[int]):
        nodes[0] += 1
        if nodes[0] > limits.max_nodes:
            raise GraphAlgebraError(f"canonical form search exceeded {limits.max_nodes} nodes")
        refined = refine_colors([g], [colors], [keys])[0]
        cell = target_cell(refined)
        if cell is None:
            form, labeling = _serialize(g, root, refined, keys)
            if form in leaves:
                first = leaves[form]
                inverse = {index: u for u, index in enumerate(labeling)}
                automorphisms.append(tuple(inverse[first[u]] for u in range(g.n)))
            else:
                leaves[form] = labeling
            if best[0] is None or form < best[0]:
                best[0] = form
            return
        fresh = max(refined) + 1
        explored: List[int] = []
        for v in [u for u, c in enumerate(refined) if c == cell]:
            if explored and same_orbit(v, explored, prefix):
                continue
            explored.append(v)
            search(individualize(refined, v, fresh), prefix + [v])

    if g.n == 0:
        best[0] = (g.directed, 0, -1, ())
    else:
        search(initial_colors([g], [root])[0], [root])

    if len(_form_cache) > _FORM_CACHE_LIMIT:
        _form_cache.clear()
    _form_cache[cache_key] = best[0]
    return best[0]


def ball_form(g: BaseGraph, v: int, r: int, mode: str = "oriented") -> BallForm:
    """Canonical form of the radius-r ball around v."""
    b = ball(g, v, r)
    return canonical_ball_form(b.graph, b.root, mode)


@dataclass
class BallDistribution:
    """
    Distribution of rooted r-ball classes over uniformly chosen roots.

    Attributes:
        radius: r
        classes: canonical ball form -> frequency
        total: number of roots (vertices)
        mode: comparison mode
    """

    radius: int
    classes: Dict[BallForm, Fraction]
    total: int
    mode: str = "oriented"

    @property
    def dirac(self) -> bool:
        return len(self.classes) == 1

    def class_count(self) -> int:
        return len(self.classes)

    def frequency(self, form: BallForm) -> Fraction:
        return self.classes.get(form, Fraction(0))

    def to_dict(self) -> Dict[str, object]:
        sizes = sorted(((form[1], len(form[3]), str(freq)) for form, freq in self.classes.items()), reverse=True)
        return {
            "radius": self.radius,
            "mode": self.mode,
            "total": self.total,
            "classes": [{"vertices": n, "edges": m, "frequency": f} for n, m, f in sizes],
        }


def empirical_root_measure(g: BaseGraph, r: int, mode: str = "oriented") -> BallDistribution:
    """
    Bucket the r-balls of all vertices by isomorphism class.

    Args:
        g: finite graph
        r: radius
        mode: "oriented" (default, labels ignored), "labeled" or "underlying"

    Returns:
        BallDistribution with frequencies summing to 1
    """
    counts = Counter(ball_form(g, v, r, mode) for v in range(g.n))
    classes = {form: Fraction(count, g.n) for form, count in counts.items()}
    logging.debug(f"Empirical root measure at r={r}: {len(classes)} classes over {g.n} roots")
    return BallDistribution(r, classes, g.n, mode)


def match_fraction(g: BaseGraph, r: int, reference: RootedBall, mode: str = "oriented") -> Fraction:
    """
    Fraction of vertices whose r-ball is isomorphic to the r-ball of the reference.

    Args:
        g: finite graph
        r: radius, at most the reference radius
        reference: rooted ball, e.g. from cayley_ball
        mode: comparison mode

    Returns:
        Exact fraction in [0, 1]
    """
    if r > reference.radius:
        raise InvalidParameterError(f"radius {r} exceeds the reference radius {reference.radius}")
    target = ball_form(reference.graph, reference.root, r, mode)
    matches = sum(1 for v in range(g.n) if ball_form(g, v, r, mode) == target)
    return Fraction(matches, g.n) if g.n else Fraction(0)


def cayley_tensor_ball(k: int, r: int, M: int) -> RootedBall:
    """
    Radius-r ball at (identity, 0) in Cay(L_k, X_k) ⊗ C_M.

    Product distances dominate Cayley distances, so the tensor of the radius-r
    Cayley ball with C_M already contains the whole product ball.

    Args:
        k: lamp group order
        r: radius
        M: cycle length

    Returns:
        RootedBall of the root component; comparable to cayley_ball(k, r)
    """
    reference = cayley_ball(k, r)
    product = tensor(reference.graph, cycle(M))
    return ball(product, reference.root * M, r)


Quadruple = Tuple[MarkedGraph, MarkedGraph, MarkedGraph, MarkedGraph]


@dataclass
class ProductBoundRow:
    left: Fraction
    right: Fraction

    @property
    def holds(self) -> bool:
        return self.left <= self.right


@dataclass
class ProductBoundReport:
    rows: List[ProductBoundRow]

    @property
    def all_hold(self) -> bool:
        return all(row.holds for row in self.rows)


def product_distance_bound_check(samples: Sequence[Quadruple], max_radius: Optional[int] = None) -> ProductBoundReport:
    """
    Check d((g⊗p, (v,x)), (h⊗q, (w,y))) <= max(d((g,v),(h,w)), d((p,x),(q,y))).

    Args:
        samples: quadruples ((g,v), (h,w), (p,x), (q,y)) of rooted oriented graphs
        max_radius: optional radius cap passed to rooted_distance

    Returns:
        ProductBoundReport with one row per sample
    """
    rows = []
    for a, b, c, d in samples:
        left_graph = MarkedGraph(tensor(a.graph, c.graph), a.root * c.graph.n + c.root)
        right_graph = MarkedGraph(tensor(b.graph, d.graph), b.root * d.graph.n + d.root)
        left = rooted_distance(left_graph, right_graph, max_radius=max_radius)
        right = max(rooted_distance(a, b, max_radius=max_radius), rooted_distance(c, d, max_radius=max_radius))
        rows.append(ProductBoundRow(left, right))
        if left > right:
            logging.warning(f"Product distance bound violated: {left} > {right}")
    return ProductBoundReport(rows)


@dataclass
class ConvergenceRow:
    n: int
    m: int
    r: int
    match_fraction: Fraction
    spectral_distance: Fraction

    def to_dict(self) -> Dict[str, object]:
        return {
            "N": self.n,
            "M": self.m,
            "r": self.r,
            "match_fraction": float(self.match_fraction),
            "spectral_distance": float(self.spectral_distance),
        }


def convergence_report(k: int, pairs: Sequence[Tuple[int, int]], r_max: int, q_max: int = 30) -> List[ConvergenceRow]:
    """
    Ball match fractions and spectral distances of S_{k,N,M} against the lamplighter limit.

    Args:
        k: alphabet size
        pairs: (N, M) parameters
        r_max: largest radius
        q_max: truncation of the Kesten measure

    Returns:
        |pairs| * (r_max + 1) rows ordered by pair, then radius
    """
    reference = cayley_ball(k, r_max)
    kesten = kesten_measure(k, q_max)
    rows = []
    for N, M in pairs:
        g = spider_web(k, N, M)
        distance = measure_distance(closed_form_spectrum(k, N, M), kesten)
        for r in range(r_max + 1):
            rows.append(ConvergenceRow(N, M, r, match_fraction(g, r, reference), distance))
        logging.info(f"Convergence row block done for N={N}, M={M}")
    return rows


def labeled_stabilization(k: int, r: int, n_max: int) -> Optional[int]:
    """
    Smallest N0 such that the labeled r-ball of Γ_{k,N} at 0^N is the same for N0 <= N <= n_max.

    Returns:
        N0, or None when the last two levels still differ
    """
    forms = [ball_form(schreier_level_graph(k, N), 0, r, "labeled") for N in range(n_max + 1)]
    if n_max >= 1 and forms[-1] != forms[-2]:
        return None
    n0 = n_max
    while n0 > 0 and forms[n0 - 1] == forms[-1]:
        n0 -= 1
    return n0
