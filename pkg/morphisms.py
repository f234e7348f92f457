"""
Morphism search and verification.
Isomorphism search by color refinement and individualization, covering checks,
explicit coverings and isomorphisms of the spider-web families, automorphism
orbits, transitivity witnesses, Euler circuits and Hamiltonian cycles.
"""

import logging
from collections import Counter, deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple, Union

from networkx.utils import UnionFind

from derangement import Path, as_serre, default_orientation, path_derangement, walks
from families import check_level, de_bruijn, spider_web, word_index, words
from graph_core import BaseGraph, OrientedGraph
from lamplighter import schreier_level_graph
from products import (
    GraphMorphism,
    de_bruijn_line_iso,
    gamma_line_iso,
    line_morphism,
    line_transitions,
    spiderweb_line_iso,
)
from utils import (
    DisconnectedGraphError,
    GraphAlgebraError,
    InvalidGraphError,
    InvalidParameterError,
    NotAMorphismError,
    UnbalancedGraphError,
    check_alphabet,
)


class SearchStatus(Enum):
    FOUND = "found"
    NONE = "none"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class SearchLimits:
    """Caps for exhaustive searches; exceeding one yields UNDECIDED, never a false NONE."""

    max_vertices: int = 512
    max_nodes: int = 200_000


@dataclass(frozen=True)
class IsoWitness:
    """A verified isomorphism with its kind ("weak" or "strong")."""

    morphism: GraphMorphism
    kind: str
    rooted: bool = False

    def verify(self) -> bool:
        return self.morphism.is_isomorphism(self.kind)


@dataclass
class IsoSearchResult:
    status: SearchStatus
    witness: Optional[IsoWitness] = None
    nodes: int = 0

    @property
    def found(self) -> bool:
        return self.status is SearchStatus.FOUND


class _SearchCapExceeded(Exception):
    pass


def _check_kind(kind: str):
    if kind not in ("weak", "strong"):
        raise InvalidParameterError(f"isomorphism kind must be 'weak' or 'strong', got {kind!r}")


def edge_keys(g: BaseGraph, kind: str) -> List[str]:
    """
    Comparison key of each edge: its weight, plus labels for strong comparisons.

    Serre edges also carry the label of their inverse, so labeled pairs match as pairs.
    """
    keys = []
    for e in g.edges:
        key = repr(float(e.weight))
        if kind == "strong":
            key += f"|{e.label!r}"
            if e.inverse is not None:
                key += f"|{g.edges[e.inverse].label!r}"
        keys.append(key)
    return keys


def initial_colors(graphs: Sequence[BaseGraph], roots: Optional[Sequence[int]] = None) -> List[List[int]]:
    """Loop count plus a root marker, numbered jointly over all graphs."""
    raw = []
    for i, g in enumerate(graphs):
        loops = [0] * g.n
        for edge in g.edges:
            if edge.src == edge.dst:
                loops[edge.src] += 1
        marked = roots[i] if roots is not None else None
        raw.append([(int(v == marked), loops[v]) for v in range(g.n)])
    palette = {c: i for i, c in enumerate(sorted({c for colors in raw for c in colors}))}
    return [[palette[c] for c in colors] for colors in raw]


def refine_colors(graphs: Sequence[BaseGraph], colors: Sequence[List[int]],
                  keys: Sequence[List[str]]) -> List[List[int]]:
    """
    Color refinement run jointly on several graphs until the partition is stable.

    A vertex's new color is determined by its color and the multisets of
    (neighbor color, edge key) over its out-edges and its in-edges. Color ids
    are assigned from the sorted signatures, so they are isomorphism invariant.
    """
    colors = [list(c) for c in colors]
    count = len({c for cs in colors for c in cs})
    while True:
        signatures = []
        for g, cs, ks in zip(graphs, colors, keys):
            signatures.append([
                (
                    cs[v],
                    tuple(sorted((cs[g.edges[e].dst], ks[e]) for e in g.out_edges(v))),
                    tuple(sorted((cs[g.edges[e].src], ks[e]) for e in g.in_edges(v))),
                )
                for v in range(g.n)
            ])
        palette = {s: i for i, s in enumerate(sorted({s for sigs in signatures for s in sigs}))}
        colors = [[palette[s] for s in sigs] for sigs in signatures]
        if len(palette) == count:
            return colors
        count = len(palette)


def target_cell(colors: Sequence[int]) -> Optional[int]:
    """Smallest non-singleton color class (ties by color id), or None when discrete."""
    best = None
    for color, size in Counter(colors).items():
        if size > 1 and (best is None or (size, color) < best):
            best = (size, color)
    return None if best is None else best[1]


def individualize(colors: Sequence[int], v: int, fresh: int) -> List[int]:
    result = list(colors)
    result[v] = fresh
    return result


def _edge_map(g: BaseGraph, h: BaseGraph, vertex_map: Sequence[int],
              keys_g: List[str], keys_h: List[str]) -> Optional[Tuple[int, ...]]:
    """Match edges over a vertex bijection, keeping Serre pairs together."""
    buckets: Dict[Tuple[int, int, str], deque] = {}
    for f in h.edges:
        buckets.setdefault((f.src, f.dst, keys_h[f.id]), deque()).append(f.id)

    edge_map: List[int] = [0] * g.m
    if g.directed:
        for e in g.edges:
            bucket = buckets.get((vertex_map[e.src], vertex_map[e.dst], keys_g[e.id]))
            if not bucket:
                return None
            edge_map[e.id] = bucket.popleft()
        return tuple(edge_map)

    used: Set[int] = set()
    for e, e_bar in g.pairs():
        edge = g.edges[e]
        bucket = buckets.get((vertex_map[edge.src], vertex_map[edge.dst], keys_g[e]))
        while bucket and bucket[0] in used:
            bucket.popleft()
        if not bucket:
            return None
        f = bucket.popleft()
        f_bar = h.edges[f].inverse
        used.update((f, f_bar))
        edge_map[e], edge_map[e_bar] = f, f_bar
    return tuple(edge_map)


def find_iso(g: BaseGraph, h: BaseGraph, kind: str = "weak",
             roots: Optional[Tuple[int, int]] = None,
             limits: SearchLimits = SearchLimits()) -> IsoSearchResult:
    """
    Search for an isomorphism g -> h.

    Joint color refinement prunes; non-discrete partitions are split by
    individualizing a vertex of g against each same-colored vertex of h.

    Args:
        g: first graph
        h: second graph
        kind: "weak" ignores labels, "strong" preserves them
        roots: (root of g, root of h) for rooted isomorphism
        limits: vertex and search-node caps

    Returns:
        IsoSearchResult: FOUND with a verified witness, NONE after an
        exhaustive search, or UNDECIDED when a cap was hit
    """
    _check_kind(kind)
    rooted = roots is not None
    if g.directed != h.directed or g.n != h.n or g.m != h.m:
        return IsoSearchResult(SearchStatus.NONE)
    if g.n > limits.max_vertices:
        logging.warning(f"Isomorphism search skipped: {g.n} vertices exceeds cap {limits.max_vertices}")
        return IsoSearchResult(SearchStatus.UNDECIDED)

    keys = [edge_keys(g, kind), edge_keys(h, kind)]
    stack = [initial_colors([g, h], roots)]
    nodes = 0
    while stack:
        colors_g, colors_h = refine_colors([g, h], stack.pop(), keys)
        if Counter(colors_g) != Counter(colors_h):
            continue
        cell = target_cell(colors_g)
        if cell is None:
            position = {c: w for w, c in enumerate(colors_h)}
            vertex_map = tuple(position[c] for c in colors_g)
            edge_map = _edge_map(g, h, vertex_map, keys[0], keys[1])
            if edge_map is None:
                continue
            witness = IsoWitness(GraphMorphism(g, h, vertex_map, edge_map), kind, rooted)
            if witness.verify():
                return IsoSearchResult(SearchStatus.FOUND, witness, nodes)
            logging.error("Discrete refinement produced a map that failed verification")
            continue

        v = colors_g.index(cell)
        fresh = max(colors_g + colors_h) + 1
        candidates = [w for w, c in enumerate(colors_h) if c == cell]
        for w in reversed(candidates):
            nodes += 1
            if nodes > limits.max_nodes:
                logging.warning(f"Isomorphism search hit the node cap {limits.max_nodes}")
                return IsoSearchResult(SearchStatus.UNDECIDED, nodes=nodes)
            stack.append([individualize(colors_g, v, fresh), individualize(colors_h, w, fresh)])
    return IsoSearchResult(SearchStatus.NONE, nodes=nodes)


def is_covering(phi: GraphMorphism) -> bool:
    """
    Check that every star map of phi is a bijection.

    Stars are taken in the Serre sense: for oriented graphs both the out-star
    and the in-star must map bijectively.

    Raises:
        NotAMorphismError: phi does not commute with the endpoint maps
    """
    if not phi.is_morphism():
        raise NotAMorphismError("map does not commute with initial and end vertices")
    source, target = phi.source, phi.target
    for v in range(source.n):
        w = phi.vertex_map[v]
        stars = [(source.out_edges(v), target.out_edges(w))]
        if source.directed:
            stars.append((source.in_edges(v), target.in_edges(w)))
        for star, target_star in stars:
            if sorted(phi.edge_map[e] for e in star) != sorted(target_star):
                logging.debug(f"Star map at vertex {source.name(v)} is not bijective")
                return False
    return True


def prefix_truncation(k: int, N: int) -> GraphMorphism:
    """Γ_{k,N+1} -> Γ_{k,N}: drop the last symbol, keep edge labels."""
    source = schreier_level_graph(k, N + 1)
    target = schreier_level_graph(k, N)
    vertex_map = tuple(target.vertex_id(source.name(v)[:N]) for v in range(source.n))
    edge_map = tuple(target.out_edge_by_label(vertex_map[e.src], e.label) for e in source.edges)
    return GraphMorphism(source, target, vertex_map, edge_map)


def slice_projection(k: int, N: int, M: int, i: int) -> GraphMorphism:
    """S_{k,N,iM} -> S_{k,N,M}: keep the string, reduce the slice mod M."""
    source = spider_web(k, N, i * M)
    target = spider_web(k, N, M)
    size = k ** N
    vertex_map = tuple((v // size) % M * size + v % size for v in range(source.n))
    edge_map = tuple(vertex_map[e.src] * k + e.id % k for e in source.edges)
    return GraphMorphism(source, target, vertex_map, edge_map)


def drop_first_symbol(k: int, N: int) -> GraphMorphism:
    """B_{k,N} -> B_{k,N-1}: x1..xN goes to x2..xN; a morphism that is not a covering."""
    if N < 1:
        raise InvalidParameterError("drop_first_symbol needs N >= 1")
    source = de_bruijn(k, N)
    target = de_bruijn(k, N - 1)
    vertex_map = tuple(target.vertex_id(source.name(v)[1:]) for v in range(source.n))
    edge_map = tuple(target.out_edge_by_label(vertex_map[e.src], e.label) for e in source.edges)
    return GraphMorphism(source, target, vertex_map, edge_map)


def gamma_bruijn_iso(k: int, N: int) -> IsoWitness:
    """
    Weak isomorphism Γ_{k,N} -> B_{k,N}, built level by level without search.

    Level 0 matches the loop cbar_i with R_i; level N+1 is the line-graph image
    of level N, conjugated by the explicit line-graph isomorphisms.

    Args:
        k: alphabet size
        N: level

    Returns:
        IsoWitness of kind "weak"
    """
    check_alphabet(k)
    check_level(N)
    gamma, bruijn = schreier_level_graph(k, 0), de_bruijn(k, 0)
    psi = GraphMorphism(gamma, bruijn, (0,), tuple(range(k)))
    for level in range(N):
        psi = (
            gamma_line_iso(k, level).inverse()
            .followed_by(line_morphism(psi))
            .followed_by(de_bruijn_line_iso(k, level))
        )
    witness = IsoWitness(psi, "weak")
    logging.info(f"Built Γ_{{{k},{N}}} -> B_{{{k},{N}}} by line-graph induction")
    return witness


@dataclass
class OrbitResult:
    """
    Vertex orbits of the automorphism group.

    Attributes:
        orbits: sorted vertex lists
        status: FOUND when exact, UNDECIDED when some comparison hit a cap
    """

    orbits: List[List[int]]
    status: SearchStatus

    @property
    def is_transitive(self) -> Optional[bool]:
        if len(self.orbits) <= 1:
            return True
        if self.status is SearchStatus.UNDECIDED:
            return None
        return False


def automorphism_orbits(g: BaseGraph, kind: str = "weak", limits: SearchLimits = SearchLimits()) -> OrbitResult:
    """
    Orbits of Aut(g) by seeded isomorphism searches.

    Vertices of different refined color are never compared. Each automorphism
    found merges every vertex with its image.

    Args:
        g: finite graph
        kind: "weak" or "strong"
        limits: caps for each search

    Returns:
        OrbitResult
    """
    _check_kind(kind)
    keys = edge_keys(g, kind)
    colors = refine_colors([g], initial_colors([g]), [keys])[0]
    orbits = UnionFind(range(g.n))
    representatives: Dict[int, List[int]] = {}
    undecided = False

    for v in range(g.n):
        reps = representatives.setdefault(colors[v], [])
        if any(orbits[rep] == orbits[v] for rep in reps):
            continue
        merged = False
        for rep in reps:
            result = find_iso(g, g, kind, roots=(rep, v), limits=limits)
            if result.found:
                for u, image in enumerate(result.witness.morphism.vertex_map):
                    orbits.union(u, image)
                merged = True
                break
            if result.status is SearchStatus.UNDECIDED:
                undecided = True
        if not merged:
            reps.append(v)

    blocks = sorted(sorted(block) for block in orbits.to_sets())
    status = SearchStatus.UNDECIDED if undecided and len(blocks) > 1 else SearchStatus.FOUND
    return OrbitResult(blocks, status)


def is_vertex_transitive(g: BaseGraph, kind: str = "weak",
                         limits: SearchLimits = SearchLimits()) -> Optional[bool]:
    """True, False, or None when a search cap left the answer undecided."""
    return automorphism_orbits(g, kind, limits).is_transitive


def orbit_closure(automorphisms: Sequence[GraphMorphism], start: int) -> Set[int]:
    """Orbit of a vertex under the group generated by the given automorphisms."""
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for phi in automorphisms:
            w = phi.vertex_map[v]
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def transitivity_witnesses(k: int, N: int, M: int) -> Tuple[GraphMorphism, GraphMorphism]:
    """
    Two automorphisms of S_{k,N,M} generating a vertex-transitive group.

    T moves every vertex to the next slice. psi adds 1 to the symbol x_{N-t}
    of vertices on slice t for 0 <= t <= N-1 and fixes other slices; edges
    leaving slice M-1 have their label index raised by 1.

    Args:
        k: alphabet size
        N: string length
        M: number of slices, at least N

    Returns:
        (T, psi), both verified automorphisms

    Raises:
        InvalidParameterError: M < N
    """
    check_alphabet(k)
    check_level(N)
    if not isinstance(M, int) or M < max(N, 1):
        raise InvalidParameterError(f"transitivity witnesses need M >= N (got N={N}, M={M})")

    g = spider_web(k, N, M)
    size = k ** N
    all_words = words(k, N)

    t_vertices = tuple(((v // size + 1) % M) * size + v % size for v in range(g.n))
    t_edges = tuple(t_vertices[e.src] * k + e.id % k for e in g.edges)

    psi_vertices = []
    for v in range(g.n):
        slice_index, x = divmod(v, size)
        word = list(all_words[x])
        if slice_index < N:
            position = N - slice_index - 1
            word[position] = (word[position] + 1) % k
        psi_vertices.append(slice_index * size + word_index(tuple(word), k))
    psi_edges = []
    for e in g.edges:
        y = e.id % k
        if e.src // size == M - 1:
            y = (y + 1) % k
        psi_edges.append(psi_vertices[e.src] * k + y)

    T = GraphMorphism(g, g, t_vertices, t_edges)
    psi = GraphMorphism(g, g, tuple(psi_vertices), tuple(psi_edges))
    for name, phi in (("T", T), ("psi", psi)):
        if not phi.is_isomorphism("weak"):
            raise GraphAlgebraError(f"{name} failed automorphism verification for k={k}, N={N}, M={M}")
    logging.info(f"Transitivity witnesses verified for S_{{{k},{N},{M}}}")
    return T, psi


def closed_path_census(g: BaseGraph, v: int, length: int,
                       derangement: Union[None, int, Callable[[int], bool]] = None,
                       reduced: bool = False) -> int:
    """
    Count closed paths at v of a given length in the underlying graph.

    Args:
        g: graph
        v: base vertex
        length: number of edges
        derangement: None for all paths, an int for an exact value, or a predicate
        reduced: count only reduced paths

    Returns:
        Number of matching closed paths
    """
    if derangement is None:
        accept = lambda d: True
    elif isinstance(derangement, int):
        accept = lambda d: d == derangement
    else:
        accept = derangement

    serre = as_serre(g)
    orientation = default_orientation(serre)
    count = 0
    for path in walks(serre, v, length, reduced):
        if path.is_closed() and accept(path_derangement(path, orientation)):
            count += 1
    return count


def eulerian_circuit(g: OrientedGraph) -> Path:
    """
    Euler circuit by Hierholzer's algorithm.

    Args:
        g: oriented graph, connected apart from isolated vertices, with equal
            in- and out-degree everywhere

    Returns:
        Closed path using every edge exactly once
    """
    if not isinstance(g, OrientedGraph):
        raise InvalidGraphError("Euler circuits are computed for oriented graphs")
    unbalanced = [v for v in range(g.n) if g.in_degree(v) != g.out_degree(v)]
    if unbalanced:
        raise UnbalancedGraphError(
            f"{len(unbalanced)} vertices have in-degree != out-degree, e.g. {g.name(unbalanced[0])}"
        )
    if g.m == 0:
        return Path(g, (), 0)

    start = g.edges[0].src
    next_edge = [0] * g.n
    stack: List[Tuple[int, Optional[int]]] = [(start, None)]
    circuit: List[int] = []
    while stack:
        v, arriving = stack[-1]
        if next_edge[v] < g.out_degree(v):
            e = g.out_edges(v)[next_edge[v]]
            next_edge[v] += 1
            stack.append((g.edges[e].dst, e))
        else:
            stack.pop()
            if arriving is not None:
                circuit.append(arriving)
    circuit.reverse()

    if len(circuit) != g.m:
        raise DisconnectedGraphError(
            f"edges span more than one component; circuit from {g.name(start)} used {len(circuit)} of {g.m}",
            [len(circuit), g.m - len(circuit)],
        )
    logging.debug(f"Euler circuit of length {len(circuit)} from {g.name(start)}")
    return Path(g, tuple(circuit), start)


@dataclass
class HamiltonResult:
    status: SearchStatus
    path: Optional[Path] = None
    nodes: int = 0


def hamiltonian_cycle(g: BaseGraph, limits: SearchLimits = SearchLimits()) -> HamiltonResult:
    """
    Hamiltonian cycle by backtracking, extending first to the vertex with fewest onward options.

    Args:
        g: graph; Serre graphs are walked along their half-edges
        limits: vertex and node caps

    Returns:
        HamiltonResult with a closed path visiting every vertex once
    """
    if g.n == 0:
        return HamiltonResult(SearchStatus.NONE)
    if g.n > limits.max_vertices:
        return HamiltonResult(SearchStatus.UNDECIDED)

    start = 0
    visited = [False] * g.n
    visited[start] = True
    taken: List[int] = []
    nodes = 0

    def onward(w: int) -> int:
        return sum(1 for f in g.out_edges(w) if not visited[g.edges[f].dst])

    def extend(v: int, depth: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > limits.max_nodes:
            raise _SearchCapExceeded()
        if depth == g.n:
            closing = next((e for e in g.out_edges(v) if g.edges[e].dst == start), None)
            if closing is None:
                return False
            taken.append(closing)
            return True
        options = {}
        for e in g.out_edges(v):
            w = g.edges[e].dst
            if not visited[w]:
                options.setdefault(w, e)
        for w in sorted(options, key=lambda w: (onward(w), w)):
            visited[w] = True
            taken.append(options[w])
            if extend(w, depth + 1):
                return True
            visited[w] = False
            taken.pop()
        return False

    try:
        found = extend(start, 1)
    except _SearchCapExceeded:
        logging.warning(f"Hamiltonian search hit the node cap {limits.max_nodes}")
        return HamiltonResult(SearchStatus.UNDECIDED, nodes=nodes)
    if not found:
        return HamiltonResult(SearchStatus.NONE, nodes=nodes)
    return HamiltonResult(SearchStatus.FOUND, Path(g, tuple(taken), start), nodes)


def hamiltonian_cycle_from_line(base: OrientedGraph, iso: GraphMorphism) -> Path:
    """
    Hamiltonian cycle of the target of iso: L(base) -> target, from an Euler circuit of base.

    Consecutive edges of the circuit are consecutive vertices of L(base).
    """
    circuit = eulerian_circuit(base).edges
    index = {pair: i for i, pair in enumerate(line_transitions(base))}
    line_edges = [index[(circuit[i], circuit[(i + 1) % len(circuit)])] for i in range(len(circuit))]
    edges = tuple(iso.edge_map[e] for e in line_edges)
    return Path(iso.target, edges, iso.vertex_map[circuit[0]])


def spiderweb_hamiltonian_cycle(k: int, N: int, M: int) -> Path:
    """Hamiltonian cycle of S_{k,N,M} via the Euler circuit of S_{k,N-1,M}."""
    if N == 0:
        result = hamiltonian_cycle(spider_web(k, 0, M))
        if result.path is None:
            raise GraphAlgebraError(f"no Hamiltonian cycle found in S_{{{k},0,{M}}}")
        return result.path
    return hamiltonian_cycle_from_line(spider_web(k, N - 1, M), spiderweb_line_iso(k, N - 1, M))


def de_bruijn_sequence(k: int, N: int) -> str:
    """
    Cyclic sequence of length k^N containing every length-N string once.

    The first symbols of the vertices along a Hamiltonian cycle of B_{k,N}.
    """
    check_alphabet(k)
    if N < 1:
        raise InvalidParameterError("de Bruijn sequences need N >= 1")
    cycle_path = hamiltonian_cycle_from_line(de_bruijn(k, N - 1), de_bruijn_line_iso(k, N - 1))
    g = cycle_path.graph
    return "".join(g.name(v)[0] for v in cycle_path.vertices()[:-1])


def verify_path(path: Path, kind: str = "closed") -> bool:
    """
    Replay a path and check it.

    Args:
        path: the path
        kind: "closed", "euler" (every edge exactly once) or "hamilton"
            (every vertex exactly once)

    Returns:
        True if the replay passes
    """
    if not (path.is_valid() and path.is_closed()):
        return False
    g = path.graph
    if kind == "euler":
        return sorted(path.edges) == list(range(g.m))
    if kind == "hamilton":
        visited = path.vertices()[:-1]
        return len(path) == g.n and sorted(visited) == list(range(g.n))
    if kind == "closed":
        return True
    raise InvalidParameterError(f"unknown path check {kind!r}")
