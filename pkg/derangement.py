"""
Derangement of paths and graphs.
Paths in Serre graphs, signatures relative to an orientation, the graph
derangement as a gcd, connected components and the rank isomorphism of
g ⊗ C_M onto a copy of g.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple, Union

from networkx.utils import UnionFind

from families import INFINITY, CycleLength, check_cycle_length, cycle
from graph_core import BaseGraph, OrientedGraph, SerreGraph, subgraph, underlying
from products import GraphMorphism, tensor
from utils import DisconnectedGraphError, InvalidGraphError, NotIsomorphicError


Orientation = FrozenSet[int]


def as_serre(g: BaseGraph) -> SerreGraph:
    """Serre graph of g; for an oriented graph edge i stays forward and m+i is its inverse."""
    return g if isinstance(g, SerreGraph) else underlying(g)


def default_orientation(g: SerreGraph) -> Orientation:
    """The lower edge id of every involution pair."""
    return frozenset(e for e, _ in g.pairs())


@dataclass(frozen=True)
class Path:
    """
    A path: edges e1..en with dst(ei) = src(ei+1), starting at `start`.

    The empty path sits at `start`.
    """

    graph: BaseGraph
    edges: Tuple[int, ...]
    start: int

    @property
    def end(self) -> int:
        if not self.edges:
            return self.start
        return self.graph.edges[self.edges[-1]].dst

    def __len__(self) -> int:
        return len(self.edges)

    def is_valid(self) -> bool:
        at = self.start
        for e in self.edges:
            edge = self.graph.edges[e]
            if edge.src != at:
                return False
            at = edge.dst
        return True

    def is_closed(self) -> bool:
        return self.end == self.start

    def is_reduced(self) -> bool:
        """No edge is immediately followed by its inverse."""
        for e, f in zip(self.edges, self.edges[1:]):
            if self.graph.edges[e].inverse == f:
                return False
        return True

    def vertices(self) -> List[int]:
        return [self.start] + [self.graph.edges[e].dst for e in self.edges]

    def reverse(self) -> "Path":
        """The path p̄ through the inverse edges in reverse order."""
        if not isinstance(self.graph, SerreGraph):
            raise InvalidGraphError("only paths in Serre graphs can be reversed")
        edges = tuple(self.graph.inverse(e) for e in reversed(self.edges))
        return Path(self.graph, edges, self.end)

    def signature(self, orientation: Optional[Orientation] = None) -> Tuple[int, ...]:
        """
        +1 for each edge in the orientation, -1 for each inverse edge.

        Every edge of an oriented graph counts +1.
        """
        if isinstance(self.graph, OrientedGraph):
            return (1,) * len(self.edges)
        if orientation is None:
            orientation = default_orientation(self.graph)
        return tuple(1 if e in orientation else -1 for e in self.edges)


def path_derangement(p: Path, orientation: Optional[Orientation] = None) -> int:
    """Sum of the signature: forward traversals minus backward ones."""
    return sum(p.signature(orientation))


def walks(g: BaseGraph, start: int, length: int, reduced: bool = False) -> Iterator[Path]:
    """
    All paths of the given length from start in the Serre graph of g.

    Args:
        g: graph; oriented graphs are walked in their underlying graph
        start: start vertex
        length: number of edges
        reduced: skip paths that backtrack along an edge

    Yields:
        Path objects in the Serre graph
    """
    serre = as_serre(g)
    stack: List[Tuple[int, Tuple[int, ...]]] = [(start, ())]
    while stack:
        v, edges = stack.pop()
        if len(edges) == length:
            yield Path(serre, edges, start)
            continue
        for e in serre.out_edges(v):
            if reduced and edges and serre.inverse(edges[-1]) == e:
                continue
            stack.append((serre.edges[e].dst, edges + (e,)))


def component_derangements(g: BaseGraph) -> List[Tuple[List[int], int]]:
    """
    Derangement of each connected component.

    A breadth-first spanning tree assigns potentials; every edge closing a
    cycle contributes |potential difference| to a running gcd.

    Returns:
        (sorted vertex list, derangement) per component, ordered by smallest vertex
    """
    serre = as_serre(g)
    orientation = default_orientation(serre)
    potential: Dict[int, int] = {}
    results = []
    for root in range(serre.n):
        if root in potential:
            continue
        potential[root] = 0
        members = [root]
        value = 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for e in serre.out_edges(v):
                w = serre.edges[e].dst
                p = potential[v] + (1 if e in orientation else -1)
                if w not in potential:
                    potential[w] = p
                    members.append(w)
                    queue.append(w)
                else:
                    value = math.gcd(value, abs(p - potential[w]))
        results.append((sorted(members), value))
    return results


def graph_derangement(g: BaseGraph) -> int:
    """
    The graph derangement der(g).

    The derangements of closed paths at a vertex form a subgroup dZ of the
    integers; d is the gcd of the fundamental-cycle derangements.

    Args:
        g: connected graph (Serre graphs use the lower-id orientation)

    Returns:
        d >= 0; 0 when every closed path has derangement 0
    """
    per_component = component_derangements(g)
    if len(per_component) > 1:
        values = [d for _, d in per_component]
        raise DisconnectedGraphError(f"graph has {len(values)} components with derangements {values}", values)
    return per_component[0][1] if per_component else 0


def components(g: BaseGraph) -> List[List[int]]:
    """Connected components of the underlying graph, as sorted vertex lists."""
    blocks = UnionFind(range(g.n))
    for edge in g.edges:
        blocks.union(edge.src, edge.dst)
    return sorted(sorted(block) for block in blocks.to_sets())


@dataclass
class ComponentPrediction:
    """
    Predicted number of components of g ⊗ C_M.

    Attributes:
        derangement: der(g)
        m: the cycle length M
        canonical: M when der ≡ 0 mod M, else gcd(der, M)
        residue_formula: M when der ≡ 0 mod M, else |[der]| with [der] in (-M/2, M/2]
    """

    derangement: int
    m: CycleLength
    canonical: Union[int, float]
    residue_formula: Union[int, float]

    @property
    def discrepancy(self) -> bool:
        return self.canonical != self.residue_formula

    def to_dict(self) -> Dict[str, object]:
        def plain(x):
            return "inf" if x == INFINITY else x

        return {
            "derangement": self.derangement,
            "m": plain(self.m),
            "canonical": plain(self.canonical),
            "paper_formula": plain(self.residue_formula),
            "discrepancy": self.discrepancy,
        }


def predict_components(g: BaseGraph, M: CycleLength) -> ComponentPrediction:
    """
    Predict the component count of g ⊗ C_M from der(g).

    Args:
        g: connected oriented graph
        M: cycle length or INFINITY

    Returns:
        ComponentPrediction with both formulas; a warning is logged when they differ
    """
    if M != INFINITY:
        check_cycle_length(M)
    d = graph_derangement(g)

    if M == INFINITY:
        canonical = INFINITY if d == 0 else d
        prediction = ComponentPrediction(d, M, canonical, canonical)
    elif d % M == 0:
        prediction = ComponentPrediction(d, M, M, M)
    else:
        residue = d % M
        if residue > M / 2:
            residue -= M
        prediction = ComponentPrediction(d, M, math.gcd(d, M), abs(residue))

    if prediction.discrepancy:
        logging.warning(
            f"Component formulas disagree for der={d}, M={M}: "
            f"gcd gives {prediction.canonical}, residue gives {prediction.residue_formula}"
        )
    return prediction


def rank(g: BaseGraph, v: int, M: int) -> Dict[int, int]:
    """Derangement of a path from v to each vertex, mod M (well defined when der(g) ≡ 0 mod M)."""
    serre = as_serre(g)
    orientation = default_orientation(serre)
    values = {v: 0}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for e in serre.out_edges(u):
            w = serre.edges[e].dst
            if w not in values:
                values[w] = (values[u] + (1 if e in orientation else -1)) % M
                queue.append(w)
    return values


def tensor_cycle_iso(g: OrientedGraph, v: int, M: int) -> GraphMorphism:
    """
    Isomorphism of g onto the component of g ⊗ C_M containing (v, 0).

    w goes to (w, rank(w)); the edge e from a goes to (e, cycle edge rank(a)).

    Args:
        g: connected oriented graph
        v: base vertex
        M: cycle length

    Returns:
        GraphMorphism from g to the component (an induced subgraph of the product)

    Raises:
        NotIsomorphicError: der(g) is not divisible by M
    """
    check_cycle_length(M, allow_infinite=False)
    d = graph_derangement(g)
    if d % M != 0:
        raise NotIsomorphicError(f"der = {d} is not divisible by M = {M}; no rank isomorphism exists")

    ranks = rank(g, v, M)
    product_graph = tensor(g, cycle(M))
    component = subgraph(product_graph, [w * M + ranks[w] for w in range(g.n)])
    edge_position = {e: i for i, e in enumerate(component.edges)}
    edge_map = tuple(edge_position[e.id * M + ranks[e.src]] for e in g.edges)
    phi = GraphMorphism(g, component.graph, tuple(range(g.n)), edge_map)
    logging.info(f"Rank isomorphism onto component of (v={v}, 0) in g ⊗ C_{M}: {g.n} vertices")
    return phi


def closed_path_derangements(g: BaseGraph, v: int, max_len: int) -> Set[int]:
    """
    Derangements of all closed paths at v of length 1..max_len.

    Exhaustive over (vertex, derangement) states; an oracle for graph_derangement.
    """
    serre = as_serre(g)
    orientation = default_orientation(serre)
    states = {(v, 0)}
    found = set()
    for _ in range(max_len):
        next_states = set()
        for u, d in states:
            for e in serre.out_edges(u):
                next_states.add((serre.edges[e].dst, d + (1 if e in orientation else -1)))
        states = next_states
        found.update(d for u, d in states if u == v)
    return found


def count_paths_by_signature(g: BaseGraph, start: int, signature: Sequence[int]) -> Dict[int, int]:
    """
    Number of paths from start with the given signature, by end vertex.

    Args:
        g: graph (oriented graphs use their underlying graph)
        start: start vertex
        signature: sequence of +1 / -1 steps

    Returns:
        end vertex -> number of paths
    """
    serre = as_serre(g)
    orientation = default_orientation(serre)
    counts = {start: 1}
    for step in signature:
        next_counts: Dict[int, int] = {}
        for u, c in counts.items():
            for e in serre.out_edges(u):
                if (1 if e in orientation else -1) == step:
                    w = serre.edges[e].dst
                    next_counts[w] = next_counts.get(w, 0) + c
        counts = next_counts
    return counts


def path_lifting_check(g: OrientedGraph, h: OrientedGraph, max_len: int) -> bool:
    """
    Paths in g ⊗ h with signature σ correspond to pairs of paths with signature σ.

    Checked for every start pair, end pair and signature of length 1..max_len.
    """
    t = tensor(g, h)
    for length in range(1, max_len + 1):
        for sigma in product((1, -1), repeat=length):
            for x in range(g.n):
                counts_g = count_paths_by_signature(g, x, sigma)
                for v in range(h.n):
                    counts_h = count_paths_by_signature(h, v, sigma)
                    counts_t = count_paths_by_signature(t, x * h.n + v, sigma)
                    for y in range(g.n):
                        for w in range(h.n):
                            if counts_t.get(y * h.n + w, 0) != counts_g.get(y, 0) * counts_h.get(w, 0):
                                logging.info(f"Path lifting fails for σ={sigma} from ({x},{v}) to ({y},{w})")
                                return False
    return True
