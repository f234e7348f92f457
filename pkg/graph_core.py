"""
Graph core.
Oriented graphs and Serre graphs (half-edges with a fixed-point-free inversion),
adjacency matrices, induced subgraphs, rooted balls and the marked-graph distance.
"""

import logging
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from utils import GraphAlgebraError, InvalidGraphError


INVERSE_SUFFIX = "^-1"


@dataclass(frozen=True)
class Vertex:
    """A vertex with a dense integer id and an optional display name."""

    id: int
    name: Optional[str] = None


@dataclass(frozen=True)
class Edge:
    """
    An edge e with initial vertex src and end vertex dst.

    For Serre graphs `inverse` holds the id of the paired edge ē.
    """

    id: int
    src: int
    dst: int
    label: Optional[str] = None
    weight: Union[int, float] = 1
    inverse: Optional[int] = None


def invert_label(label: Optional[str]) -> Optional[str]:
    """Label of a formal inverse: l becomes l^-1 and l^-1 becomes l."""
    if label is None:
        return None
    if label.endswith(INVERSE_SUFFIX):
        return label[: -len(INVERSE_SUFFIX)]
    return label + INVERSE_SUFFIX


class BaseGraph(ABC):
    """
    Abstract base class for finite multigraphs with dense vertex and edge ids.

    Graphs are immutable once built; adjacency lists are computed on construction.
    """

    def __init__(self, vertices: Sequence[Vertex], edges: Sequence[Edge],
                 attrs: Optional[Dict[str, Any]] = None):
        """
        Initialize and validate a graph.

        Args:
            vertices: vertices with ids 0..n-1 in order
            edges: edges with ids 0..m-1 in order
            attrs: JSON-compatible metadata (family parameters, window flag)
        """
        self.vertices: Tuple[Vertex, ...] = tuple(vertices)
        self.edges: Tuple[Edge, ...] = tuple(edges)
        self.attrs: Dict[str, Any] = dict(attrs or {})

        n = len(self.vertices)
        for i, vertex in enumerate(self.vertices):
            if vertex.id != i:
                raise InvalidGraphError(f"vertex ids must be dense: position {i} has id {vertex.id}")

        out_lists: List[List[int]] = [[] for _ in range(n)]
        in_lists: List[List[int]] = [[] for _ in range(n)]
        for i, edge in enumerate(self.edges):
            if edge.id != i:
                raise InvalidGraphError(f"edge ids must be dense: position {i} has id {edge.id}")
            if not (0 <= edge.src < n and 0 <= edge.dst < n):
                raise InvalidGraphError(f"edge {i} has an endpoint outside the vertex set")
            out_lists[edge.src].append(i)
            in_lists[edge.dst].append(i)

        self._out = tuple(tuple(ids) for ids in out_lists)
        self._in = tuple(tuple(ids) for ids in in_lists)
        self._by_name: Optional[Dict[str, int]] = None
        self._by_label: Optional[Dict[Tuple[int, Optional[str]], int]] = None
        self._check_involution()

    @property
    @abstractmethod
    def directed(self) -> bool:
        """True for oriented graphs, False for Serre graphs."""

    @abstractmethod
    def _check_involution(self):
        """Validate the involution (or its absence)."""

    @abstractmethod
    def with_parts(self, vertices: Sequence[Vertex], edges: Sequence[Edge],
                   attrs: Optional[Dict[str, Any]] = None) -> "BaseGraph":
        """Build a graph of the same kind from new parts."""

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def out_edges(self, v: int) -> Tuple[int, ...]:
        return self._out[v]

    def in_edges(self, v: int) -> Tuple[int, ...]:
        return self._in[v]

    def out_degree(self, v: int) -> int:
        return len(self._out[v])

    def in_degree(self, v: int) -> int:
        return len(self._in[v])

    def neighbors(self, v: int) -> List[int]:
        """Vertices joined to v by an edge in either direction."""
        result = [self.edges[e].dst for e in self._out[v]]
        result.extend(self.edges[e].src for e in self._in[v])
        return result

    def name(self, v: int) -> str:
        vertex = self.vertices[v]
        return vertex.name if vertex.name is not None else str(v)

    def vertex_id(self, name: str) -> int:
        """
        Look up a vertex by display name.

        Args:
            name: display name of the vertex

        Returns:
            The vertex id
        """
        if self._by_name is None:
            self._by_name = {self.name(v.id): v.id for v in self.vertices}
        try:
            return self._by_name[name]
        except KeyError:
            raise InvalidGraphError(f"no vertex named {name!r}") from None

    def out_edge_by_label(self, v: int, label: Optional[str]) -> int:
        """Id of the first edge leaving v with the given label."""
        if self._by_label is None:
            index: Dict[Tuple[int, Optional[str]], int] = {}
            for edge in self.edges:
                index.setdefault((edge.src, edge.label), edge.id)
            self._by_label = index
        try:
            return self._by_label[(v, label)]
        except KeyError:
            raise InvalidGraphError(f"no edge labeled {label!r} leaves vertex {self.name(v)}") from None

    def labels(self) -> List[Optional[str]]:
        return sorted({e.label for e in self.edges}, key=lambda l: (l is None, l or ""))

    def structure_key(self) -> tuple:
        """Everything except attrs; used for equality."""
        return (self.directed, self.vertices, self.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BaseGraph):
            return NotImplemented
        return self.structure_key() == other.structure_key()

    __hash__ = None

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(n={self.n}, m={self.m})"

    def to_dict(self) -> Dict[str, Any]:
        """
        Convert graph to the JSON interchange dictionary.

        Returns:
            Dictionary with directed, vertices, edges and optional attrs
        """
        vertices = []
        for vertex in self.vertices:
            entry: Dict[str, Any] = {"id": vertex.id}
            if vertex.name is not None:
                entry["name"] = vertex.name
            vertices.append(entry)
        edges = []
        for edge in self.edges:
            entry = {"id": edge.id, "src": edge.src, "dst": edge.dst}
            if edge.label is not None:
                entry["label"] = edge.label
            if edge.weight != 1:
                entry["weight"] = edge.weight
            if edge.inverse is not None:
                entry["inverse"] = edge.inverse
            edges.append(entry)
        data: Dict[str, Any] = {"directed": self.directed, "vertices": vertices, "edges": edges}
        if self.attrs:
            data["attrs"] = dict(self.attrs)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BaseGraph":
        """
        Create a graph from the JSON interchange dictionary.

        Args:
            data: Dictionary as produced by to_dict

        Returns:
            OrientedGraph or SerreGraph depending on the directed flag
        """
        try:
            vertices = [Vertex(int(v["id"]), v.get("name")) for v in data["vertices"]]
            edges = [
                Edge(
                    id=int(e["id"]),
                    src=int(e["src"]),
                    dst=int(e["dst"]),
                    label=e.get("label"),
                    weight=e.get("weight", 1),
                    inverse=e.get("inverse"),
                )
                for e in data["edges"]
            ]
            directed = bool(data["directed"])
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidGraphError(f"malformed graph dictionary: {e}") from e

        graph_class = OrientedGraph if directed else SerreGraph
        return graph_class(vertices, edges, data.get("attrs"))


class OrientedGraph(BaseGraph):
    """Oriented multigraph: edges carry no involution."""

    @property
    def directed(self) -> bool:
        return True

    def _check_involution(self):
        for edge in self.edges:
            if edge.inverse is not None:
                raise InvalidGraphError(f"oriented graph edge {edge.id} declares an inverse")

    def with_parts(self, vertices, edges, attrs=None) -> "OrientedGraph":
        return OrientedGraph(vertices, edges, attrs)

    @classmethod
    def build(cls, names: Sequence[Optional[str]], arcs: Iterable[tuple],
              attrs: Optional[Dict[str, Any]] = None) -> "OrientedGraph":
        """
        Build from vertex names and (src, dst[, label[, weight]]) tuples.

        Args:
            names: display names, one per vertex, in id order
            arcs: edge tuples in id order
            attrs: optional metadata

        Returns:
            The oriented graph
        """
        vertices = [Vertex(i, name) for i, name in enumerate(names)]
        edges = []
        for i, arc in enumerate(arcs):
            src, dst = arc[0], arc[1]
            label = arc[2] if len(arc) > 2 else None
            weight = arc[3] if len(arc) > 3 else 1
            edges.append(Edge(i, src, dst, label, weight))
        return cls(vertices, edges, attrs)


class SerreGraph(BaseGraph):
    """Non-oriented multigraph given by half-edges paired by a fixed-point-free involution."""

    @property
    def directed(self) -> bool:
        return False

    def _check_involution(self):
        for edge in self.edges:
            if edge.inverse is None:
                raise InvalidGraphError(f"Serre graph edge {edge.id} has no inverse")
            if not 0 <= edge.inverse < len(self.edges):
                raise InvalidGraphError(f"edge {edge.id} points to a missing inverse")
            partner = self.edges[edge.inverse]
            if partner.id == edge.id:
                raise InvalidGraphError(f"edge {edge.id} is its own inverse")
            if partner.inverse != edge.id:
                raise InvalidGraphError(f"involution is not of order 2 at edge {edge.id}")
            if partner.src != edge.dst or partner.dst != edge.src:
                raise InvalidGraphError(f"inverse of edge {edge.id} has the wrong endpoints")
            if partner.weight != edge.weight:
                raise InvalidGraphError(f"inverse of edge {edge.id} has a different weight")

    def with_parts(self, vertices, edges, attrs=None) -> "SerreGraph":
        return SerreGraph(vertices, edges, attrs)

    def inverse(self, e: int) -> int:
        return self.edges[e].inverse

    def degree(self, v: int) -> int:
        """Number of half-edges starting at v; a loop pair counts twice."""
        return len(self._out[v])

    def pairs(self) -> List[Tuple[int, int]]:
        """Involution pairs (e, ē) with e the lower id."""
        return [(e.id, e.inverse) for e in self.edges if e.id < e.inverse]

    @classmethod
    def from_pairs(cls, names: Sequence[Optional[str]], arcs: Sequence[tuple],
                   attrs: Optional[Dict[str, Any]] = None) -> "SerreGraph":
        """
        Build from (src, dst[, label[, weight]]) tuples, adding formal inverses.

        Edge i of arcs gets id i; its inverse gets id len(arcs) + i.
        """
        m = len(arcs)
        vertices = [Vertex(i, name) for i, name in enumerate(names)]
        forward, backward = [], []
        for i, arc in enumerate(arcs):
            src, dst = arc[0], arc[1]
            label = arc[2] if len(arc) > 2 else None
            weight = arc[3] if len(arc) > 3 else 1
            forward.append(Edge(i, src, dst, label, weight, m + i))
            backward.append(Edge(m + i, dst, src, invert_label(label), weight, i))
        return cls(vertices, forward + backward, attrs)


Graph = Union[OrientedGraph, SerreGraph]


@dataclass(frozen=True)
class MarkedGraph:
    """A graph with a distinguished root vertex."""

    graph: BaseGraph
    root: int


@dataclass(frozen=True)
class InducedSubgraph:
    """Induced subgraph plus the original ids of its vertices and edges."""

    graph: BaseGraph
    vertices: Tuple[int, ...]
    edges: Tuple[int, ...]


@dataclass(frozen=True)
class RootedBall:
    """
    The radius-r ball around a root, as an induced subgraph.

    Attributes:
        graph: the ball with dense ids
        root: id of the root inside the ball
        radius: the radius r
        source_vertices: original vertex id for each ball vertex
    """

    graph: BaseGraph
    root: int
    radius: int
    source_vertices: Tuple[int, ...] = field(default=())

    def marked(self) -> MarkedGraph:
        return MarkedGraph(self.graph, self.root)


def underlying(g: OrientedGraph) -> SerreGraph:
    """
    Add a formal inverse for every edge.

    Args:
        g: oriented graph

    Returns:
        Serre graph with 2m edges; edge i is paired with edge m + i
    """
    if not isinstance(g, OrientedGraph):
        raise InvalidGraphError("underlying() expects an oriented graph")
    arcs = [(e.src, e.dst, e.label, e.weight) for e in g.edges]
    return SerreGraph.from_pairs([v.name for v in g.vertices], arcs, g.attrs)


def lower_id_selector(first: Edge, second: Edge) -> Edge:
    """Default orientation: keep the edge with the lower id."""
    return first if first.id < second.id else second


def choose_orientation(g: SerreGraph,
                       selector: Callable[[Edge, Edge], Edge] = lower_id_selector) -> OrientedGraph:
    """
    Pick one edge in each involution pair.

    Args:
        g: Serre graph
        selector: chooses one of (e, ē)

    Returns:
        Oriented graph whose underlying graph is strongly isomorphic to g
    """
    if not isinstance(g, SerreGraph):
        raise InvalidGraphError("choose_orientation() expects a Serre graph")
    g._check_involution()

    chosen = []
    for e, e_bar in g.pairs():
        pick = selector(g.edges[e], g.edges[e_bar])
        if pick.id not in (e, e_bar):
            raise InvalidGraphError(f"selector returned edge {pick.id} outside pair ({e}, {e_bar})")
        chosen.append(pick)

    edges = [Edge(i, e.src, e.dst, e.label, e.weight) for i, e in enumerate(chosen)]
    return OrientedGraph(g.vertices, edges, g.attrs)


def adjacency_matrix(g: BaseGraph) -> np.ndarray:
    """
    Adjacency matrix a_ij = number (or total weight) of edges i -> j.

    Integer dtype when every weight is integral, float otherwise.
    """
    integral = all(float(e.weight).is_integer() for e in g.edges)
    dtype = np.int64 if integral else np.float64
    matrix = np.zeros((g.n, g.n), dtype=dtype)
    for edge in g.edges:
        matrix[edge.src, edge.dst] += int(edge.weight) if integral else edge.weight
    return matrix


def subgraph(g: BaseGraph, vertex_ids: Iterable[int],
             edge_filter: Optional[Callable[[Edge], bool]] = None) -> InducedSubgraph:
    """
    Subgraph on the given vertices, renumbered densely in the given order.

    Args:
        g: source graph
        vertex_ids: vertices to keep
        edge_filter: extra condition on edges between kept vertices; must be
            symmetric under the involution for Serre graphs

    Returns:
        InducedSubgraph with back-references to g
    """
    kept = list(dict.fromkeys(vertex_ids))
    position = {v: i for i, v in enumerate(kept)}
    vertices = [Vertex(i, g.vertices[v].name) for i, v in enumerate(kept)]

    kept_edges = [
        e for e in g.edges
        if e.src in position and e.dst in position and (edge_filter is None or edge_filter(e))
    ]
    edge_position = {e.id: i for i, e in enumerate(kept_edges)}
    edges = []
    for i, e in enumerate(kept_edges):
        inverse = edge_position[e.inverse] if e.inverse is not None else None
        edges.append(Edge(i, position[e.src], position[e.dst], e.label, e.weight, inverse))

    graph = g.with_parts(vertices, edges, g.attrs)
    return InducedSubgraph(graph, tuple(kept), tuple(e.id for e in kept_edges))


def disjoint_union(graphs: Sequence[BaseGraph]) -> BaseGraph:
    """Disjoint union; ids of later graphs are shifted past earlier ones."""
    if not graphs:
        return OrientedGraph([], [])
    if len({g.directed for g in graphs}) > 1:
        raise InvalidGraphError("cannot unite oriented and Serre graphs")

    vertices: List[Vertex] = []
    edges: List[Edge] = []
    for g in graphs:
        v_shift, e_shift = len(vertices), len(edges)
        vertices.extend(Vertex(v.id + v_shift, v.name) for v in g.vertices)
        for e in g.edges:
            inverse = e.inverse + e_shift if e.inverse is not None else None
            edges.append(Edge(e.id + e_shift, e.src + v_shift, e.dst + v_shift, e.label, e.weight, inverse))
    return graphs[0].with_parts(vertices, edges)


def relabel(g: BaseGraph, mapping: Dict[Optional[str], Optional[str]]) -> BaseGraph:
    """Rename edge labels; labels missing from mapping are kept."""
    edges = [replace(e, label=mapping.get(e.label, e.label)) for e in g.edges]
    return g.with_parts(g.vertices, edges, g.attrs)


def distances_from(g: BaseGraph, root: int, limit: Optional[int] = None) -> Dict[int, int]:
    """Breadth-first distances in the underlying graph, optionally cut at limit."""
    dist = {root: 0}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        if limit is not None and dist[v] >= limit:
            continue
        for w in g.neighbors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def ball(g: BaseGraph, root: int, r: int) -> RootedBall:
    """
    The radius-r ball centered at root.

    Vertices at underlying distance at most r, and every edge with at least one
    endpoint at distance less than r. The radius-0 ball is the bare root.

    Args:
        g: graph
        root: center vertex id
        r: radius

    Returns:
        RootedBall whose root is vertex 0
    """
    if r < 0:
        raise GraphAlgebraError(f"radius must be non-negative, got {r}")
    dist = distances_from(g, root, r)
    order = sorted(dist, key=lambda v: (dist[v], v))
    induced = subgraph(g, order, lambda e: min(dist[e.src], dist[e.dst]) < r)
    return RootedBall(induced.graph, 0, r, induced.vertices)


def _as_mode(marked: MarkedGraph, mode: str) -> MarkedGraph:
    if mode == "underlying" and isinstance(marked.graph, OrientedGraph):
        return MarkedGraph(underlying(marked.graph), marked.root)
    return marked


def rooted_distance(a: MarkedGraph, b: MarkedGraph, mode: str = "oriented",
                    max_radius: Optional[int] = None) -> Fraction:
    """
    Marked-graph distance 1/(1+r), r the largest radius with isomorphic rooted balls.

    Args:
        a: first rooted graph
        b: second rooted graph
        mode: "oriented" (weak iso), "labeled" (strong iso) or "underlying"
        max_radius: stop after this radius; the result is then an upper bound

    Returns:
        0 when all balls agree
    """
    from morphisms import SearchLimits, SearchStatus, find_iso

    if mode not in ("oriented", "labeled", "underlying"):
        raise GraphAlgebraError(f"unknown distance mode {mode!r}")
    a, b = _as_mode(a, mode), _as_mode(b, mode)
    kind = "strong" if mode == "labeled" else "weak"
    limits = SearchLimits(max_vertices=10_000)

    previous_sizes = None
    r = 0
    while True:
        ball_a, ball_b = ball(a.graph, a.root, r), ball(b.graph, b.root, r)
        result = find_iso(ball_a.graph, ball_b.graph, kind=kind,
                          roots=(ball_a.root, ball_b.root), limits=limits)
        if result.status is SearchStatus.UNDECIDED:
            raise GraphAlgebraError(f"ball comparison at radius {r} exceeded the search cap")
        if result.status is SearchStatus.NONE:
            return Fraction(1, max(r, 1))

        sizes = (ball_a.graph.n, ball_a.graph.m, ball_b.graph.n, ball_b.graph.m)
        if sizes == previous_sizes:
            return Fraction(0)
        if max_radius is not None and r >= max_radius:
            logging.debug(f"rooted_distance stopped at radius {r}; returning the bound")
            return Fraction(1, r + 1)
        previous_sizes = sizes
        r += 1
