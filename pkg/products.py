"""
Graph products.
Graph morphisms, the tensor (categorical) product, line graphs, and explicit
isomorphisms between line graphs of the de Bruijn, Schreier and spider-web families.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from families import cycle, de_bruijn, parse_spiderweb_name, spider_web, spiderweb_vertex_name
from lamplighter import cbar_label, schreier_level_graph
from graph_core import BaseGraph, Edge, OrientedGraph, Vertex
from utils import InvalidGraphError, SYMBOLS


@dataclass(frozen=True, eq=False)
class GraphMorphism:
    """
    A pair of maps (vertices, edges) from source to target.

    Attributes:
        source: domain graph
        target: codomain graph
        vertex_map: image vertex id for each source vertex id
        edge_map: image edge id for each source edge id
    """

    source: BaseGraph
    target: BaseGraph
    vertex_map: Tuple[int, ...]
    edge_map: Tuple[int, ...]

    def is_morphism(self) -> bool:
        """Check that the maps commute with initial and end vertex maps (and the involution)."""
        if self.source.directed != self.target.directed:
            return False
        if len(self.vertex_map) != self.source.n or len(self.edge_map) != self.source.m:
            return False
        if any(not 0 <= v < self.target.n for v in self.vertex_map):
            return False
        if any(not 0 <= e < self.target.m for e in self.edge_map):
            return False
        for edge in self.source.edges:
            image = self.target.edges[self.edge_map[edge.id]]
            if image.src != self.vertex_map[edge.src] or image.dst != self.vertex_map[edge.dst]:
                return False
            if edge.inverse is not None and image.inverse is not None:
                if self.edge_map[edge.inverse] != image.inverse:
                    return False
        return True

    def preserves_labels(self) -> bool:
        return all(
            self.target.edges[self.edge_map[e.id]].label == e.label for e in self.source.edges
        )

    @property
    def kind(self) -> str:
        return "strong" if self.preserves_labels() else "weak"

    def is_bijective(self) -> bool:
        return (
            self.source.n == self.target.n
            and self.source.m == self.target.m
            and len(set(self.vertex_map)) == self.target.n
            and len(set(self.edge_map)) == self.target.m
        )

    def is_isomorphism(self, kind: str = "weak") -> bool:
        """
        Verify the morphism is an isomorphism.

        Args:
            kind: "weak" ignores labels, "strong" also requires label preservation

        Returns:
            True if every check passes
        """
        if not (self.is_morphism() and self.is_bijective()):
            return False
        return kind == "weak" or self.preserves_labels()

    def followed_by(self, other: "GraphMorphism") -> "GraphMorphism":
        """The composite: apply self, then other."""
        if other.source is not self.target and other.source != self.target:
            raise InvalidGraphError("morphisms do not compose: target and source differ")
        return GraphMorphism(
            self.source,
            other.target,
            tuple(other.vertex_map[v] for v in self.vertex_map),
            tuple(other.edge_map[e] for e in self.edge_map),
        )

    def inverse(self) -> "GraphMorphism":
        """Inverse of a bijective morphism."""
        if not self.is_bijective():
            raise InvalidGraphError("only bijective morphisms can be inverted")
        vertex_map = [0] * self.target.n
        for v, image in enumerate(self.vertex_map):
            vertex_map[image] = v
        edge_map = [0] * self.target.m
        for e, image in enumerate(self.edge_map):
            edge_map[image] = e
        return GraphMorphism(self.target, self.source, tuple(vertex_map), tuple(edge_map))

    def vertex_image_name(self, name: str) -> str:
        return self.target.name(self.vertex_map[self.source.vertex_id(name)])


def identity_morphism(g: BaseGraph) -> GraphMorphism:
    return GraphMorphism(g, g, tuple(range(g.n)), tuple(range(g.m)))


def _pair_label(g: BaseGraph, h: BaseGraph, e: Edge, f: Edge) -> Optional[str]:
    if h.attrs.get("family") == "cycle":
        return e.label
    if e.label is None and f.label is None:
        return None
    return f"({e.label},{f.label})"


def tensor(g: BaseGraph, h: BaseGraph) -> BaseGraph:
    """
    Tensor product g ⊗ h.

    Vertex (v, w) has id v*|V(h)| + w; edge (e, f) has id e*|E(h)| + f and runs
    from (src e, src f) to (dst e, dst f). Labels are paired, except that a
    cycle factor on the right contributes no label.

    Args:
        g: left factor
        h: right factor, of the same orientedness

    Returns:
        The product graph
    """
    if g.directed != h.directed:
        raise InvalidGraphError("tensor product of an oriented and a Serre graph")

    vertices = [
        Vertex(v * h.n + w, f"({g.name(v)},{h.name(w)})") for v in range(g.n) for w in range(h.n)
    ]
    edges = []
    for e in g.edges:
        for f in h.edges:
            inverse = None
            if e.inverse is not None:
                inverse = e.inverse * h.m + f.inverse
            edges.append(Edge(
                id=e.id * h.m + f.id,
                src=e.src * h.n + f.src,
                dst=e.dst * h.n + f.dst,
                label=_pair_label(g, h, e, f),
                weight=e.weight * f.weight,
                inverse=inverse,
            ))
    logging.debug(f"Tensor product: {len(vertices)} vertices, {len(edges)} edges")
    return g.with_parts(vertices, edges, {"family": "tensor"})


def line_transitions(g: OrientedGraph) -> List[Tuple[int, int]]:
    """Edge pairs (e, f) with dst(e) = src(f), in the edge order of line_graph(g)."""
    return [(e.id, f) for e in g.edges for f in g.out_edges(e.dst)]


def line_graph(g: OrientedGraph) -> OrientedGraph:
    """
    Line graph L(g): one vertex per edge of g, an edge e -> f whenever f directly follows e.

    Vertex i of L(g) is edge i of g; edge j of L(g) is line_transitions(g)[j].
    """
    if not isinstance(g, OrientedGraph):
        raise InvalidGraphError("line graphs are defined for oriented graphs")
    names = [f"e{e.id}" for e in g.edges]
    arcs = line_transitions(g)
    return OrientedGraph.build(names, arcs, {"family": "line"})


def _transition_index(g: OrientedGraph) -> Dict[Tuple[int, int], int]:
    return {pair: i for i, pair in enumerate(line_transitions(g))}


def morphism_tensor(first: GraphMorphism, second: GraphMorphism) -> GraphMorphism:
    """The product morphism first ⊗ second between the tensor products."""
    source = tensor(first.source, second.source)
    target = tensor(first.target, second.target)
    n2, m2 = second.target.n, second.target.m
    vertex_map = tuple(
        first.vertex_map[v] * n2 + second.vertex_map[w]
        for v in range(first.source.n) for w in range(second.source.n)
    )
    edge_map = tuple(
        first.edge_map[e] * m2 + second.edge_map[f]
        for e in range(first.source.m) for f in range(second.source.m)
    )
    return GraphMorphism(source, target, vertex_map, edge_map)


def line_morphism(phi: GraphMorphism) -> GraphMorphism:
    """
    The line functor applied to a morphism of oriented graphs.

    Vertex e of L(source) goes to phi(e); edge (e, f) goes to (phi(e), phi(f)).
    """
    source = line_graph(phi.source)
    target = line_graph(phi.target)
    target_index = _transition_index(phi.target)
    edge_map = []
    for e, f in line_transitions(phi.source):
        key = (phi.edge_map[e], phi.edge_map[f])
        if key not in target_index:
            raise InvalidGraphError("line functor needs a morphism of oriented graphs")
        edge_map.append(target_index[key])
    return GraphMorphism(source, target, tuple(phi.edge_map), tuple(edge_map))


def line_tensor_iso(g: OrientedGraph, h: OrientedGraph) -> GraphMorphism:
    """
    Witness of L(g ⊗ h) ≅ L(g) ⊗ L(h).

    Vertices correspond to pairs of edges and keep their ids; an edge of
    L(g ⊗ h) from (e, f) to (e', f') goes to the pair ((e, e'), (f, f')).
    """
    source = line_graph(tensor(g, h))
    lg, lh = line_graph(g), line_graph(h)
    target = tensor(lg, lh)
    g_index, h_index = _transition_index(g), _transition_index(h)

    product_edges = tensor(g, h)
    edge_map = []
    for ef, ef_next in line_transitions(product_edges):
        e, f = divmod(ef, h.m)
        e_next, f_next = divmod(ef_next, h.m)
        edge_map.append(g_index[(e, e_next)] * lh.m + h_index[(f, f_next)])
    return GraphMorphism(source, target, tuple(range(source.n)), tuple(edge_map))


def label_index(label: str) -> int:
    """Generator index of labels like R_3 or cbar_2."""
    try:
        return int(label.rsplit("_", 1)[1])
    except (AttributeError, IndexError, ValueError):
        raise InvalidGraphError(f"label {label!r} has no generator index") from None


def de_bruijn_line_iso(k: int, N: int) -> GraphMorphism:
    """
    Explicit weak isomorphism L(B_{k,N}) -> B_{k,N+1}.

    The edge (x1..xN, R_y) becomes the vertex x1..xN y, and the line-graph edge
    followed by an edge labeled R_z becomes the edge labeled R_z there.

    Args:
        k: alphabet size
        N: string length of the smaller graph

    Returns:
        The morphism; verify with is_isomorphism("weak")
    """
    base = de_bruijn(k, N)
    source = line_graph(base)
    target = de_bruijn(k, N + 1)

    vertex_map = []
    for edge in base.edges:
        name = base.name(edge.src) + SYMBOLS[label_index(edge.label)]
        vertex_map.append(target.vertex_id(name))

    edge_map = []
    for e, f in line_transitions(base):
        following = base.edges[f]
        edge_map.append(target.out_edge_by_label(vertex_map[e], following.label))
    return GraphMorphism(source, target, tuple(vertex_map), tuple(edge_map))


def gamma_line_iso(k: int, N: int) -> GraphMorphism:
    """
    Explicit weak isomorphism L(Γ_{k,N}) -> Γ_{k,N+1}.

    The edge (x, cbar_i) becomes the vertex i x; a line-graph edge continuing
    with cbar_j becomes the edge labeled cbar_{j-i}.
    """
    base = schreier_level_graph(k, N)
    source = line_graph(base)
    target = schreier_level_graph(k, N + 1)

    vertex_map = []
    for edge in base.edges:
        i = label_index(edge.label)
        vertex_map.append(target.vertex_id(SYMBOLS[i] + base.name(edge.src)))

    edge_map = []
    for e, f in line_transitions(base):
        i = label_index(base.edges[e].label)
        j = label_index(base.edges[f].label)
        edge_map.append(target.out_edge_by_label(vertex_map[e], cbar_label((j - i) % k)))
    return GraphMorphism(source, target, tuple(vertex_map), tuple(edge_map))


def spiderweb_tensor_iso(k: int, N: int, M: int) -> GraphMorphism:
    """
    Explicit strong isomorphism S_{k,N,M} -> B_{k,N} ⊗ C_M.

    (x, j) goes to (x, j); the edge labeled R_y at (x, j) goes to the pair of the
    R_y edge at x with the cycle edge j.
    """
    source = spider_web(k, N, M)
    target = tensor(de_bruijn(k, N), cycle(M))
    size = k ** N
    vertex_map = tuple(x * M + j for j in range(M) for x in range(size))
    edge_map = tuple(
        (x * k + y) * M + j for j in range(M) for x in range(size) for y in range(k)
    )
    return GraphMorphism(source, target, vertex_map, edge_map)


def spiderweb_line_iso(k: int, N: int, M: int) -> GraphMorphism:
    """
    Explicit weak isomorphism L(S_{k,N,M}) -> S_{k,N+1,M}.

    The edge labeled R_y at (x, j) becomes the vertex (x y, j).
    """
    base = spider_web(k, N, M)
    source = line_graph(base)
    target = spider_web(k, N + 1, M)

    vertex_map = []
    for edge in base.edges:
        word, j = parse_spiderweb_name(base.name(edge.src))
        name = spiderweb_vertex_name(word + (label_index(edge.label),), j)
        vertex_map.append(target.vertex_id(name))

    edge_map = []
    for e, f in line_transitions(base):
        edge_map.append(target.out_edge_by_label(vertex_map[e], base.edges[f].label))
    return GraphMorphism(source, target, tuple(vertex_map), tuple(edge_map))
