"""
Graph families.
Constructors for de Bruijn graphs, oriented cycles and line windows, spider-web
graphs and the weighted theta graphs that carry their spectra.
"""

import itertools
import logging
import math
from typing import List, Optional, Tuple, Union

from graph_core import OrientedGraph
from utils import InvalidParameterError, check_alphabet, name_to_word, word_to_name


INFINITY = math.inf

CycleLength = Union[int, float]


def check_level(N: int):
    if not isinstance(N, int) or N < 0:
        raise InvalidParameterError(f"N must be a non-negative integer, got {N!r}")


def check_cycle_length(M: CycleLength, window: Optional[int] = None, allow_infinite: bool = True):
    """Validate M >= 1, or M = INFINITY together with a window W >= 1."""
    if M == INFINITY:
        if not allow_infinite:
            raise InvalidParameterError("this operation needs a finite cycle length")
        if not isinstance(window, int) or window < 1:
            raise InvalidParameterError("an infinite cycle needs a window W >= 1")
        return
    if not isinstance(M, int) or M < 1:
        raise InvalidParameterError(f"M must be a positive integer or INFINITY, got {M!r}")


def words(k: int, N: int) -> List[Tuple[int, ...]]:
    """All length-N words over {0..k-1} in lexicographic order (index = base-k value)."""
    return list(itertools.product(range(k), repeat=N))


def word_index(word: Tuple[int, ...], k: int) -> int:
    index = 0
    for symbol in word:
        index = index * k + symbol
    return index


def spiderweb_vertex_name(word: Union[str, Tuple[int, ...]], j: int) -> str:
    """Display name "<string>:<slice>" of a spider-web vertex."""
    text = word if isinstance(word, str) else word_to_name(word)
    return f"{text}:{j}"


def parse_spiderweb_name(name: str) -> Tuple[Tuple[int, ...], int]:
    text, _, slice_text = name.rpartition(":")
    return name_to_word(text), int(slice_text)


def de_bruijn(k: int, N: int) -> OrientedGraph:
    """
    The de Bruijn graph B_{k,N}.

    Vertex x1..xN has an edge labeled R_y to x2..xN y. Vertex ids are the
    base-k values of the strings and edge v*k + y carries label R_y.

    Args:
        k: alphabet size
        N: string length; N = 0 gives the rose with k loops

    Returns:
        Labeled oriented graph with k^N vertices and k^(N+1) edges
    """
    check_alphabet(k)
    check_level(N)
    size = k ** N
    names = [word_to_name(w) for w in words(k, N)]
    arcs = [(v, (v * k + y) % size, f"R_{y}") for v in range(size) for y in range(k)]
    logging.debug(f"Built de Bruijn graph k={k} N={N}: {size} vertices")
    return OrientedGraph.build(names, arcs, {"family": "debruijn", "k": k, "n": N})


def rose(k: int) -> OrientedGraph:
    """One vertex with k loops labeled R_0..R_{k-1}."""
    return de_bruijn(k, 0)


def cycle(M: CycleLength, window: Optional[int] = None) -> OrientedGraph:
    """
    The oriented cycle C_M, or a finite window of the bi-infinite line.

    Args:
        M: cycle length, or INFINITY
        window: W for INFINITY; the window covers [-W, W]

    Returns:
        M vertices with edges i -> i+1 mod M, or 2W+1 vertices and 2W edges
        flagged as a line segment
    """
    check_cycle_length(M, window)
    if M == INFINITY:
        positions = list(range(-window, window + 1))
        names = [str(i) for i in positions]
        arcs = [(i, i + 1) for i in range(len(positions) - 1)]
        attrs = {"family": "cycle", "m": "inf", "window": window, "segment": True}
        return OrientedGraph.build(names, arcs, attrs)

    names = [str(i) for i in range(M)]
    arcs = [(i, (i + 1) % M) for i in range(M)]
    return OrientedGraph.build(names, arcs, {"family": "cycle", "m": M})


def spider_web(k: int, N: int, M: CycleLength, window: Optional[int] = None) -> OrientedGraph:
    """
    The spider-web graph S_{k,N,M}.

    Vertex (x1..xN, i) has an edge labeled R_y to (x2..xN y, i+1 mod M). Vertex
    ids are slice-major: id = i*k^N + index(x).

    Args:
        k: alphabet size
        N: string length
        M: number of slices, or INFINITY with a window of slices [-W, W]
        window: W when M is INFINITY

    Returns:
        Labeled oriented graph with k^N * M vertices and out-degree k
    """
    check_alphabet(k)
    check_level(N)
    check_cycle_length(M, window)
    size = k ** N
    all_words = words(k, N)

    if M == INFINITY:
        slices = list(range(-window, window + 1))
        attrs = {"family": "spiderweb", "k": k, "n": N, "m": "inf", "window": window, "segment": True}
    else:
        slices = list(range(M))
        attrs = {"family": "spiderweb", "k": k, "n": N, "m": M}

    names = [spiderweb_vertex_name(w, j) for j in slices for w in all_words]
    arcs = []
    for position, _ in enumerate(slices):
        if M == INFINITY:
            if position + 1 == len(slices):
                continue
            next_position = position + 1
        else:
            next_position = (position + 1) % M
        for x in range(size):
            for y in range(k):
                arcs.append((position * size + x, next_position * size + (x * k + y) % size, f"R_{y}"))
    logging.debug(f"Built spider-web graph k={k} N={N} M={M}: {len(names)} vertices")
    return OrientedGraph.build(names, arcs, attrs)


def theta_path_counts(k: int, N: int, M: int = 1) -> List[Tuple[int, int]]:
    """
    (path length, number of paths) for the theta graph, besides the cycle.

    (k-1)^2 k^(N-i-2) M paths of length i for 0 <= i <= N-2, and (k-1) M paths
    of length N-1.
    """
    counts = [(i, (k - 1) ** 2 * k ** (N - i - 2) * M) for i in range(N - 1)]
    if N >= 1:
        counts.append((N - 1, (k - 1) * M))
    return counts


def theta_graph_M(k: int, N: int, M: int) -> OrientedGraph:
    """
    Weighted theta graph with the same symmetrized spectrum as S_{k,N,M}.

    One oriented cycle of length M followed by the disjoint oriented paths of
    theta_path_counts; every edge has weight k.

    Args:
        k: alphabet size
        N: string length
        M: cycle length

    Returns:
        Weighted oriented graph with M*k^N vertices
    """
    check_alphabet(k)
    check_level(N)
    check_cycle_length(M, allow_infinite=False)

    names = [f"c{i}" for i in range(M)]
    arcs = [(i, (i + 1) % M, None, k) for i in range(M)]
    for length, count in theta_path_counts(k, N, M):
        for copy in range(count):
            start = len(names)
            names.extend(f"p{length}.{copy}.{s}" for s in range(length + 1))
            arcs.extend((start + s, start + s + 1, None, k) for s in range(length))

    attrs = {"family": "theta", "k": k, "n": N, "m": M}
    return OrientedGraph.build(names, arcs, attrs)


def theta_graph(k: int, N: int) -> OrientedGraph:
    """Theta graph of the de Bruijn graph: theta_graph_M with a single loop."""
    return theta_graph_M(k, N, 1)
