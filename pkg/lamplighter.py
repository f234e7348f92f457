"""
Lamplighter group Z/kZ wr Z.
Exact arithmetic on normal forms, the action on the k-ary tree and on spider-web
vertices, Schreier and Cayley graphs, the subgroups H_{N,M} and W_{N,M}, and
the limiting Kesten spectral measure.
"""

import logging
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from math import gcd
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from families import INFINITY, check_cycle_length, check_level, spiderweb_vertex_name, words
from graph_core import OrientedGraph, RootedBall
from spectra import SpectralMeasure
from utils import (
    GroupMismatchError,
    InvalidParameterError,
    check_alphabet,
    name_to_word,
    word_to_name,
)


Letter = Tuple[str, int]
GeneratorWord = Tuple[Letter, ...]


def cbar_label(r: int) -> str:
    return f"cbar_{r}"


@dataclass(frozen=True)
class LampElement:
    """
    Normal form prod_t (b^{i_t} c b^{-i_t})^{r_t} * b^{r_b}.

    Attributes:
        k: lamp group order
        lamps: sorted (position i_t, coefficient r_t) pairs with r_t in 1..k-1
        shift: r_b
    """

    k: int
    lamps: Tuple[Tuple[int, int], ...] = ()
    shift: int = 0

    @classmethod
    def from_lamps(cls, k: int, lamps: Dict[int, int], shift: int = 0) -> "LampElement":
        """Normalize a position -> coefficient mapping (coefficients taken mod k)."""
        cleaned = tuple(sorted((p, r % k) for p, r in lamps.items() if r % k))
        return cls(k, cleaned, shift)

    @classmethod
    def identity(cls, k: int) -> "LampElement":
        return cls(k)

    @classmethod
    def b(cls, k: int) -> "LampElement":
        return cls(k, (), 1)

    @classmethod
    def c(cls, k: int) -> "LampElement":
        return cls.from_lamps(k, {0: 1})

    @classmethod
    def cbar(cls, k: int, r: int) -> "LampElement":
        """The generator cbar_r = c^r b."""
        return cls.from_lamps(k, {0: r}, 1)

    def lamp(self, position: int) -> int:
        return dict(self.lamps).get(position, 0)

    def _check(self, other: "LampElement"):
        if not isinstance(other, LampElement):
            raise TypeError(f"cannot multiply LampElement by {type(other).__name__}")
        if other.k != self.k:
            raise GroupMismatchError(f"lamp groups differ: k={self.k} and k={other.k}")

    def __mul__(self, other: "LampElement") -> "LampElement":
        self._check(other)
        lamps = dict(self.lamps)
        for position, coefficient in other.lamps:
            target = position + self.shift
            lamps[target] = lamps.get(target, 0) + coefficient
        return LampElement.from_lamps(self.k, lamps, self.shift + other.shift)

    def inverse(self) -> "LampElement":
        lamps = {p - self.shift: -r for p, r in self.lamps}
        return LampElement.from_lamps(self.k, lamps, -self.shift)

    def __pow__(self, n: int) -> "LampElement":
        base = self if n >= 0 else self.inverse()
        result = LampElement.identity(self.k)
        for _ in range(abs(n)):
            result = result * base
        return result

    def conjugate(self, g: "LampElement") -> "LampElement":
        """g * self * g^-1."""
        return g * self * g.inverse()

    def is_identity(self) -> bool:
        return not self.lamps and self.shift == 0

    def in_lamp_subgroup(self) -> bool:
        return self.shift == 0

    def __str__(self) -> str:
        lamps = ",".join(f"{p}:{r}" for p, r in self.lamps)
        return f"[{lamps}]b^{self.shift}"


def generator(name: str, k: int) -> LampElement:
    """Element for a generator name: b, c or cbar_r."""
    if name == "b":
        return LampElement.b(k)
    if name == "c":
        return LampElement.c(k)
    if name.startswith("cbar_"):
        r = int(name[len("cbar_"):])
        if not 0 <= r < k:
            raise InvalidParameterError(f"generator {name} needs 0 <= r < {k}")
        return LampElement.cbar(k, r)
    raise InvalidParameterError(f"unknown generator {name!r}")


def evaluate(word: Iterable[Letter], k: int) -> LampElement:
    """
    Evaluate a word of (generator, exponent) letters.

    Args:
        word: letters read left to right
        k: lamp group order

    Returns:
        The product in normal form
    """
    result = LampElement.identity(k)
    for name, power in word:
        result = result * generator(name, k) ** power
    return result


def parse_word(text: str) -> GeneratorWord:
    """
    Parse "cbar_1^-1 b c^2" (spaces or '*' between letters) into letters.

    The empty string is the empty word.
    """
    letters = []
    for token in text.replace("*", " ").split():
        name, _, power = token.partition("^")
        try:
            letters.append((name, int(power) if power else 1))
        except ValueError as e:
            raise InvalidParameterError(f"bad exponent in letter {token!r}") from e
        if not (name in ("b", "c") or name.startswith("cbar_")):
            raise InvalidParameterError(f"unknown generator {name!r}")
    return tuple(letters)


def word_inverse(word: Sequence[Letter]) -> GeneratorWord:
    return tuple((name, -power) for name, power in reversed(word))


def word_power(word: Sequence[Letter], n: int) -> GeneratorWord:
    base = tuple(word) if n >= 0 else word_inverse(word)
    return base * abs(n)


def commutator(x: Sequence[Letter], y: Sequence[Letter]) -> GeneratorWord:
    """[x, y] = x^-1 y^-1 x y."""
    return word_inverse(x) + word_inverse(y) + tuple(x) + tuple(y)


def _counts_in_x(name: str) -> bool:
    return name == "b" or name.startswith("cbar_")


def exp_X(item: Union[LampElement, Sequence[Letter]]) -> int:
    """
    Total exponent with respect to X = {cbar_0, .., cbar_{k-1}}.

    For words, each cbar_r (and b = cbar_0) contributes its exponent and c
    contributes nothing; for elements it is the shift. The two agree.
    """
    if isinstance(item, LampElement):
        return item.shift
    return sum(power for name, power in item if _counts_in_x(name))


def relators_classical(k: int, n_max: int) -> List[GeneratorWord]:
    """Relators c^k and [c, b^n c b^-n] for 1 <= n <= n_max."""
    check_alphabet(k)
    c = (("c", 1),)
    relators = [word_power(c, k)]
    for n in range(1, n_max + 1):
        conjugate = (("b", n), ("c", 1), ("b", -n))
        relators.append(commutator(c, conjugate))
    return relators


def relators_cbar(k: int, n_max: int) -> List[GeneratorWord]:
    """
    Relators over X = {cbar_0 = b, cbar_1, .., cbar_{k-1}}.

    (cbar_1 b^-1)^k, (cbar_1 b^-1)^i b cbar_i^-1 for 2 <= i <= k-1, and
    [cbar_1 b^-1, b^n cbar_1 b^-n-1] for 1 <= n <= n_max.
    """
    check_alphabet(k)
    b = "cbar_0"
    u = (("cbar_1", 1), (b, -1))
    relators = [word_power(u, k)]
    for i in range(2, k):
        relators.append(word_power(u, i) + ((b, 1), (f"cbar_{i}", -1)))
    for n in range(1, n_max + 1):
        conjugate = ((b, n), ("cbar_1", 1), (b, -n - 1))
        relators.append(commutator(u, conjugate))
    return relators


def _b_on_level(x: List[int], power: int, k: int) -> List[int]:
    """b: y1 = x1, yn = xn + x(n-1); b^-1 undoes it from the left."""
    x = list(x)
    for _ in range(abs(power)):
        if power > 0:
            x = [x[0]] + [(x[n] + x[n - 1]) % k for n in range(1, len(x))]
        else:
            for n in range(1, len(x)):
                x[n] = (x[n] - x[n - 1]) % k
    return x


def _c_on_level(x: List[int], power: int, k: int) -> List[int]:
    if x:
        x = list(x)
        x[0] = (x[0] + power) % k
    return x


def _element_on_level(g: LampElement, x: List[int]) -> List[int]:
    x = _b_on_level(x, g.shift, g.k)
    for position, coefficient in g.lamps:
        x = _b_on_level(x, -position, g.k)
        x = _c_on_level(x, coefficient, g.k)
        x = _b_on_level(x, position, g.k)
    return x


def act_level(g: Union[LampElement, str, Sequence[Letter]], x: str, k: Optional[int] = None) -> str:
    """
    Action on the level of length-N strings of the k-ary tree.

    cbar_r sends x1 x2 x3.. to (x1+r)(x2+x1)(x3+x2).., additions mod k.

    Args:
        g: element, generator name, or word (applied right to left)
        x: string over {0..k-1}
        k: lamp group order, required unless g is an element

    Returns:
        The image string
    """
    if isinstance(g, LampElement):
        k = g.k
    if k is None:
        raise InvalidParameterError("act_level needs k for generator names and words")
    symbols = list(name_to_word(x))
    if any(s >= k for s in symbols):
        raise InvalidParameterError(f"string {x!r} uses symbols outside 0..{k - 1}")

    if isinstance(g, LampElement):
        return word_to_name(_element_on_level(g, symbols))
    letters = ((g, 1),) if isinstance(g, str) else tuple(g)
    for name, power in reversed(letters):
        symbols = _element_on_level(generator(name, k) ** power, symbols)
    return word_to_name(symbols)


def schreier_level_graph(k: int, N: int) -> OrientedGraph:
    """
    The Schreier graph Γ_{k,N} of the action on level N.

    Edge v*k + r goes from v to cbar_r . v with label cbar_r.

    Args:
        k: lamp group order
        N: level

    Returns:
        Labeled oriented graph with k^N vertices, in- and out-degree k
    """
    check_alphabet(k)
    check_level(N)
    names = [word_to_name(w) for w in words(k, N)]
    index = {name: i for i, name in enumerate(names)}
    arcs = []
    for v, name in enumerate(names):
        for r in range(k):
            arcs.append((v, index[act_level(cbar_label(r), name, k)], cbar_label(r)))
    return OrientedGraph.build(names, arcs, {"family": "schreier", "k": k, "n": N})


def _shift_condition(g: LampElement, M) -> bool:
    if M == INFINITY:
        return g.shift == 0
    return g.shift % M == 0


def in_W(g: LampElement, N: int, M) -> bool:
    """Member of W_{N,M}: fixes 0^N and has total exponent 0 mod M."""
    zeros = "0" * N
    return act_level(g, zeros) == zeros and _shift_condition(g, M)


def in_H(g: LampElement, N: int, M) -> bool:
    """
    Member of H_{N,M}: shift 0 mod M and, for every residue class of lamp
    positions mod N, coefficients summing to 0 mod k.
    """
    if not _shift_condition(g, M):
        return False
    if N == 0:
        return True
    sums: Dict[int, int] = {}
    for position, coefficient in g.lamps:
        sums[position % N] = sums.get(position % N, 0) + coefficient
    return all(total % g.k == 0 for total in sums.values())


def h_predicate(N: int, M) -> Callable[[LampElement], bool]:
    return partial(in_H, N=N, M=M)


def w_predicate(N: int, M) -> Callable[[LampElement], bool]:
    return partial(in_W, N=N, M=M)


SpiderVertex = Tuple[str, int]


def _element_on_spider(g: LampElement, x: List[int], j: int, N: int, M: int) -> Tuple[List[int], int]:
    if N:
        s = g.shift % N
        x = x[N - s:] + x[:N - s]
        for position, coefficient in g.lamps:
            x[position % N] = (x[position % N] - coefficient) % g.k
    return x, (j - g.shift) % M


def sw_action(g: Union[LampElement, str, Sequence[Letter]], vertex: SpiderVertex,
              k: int, N: int, M: int) -> SpiderVertex:
    """
    Action on spider-web vertices.

    b . (x1..xN, j) = (xN x1..x(N-1), j-1) and c . (x, j) = ((x1-1) x2..xN, j).

    Args:
        g: element, generator name or word (applied right to left)
        vertex: (string, slice)
        k: lamp group order
        N: string length
        M: number of slices

    Returns:
        The image vertex
    """
    check_cycle_length(M, allow_infinite=False)
    text, j = vertex
    x = list(name_to_word(text))
    if len(x) != N:
        raise InvalidParameterError(f"vertex string {text!r} does not have length {N}")

    if isinstance(g, LampElement):
        x, j = _element_on_spider(g, x, j, N, M)
    else:
        letters = ((g, 1),) if isinstance(g, str) else tuple(g)
        for name, power in reversed(letters):
            x, j = _element_on_spider(generator(name, k) ** power, x, j, N, M)
    return word_to_name(x), j


def sw_action_graph(k: int, N: int, M: int) -> OrientedGraph:
    """
    Graph of the spider-web action with respect to X^-1.

    Edge from v to cbar_r^-1 . v labeled cbar_r^-1; vertex ids match spider_web(k, N, M).
    """
    check_alphabet(k)
    check_level(N)
    names = [spiderweb_vertex_name(w, j) for j in range(M) for w in words(k, N)]
    index = {name: i for i, name in enumerate(names)}
    arcs = []
    for v, name in enumerate(names):
        text, _, slice_text = name.rpartition(":")
        for r in range(k):
            image = sw_action(((cbar_label(r), -1),), (text, int(slice_text)), k, N, M)
            arcs.append((v, index[spiderweb_vertex_name(*image)], cbar_label(r) + "^-1"))
    return OrientedGraph.build(names, arcs, {"family": "sw-action", "k": k, "n": N, "m": M})


@dataclass(frozen=True)
class SearchBounds:
    """Limits for bounded membership searches."""

    word_length: int = 12
    window: int = 8


def ball_elements(k: int, radius: int, generators: Optional[Sequence[LampElement]] = None) -> Dict[LampElement, int]:
    """
    Word-length ball around the identity.

    Args:
        k: lamp group order
        radius: maximal word length
        generators: symmetric generating set; defaults to b^±1, c^±1

    Returns:
        element -> word length
    """
    if generators is None:
        b, c = LampElement.b(k), LampElement.c(k)
        generators = [b, b.inverse(), c, c.inverse()]
    identity = LampElement.identity(k)
    dist = {identity: 0}
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        if dist[g] == radius:
            continue
        for x in generators:
            h = g * x
            if h not in dist:
                dist[h] = dist[g] + 1
                queue.append(h)
    return dist


@dataclass
class NormalityReport:
    """
    Outcome of a bounded normality search.

    Attributes:
        is_normal_evidence: True when no conjugate escaped the subgroup
        witness: (conjugator g, member h, g h g^-1) when one escaped
        members_checked: members found in the search ball
        bound: word-length bound of the search
    """

    is_normal_evidence: bool
    witness: Optional[Tuple[LampElement, LampElement, LampElement]]
    members_checked: int
    bound: int

    def to_dict(self) -> Dict[str, object]:
        data: Dict[str, object] = {
            "is_normal_evidence": self.is_normal_evidence,
            "members_checked": self.members_checked,
            "bound": self.bound,
        }
        if self.witness:
            data["witness"] = [str(x) for x in self.witness]
        return data


def normality_report(pred: Callable[[LampElement], bool], k: int, bound: int) -> NormalityReport:
    """
    Look for members h whose conjugates g h g^-1 by b^±1, c^±1 leave the subgroup.

    Args:
        pred: subgroup membership predicate
        k: lamp group order
        bound: word length of the members searched

    Returns:
        NormalityReport; "no violation found" is evidence, not proof
    """
    b, c = LampElement.b(k), LampElement.c(k)
    conjugators = [b, b.inverse(), c, c.inverse()]
    members = [h for h in ball_elements(k, bound) if pred(h)]
    members.sort(key=lambda h: (len(h.lamps) + abs(h.shift), str(h)))

    for h in members:
        for g in conjugators:
            conjugate = h.conjugate(g)
            if not pred(conjugate):
                logging.info(f"Normality violated: {g} * {h} * {g}^-1 = {conjugate}")
                return NormalityReport(False, (g, h, conjugate), len(members), bound)
    logging.info(f"No normality violation among {len(members)} members (bound {bound})")
    return NormalityReport(True, None, len(members), bound)


def w_is_normal(k: int, N: int, M: int) -> bool:
    """
    Closed-form normality of W_{N,M}.

    On level N the lamps act by translations and b by a unipotent linear map,
    so W_{N,M} is normal exactly when b^M acts trivially on the level. That
    holds iff b^M fixes 10..0; otherwise c b^M c^-1 moves 0^N.

    Args:
        k: lamp group order
        N: level
        M: finite shift modulus

    Returns:
        True when W_{N,M} is a normal subgroup
    """
    if N == 0:
        return True
    x = "1" + "0" * (N - 1)
    return act_level(LampElement.b(k) ** M, x) == x


@dataclass
class SubgroupTriple:
    """
    Classification triple (s, H^0, v) of a subgroup containing an element with nonzero shift.

    Attributes:
        s: minimal positive shift of a member (0 when none was found)
        base_predicate: membership in H^0 = H ∩ lamp subgroup
        v: lamp element with v b^s in the subgroup
    """

    s: int
    base_predicate: Callable[[LampElement], bool] = field(repr=False)
    v: LampElement

    def check_samples(self, pred: Callable[[LampElement], bool], samples: Iterable[LampElement]) -> bool:
        """v b^s is a member and the b^s-conjugation preserves H^0 on the samples."""
        k = self.v.k
        if not pred(self.v * LampElement.b(k) ** self.s):
            return False
        shift = LampElement.b(k) ** self.s
        for a in samples:
            if not a.in_lamp_subgroup():
                continue
            if self.base_predicate(a) != self.base_predicate(a.conjugate(shift)):
                return False
        return True


def subgroup_triple(pred: Callable[[LampElement], bool], k: int,
                    bounds: SearchBounds = SearchBounds()) -> SubgroupTriple:
    """
    Extract the triple of a subgroup by bounded search.

    Tries v = identity first, then single lamps c^r at positions within the
    window, for shifts 1..word_length.

    Args:
        pred: membership predicate
        k: lamp group order
        bounds: search bounds

    Returns:
        SubgroupTriple with the smallest shift found
    """
    identity = LampElement.identity(k)
    candidates = [identity] + [
        LampElement.from_lamps(k, {p: r})
        for p in range(-bounds.window, bounds.window + 1)
        for r in range(1, k)
    ]

    def base(a: LampElement) -> bool:
        return a.in_lamp_subgroup() and pred(a)

    for s in range(1, bounds.word_length + 1):
        shift = LampElement.b(k) ** s
        for v in candidates:
            if pred(v * shift):
                return SubgroupTriple(s, base, v)
    return SubgroupTriple(0, base, identity)


def finite_quotient_multiply(k: int, N: int, l: int, a: Tuple[Tuple[int, ...], int],
                             b: Tuple[Tuple[int, ...], int]) -> Tuple[Tuple[int, ...], int]:
    """Product in (Z/k)^N ⋊ Z/(N l), the shift acting by rotating lamp positions."""
    lamps_a, s = a
    lamps_b, t = b
    rotated = tuple(lamps_b[(i - s) % N] for i in range(N))
    lamps = tuple((x + y) % k for x, y in zip(lamps_a, rotated))
    return lamps, (s + t) % (N * l)


def finite_quotient_cayley(k: int, N: int, l: int) -> OrientedGraph:
    """
    Cayley graph of the finite lamplighter group (Z/k)^N ⋊ Z/(N l) with generators c^i b.

    Args:
        k: lamp group order
        N: number of lamps
        l: the shift group has order N*l

    Returns:
        Labeled oriented graph on k^N * N * l vertices, edges g -> g * c^i b
    """
    check_alphabet(k)
    if N < 1 or l < 1:
        raise InvalidParameterError("finite quotient needs N >= 1 and l >= 1")
    elements = [(lamps, s) for s in range(N * l) for lamps in words(k, N)]
    index = {element: i for i, element in enumerate(elements)}
    names = [f"{word_to_name(lamps)}|{s}" for lamps, s in elements]
    arcs = []
    for i, element in enumerate(elements):
        for r in range(k):
            gen = (tuple([r] + [0] * (N - 1)), 1)
            arcs.append((i, index[finite_quotient_multiply(k, N, l, element, gen)], cbar_label(r)))
    return OrientedGraph.build(names, arcs, {"family": "finite-lamplighter", "k": k, "n": N, "l": l})


def cayley_ball(k: int, r: int) -> RootedBall:
    """
    Radius-r ball of the Cayley graph of the lamplighter group w.r.t. X_k.

    Edges g -> g cbar_i are kept when one endpoint lies at distance less than r,
    matching graph_core.ball.

    Args:
        k: lamp group order
        r: radius

    Returns:
        RootedBall rooted at the identity (vertex 0)
    """
    check_alphabet(k)
    if r < 0:
        raise InvalidParameterError(f"radius must be non-negative, got {r}")
    forward = [LampElement.cbar(k, i) for i in range(k)]
    dist = ball_elements(k, r, forward + [x.inverse() for x in forward])
    order = sorted(dist, key=lambda g: (dist[g], str(g)))
    index = {g: i for i, g in enumerate(order)}

    arcs = []
    for g in order:
        for i, x in enumerate(forward):
            h = g * x
            if h in index and min(dist[g], dist[h]) < r:
                arcs.append((index[g], index[h], cbar_label(i)))
    graph = OrientedGraph.build([str(g) for g in order], arcs, {"family": "cayley-ball", "k": k, "r": r})
    logging.debug(f"Cayley ball k={k} r={r}: {graph.n} vertices, {graph.m} edges")
    return RootedBall(graph, 0, r)


def kesten_measure(k: int, q_max: int) -> SpectralMeasure:
    """
    Truncated Kesten spectral measure of the lamplighter Cayley graph.

    Atoms 2k cos(p pi / q) of weight (k-1)^2 / (k^q - 1) for reduced p/q, 2 <= q <= q_max.
    """
    check_alphabet(k)
    if q_max < 2:
        raise InvalidParameterError(f"q_max must be at least 2, got {q_max}")
    atoms = {}
    for q in range(2, q_max + 1):
        weight = Fraction((k - 1) ** 2, k ** q - 1)
        for p in range(1, q):
            if gcd(p, q) == 1:
                atoms[(p, q)] = weight
    return SpectralMeasure(k, atoms)


def random_element(k: int, rng: random.Random, support: int = 6, max_shift: int = 6) -> LampElement:
    """Random element with lamps in [-support, support] and shift in [-max_shift, max_shift]."""
    lamps = {p: rng.randrange(k) for p in range(-support, support + 1) if rng.random() < 0.4}
    return LampElement.from_lamps(k, lamps, rng.randint(-max_shift, max_shift))


def random_word(k: int, rng: random.Random, length: int) -> GeneratorWord:
    """Random word over X_k and its inverses."""
    return tuple((cbar_label(rng.randrange(k)), rng.choice((1, -1))) for _ in range(length))
