"""
Spectra of spider-web graphs.
Exact characteristic polynomials (factored, with Chebyshev-type factors), the
closed-form spectral measure, a numeric eigensolver and the Kolmogorov distance
between spectral measures.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from sympy import Matrix, Poly, Symbol, ZZ, chebyshevt_poly

from families import check_cycle_length, check_level, spider_web, theta_graph_M
from graph_core import BaseGraph, OrientedGraph, adjacency_matrix
from utils import GraphAlgebraError, InvalidGraphError, InvalidParameterError, check_alphabet


X = Symbol("x")

DEFAULT_EXPANSION_CAP = 5000


def coefficients(poly: Poly) -> List[int]:
    """Integer coefficients in ascending degree."""
    return [int(c) for c in reversed(poly.all_coeffs())]


@lru_cache(maxsize=None)
def path_charpoly(i: int, k: int) -> Poly:
    """
    Characteristic polynomial of the path on i vertices with edge weight k.

    P_0 = 1, P_1 = x, P_i = x P_{i-1} - k^2 P_{i-2}; the roots are
    2k cos(t pi / (i+1)) for 1 <= t <= i, all simple.
    """
    if i < 0:
        raise InvalidParameterError(f"path length must be non-negative, got {i}")
    if i == 0:
        return Poly(1, X, domain=ZZ)
    if i == 1:
        return Poly(X, X, domain=ZZ)
    return Poly(X, X, domain=ZZ) * path_charpoly(i - 1, k) - k * k * path_charpoly(i - 2, k)


@lru_cache(maxsize=None)
def cycle_charpoly(M: int, k: int) -> Poly:
    """
    Q(x) = 2 k^M (T_M(x / 2k) - 1), the characteristic polynomial of the
    symmetrized weight-k cycle of length M; roots 2k cos(2 pi l / M).
    """
    check_cycle_length(M, allow_infinite=False)
    chebyshev = Poly(chebyshevt_poly(M, X), X)
    coeffs = []
    for degree, c in enumerate(reversed(chebyshev.all_coeffs())):
        value = Fraction(2 * k ** M) * Fraction(int(c)) / Fraction(2 * k) ** degree
        if degree == 0:
            value -= 2 * k ** M
        if value.denominator != 1:
            raise GraphAlgebraError(f"non-integral coefficient in Q for M={M}, k={k}")
        coeffs.append(int(value))
    return Poly(list(reversed(coeffs)), X, domain=ZZ)


@dataclass
class FactoredCharPoly:
    """
    Product of integer polynomial factors with multiplicities.

    Attributes:
        factors: (factor, exponent) pairs with positive exponents
    """

    factors: List[Tuple[Poly, int]] = field(default_factory=list)

    @property
    def degree(self) -> int:
        return sum(exponent * factor.degree() for factor, exponent in self.factors)

    def expand(self, max_degree: int = DEFAULT_EXPANSION_CAP) -> Poly:
        """
        Multiply out the factors.

        Raises:
            InvalidParameterError: the degree exceeds max_degree
        """
        if self.degree > max_degree:
            raise InvalidParameterError(f"refusing to expand a degree-{self.degree} polynomial (cap {max_degree})")
        result = Poly(1, X, domain=ZZ)
        for factor, exponent in self.factors:
            result = result * factor ** exponent
        return result

    def __str__(self) -> str:
        parts = []
        for factor, exponent in self.factors:
            text = f"({factor.as_expr()})"
            parts.append(text if exponent == 1 else f"{text}^{exponent}")
        return " * ".join(parts) if parts else "1"

    def to_dict(self) -> Dict[str, object]:
        return {
            "degree": self.degree,
            "factors": [
                {"coefficients": coefficients(factor), "exponent": exponent}
                for factor, exponent in self.factors
            ],
        }


def spiderweb_charpoly(k: int, N: int, M: int) -> FactoredCharPoly:
    """
    Factored characteristic polynomial of the underlying spider-web graph.

    Q * P_N^{M(k-1)} * prod_{1<=i<=N-1} P_i^{M(k-1)^2 k^{N-i-1}}

    Args:
        k: alphabet size
        N: string length
        M: number of slices

    Returns:
        FactoredCharPoly of total degree M k^N
    """
    check_alphabet(k)
    check_level(N)
    check_cycle_length(M, allow_infinite=False)
    factors = [(cycle_charpoly(M, k), 1)]
    if N >= 1:
        factors.append((path_charpoly(N, k), M * (k - 1)))
    for i in range(1, N):
        factors.append((path_charpoly(i, k), M * (k - 1) ** 2 * k ** (N - i - 1)))
    return FactoredCharPoly(factors)


def symmetrized_adjacency(g: BaseGraph) -> np.ndarray:
    """A + A^T for oriented graphs; the adjacency itself for Serre graphs."""
    matrix = adjacency_matrix(g)
    if isinstance(g, OrientedGraph):
        return matrix + matrix.T
    return matrix


def exact_charpoly(matrix: Union[np.ndarray, BaseGraph]) -> Poly:
    """
    det(xI - A) over the integers.

    Args:
        matrix: integer matrix, or a graph (symmetrized first)

    Returns:
        The characteristic polynomial
    """
    if isinstance(matrix, BaseGraph):
        matrix = symmetrized_adjacency(matrix)
    rows = [[int(a) for a in row] for row in np.asarray(matrix)]
    if any(float(a) != b for row, r in zip(np.asarray(matrix), rows) for a, b in zip(row, r)):
        raise InvalidGraphError("exact characteristic polynomials need integer matrices")
    if not rows:
        return Poly(1, X, domain=ZZ)
    return Poly(Matrix(rows).charpoly(X).as_expr(), X, domain=ZZ)


def theta_charpoly(k: int, N: int, M: int) -> Poly:
    """Exact characteristic polynomial of the symmetrized weighted theta graph."""
    return exact_charpoly(theta_graph_M(k, N, M))


def atom_value(key: Tuple[int, int], k: int) -> float:
    """2k cos(p pi / q) for key (p, q)."""
    p, q = key
    return 2 * k * math.cos(math.pi * p / q)


@dataclass
class SpectralMeasure:
    """
    Atomic measure on [-2k, 2k] with atoms at 2k cos(p pi / q).

    Attributes:
        k: alphabet size
        atoms: reduced (p, q) -> weight; (0, 1) is 2k and (1, 1) is -2k
        size: vertex count for measures of finite graphs (weights are then multiplicity / size)
    """

    k: int
    atoms: Dict[Tuple[int, int], Fraction]
    size: Optional[int] = None

    def __post_init__(self):
        for (p, q), weight in self.atoms.items():
            if q < 1 or not 0 <= p <= q or math.gcd(p, q) != 1:
                raise InvalidParameterError(f"atom key ({p}, {q}) is not a reduced fraction in [0, 1]")
            if weight <= 0:
                raise InvalidParameterError(f"atom ({p}, {q}) has non-positive weight {weight}")

    @classmethod
    def from_multiplicities(cls, k: int, multiplicities: Dict[Tuple[int, int], int]) -> "SpectralMeasure":
        size = sum(multiplicities.values())
        atoms = {key: Fraction(count, size) for key, count in multiplicities.items() if count}
        return cls(k, atoms, size)

    def keys(self) -> List[Tuple[int, int]]:
        """Atom keys by decreasing value."""
        return sorted(self.atoms, key=lambda key: Fraction(*key))

    def value(self, key: Tuple[int, int]) -> float:
        return atom_value(key, self.k)

    def total_mass(self) -> Fraction:
        return sum(self.atoms.values(), Fraction(0))

    def multiplicity(self, key: Tuple[int, int]) -> int:
        if self.size is None:
            raise GraphAlgebraError("multiplicities are defined for measures of finite graphs")
        return int(self.atoms.get(key, 0) * self.size)

    def multiset(self) -> List[float]:
        """All eigenvalues with multiplicity, ascending."""
        values = []
        for key in self.keys():
            values.extend([self.value(key)] * self.multiplicity(key))
        return sorted(values)

    def cdf(self, t: float) -> Fraction:
        return sum((w for key, w in self.atoms.items() if self.value(key) <= t), Fraction(0))

    def to_csv_rows(self) -> List[Dict[str, object]]:
        rows = []
        for key in self.keys():
            row: Dict[str, object] = {"p": key[0], "q": key[1], "value": self.value(key)}
            if self.size is not None:
                row["multiplicity"] = self.multiplicity(key)
            row["weight"] = str(self.atoms[key])
            rows.append(row)
        return rows


def closed_form_spectrum(k: int, N: int, M: int) -> SpectralMeasure:
    """
    Spectral measure of the underlying spider-web graph from its multiplicities.

    2k has multiplicity 1 and -2k multiplicity 1 when M is even. For a reduced
    p/q the multiplicity of 2k cos(p pi / q) is
    M (k-1)^2 sum_{1<=j<=N/q} k^{N-jq} + M (k-1) r1 + 2 r2
    with r1 = [q | N+1] and r2 = [2q | M p]. Denominators run up to max(N+1, M).

    Args:
        k: alphabet size
        N: string length
        M: number of slices

    Returns:
        SpectralMeasure with size M k^N
    """
    check_alphabet(k)
    check_level(N)
    check_cycle_length(M, allow_infinite=False)
    multiplicities: Dict[Tuple[int, int], int] = {(0, 1): 1}
    if M % 2 == 0:
        multiplicities[(1, 1)] = 1
    for q in range(2, max(N + 1, M) + 1):
        for p in range(1, q):
            if math.gcd(p, q) != 1:
                continue
            count = M * (k - 1) ** 2 * sum(k ** (N - j * q) for j in range(1, N // q + 1))
            if (N + 1) % q == 0:
                count += M * (k - 1)
            if (M * p) % (2 * q) == 0:
                count += 2
            if count:
                multiplicities[(p, q)] = count

    measure = SpectralMeasure.from_multiplicities(k, multiplicities)
    if measure.size != M * k ** N:
        raise GraphAlgebraError(f"multiplicities sum to {measure.size}, expected {M * k ** N}")
    return measure


def numeric_spectrum(source: Union[BaseGraph, np.ndarray], tol: float = 1e-12) -> List[float]:
    """
    Eigenvalues of a symmetric real matrix, ascending.

    Args:
        source: Serre graph or symmetric matrix
        tol: symmetry tolerance

    Returns:
        Sorted eigenvalues
    """
    matrix = adjacency_matrix(source) if isinstance(source, BaseGraph) else np.asarray(source)
    matrix = matrix.astype(np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidGraphError(f"expected a square matrix, got shape {matrix.shape}")
    if not np.allclose(matrix, matrix.T, atol=tol):
        raise InvalidGraphError("numeric_spectrum needs a symmetric matrix")
    return sorted(float(x) for x in np.linalg.eigvalsh(matrix))


def spectral_measure_of(values: List[float], k: int, max_q: int = 64, tol: float = 1e-8) -> SpectralMeasure:
    """Group numeric eigenvalues into atoms 2k cos(p pi / q) with q <= max_q."""
    counts: Dict[Tuple[int, int], int] = {}
    for value in values:
        angle = math.acos(max(-1.0, min(1.0, value / (2 * k)))) / math.pi
        ratio = Fraction(angle).limit_denominator(max_q)
        key = (ratio.numerator, ratio.denominator)
        if abs(atom_value(key, k) - value) > tol * max(1, 2 * k):
            raise GraphAlgebraError(f"eigenvalue {value} is not of the form 2k cos(p pi / q) with q <= {max_q}")
        counts[key] = counts.get(key, 0) + 1
    return SpectralMeasure.from_multiplicities(k, counts)


def measure_distance(a: SpectralMeasure, b: SpectralMeasure) -> Fraction:
    """
    Kolmogorov distance: sup over t of |CDF_a(t) - CDF_b(t)|.

    Computed exactly over the atom positions; a truncated measure counts its
    missing mass above every atom.
    """
    if a.k != b.k:
        raise InvalidParameterError(f"measures over different k ({a.k} and {b.k})")
    positions = sorted(set(a.atoms) | set(b.atoms), key=lambda key: -Fraction(*key))
    cdf_a = cdf_b = Fraction(0)
    distance = Fraction(0)
    for key in positions:
        cdf_a += a.atoms.get(key, Fraction(0))
        cdf_b += b.atoms.get(key, Fraction(0))
        distance = max(distance, abs(cdf_a - cdf_b))
    logging.debug(f"Kolmogorov distance {float(distance):.6f} over {len(positions)} atoms")
    return distance


def spectra_agree(k: int, N: int, M: int, tol: float = 1e-8) -> bool:
    """Closed-form multiset against the numeric eigenvalues of the underlying spider-web graph."""
    numeric = numeric_spectrum(symmetrized_adjacency(spider_web(k, N, M)))
    closed = closed_form_spectrum(k, N, M).multiset()
    if len(numeric) != len(closed):
        logging.warning(f"Spectrum size mismatch at k={k}, N={N}, M={M}")
        return False
    agree = all(abs(x - y) <= tol * max(1, 2 * k) for x, y in zip(numeric, closed))
    if not agree:
        logging.warning(f"Closed-form and numeric spectra disagree at k={k}, N={N}, M={M}")
    return agree
