#!/usr/bin/env python3
"""
Tests for characteristic polynomials and spectral measures of spider-web graphs.
"""

import sys
from fractions import Fraction

import numpy as np
import pytest

from families import spider_web
from lamplighter import kesten_measure
from spectra import (
    SpectralMeasure,
    closed_form_spectrum,
    coefficients,
    cycle_charpoly,
    exact_charpoly,
    measure_distance,
    numeric_spectrum,
    path_charpoly,
    spectra_agree,
    spectral_measure_of,
    spiderweb_charpoly,
    symmetrized_adjacency,
    theta_charpoly,
)
from utils import InvalidGraphError, InvalidParameterError


def test_path_and_cycle_factors():
    # ascending coefficients
    assert coefficients(path_charpoly(2, 2)) == [-4, 0, 1]
    assert coefficients(path_charpoly(3, 2)) == [0, -8, 0, 1]
    assert coefficients(cycle_charpoly(1, 2)) == [-4, 1]
    assert coefficients(cycle_charpoly(2, 2)) == [-16, 0, 1]


def test_factored_charpoly():
    poly = spiderweb_charpoly(2, 1, 1)
    assert coefficients(poly.expand()) == [0, -4, 1]
    poly = spiderweb_charpoly(2, 2, 2)
    assert poly.degree == 8
    assert poly.expand() == exact_charpoly(spider_web(2, 2, 2))
    with pytest.raises(InvalidParameterError):
        poly.expand(max_degree=4)


def test_factored_charpoly_matches_exact_on_small_grid():
    for k, N, M in ((2, 1, 3), (2, 3, 2), (3, 1, 2), (3, 2, 1)):
        assert spiderweb_charpoly(k, N, M).expand() == exact_charpoly(spider_web(k, N, M))
        assert theta_charpoly(k, N, M) == spiderweb_charpoly(k, N, M).expand()


def test_exact_charpoly_rejects_fractional_matrices():
    with pytest.raises(InvalidGraphError):
        exact_charpoly(np.array([[0.5, 0.0], [0.0, 1.0]]))


def test_closed_form_spectrum():
    for k, N, M in ((2, 2, 3), (2, 3, 4), (3, 2, 2)):
        mu = closed_form_spectrum(k, N, M)
        assert mu.size == M * k ** N
        assert mu.total_mass() == 1
        assert mu.multiplicity((0, 1)) == 1
        assert ((1, 1) in mu.atoms) == (M % 2 == 0)
    rows = closed_form_spectrum(2, 1, 2).to_csv_rows()
    assert rows[0]["p"] == 0 and rows[0]["multiplicity"] == 1


def test_closed_form_matches_numeric_eigenvalues():
    for k, N, M in ((2, 1, 1), (2, 2, 3), (2, 3, 4), (3, 2, 2), (2, 4, 5)):
        assert spectra_agree(k, N, M)


def test_numeric_spectrum_groups_into_atoms():
    values = numeric_spectrum(symmetrized_adjacency(spider_web(2, 2, 2)))
    assert spectral_measure_of(values, 2) == closed_form_spectrum(2, 2, 2)
    with pytest.raises(InvalidGraphError):
        numeric_spectrum(np.array([[0, 1], [0, 0]]))


def test_measure_distance():
    mu = closed_form_spectrum(2, 2, 2)
    assert measure_distance(mu, mu) == 0
    assert mu.cdf(-5.0) == 0 and mu.cdf(4.0) == 1
    top = SpectralMeasure(2, {(0, 1): Fraction(1)})
    bottom = SpectralMeasure(2, {(1, 1): Fraction(1)})
    assert measure_distance(top, bottom) == 1
    kesten = kesten_measure(2, 30)
    assert measure_distance(closed_form_spectrum(2, 6, 6), kesten) < measure_distance(mu, kesten)


def test_atom_keys_are_validated():
    with pytest.raises(InvalidParameterError):
        SpectralMeasure(2, {(2, 4): Fraction(1)})


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
