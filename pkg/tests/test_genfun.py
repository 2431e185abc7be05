"""Tests for the generating functions."""

import pytest

from parahilb.cells import punctual_motive
from parahilb.errors import WindowError
from parahilb.genfun import (
    BettiData,
    goettsche_series,
    local_motive,
    local_punctual_series,
    parabolic_poincare_series,
    poincare_polynomial,
    verify_cell_vs_product,
    verify_shift_invariance,
)
from parahilb.lattice import IndexVector, Window
from parahilb.series import L, TruncationOrder, format_poly

P2 = BettiData()


def test_betti_parse():
    """Test parsing Betti numbers from the command-line form."""
    betti = BettiData.parse(["X=1,0,1,0,1", "D=1,2,1"])
    assert betti.surface == (1, 0, 1, 0, 1)
    assert betti.divisor == (1, 2, 1)
    assert BettiData.from_json(betti.to_json()) == betti
    with pytest.raises(ValueError):
        BettiData.parse(["X=1,0,1,0,1"])
    with pytest.raises(ValueError):
        BettiData.parse(["X=1,0,1", "D=1,0,1"])
    with pytest.raises(ValueError):
        BettiData.parse(["Y=1", "D=1,0,1"])
    with pytest.raises(ValueError):
        BettiData((1, 0, -1, 0, 1), (1, 0, 1))


def test_goettsche_projective_plane():
    """Test the Hilbert scheme of two points on the projective plane."""
    order = TruncationOrder.uniform(3, Window(-1, 1), 0)
    series = goettsche_series(P2.surface, order)
    assert format_poly(series.coefficient(IndexVector({0: 1}))) == "1+z^2+z^4"
    assert format_poly(series.coefficient(IndexVector({0: 2}))) == "1+2z^2+3z^4+2z^6+z^8"


def test_goettsche_point_surface():
    """Test Betti numbers (1, 0, 0, 0, 0)."""
    order = TruncationOrder.uniform(2, Window(-1, 1), 0)
    series = goettsche_series((1, 0, 0, 0, 0), order)
    assert format_poly(series.coefficient(IndexVector({0: 2}))) == "1+z^2"


def test_divisor_coefficients():
    """Test single jumps: X^[e_1] and X^[e_0 + e_-1] are copies of D."""
    assert format_poly(poincare_polynomial(P2, IndexVector({0: 0, 1: 1}))) == "1+z^2"
    assert format_poly(poincare_polynomial(P2, IndexVector({0: 1, -1: 1}))) == "1+z^2"
    assert format_poly(poincare_polynomial(P2, IndexVector())) == "1"


def test_specialization_recovers_goettsche():
    """Test that x_alpha = 0 gives back the plain Hilbert schemes."""
    order = TruncationOrder.uniform(6, Window(-1, 2), 1)
    full = parabolic_poincare_series(P2, Window(-1, 2), order)
    assert full.specialize_zero() == goettsche_series(P2.surface, order)


def test_window_must_fit_order():
    """Test that the levels of the product lie inside the order window."""
    order = TruncationOrder.uniform(2, Window(-1, 2), 1)
    with pytest.raises(WindowError):
        parabolic_poincare_series(P2, Window(-2, 2), order)
    with pytest.raises(WindowError):
        local_punctual_series(Window(-1, 3), order)


def test_cut_is_stable():
    """Test that widening the factor cut leaves the product unchanged."""
    order = TruncationOrder.uniform(3, Window(-2, 3), 1)
    parabolic_poincare_series(P2, Window(-2, 3), order, verify_cut=True)
    parabolic_poincare_series(BettiData((1, 2, 1, 2, 1), (1, 2, 1)), Window(-2, 3), order, True)
    local_punctual_series(Window(-2, 3), order, verify_cut=True)


def test_local_motive_examples():
    """Test punctual classes from the local product."""
    assert format_poly(local_motive(IndexVector({0: 4}))) == "1+L+2L^2+L^3"
    assert format_poly(local_motive(IndexVector({0: 2, 1: 1}))) == "1+2L+L^2"
    assert format_poly(local_motive(IndexVector({0: 1, -1: 1}))) == "1"
    assert format_poly(local_motive(IndexVector({1: 1}))) == "1"


def test_local_series_matches_cells_directly():
    """Test one coefficient of the local series against the cells."""
    window = Window(-1, 2)
    series = local_punctual_series(window, TruncationOrder.uniform(3, window, 2))
    v = IndexVector({0: 3, -1: 1, 1: 2})
    assert series.coefficient(v, L) == punctual_motive(v)


def test_verify_cell_vs_product():
    """Test the cell enumeration against the product formula."""
    report = verify_cell_vs_product(Window(-1, 2), 3, 2)
    assert report.ok, report.violations
    assert report.counts["vectors_checked"] > 20
    assert report.details["order"]["n0"] == 3


def test_verify_cell_vs_product_wide_window():
    """Test two levels on each side."""
    report = verify_cell_vs_product(Window(-2, 3), 3, 1)
    assert report.ok, report.violations


def test_verify_shift_invariance():
    """Test that d-preserving shifts keep the Poincare polynomial."""
    report = verify_shift_invariance(P2, Window(-1, 2), 2, 1)
    assert report.ok, report.violations
    assert report.counts["shifts_checked"] == 2 * report.counts["vectors_checked"]

    odd = BettiData((1, 2, 1, 2, 1), (1, 2, 1))
    assert verify_shift_invariance(odd, Window(-2, 2), 2, 1).ok
