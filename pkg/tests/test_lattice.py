"""Tests for index vectors, generators and dimension arithmetic."""

import itertools
import json
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from parahilb.errors import NotAdmissibleError, NotGeneratorError, WindowError
from parahilb.lattice import (
    GeneratorKind,
    IndexVector,
    ShiftConvention,
    Window,
    admissible_in_window,
    classify_generator,
    degree,
    dim_composition,
    dim_incidence,
    g_value,
    generator,
    generators,
    incidence_stratum_excess,
    is_admissible,
    mu,
    norms,
    punctual_dimension,
    shift_index,
    verify_dimension_lemmas,
)

DATA = Path(__file__).parent / "data"


def V(**entries: int) -> IndexVector:
    """Shorthand: V(l0=2, l1=1, m1=1) is {0: 2, 1: 1, -1: 1}."""
    parsed = {}
    for key, value in entries.items():
        level = int(key[1:])
        parsed[-level if key[0] == "m" else level] = value
    return IndexVector(parsed)


vectors = st.dictionaries(st.integers(-3, 3), st.integers(-4, 4), max_size=5).map(IndexVector)


@st.composite
def signed_generators(draw):
    level = draw(st.integers(-3, 3))
    m = draw(st.integers(0 if level > 0 else 1, 6))
    u = generator(m, level)
    return -u if draw(st.booleans()) else u


def test_index_vector_normalizes_zero_entries():
    """Test that zero entries are dropped and equality ignores them."""
    v = IndexVector.from_json({"0": 2, "1": 0, "-1": 1})
    assert v == IndexVector({0: 2, -1: 1})
    assert v.to_json() == {"-1": 1, "0": 2}
    assert hash(v) == hash(IndexVector({-1: 1, 0: 2}))
    assert IndexVector({0: 0}) == IndexVector()


def test_index_vector_rejects_non_integer_values():
    """Test JSON parsing of malformed vectors."""
    with pytest.raises(ValueError):
        IndexVector.from_json({"0": "two"})
    with pytest.raises(ValueError):
        IndexVector.from_json("[1, 2]")


def test_degree_examples():
    """Test d(v) on small vectors."""
    assert degree(IndexVector()) == 0
    assert degree(V(l0=2, l1=1)) == 5
    assert degree(V(l0=1, m1=1)) == 1


def test_norms_examples():
    """Test (|v|, |v|_+, |v|_-)."""
    assert norms(IndexVector()) == (0, 0, 0)
    assert norms(V(l0=3, l2=1, m1=2)) == (6, 1, 2)
    assert norms(V(l0=-1)) == (1, 0, 0)


@st.composite
def sign_compatible_pairs(draw):
    signs = draw(st.dictionaries(st.integers(-3, 3), st.sampled_from([-1, 1]), max_size=5))
    magnitudes = st.fixed_dictionaries({lvl: st.integers(0, 4) for lvl in signs})
    v, w = draw(magnitudes), draw(magnitudes)
    return (
        IndexVector({lvl: signs[lvl] * m for lvl, m in v.items()}),
        IndexVector({lvl: signs[lvl] * m for lvl, m in w.items()}),
    )


@given(sign_compatible_pairs())
def test_degree_is_additive(pair):
    """Test degree(v + w) = degree(v) + degree(w) when entries agree in sign per level."""
    v, w = pair
    assert degree(v + w) == degree(v) + degree(w)


@given(st.integers(1, 4))
def test_degree_is_not_additive_across_signs(n):
    """Test that opposite signs at a jump level cancel in the sum but not in the degrees."""
    v, w = V(l1=n), V(l1=-n)
    assert degree(v + w) == 0
    assert degree(v) + degree(w) == 2 * n


@given(vectors)
def test_degree_is_additive_on_multiples(v):
    """Test degree(2v) = 2 degree(v) on all integer vectors."""
    assert degree(v + v) == 2 * degree(v)


def test_is_admissible_examples():
    """Test membership in the admissible set."""
    assert is_admissible(IndexVector())
    assert is_admissible(V(l0=1, m1=1))
    assert not is_admissible(V(m1=1))
    assert not is_admissible(V(l0=2, l1=-1))


def test_classify_generator_examples():
    """Test C_alpha membership."""
    assert classify_generator(V(l0=1)).kind is GeneratorKind.POS
    assert classify_generator(V(l0=1)).level == 0
    pos = classify_generator(V(l0=0, l1=1))
    assert (pos.kind, pos.level) == (GeneratorKind.POS, 1)
    assert classify_generator(V(m1=1)).kind is GeneratorKind.NONE
    assert classify_generator(IndexVector()).kind is GeneratorKind.NONE
    assert classify_generator(V(l0=1, l1=2)).kind is GeneratorKind.NONE
    assert classify_generator(V(l1=1, l2=1)).kind is GeneratorKind.NONE


@given(signed_generators())
def test_classify_flips_under_negation(u):
    """Test that -u lies in the opposite cone at the same level."""
    cls, neg = classify_generator(u), classify_generator(-u)
    assert {cls.kind, neg.kind} == {GeneratorKind.POS, GeneratorKind.NEG}
    assert cls.level == neg.level


def test_generator_rejects_invalid_m():
    """Test that m is validated against the level."""
    assert generator(0, 2) == V(l2=1)
    with pytest.raises(NotGeneratorError):
        generator(0, -1)
    with pytest.raises(NotGeneratorError):
        generator(0, 0)


def test_generators_lists_cones_in_order():
    """Test enumeration of C over a set of levels."""
    found = generators([-1, 0, 1], 1)
    assert found == [V(l0=1, m1=1), V(l0=1), V(l1=1), V(l0=1, l1=1)]


def test_g_value_examples():
    """Test g on the defining cases."""
    assert g_value(V(l1=-1)) == -1
    assert g_value(V(l0=1, m1=1)) == -1
    assert g_value(V(l0=2)) == 0
    assert g_value(V(l0=1, l1=1)) == 0
    with pytest.raises(NotGeneratorError):
        g_value(V(l1=2))


def test_mu_examples():
    """Test the commutator constant on small generators."""
    assert mu(V(l0=1)) == 1
    assert mu(V(l0=2)) == -2
    assert mu(V(l1=1)) == 1
    with pytest.raises(NotGeneratorError):
        mu(IndexVector())


def test_mu_on_points_alternates():
    """Test mu(m e_0) = (-1)^(m-1) m."""
    for m in range(1, 7):
        assert mu(V(l0=m)) == (-1) ** (m - 1) * m


@given(signed_generators())
def test_mu_is_nonzero_and_odd(u):
    """Test mu(u) != 0 and mu(-u) = -mu(u)."""
    assert mu(u) != 0
    assert mu(-u) == -mu(u)


def test_shift_positive_beta():
    """Test the fold of the upper block below the window."""
    v = V(l0=2, l1=1)
    image, window = shift_index(v, 1, Window(-1, 2))
    assert image == V(l0=3, m2=1)
    assert window == Window(-2, 1)
    assert degree(image) == degree(v) == 5


def test_shift_negative_beta_conventions():
    """Test both boundary conventions for beta < 0."""
    v = V(l0=1, m1=1)
    image, window = shift_index(v, -1, Window(-1, 1), ShiftConvention.D_PRESERVING)
    assert image == V(l1=1)
    assert degree(image) == 1
    assert window == Window(-1, 2)

    literal, _ = shift_index(v, -1, Window(-1, 1), ShiftConvention.LITERAL)
    assert literal == IndexVector()
    assert degree(literal) == 0


def test_shift_rejects_bad_input():
    """Test the preconditions of shift_index."""
    window = Window(-1, 2)
    with pytest.raises(WindowError):
        shift_index(V(l0=1), 0, window)
    with pytest.raises(WindowError):
        shift_index(V(l0=1), 2, window)
    with pytest.raises(NotAdmissibleError):
        shift_index(V(m1=1), 1, window)
    with pytest.raises(WindowError):
        shift_index(V(l0=1, l3=1), 1, window)


def test_shift_literal_golden():
    """Test the literal convention against hand-evaluated cases."""
    cases = json.loads((DATA / "shift_literal.json").read_text())
    for case in cases:
        v = IndexVector.from_json(case["v"])
        image, window = shift_index(
            v, case["beta"], Window(*case["window"]), ShiftConvention.LITERAL
        )
        assert image == IndexVector.from_json(case["image"]), case
        assert window.to_json() == case["image_window"], case


def test_shift_degree_and_injectivity():
    """Test degree invariance, admissibility and injectivity over a window."""
    window = Window(-2, 3)
    domain = list(admissible_in_window(window, 4, 2))
    for beta in window.levels():
        images = {}
        for v in domain:
            image, new_window = shift_index(v, beta, window)
            assert is_admissible(image)
            assert image.within(new_window)
            assert degree(image) == degree(v)
            assert image not in images, (v, images.get(image), beta)
            images[image] = v

            literal, _ = shift_index(v, beta, window, ShiftConvention.LITERAL)
            expected_loss = v[beta] if beta < 0 else 0
            assert degree(literal) == degree(v) - expected_loss


def test_shift_literal_is_not_injective():
    """Test that the literal convention merges vectors for beta < 0."""
    window = Window(-1, 1)
    a, _ = shift_index(V(l0=1, m1=1), -1, window, ShiftConvention.LITERAL)
    b, _ = shift_index(IndexVector(), -1, window, ShiftConvention.LITERAL)
    assert a == b


def test_dim_incidence_examples():
    """Test the incidence dimension and the empty case."""
    assert dim_incidence(V(l0=2), V(l0=1)) == 6
    assert dim_incidence(V(l0=1), V(l1=-1)) is None
    assert dim_incidence(IndexVector(), V(l0=1)) == 2
    with pytest.raises(NotGeneratorError):
        dim_incidence(V(l0=1), V(l0=1, l1=1, l2=1))


def test_dim_composition_examples():
    """Test the composition dimension."""
    assert dim_composition(V(l0=1), V(l0=1), V(l0=-1)) == 4
    assert dim_composition(IndexVector(), V(l1=1), V(l1=-1)) == 1
    assert dim_composition(V(l0=2, m1=1), V(l0=1, m1=1), V(l0=1)) == 6


def test_punctual_dimension():
    """Test the dimension of the punctual scheme."""
    assert punctual_dimension(IndexVector()) == 0
    assert punctual_dimension(V(l0=3)) == 2
    assert punctual_dimension(V(l0=2, l1=1)) == 2
    assert punctual_dimension(V(l1=2)) == 0
    with pytest.raises(NotAdmissibleError):
        punctual_dimension(V(l0=1, m1=1))


def test_incidence_stratum_excess():
    """Test that only the stratum a = 0 reaches the full dimension."""
    assert incidence_stratum_excess(V(l0=1), IndexVector()) == 0
    assert incidence_stratum_excess(V(l1=1), IndexVector()) == 0
    assert incidence_stratum_excess(V(l0=1), V(l0=2)) == -1
    assert incidence_stratum_excess(V(l0=1), V(l1=1)) == -1
    with pytest.raises(NotGeneratorError):
        incidence_stratum_excess(V(l0=-1), IndexVector())


def test_verify_dimension_lemmas_empty_bound():
    """Test that bound 0 enumerates nothing."""
    report = verify_dimension_lemmas(0)
    assert report.ok
    assert report.counts["pair_cases"] == 0
    assert report.counts["triple_cases"] == 0


@pytest.mark.parametrize("bound", [1, 2, 3])
def test_verify_dimension_lemmas(bound):
    """Test the dimension estimates exhaustively."""
    report = verify_dimension_lemmas(bound)
    assert report.ok, report.violations
    assert report.counts["pair_equalities"] > 0
    assert report.counts["triple_equalities"] > 0
    if bound == 3:
        cases = report.counts["pair_cases"] + report.counts["triple_cases"]
        assert cases >= 1000


@pytest.mark.parametrize("bound", [1, 2])
def test_verify_dimension_lemmas_accounts_for_every_case(bound):
    """Test that checked and skipped cases add up to the full enumeration."""
    levels = range(-2, 3)
    signed = 2 * len(generators(levels, bound))
    boxes = sum(
        1
        for values in itertools.product(range(bound + 1), repeat=len(levels))
        if is_admissible(IndexVector(zip(levels, values)))
    )
    report = verify_dimension_lemmas(bound)
    counts = report.counts
    assert report.details["enumerated"] == signed * boxes + signed**2 * boxes
    assert counts["pair_cases"] + counts["triple_cases"] + counts["skipped"] == (
        report.details["enumerated"]
    )
