from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from sgop.inner import (P1, P2, P3, RHO, RHO_L2, RHO_SIXFOLD, ClosedFormMismatch, closed_form_audit, frame_analysis,
                        gram, inner_closed, inner_cross_base, inner_general, rho_inner)
from sgop.jets import compute_jet_sequences

JT = compute_jet_sequences(30)
small = st.fractions(min_value=-20, max_value=20, max_denominator=50)


def harmonic_norm_sq(h):
    """Energy-free quadrature for harmonic functions from their three boundary values."""
    s = sum(h)
    return Fraction(4, 45) * s * s + Fraction(1, 15) * sum(t * t for t in h)


@given(small, small, small)
def test_harmonic_inner_products_match_boundary_quadrature(x, y, z):
    c = [x, y, z]
    G = [[inner_general(i, 0, k, 0, JT) for k in (1, 2, 3)] for i in (1, 2, 3)]
    v = sum(mpq(c[a]) * mpq(c[b]) * G[a][b] for a in range(3) for b in range(3))
    h = [x, x - y / 2 + z / 2, x - y / 2 - z / 2]
    assert v == mpq(harmonic_norm_sq(h))


def test_low_degree_values():
    assert inner_general(3, 0, 3, 0, JT) == mpq(1, 30)
    assert inner_general(1, 0, 1, 0, JT) == 1
    assert inner_general(1, 0, 2, 0, JT) == mpq(-1, 3)


@given(st.integers(0, 12), st.integers(0, 12), st.sampled_from([1, 2, 3]), st.sampled_from([1, 2, 3]))
def test_symmetric_in_arguments(j, k, i, i2):
    assert inner_general(i, j, i2, k, JT) == inner_general(i2, k, i, j, JT)


@given(st.integers(0, 10), st.integers(0, 10))
def test_antisymmetric_orthogonal_to_symmetric(j, k):
    assert inner_general(3, j, 1, k, JT) == 0
    assert inner_general(3, j, 2, k, JT) == 0


@given(st.integers(0, 10), st.integers(0, 10))
def test_cross_base_rule(j, k):
    same = inner_general(3, j, 3, k, JT)
    for a in range(3):
        for b in range(3):
            direct = inner_general(3, j, 3, k, JT, a, b)
            assert direct == inner_cross_base(a, j, b, k, JT)
            assert direct == (same if a == b else -same / 2)


def test_gram_positive_definite():
    for fam in (P1, P2, P3):
        G = gram(fam, 8, JT)
        assert G.is_symmetric() and G.is_positive_definite()
    for conv in (RHO_SIXFOLD, RHO_L2):
        assert gram(RHO, 8, JT, conv).is_positive_definite()


def test_rho_conventions():
    assert rho_inner(0, 0, JT, RHO_SIXFOLD) == 6
    assert rho_inner(0, 0, JT, RHO_L2) == 9
    with pytest.raises(ValueError):
        rho_inner(0, 0, JT, "other")


def test_closed_forms_agree_within_family():
    audit = closed_form_audit(8, JT)
    assert audit[(1, 1)] == [] and audit[(3, 3)] == []
    # the tabulated P2 line uses -alpha_0 where the ell = j term needs dn2_0
    assert len(audit[(2, 2)]) == 45
    j, k, tabulated, true = audit[(2, 2)][0]
    assert (j, k, tabulated, true) == (0, 0, mpq(7, 90), mpq(11, 90))
    with pytest.raises(ClosedFormMismatch):
        inner_closed(2, 0, 2, 0, JT)
    assert inner_closed(3, 2, 3, 5, JT) == inner_general(3, 2, 3, 5, JT)


def test_float_gram_is_correctly_rounded():
    from sgop.numeric import FLOAT, PrecisionConfig
    jf = compute_jet_sequences(30, PrecisionConfig(FLOAT, 256))
    Ge, Gf = gram(P3, 14, JT), gram(P3, 14, jf)
    for a in range(15):
        for b in range(15):
            assert abs(mpq(Gf[a, b]) - Ge[a, b]) <= abs(Ge[a, b]) / 2 ** 255


def test_frame_pattern():
    for j in range(6):
        rep = frame_analysis(j, JT)
        assert rep.exact_pattern
        assert rep.eigenvalues == (0, 3 * rep.a / 2, 3 * rep.a / 2)


