
import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from sgop.jets import MIRROR, boundary_jet, compute_jet_sequences, corner_data
from sgop.numeric import FLOAT, PrecisionConfig


def q(a, b=1):
    return mpq(a, b)


def test_initial_values(jt_exact):
    assert jt_exact.alpha[:3] == (1, q(1, 6), q(1, 180))
    assert jt_exact.beta[:2] == (q(-1, 2), q(-2, 45))
    assert jt_exact.gamma[:2] == (q(1, 2), q(1, 60))
    assert jt_exact.eta[:2] == (0, q(1, 2))
    assert jt_exact.dn2[:2] == (q(-1, 2), q(-1, 6))
    assert jt_exact.dn3[0] == q(3, 2)


def test_tangential_sequences(jt_exact):
    assert jt_exact.t1[1] == q(1, 6)
    assert all(x == 0 for j, x in enumerate(jt_exact.t1) if j != 1)
    assert jt_exact.t2[:3] == (q(-1, 2), q(-1, 36), q(1, 9720))
    assert jt_exact.t3[0] == q(-1, 2)
    assert all(x == 0 for x in jt_exact.t3[1:])


@given(st.integers(min_value=2, max_value=40))
def test_alpha_recursion(j):
    jt = compute_jet_sequences(41)
    al = jt.alpha
    assert al[j] == q(4, 5 ** j - 5) * sum(al[j - l] * al[l] for l in range(1, j))


@given(st.integers(min_value=1, max_value=40))
def test_gamma_and_normals_from_alpha_eta(j):
    jt = compute_jet_sequences(41)
    assert jt.gamma[j] == 3 * jt.alpha[j + 1]
    assert jt.dn2[j] == -jt.alpha[j]
    assert jt.dn3[j - 1] == 3 * jt.eta[j]


def test_harmonic_anchor(jt_exact):
    # for harmonic h, the tangential derivative at q_0 is h(q_1) - h(q_2)
    for k in (1, 2, 3):
        v1, _, _ = corner_data(jt_exact, k, 0, 1)
        v2, _, _ = corner_data(jt_exact, k, 0, 2)
        t0 = corner_data(jt_exact, k, 0, 0)[2]
        assert t0 == v1 - v2


def test_mirror_rule(jt_exact):
    for k in (1, 2, 3):
        for j in range(6):
            a, b = corner_data(jt_exact, k, j, 1), corner_data(jt_exact, k, j, 2)
            assert b == (MIRROR[k] * a[0], MIRROR[k] * a[1], -MIRROR[k] * a[2])


@given(st.integers(min_value=0, max_value=102))
def test_float_table_correctly_rounded(j):
    cfg = PrecisionConfig(FLOAT, 512)
    jf, je = compute_jet_sequences(102, cfg), compute_jet_sequences(102)
    for name in ("alpha", "beta", "gamma", "eta", "dn2", "dn3", "t1", "t2", "t3"):
        x, y = getattr(jf, name)[j], getattr(je, name)[j]
        if y == 0:
            assert x == 0
        else:
            assert abs(mpq(x) - y) <= abs(y) * mpq(1, 2 ** 511)


def test_csv_round_trip(jt_exact):
    import csv, io
    rows = list(csv.DictReader(io.StringIO(compute_jet_sequences(8).to_csv())))
    assert rows[1]["alpha"] == "1/6" and rows[2]["alpha"] == "1/180"
    for j, row in enumerate(rows):
        assert mpq(row["beta"]) == jt_exact.beta[j]
        assert mpq(row["t2"]) == jt_exact.t2[j]


def test_boundary_jet_shape(jt_exact):
    bj = boundary_jet(3, 4, jt_exact)
    assert bj.at(0, 0) == (0, 0, 0)
    assert bj.at(0, 4) == (0, 0, 1)
    assert bj.at(1, 0)[0] == jt_exact.gamma[4]
    with pytest.raises(ValueError):
        boundary_jet(4, 1, jt_exact)
