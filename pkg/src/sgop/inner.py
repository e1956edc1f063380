"""Exact L2 inner products of monomials through the Gauss-Green boundary sum.

For polynomials A, B with Delta A_m = A_{m-1} and Delta B_m = B_{m-1},

    <A_j, B_k> = sum_{l=0}^{j} sum_n [A_{j-l}(q_n) dB_{k+1+l}(q_n) - B_{k+1+l}(q_n) dA_{j-l}(q_n)]

where d is the outward normal derivative. Only boundary values and normal
derivatives enter, so monomials based at any corner can be paired.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from functools import lru_cache

from .jets import JetTable, raw_sequences, value_normal
from .numeric import PrecisionConfig, Scalar, arb_to_mpfr, as_rational, certified, to_text

P1, P2, P3, RHO, CROSS3 = "P1", "P2", "P3", "RHO", "CROSS3"
FAMILY_INDEX = {P1: 1, P2: 2, P3: 3}

RHO_SIXFOLD = "sixfold"  # 6 <P_j1, P_k1>
RHO_L2 = "l2"        # true L2 Gram of rho_j = sum_n P^{(n)}_j1


class ClosedFormMismatch(ArithmeticError):
    def __init__(self, key, closed, general):
        self.key, self.closed, self.general = key, closed, general
        super().__init__(f"closed form {key}: {closed} != general {general}")


def _need(jt: JetTable, deg: int):
    if deg > jt.max_degree:
        raise ValueError(f"jet table has degree {jt.max_degree}, need {deg}")


def inner_general(i: int, j: int, i2: int, k: int, jt: JetTable,
                  base1: int = 0, base2: int = 0) -> Scalar:
    """<P^{(base1)}_{j i}, P^{(base2)}_{k i2}>.

    The boundary sum cancels heavily at high degree, so float mode evaluates it
    in ball arithmetic at raised precision and rounds the certified result.
    """
    if j > k:
        i, j, i2, k, base1, base2 = i2, k, i, j, base2, base1
    _need(jt, j + k + 1)
    if jt.cfg.exact:
        return _boundary_sum(jt.base_sequences(), i, j, i2, k, base1, base2, jt.cfg.zero(), jt.cfg.one())
    out = certified(lambda: _arb_entry(j + k + 1, i, j, i2, k, base1, base2), jt.cfg.bits)
    return arb_to_mpfr(out, jt.cfg.bits)


def _boundary_sum(seqs, i, j, i2, k, base1, base2, zero, one):
    acc = zero
    for l in range(j + 1):
        for n in range(3):
            a = value_normal(seqs, i, j - l, n, base1, zero, one)
            b = value_normal(seqs, i2, k + 1 + l, n, base2, zero, one)
            acc += a[0] * b[1] - b[0] * a[1]
    return acc


@lru_cache(maxsize=16)
def _arb_sequences(N: int, prec: int):
    from flint import arb

    return raw_sequences(N, arb)


def _arb_entry(need, i, j, i2, k, base1, base2):
    from flint import arb, ctx

    if j > k:
        i, j, i2, k, base1, base2 = i2, k, i, j, base2, base1
    seqs = _arb_sequences(need, ctx.prec)
    return _boundary_sum(seqs, i, j, i2, k, base1, base2, arb(0), arb(1))


def _alpha_p(jt, n):
    return jt.cfg.scalar(Fraction(-1, 2)) if n == 1 else jt.alpha[n]


def inner_closed_raw(i: int, j: int, i2: int, k: int, jt: JetTable) -> Scalar:
    """The tabulated closed forms, transcribed verbatim (j <= k)."""
    if j > k:
        i, j, i2, k = i2, k, i, j
    pair = tuple(sorted((i, i2)))
    if pair not in {(1, 1), (2, 2), (3, 3), (1, 2)}:
        raise ValueError(f"no closed form for families {pair}")
    if pair == (1, 2) and i != 1:
        # the stated line is <P_j1, P_k2>; the mirrored pairing has no line
        raise ValueError("closed form only covers <P_j1, P_k2> with j <= k")
    _need(jt, j + k + 2)
    al, be, et = jt.alpha, jt.beta, jt.eta
    m = min(j, k)
    acc = jt.cfg.zero()
    with jt.cfg.context():
        if pair == (1, 1):
            for l in range(j - m, j + 1):
                acc += al[j - l] * et[k + l + 1] - al[k + l + 1] * et[j - l]
            return 2 * acc
        if pair == (2, 2):
            for l in range(j - m, j + 1):
                acc += be[j - l] * al[k + l + 1] - be[k + l + 1] * al[j - l]
            return -2 * acc
        if pair == (3, 3):
            for l in range(j - m, j + 1):
                acc += al[j - l + 1] * et[k + l + 2] - al[k + l + 2] * et[j - l + 1]
            return 18 * acc
        for l in range(j + 1):
            acc += _alpha_p(jt, j - l) * _alpha_p(jt, k + l + 1) - be[k + l + 2] * et[j - l + 1]
        return -2 * acc


def inner_closed(i: int, j: int, i2: int, k: int, jt: JetTable) -> Scalar:
    """Closed form, cross-checked against the boundary sum; raises on mismatch."""
    c = inner_closed_raw(i, j, i2, k, jt)
    g = inner_general(i, j, i2, k, jt)
    tol = jt.cfg.tolerance() * max(1, abs(g))
    if abs(c - g) > tol:
        raise ClosedFormMismatch((i, j, i2, k), c, g)
    return c


def closed_form_audit(N: int, jt: JetTable) -> dict:
    """Compare each closed-form line with the boundary sum for j <= k <= N."""
    report = {}
    for pair in [(1, 1), (2, 2), (3, 3), (1, 2)]:
        bad = []
        for j in range(N + 1):
            for k in range(j, N + 1):
                c = inner_closed_raw(pair[0], j, pair[1], k, jt)
                g = inner_general(pair[0], j, pair[1], k, jt)
                if c != g:
                    bad.append((j, k, c, g))
        report[pair] = bad
    return report


def inner_cross_base(n: int, j: int, n2: int, k: int, jt: JetTable) -> Scalar:
    """<P^{(n)}_{j3}, P^{(n2)}_{k3}> through the -1/2 rule for distinct bases."""
    if n not in (0, 1, 2) or n2 not in (0, 1, 2):
        raise ValueError("base points are 0, 1, 2")
    v = inner_general(3, j, 3, k, jt)
    if n == n2:
        return v
    with jt.cfg.context():
        return -v / 2


def rho_inner(j: int, k: int, jt: JetTable, convention: str = RHO_SIXFOLD) -> Scalar:
    entry = _entry_fn(RHO, convention)
    with jt.cfg.context():
        return entry(lambda i, a, i2, b, x, y: inner_general(i, a, i2, b, jt, x, y), j, k)


@dataclass(frozen=True)
class GramMatrix:
    family: str
    entries: tuple  # tuple of row tuples
    cfg: PrecisionConfig
    convention: str = ""

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        return self.entries[ij[0]][ij[1]]

    def is_symmetric(self) -> bool:
        n = self.size
        return all(self.entries[a][b] == self.entries[b][a] for a in range(n) for b in range(a))

    def leading_minors(self) -> list:
        """Leading principal minors by fraction-free elimination (exact in rational mode)."""
        n = self.size
        A = [[as_rational(x) for x in row] for row in self.entries]
        out, prev = [], 1
        for p in range(n):
            out.append(A[p][p])
            if A[p][p] == 0:
                out.extend([0] * (n - p - 1))
                break
            for r in range(p + 1, n):
                for c in range(p + 1, n):
                    A[r][c] = (A[r][c] * A[p][p] - A[r][p] * A[p][c]) / prev
            prev = A[p][p]
        return out

    def is_positive_definite(self) -> bool:
        return all(m > 0 for m in self.leading_minors())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row in self.entries:
            w.writerow([to_text(x) for x in row])
        return buf.getvalue()


def _entry_fn(family: str, convention: str):
    """Entry (a, b) as a function of a boundary-sum evaluator ip(i, j, i2, k, b1, b2)."""
    if family in FAMILY_INDEX:
        f = FAMILY_INDEX[family]
        return lambda ip, a, b: ip(f, a, f, b, 0, 0)
    if family == RHO:
        if convention == RHO_SIXFOLD:
            return lambda ip, a, b: 6 * ip(1, a, 1, b, 0, 0)
        if convention == RHO_L2:
            return lambda ip, a, b: sum(ip(1, a, 1, b, x, y) for x in range(3) for y in range(3))
        raise ValueError(f"unknown rho convention {convention!r}")
    raise ValueError(f"unknown family {family!r}")


def gram(family: str, N: int, jt: JetTable, convention: str = RHO_SIXFOLD) -> GramMatrix:
    """(N+1)x(N+1) Gram matrix of a monomial family."""
    entry = _entry_fn(family, convention)
    _need(jt, 2 * N + 1)

    def build(ip):
        rows = [[None] * (N + 1) for _ in range(N + 1)]
        for a in range(N + 1):
            for b in range(a, N + 1):
                rows[a][b] = rows[b][a] = entry(ip, a, b)
        return rows

    cfg = jt.cfg
    if cfg.exact:
        seqs, z, o = jt.base_sequences(), cfg.zero(), cfg.one()
        rows = build(lambda i, j, i2, k, b1, b2: _ordered(seqs, i, j, i2, k, b1, b2, z, o))
    else:
        rows = certified(lambda: build(lambda i, j, i2, k, b1, b2:
                                       _arb_entry(2 * N + 1, i, j, i2, k, b1, b2)), cfg.bits)
        rows = [[arb_to_mpfr(x, cfg.bits) for x in r] for r in rows]
    return GramMatrix(family, tuple(map(tuple, rows)), cfg,
                      convention if family == RHO else "")


def _ordered(seqs, i, j, i2, k, b1, b2, z, o):
    if j > k:
        i, j, i2, k, b1, b2 = i2, k, i, j, b2, b1
    return _boundary_sum(seqs, i, j, i2, k, b1, b2, z, o)


def frame_gram(j: int, jt: JetTable) -> GramMatrix:
    """Gram matrix of the three rotated antisymmetric monomials of degree j."""
    rows = tuple(tuple(inner_general(3, j, 3, j, jt, a, b) for b in range(3)) for a in range(3))
    return GramMatrix(CROSS3, rows, jt.cfg)


def frame_bound(j: int, jt: JetTable) -> Scalar:
    with jt.cfg.context():
        return 3 * inner_general(3, j, 3, j, jt) / 2


@dataclass(frozen=True)
class FrameReport:
    degree: int
    a: Scalar
    eigenvalues: tuple
    bound: Scalar
    exact_pattern: bool

    def to_json(self) -> dict:
        return {"degree": self.degree, "a": to_text(self.a),
                "eigenvalues": [to_text(x) for x in self.eigenvalues],
                "bound": to_text(self.bound), "exact_pattern": self.exact_pattern}


def frame_analysis(j: int, jt: JetTable) -> FrameReport:
    """Eigenvalues of the frame Gram.

    The characteristic polynomial is compared coefficient-wise with
    x (x - 3a/2)^2; in rational mode this certifies the spectrum exactly.
    """
    G = frame_gram(j, jt)
    a = inner_general(3, j, 3, j, jt)
    e = G.entries
    with jt.cfg.context():
        tr = e[0][0] + e[1][1] + e[2][2]
        m2 = (e[0][0] * e[1][1] - e[0][1] * e[1][0] + e[0][0] * e[2][2] - e[0][2] * e[2][0]
              + e[1][1] * e[2][2] - e[1][2] * e[2][1])
        det = (e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1])
               - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
               + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]))
        lam = 3 * a / 2
        # x^3 - tr x^2 + m2 x - det  vs  x^3 - 2 lam x^2 + lam^2 x
        tol = jt.cfg.tolerance() * max(1, abs(a))
        ok = abs(tr - 2 * lam) <= tol and abs(m2 - lam * lam) <= tol * abs(a) and abs(det) <= tol * a * a
    if ok:
        eig = (jt.cfg.zero(), lam, lam)
    else:
        vals = np.linalg.eigvalsh(np.array([[float(x) for x in r] for r in e]))
        eig = tuple(jt.cfg.scalar(Fraction(float(v))) for v in vals)
    return FrameReport(j, a, eig, frame_bound(j, jt), ok)
