"""Boundary jets of the monomials P_{jk} at the three corners of the gasket.

Family k=1 has value jet delta at its base point, k=2 the normal derivative,
k=3 the tangential derivative. Everything here is expressed through the data
at q_1 (the sequences alpha, beta, gamma, eta, dn2, dn3, t1, t2, t3) and the
reflection across the axis through the base point.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache

from .numeric import EXACT, PrecisionConfig, arb_to_mpfr, certified, to_text

VALUE, NORMAL, TANGENT = 0, 1, 2

# reflection across the axis through q_0: (value, normal) pick up MIRROR[k],
# the tangential derivative picks up -MIRROR[k] because orientation reverses
MIRROR = {1: 1, 2: 1, 3: -1}

# u -> u o F_i rescales Delta by 1/5, normal derivative by 3/5, tangential by 1/5
JET_SCALE = (1, (3, 5), (1, 5))


@dataclass(frozen=True)
class JetTable:
    max_degree: int
    cfg: PrecisionConfig
    alpha: tuple
    beta: tuple
    gamma: tuple
    eta: tuple
    dn2: tuple
    dn3: tuple
    t1: tuple = ()
    t2: tuple = ()
    t3: tuple = ()

    def value(self, k: int) -> tuple:
        return (self.alpha, self.beta, self.gamma)[k - 1]

    def normal(self, k: int) -> tuple:
        return (self.eta, self.dn2, self.dn3)[k - 1]

    def tangent(self, k: int) -> tuple:
        if not self.t1:
            raise ValueError("tangential sequences not computed")
        return (self.t1, self.t2, self.t3)[k - 1]

    def base_sequences(self) -> tuple:
        return (self.alpha, self.beta, self.gamma, self.eta, self.dn2, self.dn3)

    def has_tangents(self) -> bool:
        return bool(self.t1)

    def rows(self):
        cols = ["alpha", "beta", "gamma", "eta", "dn2", "dn3"]
        if self.has_tangents():
            cols += ["t1", "t2", "t3"]
        for j in range(self.max_degree + 1):
            yield j, {c: getattr(self, c)[j] for c in cols}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = ["alpha", "beta", "gamma", "eta", "dn2", "dn3", "t1", "t2", "t3"]
        w.writerow(["j"] + cols)
        for j, row in self.rows():
            w.writerow([j] + [to_text(row[c]) if c in row else "" for c in cols])
        return buf.getvalue()


def compute_jet_sequences(N: int, cfg: PrecisionConfig = EXACT) -> JetTable:
    """alpha, beta, gamma, eta and the normal derivatives dn2, dn3 through degree N,
    with the tangential sequences filled in."""
    if N < 0:
        raise ValueError("N must be >= 0")
    return _cached(N, cfg)


@lru_cache(maxsize=32)
def _cached(N: int, cfg: PrecisionConfig) -> JetTable:
    if cfg.exact:
        return compute_tangential_sequences(_base_sequences(N, cfg))
    return _certified_float_table(N, cfg)


def _certified_float_table(N: int, cfg: PrecisionConfig) -> JetTable:
    """Float tables are evaluated in ball arithmetic and rounded once.

    beta and eta are alternating sums, and naive evaluation at the target
    precision loses many bits at high degree; working precision is raised
    until every entry is correct to the configured bits.
    """
    from flint import arb

    def run():
        base = raw_sequences(N, lambda x: arb(x) if isinstance(x, int) else arb(str(x)))
        return base + _tangents(N, base, lambda x: arb(x))

    seqs = certified(run, cfg.bits)
    r = [tuple(arb_to_mpfr(x, cfg.bits) for x in seq) for seq in seqs]
    return JetTable(N, cfg, *r)


def _base_sequences(N: int, cfg: PrecisionConfig) -> JetTable:
    with cfg.context():
        al, be, ga, et, dn2, dn3 = raw_sequences(N, cfg.scalar)
    return JetTable(N, cfg, al, be, ga, et, dn2, dn3)


def raw_sequences(N: int, s) -> tuple:
    """alpha, beta, gamma, eta, dn2, dn3 through degree N over any number type.

    ``s`` converts Python ints and Fractions into that type.
    """
    M = N + 1  # gamma_N needs alpha_{N+1}, dn3_N needs eta_{N+1}
    al = [s(1), s(1) / 6]
    for j in range(2, M + 1):
        acc = s(0)
        for l in range(1, j):
            acc += al[j - l] * al[l]
        al.append(s(4) / (5 ** j - 5) * acc)
    be = [s(-1) / 2]
    for j in range(1, M + 1):
        acc = s(0)
        for l in range(j):
            acc += (3 * 5 ** (j - l) - 5 ** (l + 1) + 6) * al[j - l] * be[l]
        be.append(s(2) / (15 * (5 ** j - 1)) * acc)
    et = [s(0)]
    for j in range(1, M + 1):
        acc = s(5 ** j + 1) / 2 * al[j]
        for l in range(j):
            acc += 2 * et[l] * be[j - l]
        et.append(acc)
    ga = [s(1) / 2] + [3 * al[j + 1] for j in range(1, N + 1)]
    dn2 = [s(-1) / 2] + [-al[j] for j in range(1, N + 1)]
    dn3 = [3 * et[j + 1] for j in range(N + 1)]
    return (tuple(al[: N + 1]), tuple(be[: N + 1]), tuple(ga), tuple(et[: N + 1]),
            tuple(dn2), tuple(dn3))


def compute_tangential_sequences(jt: JetTable) -> JetTable:
    """Solve for the tangential derivatives at q_1 degree by degree.

    The midpoint F_1 q_0 = F_0 q_1 is reached from both sides. Expanding
    P_{jk} o F_0 in the q_0 jet basis and reading it at q_1 gives the value
    s_k 5^{-j} (q_1 data); expanding around q_1 and reading at q_0 of the
    child must agree. The newest tangential unknown enters with -gamma_0/5.
    """
    cfg = jt.cfg
    with cfg.context():
        t = _tangents(jt.max_degree, jt.base_sequences(), cfg.scalar)
    return JetTable(jt.max_degree, cfg, jt.alpha, jt.beta, jt.gamma, jt.eta,
                    jt.dn2, jt.dn3, *t)


def _tangents(N: int, seqs, s) -> tuple:
    al, be, ga, et, dn2, dn3 = seqs
    values, normals = (al, be, ga), (et, dn2, dn3)
    g0 = ga[0]
    assert g0 != 0
    scale = {1: s(1), 2: s(3) / 5, 3: s(1) / 5}
    out = {1: [], 2: [], 3: []}
    for j in range(N + 1):
        for k in (1, 2, 3):
            val, nrm, tan = values[k - 1], normals[k - 1], out[k]
            lhs = scale[k] * val[j] / 5 ** j
            rhs = s(0)
            for m in range(j + 1):
                w = s(1) / 5 ** m
                rhs += w * (val[j - m] * al[m] + s(3) / 5 * nrm[j - m] * be[m])
                if m:
                    rhs -= w / 5 * tan[j - m] * ga[m]
            tan.append((rhs - lhs) / (g0 / 5))
    return tuple(out[1]), tuple(out[2]), tuple(out[3])


def corner_data(jt: JetTable, k: int, j: int, n: int, base: int = 0) -> tuple:
    """(value, normal, tangential) of P^{(base)}_{jk} at q_n."""
    zero, one = jt.cfg.zero(), jt.cfg.one()
    if j < 0:
        return (zero, zero, zero)
    rel = (n - base) % 3
    if rel == 0:
        d = [zero, zero, zero]
        if j == 0:
            d[k - 1] = one
        return tuple(d)
    v, nr, t = jt.value(k)[j], jt.normal(k)[j], jt.tangent(k)[j]
    if rel == 1:
        return (v, nr, t)
    with jt.cfg.context():  # gmpy2 rounds even a negation to the context precision
        if MIRROR[k] > 0:
            return (v, nr, -t)
        return (-v, -nr, t)


def value_normal(seqs, k: int, j: int, n: int, base: int, zero, one) -> tuple:
    """(value, normal) of P^{(base)}_{jk} at q_n from the six base sequences."""
    if j < 0:
        return (zero, zero)
    rel = (n - base) % 3
    if rel == 0:
        return (one if (j == 0 and k == 1) else zero, one if (j == 0 and k == 2) else zero)
    al, be, ga, et, dn2, dn3 = seqs
    v = (al, be, ga)[k - 1][j]
    nr = (et, dn2, dn3)[k - 1][j]
    if rel == 2 and MIRROR[k] < 0:
        return (-v, -nr)
    return (v, nr)


@dataclass(frozen=True)
class BoundaryJet:
    family: int
    degree: int
    base: int
    # data[n][m] = (value, normal, tangential) of Delta^m P at q_n
    data: tuple

    def at(self, n: int, m: int = 0) -> tuple:
        return self.data[n][m]


def boundary_jet(k: int, j: int, jt: JetTable, base: int = 0) -> BoundaryJet:
    if k not in (1, 2, 3):
        raise ValueError(f"family must be 1, 2 or 3, got {k}")
    if j > jt.max_degree:
        raise ValueError(f"degree {j} beyond table ({jt.max_degree})")
    data = tuple(tuple(corner_data(jt, k, j - m, n, base) for m in range(j + 1))
                 for n in range(3))
    return BoundaryJet(k, j, base, data)
