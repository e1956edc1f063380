"""Two-mode scalar tower: exact rationals (gmpy2.mpq) and fixed-precision
binary floats (gmpy2.mpfr).

A pipeline runs entirely in one mode. The helpers below refuse to mix the
two variants, and float arithmetic must happen inside ``cfg.context()`` so
results are rounded at the configured precision.
"""
from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import gmpy2
from gmpy2 import mpfr, mpq

Scalar = Union[mpq, mpfr]

RATIONAL = "rational"
FLOAT = "float"


class RouteDisagreement(ArithmeticError):
    """Two independent computations of the same quantity disagree."""

    def __init__(self, what: str, *values, **named):
        self.what, self.values, self.named = what, values, named
        body = ", ".join([str(v) for v in values] + [f"{k}={v}" for k, v in named.items()])
        super().__init__(f"{what}: routes disagree: {body}")


class MixedModeError(TypeError):
    """Raised when an operation combines an exact and an approximate scalar,
    or two floats of different precision."""


@dataclass(frozen=True)
class PrecisionConfig:
    mode: str = RATIONAL
    bits: int = 512
    emit_digits: int = 20

    def __post_init__(self):
        if self.mode not in (RATIONAL, FLOAT):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.bits < 128:
            raise ValueError("bits must be >= 128")
        if self.emit_digits < 6:
            raise ValueError("emit_digits must be >= 6")

    @property
    def exact(self) -> bool:
        return self.mode == RATIONAL

    def context(self):
        if self.exact:
            return contextlib.nullcontext()
        return gmpy2.context(gmpy2.get_context(), precision=self.bits)

    def scalar(self, x) -> Scalar:
        """Convert ints, Fractions, mpq, "p/q" strings or decimal strings."""
        if isinstance(x, Fraction):
            x = mpq(x.numerator, x.denominator)
        if self.exact:
            if isinstance(x, mpfr):
                raise MixedModeError("refusing to convert an mpfr into rational mode")
            return mpq(x)
        if isinstance(x, mpfr):
            if x.precision != self.bits:
                raise MixedModeError(f"mpfr at {x.precision} bits in a {self.bits}-bit pipeline")
            return x
        if isinstance(x, str) and "/" not in x:
            return mpfr(x, self.bits)
        return mpfr(mpq(x), self.bits)

    def zero(self) -> Scalar:
        return self.scalar(0)

    def one(self) -> Scalar:
        return self.scalar(1)

    def sqrt(self, x: Scalar) -> Scalar:
        if self.exact:
            raise ValueError("square roots need float mode")
        with self.context():
            return gmpy2.sqrt(self.scalar(x))

    def tolerance(self) -> mpfr | int:
        """Absolute agreement threshold for same-pipeline comparisons."""
        if self.exact:
            return 0
        return mpfr(2, self.bits) ** (-(self.bits // 2))


EXACT = PrecisionConfig()
FLOAT512 = PrecisionConfig(FLOAT, 512)


def _check(a, b):
    ra, rb = isinstance(a, mpq), isinstance(b, mpq)
    if ra != rb:
        raise MixedModeError(f"mixed {type(a).__name__} and {type(b).__name__}")
    if not ra and a.precision != b.precision:
        raise MixedModeError(f"precision mismatch {a.precision} vs {b.precision}")
    return ra


def _with_prec(a, fn):
    if isinstance(a, mpq):
        return fn()
    with gmpy2.context(gmpy2.get_context(), precision=a.precision):
        return fn()


def add(a: Scalar, b: Scalar) -> Scalar:
    _check(a, b)
    return _with_prec(a, lambda: a + b)


def sub(a: Scalar, b: Scalar) -> Scalar:
    _check(a, b)
    return _with_prec(a, lambda: a - b)


def mul(a: Scalar, b: Scalar) -> Scalar:
    _check(a, b)
    return _with_prec(a, lambda: a * b)


def div(a: Scalar, b: Scalar) -> Scalar:
    _check(a, b)
    if b == 0:
        raise ZeroDivisionError("scalar division by zero")
    return _with_prec(a, lambda: a / b)


def as_rational(a: Scalar) -> mpq:
    """Exact rational value of either variant (mpfr values are dyadic)."""
    if isinstance(a, mpq):
        return a
    if isinstance(a, (int, Fraction)):
        return mpq(int(a.numerator), int(a.denominator))
    if not gmpy2.is_finite(a):
        raise ValueError(f"non-finite scalar {a}")
    return mpq(*a.as_integer_ratio())


def to_decimal_string(a: Scalar, digits: int) -> str:
    """Correctly rounded scientific notation, e.g. ``-2.04E-02``."""
    if digits < 1:
        raise ValueError("digits must be >= 1")
    q = as_rational(a)
    if q == 0:
        return "0"
    sign = "-" if q < 0 else ""
    q = abs(q)
    e = _floor_log10(q)
    scaled = q * mpq(10) ** (digits - 1 - e)
    n = _round_half_even(scaled)
    if n >= 10 ** digits:
        e += 1
        n = _round_half_even(q * mpq(10) ** (digits - 1 - e))
    s = str(n)
    mant = s[0] + ("." + s[1:] if digits > 1 else "")
    return f"{sign}{mant}E{'-' if e < 0 else '+'}{abs(e):02d}"


def _floor_log10(q: mpq) -> int:
    e = int(math.floor(math.log10(float(q)))) if 1e-300 < q < 1e300 else _slow_log10(q)
    # float log10 can be off by one near powers of ten
    while mpq(10) ** e > q:
        e -= 1
    while mpq(10) ** (e + 1) <= q:
        e += 1
    return e


def _slow_log10(q: mpq) -> int:
    return len(str(q.numerator)) - len(str(q.denominator))


def _round_half_even(q: mpq) -> int:
    fl = q.numerator // q.denominator
    rem = q - fl
    if rem > mpq(1, 2) or (rem == mpq(1, 2) and fl % 2 == 1):
        fl += 1
    return int(fl)


def to_text(a: Scalar) -> str:
    """Canonical serialization: ``p/q`` for rationals, round-trip decimal for floats."""
    if isinstance(a, (int, Fraction)):
        a = mpq(int(a.numerator), int(a.denominator))
    if isinstance(a, mpq):
        return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
    if a == 0:
        return "0"
    n = math.ceil(a.precision * math.log10(2)) + 2
    mant, exp, _ = a.digits(10, n)
    neg = mant.startswith("-")
    mant = mant.lstrip("-")
    return f"{'-' if neg else ''}0.{mant}e{exp}"


def parse_scalar(text: str, cfg: PrecisionConfig) -> Scalar:
    text = text.strip()
    if cfg.exact:
        return mpq(text)
    return mpfr(text, cfg.bits)


# ---------------------------------------------------------------- ball arithmetic

def arb_to_mpfr(x, bits: int) -> mpfr:
    """Round the midpoint of a flint arb to an mpfr of the given precision."""
    man, exp = x.mid().man_exp()
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        return gmpy2.mul_2exp(mpfr(int(man)), int(exp))


def scalar_to_arb(x):
    from flint import arb, fmpq

    q = as_rational(x)
    return arb(fmpq(int(q.numerator), int(q.denominator)))


@contextlib.contextmanager
def arb_precision(bits: int):
    from flint import ctx

    old = ctx.prec
    ctx.prec = bits
    try:
        yield
    finally:
        ctx.prec = old


def certified(fn, bits: int, start: int | None = None, limit: int = 1 << 16):
    """Evaluate ``fn()`` (returning a nested structure of arbs) at rising working
    precision until every entry carries ``bits + 8`` correct bits.

    A ball that still contains zero once the working precision is at least
    four times ``bits`` and whose radius is below 2^-(prec/2) is taken to be an
    exact zero (several tangential jets vanish identically). Such entries come
    back as exact arb zeros.
    """
    prec = start or 2 * bits
    while True:
        with arb_precision(prec):
            out = fn()
        leaves = list(_leaves(out))
        if all(_good(x, bits + 8) or _zero(x, prec, bits) for x in leaves):
            return _zeroed(out, prec, bits)
        if prec >= limit:
            raise ArithmeticError(f"no certified result below {limit} bits")
        prec *= 2


def _zero(x, prec, bits) -> bool:
    from flint import arb

    return prec >= 4 * bits and x.contains(0) and x.rad() < arb(2) ** (-(prec // 2))


def _zeroed(obj, prec, bits):
    from flint import arb

    if isinstance(obj, (list, tuple)):
        return type(obj)(_zeroed(o, prec, bits) for o in obj)
    if not obj.is_exact() and obj.contains(0):
        return arb(0)
    return obj


def _leaves(obj):
    if isinstance(obj, (list, tuple)):
        for o in obj:
            yield from _leaves(o)
    else:
        yield obj


def _good(x, need: int) -> bool:
    if x.is_exact():
        return True
    if x.contains(0):
        return False
    return x.rel_accuracy_bits() >= need
