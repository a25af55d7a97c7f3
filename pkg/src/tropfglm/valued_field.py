"""Arithmetic in a complete discretely valued field at finite precision.

Two inexact backends share one precision model (zealous arithmetic):

* ``p-adic``: elements of Q_p, unit digits stored as an integer modulo p^r;
* ``t-adic``: elements of Q((t)), unit digits stored as a tuple of rationals.

Every inexact scalar is in one of three states.  An *exact zero* is a
structural zero.  An *inexact zero* ``O(pi^N)`` only knows that its valuation
is at least ``N``.  A *nonzero* value is ``pi^val * unit`` with the unit known
modulo ``pi^rel_prec``; its absolute precision is ``val + rel_prec``.

:class:`RationalScalar` is an exact twin (a rational number together with the
prime used to value it).  It exposes the same protocol so that every
algorithm in the package can be run exactly, which is how the oracles work.
"""
from __future__ import annotations

import math
import random
import re
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DivisionByZero, UnknownValuation

INF = math.inf

_counter: Counter | None = None


@contextmanager
def count_operations():
    """Count scalar operations (add, neg, mul, div) performed inside the block."""
    global _counter
    previous = _counter
    _counter = Counter()
    try:
        yield _counter
    finally:
        _counter = previous


@lru_cache(maxsize=4096)
def _ppow(p: int, k: int) -> int:
    return p**k


def int_valuation(n: int, p: int) -> float:
    """p-adic valuation of an integer (``inf`` for 0)."""
    if n == 0:
        return INF
    if p == 2:
        n = abs(n)
        return (n & -n).bit_length() - 1
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def fraction_valuation(q: Fraction, p: int) -> float:
    if q == 0:
        return INF
    return int_valuation(q.numerator, p) - int_valuation(q.denominator, p)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# fields


@dataclass(frozen=True)
class FieldConfig:
    """A discretely valued field known at finite precision.

    ``default_precision`` is the absolute precision (in powers of the
    uniformizer) given to values entered without an explicit precision.
    """

    kind: str = "p-adic"
    p: int | None = 2
    default_precision: int = 20

    exact = False

    def __post_init__(self):
        if self.kind not in ("p-adic", "t-adic"):
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.kind == "p-adic" and (self.p is None or not _is_prime(self.p)):
            raise ValueError(f"p must be prime, got {self.p}")
        if self.default_precision < 1:
            raise ValueError("default_precision must be >= 1")

    @property
    def symbol(self) -> str:
        return "p" if self.kind == "p-adic" else "t"

    @property
    def _cls(self):
        return PAdicScalar if self.kind == "p-adic" else TAdicScalar

    def zero(self) -> "ValuedScalar":
        return self._cls(self, None, None, None)

    def inexact_zero(self, prec: int) -> "ValuedScalar":
        return self._cls(self, None, None, prec)

    def one(self, prec: int | None = None) -> "ValuedScalar":
        return self.from_rational(1, 1, prec)

    def from_rational(self, num: int, den: int = 1, prec: int | None = None) -> "ValuedScalar":
        """``num/den`` known to absolute precision ``prec``; ``0`` is an exact zero."""
        if den == 0:
            raise DivisionByZero("zero denominator")
        return self.from_fraction(Fraction(num, den), prec)

    def from_fraction(self, q, prec: int | None = None) -> "ValuedScalar":
        q = Fraction(q)
        prec = self.default_precision if prec is None else prec
        if q == 0:
            return self.zero()
        if self.kind == "p-adic":
            p = self.p
            v = fraction_valuation(q, p)
            if v >= prec:
                return self.inexact_zero(prec)
            r = prec - v
            num = q.numerator // _ppow(p, max(v, 0))
            den = q.denominator // _ppow(p, max(-v, 0))
            m = _ppow(p, r)
            unit = num * pow(den, -1, m) % m
            return PAdicScalar(self, v, unit, r)
        # a nonzero rational is a t-adic unit
        if prec <= 0:
            return self.inexact_zero(prec)
        return TAdicScalar(self, 0, (q,) + (Fraction(0),) * (prec - 1), prec)

    def from_fraction_rel(self, q, rel: int) -> "ValuedScalar":
        """Embed ``q`` keeping ``rel`` digits of relative precision."""
        q = Fraction(q)
        if q == 0:
            return self.zero()
        return self.from_fraction(q, self.valuation_of(q) + rel)

    def from_series(self, coeffs, val: int, prec: int) -> "ValuedScalar":
        """t-adic only: ``t^val * sum(coeffs[i] t^i) + O(t^prec)``."""
        if self.kind != "t-adic":
            raise TypeError("from_series is for t-adic fields")
        r = prec - val
        digits = [Fraction(c) for c in coeffs][:max(r, 0)]
        digits += [Fraction(0)] * (r - len(digits))
        if r <= 0:
            return self.inexact_zero(prec)
        for k, c in enumerate(digits):
            if c != 0:
                return TAdicScalar(self, val + k, tuple(digits[k:]), r - k)
        return self.inexact_zero(prec)

    def valuation_of(self, q: Fraction) -> float:
        if self.kind == "p-adic":
            return fraction_valuation(Fraction(q), self.p)
        return INF if q == 0 else 0

    def sample_integer(self, prec: int, seed=None) -> "ValuedScalar":
        """Haar-random element of the valuation ring truncated at ``prec``.

        ``seed`` may be an int or a :class:`random.Random` instance.
        """
        if prec < 1:
            raise ValueError("prec must be >= 1")
        rng = seed if isinstance(seed, random.Random) else random.Random(seed)
        if self.kind == "p-adic":
            n = rng.randrange(_ppow(self.p, prec))
            return self.from_rational(n, 1, prec) if n else self.inexact_zero(prec)
        digits = [rng.randint(-9, 9) for _ in range(prec)]
        return self.from_series(digits, 0, prec)


@dataclass(frozen=True)
class RationalField:
    """Exact rationals valued at ``p``; the oracle's arithmetic."""

    p: int = 2
    kind = "rational"
    exact = True
    symbol = "p"

    @property
    def default_precision(self):
        return INF

    def zero(self) -> "RationalScalar":
        return RationalScalar(self, Fraction(0))

    def one(self, prec=None) -> "RationalScalar":
        return RationalScalar(self, Fraction(1))

    def from_rational(self, num, den=1, prec=None) -> "RationalScalar":
        if den == 0:
            raise DivisionByZero("zero denominator")
        return RationalScalar(self, Fraction(num, den))

    def from_fraction(self, q, prec=None) -> "RationalScalar":
        return RationalScalar(self, Fraction(q))

    def from_fraction_rel(self, q, rel=None) -> "RationalScalar":
        return RationalScalar(self, Fraction(q))

    def valuation_of(self, q) -> float:
        return fraction_valuation(Fraction(q), self.p)

    def sample_integer(self, prec: int, seed=None) -> "RationalScalar":
        rng = seed if isinstance(seed, random.Random) else random.Random(seed)
        return RationalScalar(self, Fraction(rng.randrange(_ppow(self.p, prec))))


# ---------------------------------------------------------------------------
# inexact scalars


class ValuedScalar:
    """Base of the zealous scalars; see the module docstring for the states.

    Instances are immutable.  Subclasses supply the unit-digit kernels.
    """

    __slots__ = ("field", "val", "unit", "prec")

    def __init__(self, field, val, unit, prec):
        self.field = field
        self.val = val
        self.unit = unit
        self.prec = prec

    # -- state ------------------------------------------------------------
    def is_exact_zero(self) -> bool:
        return self.val is None and self.prec is None

    def is_zero(self) -> bool:
        """True for exact zeros and for values indistinguishable from zero."""
        return self.val is None

    @property
    def abs_prec(self) -> float:
        if self.val is None:
            return INF if self.prec is None else self.prec
        return self.val + self.prec

    @property
    def rel_prec(self) -> float:
        if self.val is None:
            return 0 if self.prec is not None else INF
        return self.prec

    def valuation(self) -> float:
        if self.val is not None:
            return self.val
        if self.prec is None:
            return INF
        raise UnknownValuation(f"valuation of O({self.field.symbol}^{self.prec}) is unknown")

    def _make(self, val, unit, prec):
        return type(self)(self.field, val, unit, prec)

    def _from_raw(self, v, raw, r):
        split = self._split(raw, r)
        if split is None:
            return self._make(None, None, v + r)
        k, u = split
        return self._make(v + k, u, r - k)

    def _coerce(self, other):
        if isinstance(other, ValuedScalar):
            return other
        if isinstance(other, RationalScalar):
            other = other.value
        if isinstance(other, (int, Fraction)):
            prec = self.abs_prec
            if prec == INF:
                prec = self.field.default_precision
            return self.field.from_fraction(other, prec)
        return NotImplemented

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        if _counter is not None:
            _counter["add"] += 1
        a = self
        if a.val is None:
            if a.prec is None:
                return b
            if b.val is None:
                return a._make(None, None, min(a.prec, b.abs_prec))
            a, b = b, a
        if b.val is None:
            if b.prec is None:
                return a
            A = b.prec
            if a.val + a.prec < A:
                return a
            if a.val >= A:
                return a._make(None, None, A)
            r = A - a.val
            return a._make(a.val, a._trunc(a.unit, r), r)
        A = min(a.val + a.prec, b.val + b.prec)
        v = min(a.val, b.val)
        r = A - v
        raw = a._combine(a.unit, a.val - v, b.unit, b.val - v, r)
        return a._from_raw(v, raw, r)

    __radd__ = __add__

    def __neg__(self):
        if _counter is not None:
            _counter["neg"] += 1
        if self.val is None:
            return self
        return self._make(self.val, self._neg(self.unit, self.prec), self.prec)

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        if _counter is not None:
            _counter["mul"] += 1
        a = self
        if a.val is None and a.prec is None:
            return a
        if b.val is None and b.prec is None:
            return b
        if a.val is None:
            return a._make(None, None, a.prec + (b.prec if b.val is None else b.val))
        if b.val is None:
            return a._make(None, None, b.prec + a.val)
        r = min(a.prec, b.prec)
        return a._make(a.val + b.val, a._mul(a.unit, b.unit, r), r)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        if b.val is None:
            raise DivisionByZero("division by an (inexact) zero")
        if _counter is not None:
            _counter["div"] += 1
        a = self
        if a.val is None:
            if a.prec is None:
                return a
            return a._make(None, None, a.prec - b.val)
        r = min(a.prec, b.prec)
        return a._make(a.val - b.val, a._mul(a.unit, a._inv(b.unit, r), r), r)

    def __rtruediv__(self, other):
        a = self._coerce(other)
        if a is NotImplemented:
            return a
        return a / self

    def __eq__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return (self - b).is_zero()

    __hash__ = None

    def __repr__(self):
        return f"{type(self).__name__}({self})"


class PAdicScalar(ValuedScalar):
    __slots__ = ()

    def _combine(self, ua, sa, ub, sb, r):
        p = self.field.p
        return (ua * _ppow(p, sa) + ub * _ppow(p, sb)) % _ppow(p, r)

    def _split(self, raw, r):
        if raw == 0:
            return None
        k = int_valuation(raw, self.field.p)
        return k, raw // _ppow(self.field.p, k)

    def _mul(self, ua, ub, r):
        return ua * ub % _ppow(self.field.p, r)

    def _inv(self, u, r):
        return pow(u, -1, _ppow(self.field.p, r))

    def _neg(self, u, r):
        return -u % _ppow(self.field.p, r)

    def _trunc(self, u, r):
        return u % _ppow(self.field.p, r)

    def lift(self) -> Fraction:
        """Rational representative (``unit * p^val``, 0 for zeros)."""
        if self.val is None:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.field.p) ** self.val

    def __str__(self):
        if self.val is None:
            return "0" if self.prec is None else f"O(p^{self.prec})"
        return f"{self.unit}*p^{self.val}+O(p^{self.abs_prec})"


class TAdicScalar(ValuedScalar):
    __slots__ = ()

    def _combine(self, ua, sa, ub, sb, r):
        out = [Fraction(0)] * r
        for shift, u in ((sa, ua), (sb, ub)):
            for i in range(min(len(u), r - shift)):
                out[i + shift] += u[i]
        return out

    def _split(self, raw, r):
        for k in range(r):
            if raw[k] != 0:
                return k, tuple(raw[k:r])
        return None

    def _mul(self, ua, ub, r):
        return tuple(sum((ua[i] * ub[n - i] for i in range(n + 1)), Fraction(0)) for n in range(r))

    def _inv(self, u, r):
        inv0 = 1 / u[0]
        out = [inv0]
        for n in range(1, r):
            s = sum((u[k] * out[n - k] for k in range(1, n + 1)), Fraction(0))
            out.append(-inv0 * s)
        return tuple(out)

    def _neg(self, u, r):
        return tuple(-c for c in u[:r])

    def _trunc(self, u, r):
        return tuple(u[:r])

    def digits(self) -> list[Fraction]:
        return [] if self.val is None else list(self.unit)

    def __str__(self):
        if self.val is None:
            return "0" if self.prec is None else f"O(t^{self.prec})"
        body = ",".join(str(c) for c in self.unit)
        return f"[{body}]*t^{self.val}+O(t^{self.abs_prec})"


# ---------------------------------------------------------------------------
# exact twin


class RationalScalar:
    """Exact rational with the valuation of ``field.p``."""

    __slots__ = ("field", "value")

    def __init__(self, field: RationalField, value: Fraction):
        self.field = field
        self.value = value

    def is_exact_zero(self) -> bool:
        return self.value == 0

    is_zero = is_exact_zero

    abs_prec = INF
    rel_prec = INF

    @property
    def val(self):
        return None if self.value == 0 else self.valuation()

    def valuation(self) -> float:
        return fraction_valuation(self.value, self.field.p)

    def lift(self) -> Fraction:
        return self.value

    def _coerce(self, other):
        if isinstance(other, RationalScalar):
            return other.value
        if isinstance(other, (int, Fraction)):
            return other
        return NotImplemented

    def _op(self, name, value):
        if _counter is not None:
            _counter[name] += 1
        return RationalScalar(self.field, value)

    def __add__(self, other):
        b = self._coerce(other)
        return b if b is NotImplemented else self._op("add", self.value + b)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        return b if b is NotImplemented else self._op("add", self.value - b)

    def __rsub__(self, other):
        b = self._coerce(other)
        return b if b is NotImplemented else self._op("add", b - self.value)

    def __neg__(self):
        return self._op("neg", -self.value)

    def __mul__(self, other):
        b = self._coerce(other)
        return b if b is NotImplemented else self._op("mul", self.value * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        if b == 0:
            raise DivisionByZero("division by zero")
        return self._op("div", self.value / b)

    def __rtruediv__(self, other):
        b = self._coerce(other)
        if self.value == 0:
            raise DivisionByZero("division by zero")
        return b if b is NotImplemented else self._op("div", b / self.value)

    def __eq__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return self.value == b

    __hash__ = None

    def __str__(self):
        return str(self.value)

    def __repr__(self):
        return f"RationalScalar({self.value})"


# ---------------------------------------------------------------------------
# functional surface


def from_rational(num: int, den: int, cfg, prec: int) -> ValuedScalar:
    return cfg.from_rational(num, den, prec)


def arith(op: str, a, b):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def valuation(a) -> float:
    return a.valuation()


def sample_integer(cfg, prec: int, seed) -> ValuedScalar:
    return cfg.sample_integer(prec, seed)


def agrees_with(x, q) -> bool:
    """Does the inexact ``x`` contain the exact rational ``q``?"""
    q = Fraction(q)
    if isinstance(x, RationalScalar):
        return x.value == q
    if isinstance(x, PAdicScalar):
        return fraction_valuation(q - x.lift(), x.field.p) >= x.abs_prec
    if x.val is None:
        return q == 0 or x.prec <= 0
    digits = [q] + [Fraction(0)] * (x.abs_prec - 1)
    mine = [Fraction(0)] * x.val + list(x.unit) if x.val >= 0 else None
    if mine is None:
        return False
    return digits[: x.abs_prec] == mine[: x.abs_prec]


def convert(x, field, rel: int | None = None):
    """Move a scalar into ``field``.

    Exact values entering an inexact field keep ``rel`` relative digits
    (default: the field's default precision).
    """
    if x.field == field:
        return x
    if isinstance(x, RationalScalar) or isinstance(x, (int, Fraction)):
        q = x.value if isinstance(x, RationalScalar) else Fraction(x)
        if field.exact:
            return field.from_fraction(q)
        return field.from_fraction_rel(q, rel or field.default_precision)
    if field.exact:
        if isinstance(x, PAdicScalar):
            return field.from_fraction(x.lift())
        raise TypeError("t-adic values have no exact rational twin")
    raise TypeError(f"cannot convert between {x.field} and {field}")


# ---------------------------------------------------------------------------
# text syntax

_RATIONAL = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(-?\d+)\s*)?$")
_DIGITS = re.compile(r"^\s*(-?\d+)\s*\*\s*p\s*\^\s*(-?\d+)\s*\+\s*O\(\s*p\s*\^\s*(-?\d+)\s*\)\s*$")
_ZERO = re.compile(r"^\s*O\(\s*([pt])\s*\^\s*(-?\d+)\s*\)\s*$")
_SERIES = re.compile(r"^\s*\[([^\]]*)\]\s*\*\s*t\s*\^\s*(-?\d+)\s*\+\s*O\(\s*t\s*\^\s*(-?\d+)\s*\)\s*$")


def parse_scalar(text: str, field, prec: int | None = None):
    """Parse ``"num/den"``, ``"u*p^v+O(p^N)"``, ``"O(p^N)"`` or a t-adic series."""
    m = _RATIONAL.match(text)
    if m:
        den = int(m.group(2)) if m.group(2) else 1
        return field.from_rational(int(m.group(1)), den, prec)
    m = _DIGITS.match(text)
    if m and getattr(field, "kind", None) == "p-adic":
        u, v, n = (int(g) for g in m.groups())
        return field.from_fraction(Fraction(u) * Fraction(field.p) ** v, n)
    m = _ZERO.match(text)
    if m and not field.exact and m.group(1) == field.symbol:
        return field.inexact_zero(int(m.group(2)))
    m = _SERIES.match(text)
    if m and getattr(field, "kind", None) == "t-adic":
        coeffs = [Fraction(c.strip()) for c in m.group(1).split(",") if c.strip()]
        return field.from_series(coeffs, int(m.group(2)), int(m.group(3)))
    raise ValueError(f"cannot parse scalar {text!r}")


def format_scalar(x) -> str:
    return str(x)
