"""Monomials, sparse polynomials and tropical / classical term orders.

Monomials are plain tuples of exponents.  A :class:`Polynomial` maps
monomials to scalars of one field; exact zeros are never stored.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .errors import NotZeroDimensional, PrecisionExhausted, ZeroPolynomial

Monomial = tuple


def degree(m: Monomial) -> int:
    return sum(m)


def divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def variable(n: int, i: int) -> Monomial:
    return tuple(1 if k == i else 0 for k in range(n))


def monomials_up_to(n: int, d: int) -> list[Monomial]:
    """All monomials in ``n`` variables of total degree at most ``d``."""
    out = []

    def rec(prefix, left, k):
        if k == n - 1:
            for e in range(left + 1):
                out.append(prefix + (e,))
            return
        for e in range(left + 1):
            rec(prefix + (e,), left - e, k + 1)

    if n == 0:
        return [()]
    rec((), d, 0)
    return out


class Term(NamedTuple):
    coeff: object
    mono: Monomial


@dataclass(frozen=True)
class TermOrder:
    """Tropical order (``weight`` given) or classical monomial order.

    ``tiebreak`` is ``"grevlex"`` or ``"lex"``.  ``perm`` lists the variable
    indices from largest to smallest (default ``0 > 1 > ... > n-1``).

    For the tropical order ``a x^u < b x^v`` when ``|u| < |v|``, or when the
    degrees agree and ``val(a) + w.u > val(b) + w.v``, or when both agree and
    ``x^u`` is smaller for the tie-break order.
    """

    weight: tuple | None = None
    tiebreak: str = "grevlex"
    perm: tuple | None = None

    def __post_init__(self):
        if self.tiebreak not in ("grevlex", "lex"):
            raise ValueError(f"unknown monomial order {self.tiebreak!r}")
        if self.weight is not None:
            w = tuple(self.weight)
            if any(int(x) != x for x in w):
                raise ValueError("weights must be integers")
            object.__setattr__(self, "weight", tuple(int(x) for x in w))
        if self.perm is not None:
            object.__setattr__(self, "perm", tuple(self.perm))

    @classmethod
    def tropical(cls, weight, tiebreak="grevlex", perm=None):
        return cls(tuple(weight), tiebreak, perm)

    @classmethod
    def grevlex(cls, perm=None):
        return cls(None, "grevlex", perm)

    @classmethod
    def lex(cls, perm=None):
        return cls(None, "lex", perm)

    @property
    def is_tropical(self) -> bool:
        return self.weight is not None

    @property
    def degree_compatible(self) -> bool:
        return self.is_tropical or self.tiebreak == "grevlex"

    def _permuted(self, m):
        return m if self.perm is None else tuple(m[i] for i in self.perm)

    def tie_key(self, m: Monomial) -> tuple:
        e = self._permuted(m)
        if self.tiebreak == "lex":
            return e
        return (sum(e), tuple(-x for x in reversed(e)))

    def monomial_key(self, m: Monomial) -> tuple:
        """Key of the term ``1 * m``; larger key means larger term."""
        return self.term_key_from_val(0, m)

    def term_key_from_val(self, v, m: Monomial) -> tuple:
        if self.weight is None:
            return self.tie_key(m)
        wd = sum(w * e for w, e in zip(self.weight, m))
        return (sum(m), -(v + wd), self.tie_key(m))

    def term_key(self, coeff, m: Monomial) -> tuple:
        if self.weight is None:
            return self.tie_key(m)
        if coeff.is_zero() and not coeff.is_exact_zero():
            raise PrecisionExhausted(f"cannot rank an inexact zero coefficient on {m}")
        return self.term_key_from_val(coeff.valuation(), m)

    def bound_key(self, coeff, m: Monomial) -> tuple:
        """Largest key an inexact zero ``coeff`` could still reach."""
        return self.term_key_from_val(coeff.abs_prec, m)

    def compare_terms(self, s: Term, t: Term) -> int:
        ks, kt = self.term_key(s.coeff, s.mono), self.term_key(t.coeff, t.mono)
        return (ks > kt) - (ks < kt)

    def sort_monomials(self, monos: Iterable[Monomial], reverse: bool = False) -> list:
        return sorted(monos, key=self.monomial_key, reverse=reverse)


def compare_terms(order: TermOrder, s: Term, t: Term) -> int:
    """-1, 0 or 1 as ``s`` is smaller, equal (up to a unit) or greater than ``t``."""
    return order.compare_terms(s, t)


def greatest_term(order: TermOrder, items, strict: bool = False):
    """Index of the greatest term among ``(index, coeff, mono)`` items.

    Zero-like coefficients are skipped; returns ``None`` if all are zero-like.
    With ``strict`` (tropical orders only) an inexact zero that might still
    dominate the winner raises :class:`PrecisionExhausted`.  Ties keep the
    first item.
    """
    best = None
    best_key = None
    inexact = []
    for idx, c, m in items:
        if c.is_zero():
            if not c.is_exact_zero():
                inexact.append((c, m))
            continue
        k = order.term_key(c, m)
        if best_key is None or k > best_key:
            best, best_key = idx, k
    if best is None:
        return None
    if strict and order.weight is not None:
        for c, m in inexact:
            if order.bound_key(c, m) > best_key:
                raise PrecisionExhausted(f"inexact zero on {m} may dominate the leading term")
    return best


class Polynomial:
    """Sparse polynomial ``{monomial: coefficient}`` in ``n`` variables."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        self.n = n
        self.terms = {m: c for m, c in (terms or {}).items() if not c.is_exact_zero()}

    @classmethod
    def from_pairs(cls, n, pairs):
        out = {}
        for c, m in pairs:
            m = tuple(m)
            out[m] = out[m] + c if m in out else c
        return cls(n, out)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.terms.values())

    def monomials(self):
        return list(self.terms)

    def coefficient(self, m, default=None):
        return self.terms.get(m, default)

    @property
    def total_degree(self) -> int:
        return max((degree(m) for m in self.terms), default=-1)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return Polynomial(self.n, out)

    def __neg__(self):
        return Polynomial(self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Polynomial":
        return Polynomial(self.n, {m: c * a for m, a in self.terms.items()})

    def mul_monomial(self, mono) -> "Polynomial":
        return Polynomial(self.n, {mono_mul(m, mono): c for m, c in self.terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                c = c1 * c2
                out[m] = out[m] + c if m in out else c
        return Polynomial(self.n, out)

    def leading_term(self, order: TermOrder, monic: bool = False, strict: bool = False) -> Term:
        items = [(m, c, m) for m, c in self.terms.items()]
        if not items:
            raise ZeroPolynomial("leading term of the zero polynomial")
        m = greatest_term(order, items, strict)
        if m is None:
            raise ZeroPolynomial("all coefficients are zero at working precision")
        c = self.terms[m]
        if monic:
            c = c / c
        return Term(c, m)

    def leading_monomial(self, order: TermOrder) -> Monomial:
        return self.leading_term(order).mono

    def sorted_terms(self, order: TermOrder) -> list[Term]:
        """Terms in descending order, ranked by monomial where a coefficient is zero-like."""
        def key(item):
            m, c = item
            if c.is_zero():
                return order.monomial_key(m)
            return order.term_key(c, m)

        return [Term(c, m) for m, c in sorted(self.terms.items(), key=key, reverse=True)]

    def __repr__(self):
        body = " + ".join(f"({c})*{m}" for m, c in self.terms.items())
        return f"Polynomial({body or '0'})"


def leading_term(order: TermOrder, f: Polynomial) -> Term:
    return f.leading_term(order)


def is_minimal(lms) -> list:
    """Minimal generators among the monomials ``lms``."""
    lms = set(lms)
    return [m for m in lms if not any(o != m and divides(o, m) for o in lms)]


def staircase(lms, order: TermOrder | None = None, n: int | None = None):
    """Monomials outside the ideal generated by ``lms``.

    Returns ``(basis, delta, D)`` with ``basis`` ascending for ``order``
    (grevlex by default) and ``D`` one more than the largest basis degree.
    """
    lms = [tuple(m) for m in lms]
    if n is None:
        if not lms:
            raise NotZeroDimensional("empty set of leading monomials")
        n = len(lms[0])
    for i in range(n):
        if not any(m[i] > 0 and sum(m) == m[i] for m in lms):
            raise NotZeroDimensional(f"no pure power of variable {i} among the leading monomials")
    inside = lambda m: any(divides(g, m) for g in lms)
    start = (0,) * n
    if inside(start):
        return [], 0, 0
    seen = {start}
    queue = deque([start])
    while queue:
        m = queue.popleft()
        for i in range(n):
            c = m[:i] + (m[i] + 1,) + m[i + 1:]
            if c not in seen and not inside(c):
                seen.add(c)
                queue.append(c)
    order = order or TermOrder.grevlex()
    basis = order.sort_monomials(seen)
    return basis, len(basis), 1 + max(degree(m) for m in basis)
