"""Brute-force Groebner bases and normal forms from Macaulay matrices.

Everything here is slow on purpose.  For degree-compatible orders the row
space of all multiples ``x^b * g`` of degree at most ``bound`` is the
degree-``bound`` part of the ideal (``g`` running over a Groebner basis, or
over a generic system when ``bound`` reaches the Macaulay bound), so an
echelon form of that matrix yields both leading monomials and normal forms.
Feed it exact rationals and it is an oracle.
"""
from __future__ import annotations

import random

from .errors import BoundTooSmall, NotZeroDimensional
from .polyring import (
    Polynomial,
    TermOrder,
    degree,
    divides,
    is_minimal,
    mono_div,
    monomials_up_to,
    staircase,
)
from .quotient import GroebnerBasis, check_reduced
from .trop_linalg import MacaulayMatrix, tropical_row_echelon


def macaulay_bound(degrees, n: int | None = None) -> int:
    """``sum(d_i) - n + 1``."""
    n = len(degrees) if n is None else n
    return sum(degrees) - n + 1


def _field_of(F):
    for f in F:
        for c in f.terms.values():
            return c.field
    raise ValueError("all polynomials are zero")


def macaulay_rows(F, bound: int):
    """All multiples ``x^b * f`` with total degree at most ``bound``."""
    rows = []
    for f in F:
        if not f.terms:
            continue
        d = f.total_degree
        if d > bound:
            continue
        for b in monomials_up_to(f.n, bound - d):
            rows.append(f.mul_monomial(b))
    return rows


class _Echelon:
    """Echelon form of a Macaulay matrix with lookup by pivot monomial."""

    def __init__(self, polys, order: TermOrder, bound: int):
        self.order = order
        self.bound = bound
        n = polys[0].n
        self.n = n
        fld = _field_of(polys)
        self.field = fld
        cols = order.sort_monomials(monomials_up_to(n, bound), reverse=True)
        zero = fld.zero()
        mm = MacaulayMatrix([[p.terms.get(c, zero) for c in cols] for p in polys], cols)
        ech, self.report = tropical_row_echelon(mm, order, stable=False)
        self.pivots = {}
        for i, r in enumerate(ech.rows):
            if i < len(ech.col_labels) and not r[i].is_zero():
                lab = ech.col_labels[i]
                self.pivots[lab] = {m: c for m, c in zip(ech.col_labels, r) if not c.is_zero()}

    def reduce(self, f: Polynomial) -> Polynomial:
        out = dict(f.terms)
        for m, c in f.terms.items():
            if degree(m) > self.bound:
                raise BoundTooSmall(f"monomial {m} exceeds the degree bound {self.bound}")
        for lab, row in self.pivots.items():
            c = out.get(lab)
            if c is None or c.is_exact_zero():
                continue
            fct = c / row[lab]
            for m, v in row.items():
                if m == lab:
                    continue
                out[m] = out[m] - fct * v if m in out else -(fct * v)
            del out[lab]
        return Polynomial(f.n, out)


def macaulay_gb(F, order: TermOrder, degree_bound: int | None = None, retry: bool = True) -> GroebnerBasis:
    """Reduced monic Groebner basis of ``<F>`` from one Macaulay matrix.

    ``degree_bound`` defaults to the Macaulay bound of ``F``.  If the leading
    monomials miss a pure power of some variable the bound is raised once.
    """
    F = [f for f in F if f.terms]
    if not F:
        raise NotZeroDimensional("zero ideal")
    n = F[0].n
    if degree_bound is None:
        degree_bound = macaulay_bound([f.total_degree for f in F], n)
    if not order.degree_compatible:
        raise ValueError("the Macaulay oracle needs a degree-compatible order")
    bounds = [degree_bound, degree_bound + 1] if retry else [degree_bound]
    for b in bounds:
        rows = macaulay_rows(F, b)
        if not rows:
            continue
        ech = _Echelon(rows, order, b)
        lms = list(ech.pivots)
        if lms and all(divides(lm, (0,) * n) for lm in lms):
            return GroebnerBasis([Polynomial(n, {(0,) * n: ech.field.one()})], order)
        try:
            basis, _, D = staircase(lms, order, n)
        except NotZeroDimensional:
            continue
        if D > b:
            continue
        gens = is_minimal(lms)
        polys = []
        for lm in order.sort_monomials(gens):
            row = ech.pivots[lm]
            lead = row[lm]
            polys.append(Polynomial(n, {m: c / lead for m, c in row.items()}))
        return GroebnerBasis(polys, order)
    raise BoundTooSmall(
        f"staircase not stabilized at degree bound {bounds[-1]} (or the ideal is not zero-dimensional)"
    )


class NormalFormOracle:
    """Normal forms modulo a Groebner basis, via one Macaulay matrix."""

    def __init__(self, G: GroebnerBasis, degree_bound: int | None = None):
        self.G = G
        n = G.n
        self.basis, self.delta, self.D = staircase(G.leading_monomials(), G.order, n)
        if degree_bound is None:
            degree_bound = max(self.D, max(g.total_degree for g in G.polys)) + 1
        self.bound = degree_bound
        self.bset = set(self.basis)
        self._ech = None
        self._memo = {}
        if G.order.degree_compatible:
            self._ech = _Echelon(macaulay_rows(G.polys, degree_bound), G.order, degree_bound)

    def normal_form(self, f: Polynomial) -> Polynomial:
        """Normal form of ``f``; monomials above the bound go through ``NF(x_i NF(m / x_i))``."""
        low = {m: c for m, c in f.terms.items() if degree(m) <= self.bound}
        r = self._reduce(Polynomial(f.n, low))
        for m, c in f.terms.items():
            if degree(m) > self.bound:
                r = r + self._monomial_nf(m).scale(c)
        return r

    def _reduce(self, f: Polynomial) -> Polynomial:
        if self._ech is not None:
            r = self._ech.reduce(f)
        else:
            r = divide(f, self.G)
        for m, c in r.terms.items():
            if m not in self.bset and not c.is_zero():
                raise BoundTooSmall(f"remainder keeps {m}; raise the degree bound")
        return r

    def _monomial_nf(self, m) -> Polynomial:
        if m in self._memo:
            return self._memo[m]
        n = len(m)
        if degree(m) <= self.bound:
            r = self._reduce(Polynomial(n, {m: self.G.field.one()}))
        else:
            i = next(k for k in range(n) if m[k])
            v = tuple(1 if k == i else 0 for k in range(n))
            r = self._reduce(self._monomial_nf(mono_div(m, v)).mul_monomial(v))
        self._memo[m] = r
        return r

    def vector(self, f: Polynomial) -> list:
        r = self.normal_form(f)
        zero = self.G.field.zero()
        return [r.terms.get(b, zero) for b in self.basis]


def macaulay_normal_form(G: GroebnerBasis, target: Polynomial, degree_bound: int | None = None) -> Polynomial:
    if degree_bound is not None and target.total_degree >= degree_bound:
        raise BoundTooSmall("target degree must be below the degree bound")
    return NormalFormOracle(G, degree_bound).normal_form(target)


def divide(f: Polynomial, G: GroebnerBasis) -> Polynomial:
    """Remainder of multivariate division by ``G`` (classical orders)."""
    order = G.order
    lead = [(g.leading_term(order), g) for g in G.polys]
    rem = {}
    cur = Polynomial(f.n, dict(f.terms))
    while cur.terms and not cur.is_zero():
        t = cur.leading_term(order)
        for lt, g in lead:
            if divides(lt.mono, t.mono):
                q = mono_div(t.mono, lt.mono)
                cur = cur - g.mul_monomial(q).scale(t.coeff / lt.coeff)
                cur.terms.pop(t.mono, None)
                break
        else:
            rem[t.mono] = t.coeff
            del cur.terms[t.mono]
    return Polynomial(f.n, rem)


def verify_reduced_gb(G_claim: GroebnerBasis, G_source: GroebnerBasis, degree_bound: int | None = None):
    """``(True, None)`` when ``G_claim`` is a reduced monic basis of the source ideal.

    Otherwise ``(False, witness)`` naming the first failed check.
    """
    w = check_reduced(G_claim)
    if w is not None:
        return False, f"not reduced: {w}"
    lms = G_claim.leading_monomials()
    if len(is_minimal(lms)) != len(lms):
        return False, "leading monomials are not minimal generators"
    try:
        _, d_claim, _ = staircase(lms, G_claim.order, G_claim.n)
    except NotZeroDimensional as e:
        return False, f"claimed basis: {e}"
    oracle = NormalFormOracle(G_source, degree_bound)
    if d_claim != oracle.delta:
        return False, f"staircase size {d_claim} differs from {oracle.delta}"
    for g in G_claim.polys:
        r = oracle.normal_form(g)
        if not r.is_zero():
            return False, f"element with leading monomial {g.leading_monomial(G_claim.order)} has nonzero normal form"
    return True, None


def random_system(cfg, n: int, degrees, prec: int, seed=None, coeff_range=None):
    """Dense random polynomials of the given total degrees.

    Coefficients come from :meth:`sample_integer` (Haar measure on the
    valuation ring truncated at ``prec``) or, with ``coeff_range=(a, b)``,
    uniformly from the integers in ``[a, b]``.
    """
    if not degrees:
        raise ValueError("degrees must be nonempty")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    out = []
    for d in degrees:
        terms = {}
        for m in monomials_up_to(n, d):
            if coeff_range is None:
                c = cfg.sample_integer(prec, rng)
            else:
                c = cfg.from_rational(rng.randint(*coeff_range), 1, prec)
            if not c.is_exact_zero():
                terms[m] = c
        out.append(Polynomial(n, terms))
    return out


def convert_gb(G: GroebnerBasis, field, prec: int | None = None) -> GroebnerBasis:
    """Copy of ``G`` with coefficients moved to ``field`` at absolute precision ``prec``."""
    polys = [convert_poly(g, field, prec) for g in G.polys]
    return GroebnerBasis(polys, G.order, G.reduced)


def convert_poly(f: Polynomial, field, prec: int | None = None) -> Polynomial:
    from .valued_field import RationalScalar

    terms = {}
    for m, c in f.terms.items():
        if isinstance(c, RationalScalar) and not field.exact:
            terms[m] = field.from_fraction(c.value, prec)
        elif not isinstance(c, RationalScalar) and field.exact:
            terms[m] = field.from_fraction(c.lift())
        else:
            terms[m] = c
    return Polynomial(f.n, terms)


def random_order(n: int, rng: random.Random, low: int = -8, high: int = 8, tiebreak: str = "grevlex") -> TermOrder:
    return TermOrder.tropical([rng.randint(low, high) for _ in range(n)], tiebreak)

