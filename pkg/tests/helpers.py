"""Shared builders and the random-instance generator for the test suite."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from tropfglm.gb_oracle import NormalFormOracle, convert_gb, macaulay_gb, random_system
from tropfglm.polyring import Polynomial, TermOrder, mono_mul, variable
from tropfglm.quotient import GroebnerBasis, multiplication_matrices
from tropfglm.valued_field import FieldConfig, RationalField, agrees_with

DEGREE_CHOICES = {2: [(2, 2), (2, 3), (3, 3), (2, 4)], 3: [(2, 2, 2), (2, 2, 3)]}
PRIMES = (2, 3, 101)
N = 100


def poly(field, n, pairs):
    """``pairs`` of (rational-ish coefficient, exponent tuple)."""
    return Polynomial.from_pairs(n, [(field.from_fraction(Fraction(c)), tuple(m)) for c, m in pairs])


def basis(field, order, *polys):
    n = len(polys[0][0][1])
    return GroebnerBasis([poly(field, n, p) for p in polys], order)


def lift(x) -> Fraction:
    return x.lift() if hasattr(x, "lift") else Fraction(x.value)


def poly_agrees(f, g_exact) -> bool:
    """Every coefficient of the inexact ``f`` contains the exact one of ``g_exact``."""
    monos = set(f.terms) | set(g_exact.terms)
    for m in monos:
        q = g_exact.terms[m].value if m in g_exact.terms else Fraction(0)
        c = f.terms.get(m)
        if c is None:
            if q != 0:
                return False
            continue
        if not agrees_with(c, q):
            return False
    return True


def basis_agrees(G, G_exact) -> bool:
    if len(G.polys) != len(G_exact.polys):
        return False
    a = G.sorted().polys
    b = G_exact.sorted().polys
    return all(poly_agrees(f, g) for f, g in zip(a, b))


def matrix_agrees(M, M_exact) -> bool:
    return all(agrees_with(x, y.value) for r, s in zip(M, M_exact) for x, y in zip(r, s))


@dataclass
class Instance:
    seed: int
    p: int
    n: int
    degrees: tuple
    ord1: TermOrder
    ord2: TermOrder
    F: list
    G_exact: GroebnerBasis
    G: GroebnerBasis
    homogeneous: bool = False


def make_instance(seed: int, homogeneous: bool = False, weight_range=(-8, 8)) -> Instance:
    """Random zero-dimensional instance with an exact twin.

    Coefficients are small integers so the exact oracle stays cheap; the
    inexact copy of the source basis is taken at absolute precision ``N``.
    """
    rng = random.Random(seed)
    p = rng.choice(PRIMES)
    n = rng.choice((2, 3))
    degrees = rng.choice(DEGREE_CHOICES[n])
    Q = RationalField(p)
    if homogeneous:
        ord1 = TermOrder.tropical((0,) * n)
    else:
        ord1 = TermOrder.tropical([rng.randint(*weight_range) for _ in range(n)])
    ord2 = TermOrder.tropical([rng.randint(*weight_range) for _ in range(n)])
    F = random_system(Q, n, degrees, 1, rng, coeff_range=(-20, 20))
    if homogeneous:
        F = [Polynomial(n, {m: c for m, c in f.terms.items() if sum(m) == d}) for f, d in zip(F, degrees)]
    G_exact = macaulay_gb(F, ord1)
    G = convert_gb(G_exact, FieldConfig("p-adic", p, N), N)
    return Instance(seed, p, n, tuple(degrees), ord1, ord2, F, G_exact, G, homogeneous)


def oracle_columns_agree(q, G_exact) -> bool:
    oracle = NormalFormOracle(G_exact)
    n = q.n
    for i in range(n):
        for c, b in enumerate(q.basis):
            vec = oracle.vector(Polynomial(n, {mono_mul(b, variable(n, i)): G_exact.field.one()}))
            for r in range(q.delta):
                if not agrees_with(q.mult[i][r][c], vec[r].value):
                    return False
    return True
