"""Quotient-ring data: staircase, multiplication matrices and variable predicates.

Matrices here are lists of rows.  ``M[r][c]`` is the coefficient of the
basis monomial ``basis[r]`` in the normal form of ``x_i * basis[c]``.
"""
from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field

from .errors import (
    NotReduced,
    NotSemiStable,
    NotUnimodular,
    NotZeroDimensional,
    SamplingFailed,
    TropFGLMError,
)
from .polyring import (
    Polynomial,
    TermOrder,
    degree,
    divides,
    is_minimal,
    mono_div,
    mono_mul,
    staircase,
    variable,
)
from .valued_field import agrees_with
from .trop_linalg import INF, MacaulayMatrix, PrecisionReport, tropical_row_echelon


@dataclass
class GroebnerBasis:
    polys: list
    order: TermOrder
    reduced: bool = True

    @property
    def n(self) -> int:
        return self.polys[0].n if self.polys else 0

    @property
    def field(self):
        for g in self.polys:
            for c in g.terms.values():
                return c.field
        return None

    def leading_monomials(self) -> list:
        return [g.leading_monomial(self.order) for g in self.polys]

    def by_leading_monomial(self) -> dict:
        return {g.leading_monomial(self.order): g for g in self.polys}

    def sorted(self) -> "GroebnerBasis":
        """Copy with elements sorted by ascending leading monomial."""
        key = lambda g: self.order.monomial_key(g.leading_monomial(self.order))
        return GroebnerBasis(sorted(self.polys, key=key), self.order, self.reduced)


def check_reduced(G: GroebnerBasis):
    """Return ``None`` when ``G`` is reduced and monic, else a witness string."""
    lms = []
    for g in G.polys:
        if g.is_zero():
            return "zero element"
        lt = g.leading_term(G.order)
        if not agrees_with(lt.coeff, 1):
            return f"leading coefficient of {lt.mono} is {lt.coeff}, not 1"
        lms.append(lt.mono)
    if len(set(lms)) != len(lms):
        return "repeated leading monomial"
    for g, lm in zip(G.polys, lms):
        for m, c in g.terms.items():
            if c.is_zero():
                continue
            for o in lms:
                if divides(o, m) and (m != lm or o != lm):
                    return f"term {m} of the element with leading monomial {lm} is divisible by {o}"
    return None


def require_reduced(G: GroebnerBasis):
    w = check_reduced(G)
    if w is not None:
        raise NotReduced(w)


@dataclass
class QuotientData:
    basis: list
    delta: int
    Dbound: int
    mult: list
    order: TermOrder | None = None
    report: PrecisionReport | None = None
    stats: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.mult)

    def index(self) -> dict:
        return {m: k for k, m in enumerate(self.basis)}


def _precision_bound(n, delta, D, xi, N):
    nd = n * delta
    s = sum(nd ** (2 * k) for k in range(D + 1))
    return N + s * xi, nd ** D * xi


def _gb_stats(G):
    vmin, pmin = INF, INF
    for g in G.polys:
        for c in g.terms.values():
            if c.is_exact_zero():
                continue
            pmin = min(pmin, c.abs_prec)
            if not c.is_zero():
                vmin = min(vmin, c.valuation())
    return vmin, pmin


def _matrix_stats(mats):
    vmin, pmin = INF, INF
    for M in mats:
        for row in M:
            for e in row:
                if e.is_exact_zero():
                    continue
                pmin = min(pmin, e.abs_prec)
                if not e.is_zero():
                    vmin = min(vmin, e.valuation())
    return vmin, pmin


def _quotient_report(G, n, delta, D, mats):
    xi, N = _gb_stats(G)
    xi = min(xi, 0)
    pred, vbound = _precision_bound(n, delta, D, xi, N)
    vout, pout = _matrix_stats(mats)
    return PrecisionReport(
        min_valuation=xi,
        min_abs_precision=pout,
        predicted_bound=pred,
        input_precision=N,
        rank=delta,
        min_output_valuation=vout,
        extra={"valuation_bound": vbound},
    )


def multiplication_matrices(G: GroebnerBasis, check: bool = True) -> QuotientData:
    """Matrices of multiplication by each variable in the staircase basis.

    Border monomials in the staircase give unit columns, those in ``LT(G)``
    are read off ``G`` and the remaining ones are computed degree by degree
    from stacked multiples ``x_i g`` and one tropical echelon per degree.
    ``stats["batches"]`` records each degree's monomials and echelon calls.
    """
    if check:
        require_reduced(G)
    order = G.order
    n = G.n
    by_lm = G.by_leading_monomial()
    lts = set(by_lm)
    basis, delta, D = staircase(lts, order, n)
    fld = G.field
    zero = fld.zero()
    idx = {m: k for k, m in enumerate(basis)}
    bset = set(basis)
    mats = [[[zero] * delta for _ in range(delta)] for _ in range(n)]
    L = {mono_mul(variable(n, i), b) for i in range(n) for b in basis}
    Lbar = {m for m in L if m not in bset and m not in lts}

    def fill(i, m, coeffs):
        c = idx[mono_div(m, variable(n, i))]
        for b, v in coeffs.items():
            mats[i][idx[b]][c] = v

    for m in L:
        for i in range(n):
            if m[i] == 0:
                continue
            src = mono_div(m, variable(n, i))
            if src not in bset:
                continue
            if m in bset:
                mats[i][idx[m]][idx[src]] = fld.one()
            elif m in lts:
                g = by_lm[m]
                fill(i, m, {b: -c for b, c in g.terms.items() if b != m})

    # rows of the stacked matrix: dict monomial -> scalar; pivot monomial per row
    rows = []
    pivot_of = {}
    batches = []
    for d in sorted({degree(m) for m in Lbar}):
        batch = sorted((m for m in Lbar if degree(m) == d), key=order.monomial_key)
        new = []
        for m in batch:
            new.append(_multiple_with_lt(m, n, rows, pivot_of, by_lm))
        _close_reducers(new, rows, pivot_of, by_lm, bset, order, n)
        rows.extend(new)
        cols = _column_labels(rows, order)
        mm = MacaulayMatrix([[r.get(c, zero) for c in cols] for r in rows], cols)
        ech, rep = tropical_row_echelon(mm, order, stable=True)
        rows, pivot_of = _rows_from_echelon(ech)
        batches.append({"degree": d, "monomials": batch, "echelon_calls": 1, "rows": len(rows), "rank": rep.rank})
        for m in batch:
            s = pivot_of.get(m)
            if s is None:
                raise TropFGLMError(f"no row with leading monomial {m} after echelon")
            row = rows[s]
            lead = row[m]
            tail = {}
            for b, v in row.items():
                if b == m or v.is_zero():
                    continue
                if b not in bset:
                    raise TropFGLMError(f"row for {m} still contains the non-staircase monomial {b}")
                tail[b] = -(v / lead)
            for i in range(n):
                if m[i] and mono_div(m, variable(n, i)) in bset:
                    fill(i, m, tail)
    report = _quotient_report(G, n, delta, D, mats)
    return QuotientData(basis, delta, D, mats, order, report, {"batches": batches})


def _multiple_with_lt(m, n, rows, pivot_of, by_lm):
    """``x_i * g`` with leading monomial ``m``; rows of the matrix preferred."""
    for i in range(n):
        if m[i] == 0:
            continue
        s = pivot_of.get(mono_div(m, variable(n, i)))
        if s is not None:
            return _shift(rows[s], variable(n, i))
    for i in range(n):
        if m[i] == 0:
            continue
        g = by_lm.get(mono_div(m, variable(n, i)))
        if g is not None:
            return _shift(g.terms, variable(n, i))
    raise TropFGLMError(f"cannot write {m} as a variable times a known leading monomial")


def _shift(terms, v):
    return {mono_mul(m, v): c for m, c in terms.items() if not c.is_exact_zero()}


def _leading(row, order):
    best, key = None, None
    for m, c in row.items():
        if c.is_zero():
            continue
        k = order.term_key(c, m)
        if key is None or k > key:
            best, key = m, k
    return best


def _close_reducers(new, rows, pivot_of, by_lm, bset, order, n):
    have = set(pivot_of)
    for r in new:
        lm = _leading(r, order)
        if lm is not None:
            have.add(lm)
    seen = set()
    while True:
        need = set()
        for r in rows + new:
            for m, c in r.items():
                if not c.is_zero() and m not in bset and m not in have and m not in seen:
                    need.add(m)
        if not need:
            return
        for m in sorted(need, key=order.monomial_key, reverse=True):
            seen.add(m)
            if m in by_lm:
                r = dict(by_lm[m].terms)
            else:
                try:
                    r = _multiple_with_lt(m, n, rows, pivot_of, by_lm)
                except TropFGLMError:
                    r = _multiple_with_lt_new(m, n, new, order, by_lm)
            new.append(r)
            have.add(m)


def _multiple_with_lt_new(m, n, new, order, by_lm):
    for i in range(n):
        if m[i] == 0:
            continue
        src = mono_div(m, variable(n, i))
        for r in new:
            if _leading(r, order) == src:
                return _shift(r, variable(n, i))
    raise TropFGLMError(f"no reducer available for {m}")


def _column_labels(rows, order):
    mons = set()
    for r in rows:
        mons.update(m for m, c in r.items() if not c.is_exact_zero())
    return order.sort_monomials(mons, reverse=True)


def _rows_from_echelon(ech):
    rows, pivot_of = [], {}
    for i, r in enumerate(ech.rows):
        d = {m: c for m, c in zip(ech.col_labels, r) if not c.is_exact_zero()}
        if i < len(ech.col_labels) and not r[i].is_zero():
            pivot_of[ech.col_labels[i]] = len(rows)
            rows.append(d)
        elif any(not c.is_zero() for c in d.values()):
            rows.append(d)
    return rows, pivot_of


# ---------------------------------------------------------------------------
# semi-stable fast path


def _ideal_monomials(lms, D):
    """Monomials of the ideal generated by ``lms`` with degree at most ``D``."""
    n = len(lms[0])
    from .polyring import monomials_up_to

    return [m for m in monomials_up_to(n, D) if any(divides(g, m) for g in lms)]


def _exchange(m, k, j):
    return tuple(e + (1 if t == k else 0) - (1 if t == j else 0) for t, e in enumerate(m))


def semi_stability_witness(lms, var_index: int):
    """First ``(m, k)`` with ``x_var | m`` and ``(x_k/x_var) m`` outside the ideal, else ``None``."""
    lms = is_minimal([tuple(m) for m in lms])
    n = len(lms[0])
    _, _, D = staircase(lms, None, n)
    inside = lambda m: any(divides(g, m) for g in lms)
    for m in sorted(_ideal_monomials(lms, D + 1)):
        if m[var_index] == 0:
            continue
        for k in range(n):
            if k == var_index:
                continue
            e = _exchange(m, k, var_index)
            if not inside(e):
                return m, k
    return None


def is_semi_stable(lms, var_index: int | None = None) -> bool:
    """Is the monomial ideal semi-stable for ``x_var`` (default: last variable)?"""
    lms = [tuple(m) for m in lms]
    if var_index is None:
        var_index = len(lms[0]) - 1
    return semi_stability_witness(lms, var_index) is None


@dataclass
class BorelResult:
    fixed: bool
    witness: tuple | None = None
    small_characteristic: bool = False

    def __bool__(self):
        return self.fixed


def is_borel_fixed(lms, cfg=None) -> BorelResult:
    """Exchange criterion: ``(x_i/x_j) m`` stays in the ideal for ``i < j``.

    The witness is ``(m, i, j, exchanged)``.  ``small_characteristic`` is set
    when ``p`` is below the largest generator degree, where the combinatorial
    test may not describe the tropical Borel action.
    """
    lms = is_minimal([tuple(m) for m in lms])
    n = len(lms[0])
    _, _, D = staircase(lms, None, n)
    dmax = max(degree(m) for m in lms)
    p = getattr(cfg, "p", None)
    small = p is not None and p < dmax
    if small:
        warnings.warn(f"p={p} is below the generator degree {dmax}; Borel test is only combinatorial")
    inside = lambda m: any(divides(g, m) for g in lms)
    for m in sorted(_ideal_monomials(lms, max(D, dmax))):
        for j in range(n):
            if m[j] == 0:
                continue
            for i in range(j):
                e = _exchange(m, i, j)
                if not inside(e):
                    return BorelResult(False, (m, i, j, e), small)
    return BorelResult(True, None, small)


def multiplication_matrix_semistable(G: GroebnerBasis, var_index: int | None = None, check: bool = True):
    """Multiplication by ``x_var`` read off ``G``; only negations are performed."""
    if check:
        require_reduced(G)
    n = G.n
    if var_index is None:
        var_index = n - 1
    by_lm = G.by_leading_monomial()
    lts = list(by_lm)
    w = semi_stability_witness(lts, var_index)
    if w is not None:
        m, k = w
        raise NotSemiStable(f"{m} times x_{k}/x_{var_index} leaves the leading ideal")
    basis, delta, _ = staircase(lts, G.order, n)
    fld = G.field
    zero = fld.zero()
    one = fld.one()
    idx = {m: k for k, m in enumerate(basis)}
    M = [[zero] * delta for _ in range(delta)]
    v = variable(n, var_index)
    for c, b in enumerate(basis):
        m = mono_mul(v, b)
        if m in idx:
            M[idx[m]][c] = one
        elif m in by_lm:
            for t, a in by_lm[m].terms.items():
                if t != m:
                    M[idx[t]][c] = -a
        else:
            raise NotSemiStable(f"{m} is neither in the staircase nor a leading monomial of G")
    return M


def nf_variables(G: GroebnerBasis) -> list:
    """Normal form of each variable as a vector over the staircase basis."""
    n = G.n
    by_lm = G.by_leading_monomial()
    basis, delta, _ = staircase(list(by_lm), G.order, n)
    fld = G.field
    zero = fld.zero()
    idx = {m: k for k, m in enumerate(basis)}
    out = []
    for i in range(n):
        v = variable(n, i)
        vec = [zero] * delta
        if v in idx:
            vec[idx[v]] = fld.one()
        elif v in by_lm:
            for t, a in by_lm[v].terms.items():
                if t != v:
                    vec[idx[t]] = -a
        else:
            raise NotZeroDimensional(f"x_{i} is neither in the staircase nor a leading monomial")
        out.append(vec)
    return out


# ---------------------------------------------------------------------------
# changes of variables


def _det(M):
    """Determinant by fraction-free expansion along the first row (small n)."""
    n = len(M)
    if n == 1:
        return M[0][0]
    total = None
    for j in range(n):
        if M[0][j].is_exact_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        t = M[0][j] * _det(minor)
        if j % 2:
            t = -t
        total = t if total is None else total + t
    return total if total is not None else M[0][0].field.zero()


def determinant(M):
    return _det(M)


def apply_change_of_variables(F, eta):
    """Substitute ``x_j -> sum_k eta[k][j] x_k`` in every polynomial.

    A warning of category :class:`NotUnimodular` is issued when the
    determinant of ``eta`` is not a unit of the valuation ring.
    """
    n = len(eta)
    det = _det(eta)
    if det.is_zero() or det.valuation() != 0:
        warnings.warn("change of variables is not in GL_n of the valuation ring", NotUnimodular)
    images = []
    for j in range(n):
        terms = {}
        for k in range(n):
            if not eta[k][j].is_exact_zero():
                terms[variable(n, k)] = eta[k][j]
        images.append(Polynomial(n, terms))
    out = []
    for f in F:
        acc = Polynomial(n)
        for m, c in f.terms.items():
            t = Polynomial(n, {(0,) * n: c})
            for j, e in enumerate(m):
                for _ in range(e):
                    t = t * images[j]
            acc = acc + t
        out.append(acc)
    return out


def random_unimodular(n: int, cfg, prec: int, seed=None):
    """Random matrix over the valuation ring with unit determinant."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    for _ in range(100):
        M = [[cfg.sample_integer(prec, rng) for _ in range(n)] for _ in range(n)]
        d = _det(M)
        if not d.is_zero() and d.valuation() == 0:
            return M
    raise SamplingFailed("no unimodular matrix after 100 attempts")


def matmul(A, B):
    """Product of two matrices given as lists of rows."""
    zero = None
    out = []
    for row in A:
        new = []
        for j in range(len(B[0])):
            acc = None
            for k, a in enumerate(row):
                b = B[k][j]
                if a.is_exact_zero() or b.is_exact_zero():
                    if zero is None:
                        zero = (a if a.is_exact_zero() else b).field.zero()
                    continue
                t = a * b
                acc = t if acc is None else acc + t
            if acc is None:
                acc = zero if zero is not None else row[0].field.zero()
            new.append(acc)
        out.append(new)
    return out
