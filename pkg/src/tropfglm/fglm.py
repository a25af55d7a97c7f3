"""Change of ordering from multiplication matrices.

Three engines: the tropical FGLM with its degree-by-degree column
reduction, the classical next-monomial FGLM, and the shape-position
shortcut that only needs the matrix of the last variable.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    InternalDegreeOverflow,
    NotSemiStable,
    NotShapePosition,
    PrecisionExhausted,
    TropFGLMError,
)
from .polyring import Polynomial, TermOrder, degree, divides, mono_div, mono_mul, staircase, variable
from .quotient import (
    GroebnerBasis,
    QuotientData,
    is_semi_stable,
    multiplication_matrices,
    multiplication_matrix_semistable,
    nf_variables,
    require_reduced,
)
from .valued_field import agrees_with
from .trop_linalg import INF, MacaulayMatrix, PrecisionReport, reduce_columns, smith_valuations


def _matvec(M, v, zero):
    out = []
    for row in M:
        acc = zero
        for a, b in zip(row, v):
            if a.is_exact_zero() or b.is_exact_zero():
                continue
            acc = acc + a * b
        out.append(acc)
    return out


def _field(q: QuotientData):
    for M in q.mult:
        for row in M:
            for e in row:
                return e.field
    raise ValueError("empty quotient")


def _unit_vector(q, fld, m):
    v = [fld.zero()] * q.delta
    v[q.basis.index(m)] = fld.one()
    return v


@dataclass
class FGLMState:
    """Working data of the tropical engine; ``nf`` keeps the untouched columns."""

    L: list
    cols: list = field(default_factory=list)
    labels: list = field(default_factory=list)
    pcols: list = field(default_factory=list)
    nf: dict = field(default_factory=dict)
    G_out: list = field(default_factory=list)
    lms: list = field(default_factory=list)
    emitted: list = field(default_factory=list)
    order: list = field(default_factory=list)
    d: int = 0
    created: int = 0


def fglm_tropical(q: QuotientData, ord2: TermOrder, stats: dict | None = None) -> GroebnerBasis:
    """Reduced monic basis of the ideal for the degree-compatible ``ord2``.

    Monomials of ``L`` are added one degree at a time as columns of normal
    forms, the whole matrix is column reduced, and each new column that
    vanishes yields ``sum_g P[g, a] x^g`` with leading term ``x^a``.
    """
    if not ord2.degree_compatible:
        raise ValueError("the tropical engine needs a degree-compatible target order")
    n = q.n
    fld = _field(q)
    zero = fld.zero()
    one = (0,) * n
    st = FGLMState(L=[one])
    st.nf[one] = _unit_vector(q, fld, one)
    while st.L:
        if st.d > q.delta:
            raise InternalDegreeOverflow(f"degree {st.d} exceeds delta={q.delta} with candidates left")
        batch = ord2.sort_monomials(m for m in st.L if degree(m) == st.d)
        st.L = [m for m in st.L if degree(m) != st.d]
        new = []
        for m in batch:
            if m not in st.nf:
                st.nf[m] = _nf_from_parent(q, st.nf, m, zero)
            st.cols.append(list(st.nf[m]))
            st.labels.append(m)
            st.pcols.append({m: fld.one()})
            st.created += 1
            st.order.append(m)
            new.append(m)
        reduce_columns(st.cols, st.labels, st.pcols, ord2, fld)
        keep, vanished = [], []
        new_set = set(new)
        for k, m in enumerate(st.labels):
            if all(e.is_zero() for e in st.cols[k]):
                if m not in new_set:
                    raise TropFGLMError(f"column {m} of an earlier degree vanished")
                terms = {g: c for g, c in st.pcols[k].items() if not c.is_exact_zero()}
                st.G_out.append(Polynomial(n, terms))
                st.lms.append(m)
                st.emitted.append((m, st.pcols[k]))
                vanished.append(m)
            else:
                keep.append(k)
        st.cols = [st.cols[k] for k in keep]
        st.labels = [st.labels[k] for k in keep]
        st.pcols = [st.pcols[k] for k in keep]
        st.L = [m for m in st.L if not any(divides(g, m) for g in vanished)]
        known = set(st.L) | set(st.labels)
        for m in new:
            if m in vanished:
                continue
            for i in range(n):
                c = mono_mul(m, variable(n, i))
                if c in known or any(divides(g, c) for g in st.lms):
                    continue
                known.add(c)
                st.L.append(c)
        st.d += 1
    if stats is not None:
        stats["columns_created"] = st.created
        pc = dict(zip(st.labels, st.pcols))
        pc.update(st.emitted)
        labs = st.order
        stats["final_P"] = MacaulayMatrix([[pc[c].get(r, zero) for c in labs] for r in labs], list(labs), list(labs))
        stats["final_M"] = MacaulayMatrix(
            [[col[r] for col in st.cols] for r in range(q.delta)], list(st.labels), list(q.basis)
        )
        stats["degrees"] = st.d
    polys = [_monic(g, ord2) for g in st.G_out]
    return GroebnerBasis(polys, ord2).sorted()


def _nf_from_parent(q, nf, m, zero):
    n = len(m)
    for i in range(n):
        if m[i] == 0:
            continue
        parent = mono_div(m, variable(n, i))
        if parent in nf:
            return _matvec(q.mult[i], nf[parent], zero)
    raise TropFGLMError(f"no known divisor of {m}")


def _monic(g: Polynomial, order: TermOrder) -> Polynomial:
    lt = g.leading_term(order)
    if agrees_with(lt.coeff, 1):
        return g
    c = lt.coeff
    return Polynomial(g.n, {m: (v.field.one() if m == lt.mono else v / c) for m, v in g.terms.items()})


# ---------------------------------------------------------------------------
# classical engine


class _Eliminator:
    """Incremental elimination keeping each stored vector's combination."""

    def __init__(self, fld):
        self.fld = fld
        self.vecs = []
        self.pivots = []
        self.combos = []

    def reduce(self, v, combo):
        v = list(v)
        combo = dict(combo)
        for s, r, cmb in zip(self.vecs, self.pivots, self.combos):
            e = v[r]
            if e.is_exact_zero():
                continue
            f = e / s[r]
            for t, x in enumerate(s):
                if t == r or x.is_exact_zero():
                    continue
                v[t] = v[t] - f * x
            v[r] = self.fld.zero()
            for m, c in cmb.items():
                combo[m] = combo[m] - f * c if m in combo else -(f * c)
        return v, combo

    def add(self, v, combo):
        best = None
        for t, e in enumerate(v):
            if e.is_zero():
                continue
            val = e.valuation()
            if best is None or val < best[0]:
                best = (val, t)
        self.vecs.append(v)
        self.pivots.append(best[1])
        self.combos.append(combo)


def fglm_classical(q: QuotientData, ord2: TermOrder) -> GroebnerBasis:
    """Next-monomial FGLM with minimal-valuation pivoting; any classical order."""
    if ord2.is_tropical:
        raise ValueError("use fglm_tropical for tropical orders")
    n = q.n
    fld = _field(q)
    zero = fld.zero()
    one_m = (0,) * n
    nf = {one_m: _unit_vector(q, fld, one_m)}
    elim = _Eliminator(fld)
    L = [one_m]
    out, lms = [], []
    while L:
        L.sort(key=ord2.monomial_key)
        m = L.pop(0)
        if any(divides(g, m) for g in lms):
            continue
        if m not in nf:
            nf[m] = _nf_from_parent(q, nf, m, zero)
        v, combo = elim.reduce(nf[m], {m: fld.one()})
        if all(e.is_zero() for e in v):
            out.append(Polynomial(n, {k: c for k, c in combo.items() if not c.is_exact_zero()}))
            lms.append(m)
            L = [x for x in L if not divides(m, x)]
            continue
        elim.add(v, combo)
        if len(elim.vecs) > q.delta:
            raise PrecisionExhausted("more independent normal forms than the quotient dimension")
        for i in range(n):
            c = mono_mul(m, variable(n, i))
            if c not in L and not any(divides(g, c) for g in lms):
                L.append(c)
    polys = [_monic(g, ord2) for g in out]
    return GroebnerBasis(polys, ord2).sorted()


# ---------------------------------------------------------------------------
# shape position


def shape_order(n: int, var_index: int) -> TermOrder:
    """Lex order with ``x_var`` the smallest variable, others in their natural order."""
    perm = tuple(i for i in range(n) if i != var_index) + (var_index,)
    return TermOrder.lex(perm)


def fglm_shape_position(Mn, nf_vars, var_index: int | None = None, basis=None) -> GroebnerBasis:
    """Lex basis ``(g(x_v), x_i - g_i(x_v))`` from the Krylov sequence of ``x_v``.

    ``Mn`` is the matrix of multiplication by ``x_v`` and ``nf_vars`` the
    normal forms of all variables, both over a staircase basis whose first
    element is ``1`` (pass ``basis`` if it is not).
    """
    n = len(nf_vars)
    if var_index is None:
        var_index = n - 1
    delta = len(Mn)
    fld = None
    for row in Mn:
        for e in row:
            fld = e.field
            break
        break
    zero = fld.zero()
    start = [zero] * delta
    start[0 if basis is None else basis.index((0,) * n)] = fld.one()
    xv = variable(n, var_index)
    elim = _Eliminator(fld)
    v = start
    power = (0,) * n
    out = []
    for k in range(delta + 1):
        r, combo = elim.reduce(v, {power: fld.one()})
        if all(e.is_zero() for e in r):
            if k < delta:
                raise NotShapePosition(f"minimal polynomial of x_{var_index} has degree {k} < {delta}")
            out.append(Polynomial(n, {m: c for m, c in combo.items() if not c.is_exact_zero()}))
            break
        if k == delta:
            raise PrecisionExhausted("Krylov vectors stay independent beyond the quotient dimension")
        elim.add(r, combo)
        v = _matvec(Mn, v, zero)
        power = mono_mul(power, xv)
    for i in range(n):
        if i == var_index:
            continue
        r, combo = elim.reduce(nf_vars[i], {variable(n, i): fld.one()})
        if not all(e.is_zero() for e in r):
            raise NotShapePosition(f"x_{i} is not a polynomial in x_{var_index}")
        out.append(Polynomial(n, {m: c for m, c in combo.items() if not c.is_exact_zero()}))
    order = shape_order(n, var_index)
    polys = [_monic(g, order) for g in out]
    return GroebnerBasis(polys, order).sorted()


# ---------------------------------------------------------------------------
# pipeline


def _normal_form_matrix(q: QuotientData, monos):
    fld = _field(q)
    zero = fld.zero()
    n = q.n
    one_m = (0,) * n
    nf = {one_m: _unit_vector(q, fld, one_m)}
    for m in sorted(monos, key=degree):
        if m not in nf:
            nf[m] = _nf_from_parent(q, nf, m, zero)
    cols = [nf[m] for m in monos]
    return MacaulayMatrix([[c[r] for c in cols] for r in range(q.delta)], list(monos), list(q.basis))


def condition_number(q: QuotientData, target_basis):
    """Largest invariant-factor valuation of the change of staircase matrix."""
    M = _normal_form_matrix(q, target_basis)
    vals = smith_valuations(M)
    return max(vals) if vals else 0


def coefficient_precisions(G: GroebnerBasis):
    """Absolute precisions of all non-leading coefficients."""
    out = []
    for g in G.polys:
        lm = g.leading_monomial(G.order)
        for m, c in g.terms.items():
            if m != lm and not c.is_exact_zero():
                out.append(c.abs_prec)
    return out


def change_ordering(G: GroebnerBasis, ord2: TermOrder, strategy: str = "auto"):
    """Convert the reduced basis ``G`` to ``ord2``.

    Returns ``(basis, report, diagnostics)``; the diagnostics hold ``delta``,
    ``D``, ``xi``, ``N``, ``cond``, the observed loss (``N`` minus the worst
    output precision) and the predicted loss ``2 cond - S xi``.
    """
    strategy = strategy.replace("-", "_")
    if strategy not in ("auto", "general", "semistable_shape"):
        raise ValueError(f"unknown strategy {strategy!r}")
    require_reduced(G)
    n = G.n
    engine = None
    q = None
    out = None
    if strategy != "general" and not ord2.is_tropical and ord2.tiebreak == "lex":
        var = ord2.perm[-1] if ord2.perm else n - 1
        lms = G.leading_monomials()
        if is_semi_stable(lms, var):
            Mn = multiplication_matrix_semistable(G, var, check=False)
            basis, _, _ = staircase(lms, G.order, n)
            try:
                cand = fglm_shape_position(Mn, nf_variables(G), var, basis)
                if cand.order == ord2 or _same_lex(cand.order, ord2, n):
                    out = GroebnerBasis(cand.polys, ord2).sorted()
                    engine = "shape"
            except NotShapePosition:
                if strategy == "semistable_shape":
                    raise
        elif strategy == "semistable_shape":
            raise NotSemiStable(f"leading monomials are not semi-stable for x_{var}")
    elif strategy == "semistable_shape":
        raise ValueError("the shape-position strategy needs a lex target")
    q = multiplication_matrices(G, check=False)
    stats = {}
    if out is None:
        if ord2.is_tropical:
            out = fglm_tropical(q, ord2, stats)
            engine = "tropical"
        else:
            out = fglm_classical(q, ord2)
            engine = "classical"
    diag = diagnostics(G, q, out)
    diag["engine"] = engine
    diag.update({k: v for k, v in stats.items() if k == "columns_created"})
    report = PrecisionReport(
        min_valuation=diag["xi"],
        min_abs_precision=diag["min_precision"],
        predicted_bound=diag["N"] - diag["predicted_loss"],
        input_precision=diag["N"],
        rank=q.delta,
        min_output_valuation=q.report.min_output_valuation,
        extra={"quotient": q.report},
    )
    return out, report, diag


def _same_lex(a: TermOrder, b: TermOrder, n):
    pa = a.perm or tuple(range(n))
    pb = b.perm or tuple(range(n))
    return a.tiebreak == b.tiebreak == "lex" and pa == pb


def diagnostics(G: GroebnerBasis, q: QuotientData, out: GroebnerBasis) -> dict:
    rep = q.report
    xi = rep.min_valuation
    N = rep.input_precision
    nd = q.n * q.delta
    S = sum(nd ** (2 * k) for k in range(q.Dbound + 1))
    try:
        tb, _, _ = staircase(out.leading_monomials(), out.order, q.n)
        cond = condition_number(q, tb)
    except PrecisionExhausted:
        cond = None
    precs = coefficient_precisions(out)
    finite = [p for p in precs if p != INF]
    minp = min(finite) if finite else INF
    losses = [N - p for p in finite] if N != INF else []
    return {
        "delta": q.delta,
        "D": q.Dbound,
        "xi": xi,
        "N": N,
        "cond": cond,
        "min_precision": minp,
        "observed_loss": max(losses) if losses else 0,
        "loss_mean": sum(losses) / len(losses) if losses else 0,
        "loss_max": max(losses) if losses else 0,
        "predicted_loss": (2 * cond if cond not in (None, INF) else 0) - S * xi,
    }
