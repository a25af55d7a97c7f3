"""Tropical row-echelon forms, the FGLM column reduction and Smith valuations.

Matrices are dense lists of rows of scalars.  Eliminated entries are set to
exact zeros: the elimination is exact by design even though the multiplier
is only approximately known.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import PrecisionExhausted
from .polyring import TermOrder, greatest_term

INF = math.inf


@dataclass
class MacaulayMatrix:
    rows: list
    col_labels: list
    row_labels: list | None = None

    def __post_init__(self):
        if len(set(self.col_labels)) != len(self.col_labels):
            raise ValueError("column labels must be pairwise distinct")
        if any(len(r) != len(self.col_labels) for r in self.rows):
            raise ValueError("row length does not match the column labels")
        if self.row_labels is not None and len(self.row_labels) != len(self.rows):
            raise ValueError("row label count does not match the row count")

    @property
    def shape(self):
        return len(self.rows), len(self.col_labels)

    def copy(self) -> "MacaulayMatrix":
        rl = None if self.row_labels is None else list(self.row_labels)
        return MacaulayMatrix([list(r) for r in self.rows], list(self.col_labels), rl)

    def column(self, label):
        j = self.col_labels.index(label)
        return [r[j] for r in self.rows]


@dataclass
class PrecisionReport:
    """Precision summary of one linear-algebra call.

    ``min_valuation`` is the smallest valuation among the input entries,
    ``min_abs_precision`` the smallest absolute precision of the output and
    ``predicted_bound`` the guaranteed lower bound ``N + l^2 * xi``.
    """

    min_valuation: float = INF
    min_abs_precision: float = INF
    predicted_bound: float = -INF
    input_precision: float = INF
    rank: int = 0
    min_output_valuation: float = INF
    extra: dict = field(default_factory=dict)


def entry_stats(entries):
    """``(min valuation of nonzero entries, min absolute precision)``."""
    vmin, pmin = INF, INF
    for e in entries:
        if e.is_exact_zero():
            continue
        pmin = min(pmin, e.abs_prec)
        if not e.is_zero():
            vmin = min(vmin, e.valuation())
    return vmin, pmin


def _field_of(rows):
    for r in rows:
        for e in r:
            return e.field
    return None


def tropical_row_echelon(M: MacaulayMatrix, order: TermOrder, stable: bool = True):
    """Tropical row-echelon form, fully reduced, with column swaps.

    Row ``i``'s pivot is its greatest term (entry times column monomial);
    the pivot column is swapped into position ``i`` and cleared in every
    other row.  With ``stable`` each row is first reduced by the leading
    terms of the rows below it.  Rows that vanish are moved to the bottom.
    """
    rows = [list(r) for r in M.rows]
    cols = list(M.col_labels)
    nr, nc = len(rows), len(cols)
    fld = _field_of(rows)
    xi, n_in = entry_stats(e for r in rows for e in r)
    pivots = []
    pos = 0
    for i in range(nr):
        if pos >= nc:
            break
        row = rows[i]
        if stable:
            _reduce_by_later(rows, i, pos, cols, order)
        j = greatest_term(order, ((c, row[c], cols[c]) for c in range(pos, nc)))
        if j is None:
            continue
        if j != pos:
            for r in rows:
                r[pos], r[j] = r[j], r[pos]
            cols[pos], cols[j] = cols[j], cols[pos]
        piv = row[pos]
        nz = [c for c in range(pos + 1, nc) if not row[c].is_exact_zero()]
        zero = fld.zero()
        for k in range(nr):
            if k == i:
                continue
            rk = rows[k]
            e = rk[pos]
            if e.is_exact_zero():
                continue
            f = e / piv
            for c in nz:
                rk[c] = rk[c] - f * row[c]
            rk[pos] = zero
        pivots.append(i)
        pos += 1
    rest = [i for i in range(nr) if i not in set(pivots)]
    out_rows = [rows[i] for i in pivots] + [rows[i] for i in rest]
    row_labels = None
    if M.row_labels is not None:
        row_labels = [M.row_labels[i] for i in pivots + rest]
    out = MacaulayMatrix(out_rows, cols, row_labels)
    l = len(pivots)
    v_out, p_out = entry_stats(e for r in out_rows for e in r)
    report = PrecisionReport(
        min_valuation=xi,
        min_abs_precision=p_out,
        predicted_bound=n_in + l * l * min(xi, 0) if xi != INF else n_in,
        input_precision=n_in,
        rank=l,
        min_output_valuation=v_out,
    )
    return out, report


def _reduce_by_later(rows, i, pos, cols, order):
    row = rows[i]
    nc = len(cols)
    own = greatest_term(order, ((c, row[c], cols[c]) for c in range(pos, nc)))
    if own is None:
        return
    leads = []
    for j in range(i + 1, len(rows)):
        rj = rows[j]
        lj = greatest_term(order, ((c, rj[c], cols[c]) for c in range(pos, nc)))
        if lj is None or lj == own:
            continue
        leads.append((order.term_key(rj[lj], cols[lj]), j, lj))
    leads.sort(reverse=True)
    used = set()
    zero = row[own].field.zero()
    for _, j, c in leads:
        if c in used:
            continue
        used.add(c)
        e = row[c]
        if e.is_zero():
            continue
        rj = rows[j]
        f = e / rj[c]
        for t in range(pos, nc):
            if t != c and not rj[t].is_exact_zero():
                row[t] = row[t] - f * rj[t]
        row[c] = zero


def pivot_columns(M: MacaulayMatrix) -> list:
    """Pivot column label of each row of an echelon matrix (``None`` for zero rows)."""
    out = []
    for i, r in enumerate(M.rows):
        out.append(M.col_labels[i] if i < len(M.col_labels) and not r[i].is_zero() else None)
    return out


# ---------------------------------------------------------------------------
# column reduction for FGLM


def inverse_term_key(order: TermOrder, coeff, label) -> tuple:
    """Key of the term ``coeff^-1 * x^label`` (larger key is a larger term)."""
    if order.weight is None:
        return order.tie_key(label)
    return order.term_key_from_val(-coeff.valuation(), label)


def reduce_columns(cols, labels, pcols, order: TermOrder, fld):
    """In-place column reduction on column-major data.

    ``cols[k]`` is the vector of column ``k``; ``pcols[k]`` maps labels to
    the pivoting-matrix column of ``k``.  The pivot is the entry ``c`` at
    row ``r`` of column ``x^a`` whose term ``c^-1 x^a`` is smallest, the
    smallest row index breaking ties; rows are expected ascending for the
    source order.  Returns the list of ``(row, column)`` pivots.
    """
    nr = len(cols[0]) if cols else 0
    rows_left = list(range(nr))
    cols_left = list(range(len(cols)))
    zero = fld.zero()
    pivots = []
    while rows_left and cols_left:
        best = None
        for c in cols_left:
            col = cols[c]
            lab = labels[c]
            for r in rows_left:
                e = col[r]
                if e.is_zero():
                    continue
                key = (inverse_term_key(order, e, lab), r)
                if best is None or key < best[0]:
                    best = (key, r, c)
        if best is None:
            break
        _, r, c = best
        pcol = cols[c]
        piv = pcol[r]
        nz = [t for t in range(nr) if t != r and not pcol[t].is_exact_zero()]
        for k in cols_left:
            if k == c:
                continue
            col = cols[k]
            e = col[r]
            if e.is_exact_zero():
                continue
            f = e / piv
            for t in nz:
                col[t] = col[t] - f * pcol[t]
            col[r] = zero
            pk = pcols[k]
            for lab, v in pcols[c].items():
                pk[lab] = pk[lab] - f * v if lab in pk else -(f * v)
        pivots.append((r, c))
        rows_left.remove(r)
        cols_left.remove(c)
    return pivots


def column_reduce_fglm(M: MacaulayMatrix, order: TermOrder, P: MacaulayMatrix):
    """Column-echelon form of ``M`` compatible with ``order``; ``P`` follows.

    ``P`` is square with rows and columns labelled by ``M``'s column labels.
    Returns fresh ``(M', P')``.
    """
    nr, nc = M.shape
    if nc == 0 or all(e.is_zero() for r in M.rows for e in r):
        return M.copy(), P.copy()
    fld = _field_of(M.rows)
    cols = [[M.rows[r][c] for r in range(nr)] for c in range(nc)]
    plabels = P.row_labels or P.col_labels
    pcols = []
    for c, lab in enumerate(M.col_labels):
        j = P.col_labels.index(lab)
        pcols.append({plabels[t]: P.rows[t][j] for t in range(len(plabels)) if not P.rows[t][j].is_exact_zero()})
    reduce_columns(cols, M.col_labels, pcols, order, fld)
    out = MacaulayMatrix([[cols[c][r] for c in range(nc)] for r in range(nr)], list(M.col_labels), M.row_labels)
    zero = fld.zero()
    prows = [[pcols[k].get(rl, zero) for k in range(nc)] for rl in plabels]
    return out, MacaulayMatrix(prows, list(M.col_labels), list(plabels))


# ---------------------------------------------------------------------------
# Smith valuations


def smith_valuations(M: MacaulayMatrix) -> list:
    """Valuations of the invariant factors of ``M`` over the valuation ring, ascending.

    Exact zero invariant factors are reported as ``inf``.
    """
    rows = [list(r) for r in M.rows]
    nr, nc = M.shape
    rows_left = list(range(nr))
    cols_left = list(range(nc))
    out = []
    while rows_left and cols_left:
        best = None
        for r in rows_left:
            for c in cols_left:
                e = rows[r][c]
                if e.is_zero():
                    continue
                v = e.valuation()
                if best is None or v < best[0]:
                    best = (v, r, c)
        if best is None:
            if any(not rows[r][c].is_exact_zero() for r in rows_left for c in cols_left):
                raise PrecisionExhausted("an invariant factor is zero at working precision")
            out.extend([INF] * min(len(rows_left), len(cols_left)))
            break
        v, r, c = best
        piv = rows[r][c]
        for k in rows_left:
            if k == r or rows[k][c].is_zero():
                continue
            f = rows[k][c] / piv
            rk = rows[k]
            for t in cols_left:
                rk[t] = rk[t] - f * rows[r][t]
        out.append(v)
        rows_left.remove(r)
        cols_left.remove(c)
    return sorted(out)
