"""JSON documents for polynomial systems and labelled matrices.

A system document looks like::

    {
      "field": {"kind": "p-adic", "p": 2, "default_precision": 20},
      "variables": ["x", "y"],
      "order": {"weight": [0, 0], "tiebreak": "grevlex"},
      "polynomials": [[["1", [0, 1]], ["2", [1, 0]]], [["1", [2, 0]], ["4", [0, 0]]]]
    }

Coefficients are strings in the scalar grammar of :mod:`valued_field`.
``"weight": null`` selects the classical order named by ``tiebreak``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .polyring import Polynomial, TermOrder
from .quotient import GroebnerBasis
from .trop_linalg import MacaulayMatrix
from .valued_field import FieldConfig, RationalField, format_scalar, parse_scalar


class DocumentError(ValueError):
    pass


def field_from_dict(d: dict):
    try:
        kind = d.get("kind", "p-adic")
        if kind == "rational":
            return RationalField(int(d.get("p", 2)))
        kind = "t-adic" if kind.startswith("t-adic") else kind
        return FieldConfig(kind, d.get("p"), int(d.get("default_precision", 20)))
    except (TypeError, ValueError, AttributeError) as e:
        raise DocumentError(f"bad field description: {e}") from e


def field_to_dict(cfg) -> dict:
    if getattr(cfg, "exact", False):
        return {"kind": "rational", "p": cfg.p}
    out = {"kind": cfg.kind}
    if cfg.kind == "p-adic":
        out["p"] = cfg.p
    out["default_precision"] = cfg.default_precision
    return out


def order_from_dict(d: dict | None, n: int) -> TermOrder:
    d = d or {}
    w = d.get("weight")
    tb = d.get("tiebreak", "grevlex")
    perm = d.get("perm")
    try:
        if w is not None:
            if len(w) != n:
                raise DocumentError(f"weight has length {len(w)}, expected {n}")
            return TermOrder.tropical(w, tb, perm)
        return TermOrder(None, tb, perm)
    except ValueError as e:
        raise DocumentError(str(e)) from e


def order_to_dict(order: TermOrder) -> dict:
    out = {"weight": list(order.weight) if order.weight is not None else None, "tiebreak": order.tiebreak}
    if order.perm is not None:
        out["perm"] = list(order.perm)
    return out


@dataclass
class SystemDocument:
    field: dict
    variables: list
    order: dict
    polynomials: list
    diagnostics: dict | None = None
    extra: dict = field(default_factory=dict)

    # -- text --------------------------------------------------------------
    @classmethod
    def parse(cls, text: str) -> "SystemDocument":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise DocumentError(f"invalid JSON: {e}") from e
        for key in ("field", "variables", "polynomials"):
            if key not in d:
                raise DocumentError(f"missing key {key!r}")
        n = len(d["variables"])
        polys = []
        for p in d["polynomials"]:
            terms = []
            for t in p:
                if len(t) != 2 or len(t[1]) != n:
                    raise DocumentError(f"bad term {t!r}")
                terms.append([str(t[0]), [int(e) for e in t[1]]])
            polys.append(terms)
        extra = {k: v for k, v in d.items() if k not in ("field", "variables", "order", "polynomials", "diagnostics")}
        doc = cls(d["field"], list(d["variables"]), d.get("order") or {}, polys, d.get("diagnostics"), extra)
        doc.to_polynomials()
        return doc

    def serialize(self) -> str:
        lines = ["{"]
        parts = [
            f'  "field": {json.dumps(self.field)}',
            f'  "variables": {json.dumps(self.variables)}',
            f'  "order": {json.dumps(self.order)}',
        ]
        polys = ",\n".join("    " + json.dumps(p) for p in self.polynomials)
        parts.append('  "polynomials": [\n' + polys + "\n  ]" if self.polynomials else '  "polynomials": []')
        if self.diagnostics is not None:
            parts.append(f'  "diagnostics": {json.dumps(self.diagnostics, sort_keys=True)}')
        for k in sorted(self.extra):
            parts.append(f"  {json.dumps(k)}: {json.dumps(self.extra[k], sort_keys=True)}")
        lines.append(",\n".join(parts))
        lines.append("}")
        return "\n".join(lines) + "\n"

    # -- objects -------------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.variables)

    def field_config(self):
        return field_from_dict(self.field)

    def term_order(self) -> TermOrder:
        return order_from_dict(self.order, self.n)

    def to_polynomials(self) -> list:
        cfg = self.field_config()
        out = []
        for p in self.polynomials:
            pairs = []
            for text, mono in p:
                try:
                    pairs.append((parse_scalar(text, cfg), tuple(mono)))
                except ValueError as e:
                    raise DocumentError(str(e)) from e
            out.append(Polynomial.from_pairs(self.n, pairs))
        return out

    def to_basis(self) -> GroebnerBasis:
        return GroebnerBasis(self.to_polynomials(), self.term_order())

    @classmethod
    def from_polynomials(cls, polys, variables, order: TermOrder, cfg, diagnostics=None) -> "SystemDocument":
        out = []
        for f in polys:
            out.append([[format_scalar(t.coeff), list(t.mono)] for t in f.sorted_terms(order)])
        return cls(field_to_dict(cfg), list(variables), order_to_dict(order), out, diagnostics)


def default_variables(n: int) -> list:
    if n <= 3:
        return ["x", "y", "z"][:n]
    return [f"x{i + 1}" for i in range(n)]


@dataclass
class MatrixDocument:
    """``{"field", "variables", "order", "columns", "rows"}``; columns are exponent vectors."""

    field: dict
    variables: list
    order: dict
    columns: list
    rows: list
    report: dict | None = None

    @classmethod
    def parse(cls, text: str) -> "MatrixDocument":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise DocumentError(f"invalid JSON: {e}") from e
        for key in ("field", "variables", "columns", "rows"):
            if key not in d:
                raise DocumentError(f"missing key {key!r}")
        doc = cls(d["field"], list(d["variables"]), d.get("order") or {}, d["columns"], d["rows"], d.get("report"))
        doc.to_matrix()
        return doc

    def to_matrix(self) -> MacaulayMatrix:
        cfg = field_from_dict(self.field)
        try:
            rows = [[parse_scalar(str(e), cfg) for e in r] for r in self.rows]
            return MacaulayMatrix(rows, [tuple(c) for c in self.columns])
        except ValueError as e:
            raise DocumentError(str(e)) from e

    def term_order(self) -> TermOrder:
        return order_from_dict(self.order, len(self.variables))

    @classmethod
    def from_matrix(cls, M: MacaulayMatrix, variables, order, cfg, report=None) -> "MatrixDocument":
        rows = [[format_scalar(e) for e in r] for r in M.rows]
        return cls(field_to_dict(cfg), list(variables), order_to_dict(order), [list(c) for c in M.col_labels], rows, report)

    def serialize(self) -> str:
        parts = [
            f'  "field": {json.dumps(self.field)}',
            f'  "variables": {json.dumps(self.variables)}',
            f'  "order": {json.dumps(self.order)}',
            f'  "columns": {json.dumps(self.columns)}',
            '  "rows": [\n' + ",\n".join("    " + json.dumps(r) for r in self.rows) + "\n  ]",
        ]
        if self.report is not None:
            parts.append(f'  "report": {json.dumps(self.report, sort_keys=True)}')
        return "{\n" + ",\n".join(parts) + "\n}\n"
