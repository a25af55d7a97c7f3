"""Command-line interface: ``tropfglm <command> [options]``.

Exit codes: 0 success, 1 unreadable input, 2 basis not reduced,
3 precision exhausted, 4 ideal not zero-dimensional, 5 verification failed,
6 other algorithmic failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from .documents import DocumentError, MatrixDocument, SystemDocument, field_from_dict
from .errors import NotReduced, NotZeroDimensional, PrecisionExhausted, TropFGLMError
from .experiment import MODES, run_experiment
from .fglm import change_ordering
from .gb_oracle import verify_reduced_gb
from .polyring import TermOrder
from .quotient import multiplication_matrices
from .trop_linalg import tropical_row_echelon
from .valued_field import FieldConfig, format_scalar

EXIT_PARSE, EXIT_NOT_REDUCED, EXIT_PRECISION, EXIT_NOT_ZERO_DIM, EXIT_VERIFY, EXIT_OTHER = 1, 2, 3, 4, 5, 6


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _read(path):
    if path in (None, "-"):
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _jsonable(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items() if not k.startswith("_")}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _target_order(args, n) -> TermOrder:
    if args.target_weight is not None:
        if len(args.target_weight) != n:
            raise DocumentError(f"target weight has length {len(args.target_weight)}, expected {n}")
        return TermOrder.tropical(args.target_weight, args.target_tiebreak)
    return TermOrder(None, args.target_tiebreak)


def _load_system(args):
    doc = SystemDocument.parse(_read(args.input))
    if args.precision is not None or args.prime is not None:
        f = dict(doc.field)
        if args.precision is not None:
            f["default_precision"] = args.precision
        if args.prime is not None:
            f["p"] = args.prime
        doc.field = f
    return doc


def cmd_change_order(args) -> int:
    doc = _load_system(args)
    G = doc.to_basis()
    target = _target_order(args, doc.n)
    out, report, diag = change_ordering(G, target, args.strategy)
    if args.verify:
        ok, witness = verify_reduced_gb(out, G)
        if not ok:
            print(f"verification failed: {witness}", file=sys.stderr)
            return EXIT_VERIFY
    keep = ("delta", "D", "xi", "N", "cond", "observed_loss", "predicted_loss", "loss_mean", "loss_max", "engine")
    d = _jsonable({k: diag.get(k) for k in keep})
    res = SystemDocument.from_polynomials(out.polys, doc.variables, target, doc.field_config(), d)
    _write(args.output, res.serialize())
    return 0


def cmd_verify(args) -> int:
    doc = _load_system(args)
    G = doc.to_basis()
    src = SystemDocument.parse(_read(args.source)).to_basis() if args.source else G
    ok, witness = verify_reduced_gb(G, src)
    print("ok" if ok else f"not verified: {witness}")
    return 0 if ok else EXIT_VERIFY


def cmd_multmat(args) -> int:
    doc = _load_system(args)
    G = doc.to_basis()
    q = multiplication_matrices(G)
    names = doc.variables
    body = {
        "basis": [list(m) for m in q.basis],
        "delta": q.delta,
        "D": q.Dbound,
        "matrices": {names[i]: [[format_scalar(e) for e in row] for row in M] for i, M in enumerate(q.mult)},
        "report": _jsonable(vars(q.report)),
    }
    _write(args.output, json.dumps(body, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_echelon(args) -> int:
    doc = MatrixDocument.parse(_read(args.input))
    M = doc.to_matrix()
    order = doc.term_order()
    ech, rep = tropical_row_echelon(M, order, stable=not args.unstable)
    out = MatrixDocument.from_matrix(ech, doc.variables, order, field_from_dict(doc.field), _jsonable(vars(rep)))
    _write(args.output, out.serialize())
    return 0


def cmd_experiment(args) -> int:
    degree_sets = args.degrees or [[2, 2, 2]]
    precision = args.precision or 200
    p = args.prime or 2
    try:
        FieldConfig("p-adic", p, precision)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    report = run_experiment(p, degree_sets, args.reps, args.seed, args.mode, precision)
    if args.output:
        _write(args.output, report.to_csv())
    sys.stdout.write(report.table())
    agg = report.aggregates()
    if agg["instances"] == 0:
        return 0
    return 0 if agg["completed"] >= 0.9 * agg["instances"] else EXIT_OTHER


class _Parser(argparse.ArgumentParser):
    # usage errors share the exit code of unreadable input
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _glue_weights(argv):
    """Let ``--target-weight -2,4,-8`` through; argparse would read it as a flag."""
    out = []
    it = iter(argv)
    for a in it:
        if a == "--target-weight":
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tropfglm", description="Tropical FGLM change of ordering over p-adic fields.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, needs_input=True):
        p.add_argument("--input", required=needs_input, help="input document (- for stdin)")
        p.add_argument("--output", help="output path (default stdout)")
        p.add_argument("--prime", type=int, help="override the prime of the input field")
        p.add_argument("--precision", type=int, help="override the default precision")

    p = sub.add_parser("change-order", help="convert a reduced basis to another order")
    common(p)
    p.add_argument("--target-weight", type=_int_list, help="comma-separated weight; omit for a classical order")
    p.add_argument("--target-tiebreak", choices=("grevlex", "lex"), default="grevlex")
    p.add_argument("--strategy", choices=("auto", "general", "semistable-shape"), default="auto")
    p.add_argument("--verify", action="store_true", help="check the output against the oracle")
    p.set_defaults(func=cmd_change_order)

    p = sub.add_parser("verify", help="check that a basis is reduced and generates the source ideal")
    common(p)
    p.add_argument("--source", help="source basis (default: the input itself)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("multmat", help="print the multiplication matrices of a reduced basis")
    common(p)
    p.set_defaults(func=cmd_multmat)

    p = sub.add_parser("echelon", help="tropical row-echelon form of a matrix document")
    common(p)
    p.add_argument("--unstable", action="store_true", help="plain elimination without the stabilizing pre-reduction")
    p.set_defaults(func=cmd_echelon)

    p = sub.add_parser("experiment", help="precision-loss experiment on random systems")
    common(p, needs_input=False)
    p.add_argument("--degrees", type=_int_list, action="append", help="degree tuple, repeatable (default 2,2,2)")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=MODES, default="trop-to-trop")
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(_glue_weights(sys.argv[1:] if argv is None else list(argv)))
    try:
        return args.func(args)
    except (DocumentError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except NotReduced as e:
        print(f"error: input basis is not reduced: {e}", file=sys.stderr)
        return EXIT_NOT_REDUCED
    except PrecisionExhausted as e:
        print(f"error: precision exhausted: {e}", file=sys.stderr)
        return EXIT_PRECISION
    except NotZeroDimensional as e:
        print(f"error: ideal is not zero-dimensional: {e}", file=sys.stderr)
        return EXIT_NOT_ZERO_DIM
    except (TropFGLMError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
