"""Command-line interface: ``dktwist {f,verify,crystal,phi,sweep} ...``.

Exit codes: 0 success, 1 verification failure, 2 degenerate or unsupported
sector, 3 input error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys

import numpy as np

from . import __version__
from .algebra import parse_spec
from .coassoc import phi
from .document import OutputDocument, checks_payload, encode_float, write_atomic
from .errors import DegenerateSector, DKTwistError, UnsupportedAtZero
from .linops import residual
from .qparam import QParam
from .twist import compose, crystal_basis, f_interval
from .verify import TOL_ALGEBRAIC, Check, run_suite, tolerance_scale

EXIT_OK, EXIT_FAIL, EXIT_UNSUPPORTED, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _q(text: str) -> QParam:
    try:
        return QParam(float(text))
    except ValueError:
        raise InputError(f"invalid q value {text!r} (need a decimal >= 0)") from None


def _grid(text: str) -> list[QParam]:
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise InputError("empty q grid")
    return [_q(p.strip()) for p in parts]


def _spec(text: str):
    try:
        return parse_spec(text)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _product_labels(n: int, legs: int) -> list[str]:
    return ["⊗".join(f"e{i + 1}" for i in idx) for idx in itertools.product(range(n), repeat=legs)]


def _f_document(spec, f) -> OutputDocument:
    return OutputDocument("f", str(spec), encode_float(f.q_from.value), encode_float(f.q_to.value),
                          [str(l) for l in f.label_order], f.matrix,
                          extra={"row_labels": _product_labels(spec.n, 2)})


def _emit(args, text: str) -> None:
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _render(args, doc: OutputDocument) -> str:
    return doc.to_table() if args.format == "table" else doc.to_json()


def cmd_f(args) -> int:
    spec = _spec(args.spec)
    f = f_interval(spec, _q(args.q), _q(args.q_from))
    _emit(args, _render(args, _f_document(spec, f)))
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = _spec(args.spec)
    grid = _grid(args.q_grid)
    try:
        tolerance_scale()
    except ValueError as exc:
        raise InputError(str(exc)) from None
    report = run_suite(spec, grid)
    doc = OutputDocument("report", str(spec), None, None, [], np.zeros((0, 0)),
                         checks_payload(report.checks),
                         extra={"overall": report.overall, "q_grid": [encode_float(q) for q in report.q_grid]})
    _emit(args, _render(args, doc))
    return EXIT_OK if report.overall else EXIT_FAIL


def cmd_crystal(args) -> int:
    spec = _spec(args.spec)
    basis = crystal_basis(spec)
    doc = OutputDocument("crystal", str(spec), None, encode_float(0.0), [str(l) for l in basis.labels],
                         basis.vectors.T.copy(), extra={"col_labels": _product_labels(spec.n, 2)})
    _emit(args, _render(args, doc))
    return EXIT_OK


def cmd_phi(args) -> int:
    spec = _spec(args.spec)
    q = _q(args.q)
    a = phi(spec, q)
    labels = _product_labels(spec.n, 3)
    doc = OutputDocument("phi", str(spec), None, encode_float(q.value), labels, a.matrix)
    _emit(args, _render(args, doc))
    return EXIT_OK


def sweep_values(start: float, end: float, steps: int) -> list[float]:
    if steps < 1:
        raise InputError("--steps must be at least 1")
    if steps == 1:
        return [start]
    if start > 0 and end > 0:
        return [float(x) for x in np.geomspace(start, end, steps)]
    return [float(x) for x in np.linspace(start, end, steps)]


def cmd_sweep(args) -> int:
    spec = _spec(args.spec)
    start, end = _q(args.q_start), _q(args.q_end)
    values = sweep_values(start.value, end.value, args.steps)
    twists = [f_interval(spec, q, 1.0) for q in values]
    chained = twists[0]
    worst_step = 0.0
    for prev, cur in zip(twists, twists[1:]):
        step = f_interval(spec, cur.q_to, prev.q_to)
        worst_step = max(worst_step, residual(compose(step, prev).matrix, cur.matrix))
        chained = compose(step, chained)
    two_path = residual(chained.matrix, twists[-1].matrix)
    tol = TOL_ALGEBRAIC * tolerance_scale()
    checks = [Check("composition_step", worst_step, tol), Check("composition_chain", two_path, tol)]
    docs = [_f_document(spec, f) for f in twists]
    ok = all(c.passed for c in checks)
    if args.format == "table":
        text = "".join(d.to_table() for d in docs) + "".join(
            f"{'ok  ' if c.passed else 'FAIL'} {c.name}: {c.residual:.3e} <= {c.tolerance:.1e}\n" for c in checks)
    else:
        payload = {"schema_version": 1, "kind": "sweep", "spec": str(spec),
                   "documents": [d.to_dict() for d in docs], "checks": checks_payload(checks)}
        text = json.dumps(payload, indent=1, ensure_ascii=False) + "\n"
    _emit(args, text)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dktwist", description="Twist matrices between classical and deformed tensor products.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("spec", help="series and rank, e.g. A1, B2, C2, D3")
        sp.add_argument("--format", choices=("json", "table"), default="json")
        sp.add_argument("--out", help="write to this file instead of standard output")

    sp = sub.add_parser("f", help="interval twist F^[q from]")
    common(sp)
    sp.add_argument("--q", required=True)
    sp.add_argument("--from", dest="q_from", default="1")
    sp.set_defaults(func=cmd_f)

    sp = sub.add_parser("verify", help="run the identity suite")
    common(sp)
    sp.add_argument("--q-grid", required=True, help="comma-separated q values")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("crystal", help="q = 0 basis")
    common(sp)
    sp.set_defaults(func=cmd_crystal)

    sp = sub.add_parser("phi", help="coassociator on the triple product")
    common(sp)
    sp.add_argument("--q", required=True)
    sp.set_defaults(func=cmd_phi)

    sp = sub.add_parser("sweep", help="twists over a q range with composition checks")
    common(sp)
    sp.add_argument("--q-start", required=True)
    sp.add_argument("--q-end", required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"dktwist: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DegenerateSector, UnsupportedAtZero) as exc:
        print(f"dktwist: unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except DKTwistError as exc:
        print(f"dktwist: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"dktwist: cannot write output: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
