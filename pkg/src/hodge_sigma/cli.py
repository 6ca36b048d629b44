"""The ``hodge-sigma`` command.

Every subcommand reads and writes JSON through
:mod:`hodge_sigma.lib.io.json` (so paths may be any fsspec URL) and
returns the process exit code: 0 on success or a true verdict, 1 on a
false verdict, 2 on malformed input or any library error. Failures are
reported on stderr as ``{"error": <exception name>, "message": ...}``.

"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from collections.abc import Sequence
from typing import Any, Callable, NoReturn

from hodge_sigma.lib.gaussian_lattice import enumerate as enumerate_lattice
from hodge_sigma.lib.hodge_ops import (
    OperatorTriple,
    assemble,
    build_filtration,
    classify,
    hodge_decomposition,
    restricted_residual,
    rho_eval,
    split,
    verify_operator,
    verify_restricted,
    verify_sigma,
)
from hodge_sigma.lib.instance_gen import GenConfig, random_unimodular
from hodge_sigma.lib.io.csv import scan_frame, write_scan
from hodge_sigma.lib.io.json import (
    dumps,
    load_operator,
    matrix_to_dict,
    operator_to_dict,
    write_json,
)
from hodge_sigma.lib.io.typespec import parse_hodge_type
from hodge_sigma.lib.weierstrass import sigma, sigma_grid
from hodge_sigma.utils import format_complex

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_ERROR = 2


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


def _emit(value: Any) -> None:
    sys.stdout.write(dumps(value) + "\n")


def cmd_sigma_eval(args: argparse.Namespace) -> int:
    value = sigma(complex(args.re, args.im), args.tol)
    _emit({"re": value.real, "im": value.imag, "text": format_complex(value)})
    return EXIT_OK


def cmd_sigma_scan(args: argparse.Namespace) -> int:
    x, y, a = sigma_grid(args.radius, args.grid, args.tol)
    write_scan(scan_frame(x, y, a), args.out)
    log.info("wrote %d grid points to %s", len(x), args.out)
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    ht = parse_hodge_type(args.type)
    P = None
    if args.conjugate:
        P = random_unimodular(ht.dimension, GenConfig.from_config(args.seed))
    triple = assemble(ht, P)
    write_json(operator_to_dict(triple.E, triple.T, triple.S, ht), args.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    op = load_operator(args.file)
    if op.E is not None and op.T is not None:
        report = verify_operator(op.triple(), args.tol)
    else:
        report = verify_sigma(op.require_S(), args.tol)
    _emit(report.to_dict())
    return EXIT_OK if report.verdict else EXIT_FALSE


def cmd_split(args: argparse.Namespace) -> int:
    S = load_operator(args.file).require_S()
    E, T = split(S, args.tol)
    write_json(operator_to_dict(E, T, S), args.out)
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    _emit(classify(load_operator(args.file).require_S(), args.tol).to_list())
    return EXIT_OK


def _triple_of(args: argparse.Namespace) -> OperatorTriple:
    op = load_operator(args.file)
    if op.E is not None and op.T is not None:
        return op.triple()
    S = op.require_S()
    E, T = split(S, args.tol)
    return OperatorTriple(E, T, S)


def cmd_decompose(args: argparse.Namespace) -> int:
    dec = hodge_decomposition(_triple_of(args), args.tol)
    _emit(
        {
            "n": dec.n,
            "weight": dec.weight,
            "type": dec.hodge_type().to_list(),
            "components": [{"p": p, "q": q, "dim": k} for (p, q), k in dec.dims().items()],
            "weights": [
                {"weight": w, "dim": basis.shape[1]} for w, basis in dec.weight_map.items()
            ],
        }
    )
    return EXIT_OK


def cmd_filtration(args: argparse.Namespace) -> int:
    dec = hodge_decomposition(_triple_of(args), args.tol)
    F = build_filtration(dec, args.r, check_complement=args.check_complement, tol=args.tol)
    _emit(
        {
            "r": args.r,
            "n": dec.n,
            "dim": F.shape[1],
            "basis_re": F.real,
            "basis_im": F.imag,
        }
    )
    return EXIT_OK


def cmd_rho(args: argparse.Namespace) -> int:
    _emit(matrix_to_dict(rho_eval(_triple_of(args), args.x, args.y, args.tol)))
    return EXIT_OK


def cmd_verify_restricted(args: argparse.Namespace) -> int:
    S = load_operator(args.file).require_S()
    allowed = [(s.p, s.q) for s in parse_hodge_type(args.allowed)]
    verdict = verify_restricted(S, allowed, args.tol)
    _emit(
        {
            "verdict": verdict,
            "residual": restricted_residual(S, allowed),
            "allowed": [{"p": p, "q": q} for p, q in allowed],
        }
    )
    return EXIT_OK if verdict else EXIT_FALSE


def cmd_lattice(args: argparse.Namespace) -> int:
    _emit(
        [
            {"a": w.a, "b": w.b, "p": w.p, "q": w.q, "text": str(w)}
            for w in enumerate_lattice(args.radius)
        ]
    )
    return EXIT_OK


def _positive_float(text: str) -> float:
    value = float(text)
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return value


def _add_tol(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol", type=_positive_float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hodge-sigma", description=__doc__.splitlines()[0])
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log to stderr (-v for INFO, -vv for DEBUG)",
    )
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, func: Callable[[argparse.Namespace], int], summary: str) -> Any:
        sub = subparsers.add_parser(name, help=summary)
        sub.set_defaults(func=func)
        return sub

    sub = add("sigma-eval", cmd_sigma_eval, "evaluate sigma at one point")
    sub.add_argument("--re", type=float, required=True)
    sub.add_argument("--im", type=float, required=True)
    _add_tol(sub)

    sub = add("sigma-scan", cmd_sigma_scan, "write |sigma| over a grid as CSV")
    sub.add_argument("--radius", type=float, required=True)
    sub.add_argument("--grid", type=int, required=True)
    sub.add_argument("--out", required=True)
    _add_tol(sub)

    sub = add("gen", cmd_gen, "write the operators of a Hodge type")
    sub.add_argument("--type", required=True, help='for example "(1,0)x2+(1,1)x1"')
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--conjugate", action="store_true")
    sub.add_argument("--out", required=True)

    sub = add("verify", cmd_verify, "verify an operator file")
    sub.add_argument("file")
    _add_tol(sub)

    sub = add("split", cmd_split, "recover E and T from S")
    sub.add_argument("file")
    sub.add_argument("--out", required=True)
    _add_tol(sub)

    sub = add("classify", cmd_classify, "print the Hodge type of S")
    sub.add_argument("file")
    _add_tol(sub)

    sub = add("decompose", cmd_decompose, "print the Hodge and weight decompositions")
    sub.add_argument("file")
    _add_tol(sub)

    sub = add("filtration", cmd_filtration, "print a basis of F^r")
    sub.add_argument("file")
    sub.add_argument("--r", type=int, required=True)
    sub.add_argument("--check-complement", action="store_true")
    _add_tol(sub)

    sub = add("rho", cmd_rho, "print the representation at exp(x + iy)")
    sub.add_argument("file")
    sub.add_argument("--x", type=float, required=True)
    sub.add_argument("--y", type=float, required=True)
    _add_tol(sub)

    sub = add(
        "verify-restricted",
        cmd_verify_restricted,
        "check that the spectrum of S only uses the allowed Hodge indices",
    )
    sub.add_argument("file")
    sub.add_argument("--allowed", required=True, help='for example "(1,0)+(0,0)"')
    _add_tol(sub)

    sub = add("lattice", cmd_lattice, "list lattice points within a radius")
    sub.add_argument("--radius", type=float, required=True)

    return parser


def _fail(err: BaseException) -> int:
    sys.stderr.write(dumps({"error": type(err).__name__, "message": str(err)}, indent=None) + "\n")
    return EXIT_ERROR


def _configure_logging(verbose: int) -> None:
    if verbose:
        logging.basicConfig(
            level=logging.DEBUG if verbose > 1 else logging.INFO,
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as err:
        return _fail(err)
    _configure_logging(args.verbose)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError, RuntimeError, OSError) as err:
        log.debug("%s failed", args.command, exc_info=True)
        return _fail(err)


if __name__ == "__main__":
    sys.exit(main())
