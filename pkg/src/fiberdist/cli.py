"""Command-line front end.

Commands:
  validate  -- check a space file and print its canonical form
  dist      -- distance between two elements under a chosen instance
  batch     -- run a JSON array of requests, responses in input order
  selftest  -- run the built-in verification suites

Exit codes: 0 success, 1 parse/validation error, 2 computation error
(enumeration cap exceeded, unbalanced masses, no representation within
cap), 3 specialized/generic mismatch under ``--method both``.

Values are emitted as exact rational strings first and decimals second.
For a finite-exponent norm the exact field holds the p-th power of the
distance (the package's canonical value form, re-derivable from the
witness via the lift); the decimal field is the rooted display value.
"""

from __future__ import annotations

import argparse
import json
import sys

from .core import (
    ParseError,
    SpaceValidationError,
    canonical_space_json,
    decimal_str,
    space_document_from_obj,
)
from .extension import ElementDomainError, EmptyFiberError, extend_generic
from .hyperspace import HyperspaceFunctor
from .hyperspace import FiberCapExceeded as HyperspaceCapExceeded
from .power import PNorm, PowerFunctor, root_decimal_str
from .selftest import FAULTS, run_selftest
from .transport import (
    FiberCapExceeded as TransportCapExceeded,
    MiddleMarginalError,
    TransportFunctor,
    UnbalancedMassError,
)
from .words import CapTooSmallError, PointedSpace, WordsFunctor

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_COMPUTE = 2
EXIT_MISMATCH = 3

_INPUT_ERRORS = (ParseError, SpaceValidationError, ElementDomainError)
_COMPUTE_ERRORS = (
    CapTooSmallError,
    HyperspaceCapExceeded,
    TransportCapExceeded,
    UnbalancedMassError,
    MiddleMarginalError,
    EmptyFiberError,
)


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load_space_document(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"cannot read space file: {exc}")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_INPUT, f"space file is not valid JSON: {exc}")
    # SpaceValidationError and ParseError propagate to the main handler,
    # which prints the violated axiom and its witness.
    return space_document_from_obj(obj)


def _build_functor(args, element_json):
    kind = args.functor
    if kind == "hyperspace":
        return HyperspaceFunctor()
    if kind == "power":
        norm = PNorm.parse(args.norm)
        if not isinstance(element_json, list):
            raise ParseError("a tuple element is a JSON array of labels")
        return PowerFunctor(len(element_json), norm)
    if kind == "transport":
        return TransportFunctor()
    if kind == "words":
        return WordsFunctor(args.variant, commutative=args.abelian, cap=args.cap)
    raise ParseError(f"unknown functor {kind!r}")


def _parse_element_arg(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"element is not valid JSON: {exc}")


def _single_response(functor, ctx, table, a, b, method: str, args) -> dict:
    if method == "specialized":
        result = functor.distance(ctx, table, a, b)
    else:
        result = extend_generic(functor, ctx, table, a, b, early_exit=False)
    if args.functor == "transport" and args.inject_fault == "transport-solver" and method == "specialized":
        result = type(result)(result.value + 1, result.witness, result.fiber_size_enumerated)
    value = result.value
    response = {
        "functor": functor.name,
        "method": method,
        "value": str(value),
    }
    norm = getattr(functor, "norm", None)
    if norm is not None and not norm.is_max:
        response["p"] = norm.p
        response["value_decimal"] = root_decimal_str(value, norm.p)
    else:
        response["value_decimal"] = decimal_str(value)
    response["witness"] = functor.format_coupling(result.witness, ctx)
    if method == "generic":
        flags = {"fiber_size": result.fiber_size_enumerated}
    elif args.functor == "words":
        flags = {"search_states": result.fiber_size_enumerated}
    else:
        flags = {}
    if args.functor == "words":
        used_cap = args.cap if args.cap is not None else len(a) + len(b) + 2
        flags["cap"] = used_cap
        flags["cap_limited"] = value != 0
    response["flags"] = flags
    return response


def cmd_dist(args) -> int:
    space, basepoint = _load_space_document(args.space)
    element_json = _parse_element_arg(args.a)
    element_json_b = _parse_element_arg(args.b)
    functor = _build_functor(args, element_json)
    if args.functor == "words":
        if basepoint is None:
            raise ParseError('word distances need a "basepoint" entry in the space file')
        ctx = PointedSpace(space, space.index(basepoint))
    else:
        ctx = space
    table = space.pair_table()
    a = functor.parse_element(element_json, ctx)
    b = functor.parse_element(element_json_b, ctx)
    if args.method in ("specialized", "generic"):
        response = _single_response(functor, ctx, table, a, b, args.method, args)
        print(json.dumps(response))
        return EXIT_OK
    specialized = _single_response(functor, ctx, table, a, b, "specialized", args)
    generic = _single_response(functor, ctx, table, a, b, "generic", args)
    match = specialized["value"] == generic["value"]
    print(
        json.dumps(
            {
                "functor": functor.name,
                "method": "both",
                "match": match,
                "specialized": specialized,
                "generic": generic,
            }
        )
    )
    return EXIT_OK if match else EXIT_MISMATCH


def cmd_validate(args) -> int:
    space, basepoint = _load_space_document(args.space)
    sys.stdout.write(canonical_space_json(space, basepoint))
    return EXIT_OK


def cmd_selftest(args) -> int:
    ok = run_selftest(inject_fault=args.inject_fault)
    return EXIT_OK if ok else EXIT_INPUT


def cmd_batch(args) -> int:
    try:
        with open(args.file, "r", encoding="utf-8") as fh:
            requests = json.load(fh)
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"cannot read batch file: {exc}")
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_INPUT, f"batch file is not valid JSON: {exc}")
    if not isinstance(requests, list):
        raise CliError(EXIT_INPUT, "batch file must hold a JSON array of requests")
    responses = []
    worst = EXIT_OK
    for request in requests:
        line, code = _run_batch_entry(request, args)
        responses.append(line)
        worst = worst or code
    print(json.dumps(responses, indent=2))
    return worst


def _run_batch_entry(request, args):
    import io
    from contextlib import redirect_stdout

    if not isinstance(request, dict) or "command" not in request:
        return {"error": "each request needs a 'command' field"}, EXIT_INPUT
    command = request["command"]
    argv = []
    if command == "validate":
        argv = ["validate", "--space", request.get("space", "")]
    elif command == "dist":
        argv = ["dist", request.get("functor", ""), "--space", request.get("space", "")]
        argv += ["--a", json.dumps(request.get("a"))]
        argv += ["--b", json.dumps(request.get("b"))]
        for key in ("norm", "variant", "cap", "method"):
            if key in request:
                argv += [f"--{key}", str(request[key])]
        if request.get("abelian"):
            argv.append("--abelian")
    else:
        return {"error": f"unknown command {command!r}"}, EXIT_INPUT
    buffer = io.StringIO()
    with redirect_stdout(buffer):
        code = main(argv)
    text = buffer.getvalue().strip()
    try:
        payload = json.loads(text) if text else {}
    except json.JSONDecodeError:
        payload = {"output": text}
    if isinstance(payload, dict):
        payload["exit_code"] = code
    return payload, code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fiberdist",
        description="Exact extended distances over coupling fibers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="validate a space file, print canonical form")
    p_validate.add_argument("--space", required=True, help="path to a space JSON file")
    p_validate.set_defaults(handler=cmd_validate)

    p_dist = sub.add_parser("dist", help="distance between two elements")
    p_dist.add_argument("functor", choices=["hyperspace", "power", "transport", "words"])
    p_dist.add_argument("--space", required=True, help="path to a space JSON file")
    p_dist.add_argument("--a", required=True, help="first element, as JSON")
    p_dist.add_argument("--b", required=True, help="second element, as JSON")
    p_dist.add_argument("--norm", default="max", help="power norm: 'max' or 'p:<k>'")
    p_dist.add_argument("--variant", default="graev", choices=["graev", "swierczkowski"])
    p_dist.add_argument("--abelian", action="store_true", help="free-abelian words")
    p_dist.add_argument("--cap", type=int, default=None, help="representation search cap (words)")
    p_dist.add_argument(
        "--method", default="specialized", choices=["specialized", "generic", "both"]
    )
    p_dist.add_argument(
        "--inject-fault",
        default=None,
        choices=list(FAULTS),
        help="testing hook: deliberately corrupt a solver",
    )
    p_dist.set_defaults(handler=cmd_dist)

    p_batch = sub.add_parser("batch", help="run a JSON array of requests")
    p_batch.add_argument("file", help="path to the requests file")
    p_batch.set_defaults(handler=cmd_batch)

    p_selftest = sub.add_parser("selftest", help="run the built-in verification suites")
    p_selftest.add_argument(
        "--inject-fault",
        default=None,
        choices=list(FAULTS),
        help="testing hook: deliberately corrupt a solver",
    )
    p_selftest.set_defaults(handler=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except CliError as exc:
        print(json.dumps({"error": str(exc)}))
        return exc.code
    except _INPUT_ERRORS as exc:
        payload = {"error": str(exc)}
        if isinstance(exc, SpaceValidationError):
            payload["axiom"] = exc.axiom
            payload["witness"] = list(exc.witness)
        print(json.dumps(payload))
        return EXIT_INPUT
    except _COMPUTE_ERRORS as exc:
        print(json.dumps({"error": str(exc)}))
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
