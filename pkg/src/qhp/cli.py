"""Command-line front end: JSON in, JSON out.

Commands::

    det                          determinant / definiteness of a forest
    normalize [--strong]         standard form of a boundary + move witness
    fiber --program p.json       replay a blow-up program [--validate]
    construct --kind K --params  run one of the four surface constructions
    classify --model m.json      classification report for a model
    enumerate --depth k --kind K stream (model, report) pairs as NDJSON

Every command reads JSON from --in (or stdin) and writes JSON to --out (or
stdout).  Exit codes: 0 success, 1 domain rejection (diagnosis on the output
stream), 2 malformed input.  QHP_MAX_DEPTH caps enumeration depth (default 6).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from typing import Any, TextIO

from . import jsonio
from .constructions import construct, enumerate_models, random_built
from .errors import FormatError, QhpError
from .fibers import is_connected_program, new_fiber, replay, validate_fiber
from .flows import is_strongly_balanced, to_standard_form
from .graphs import co_inductance, discriminant, inductance, is_negative_definite
from .report import classify

DEFAULT_MAX_DEPTH = 6


# ---------------------------------------------------------------------------
# plumbing


def _read_json(path: str | None, stdin: TextIO) -> Any:
    try:
        if path is None or path == "-":
            return json.load(stdin)
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError("input is not valid JSON", reason=str(exc)) from exc
    except OSError as exc:
        raise FormatError("cannot read input", path=path, reason=str(exc)) from exc


def _emit(out: TextIO, payload: Any) -> None:
    json.dump(payload, out, indent=2)
    out.write("\n")


# ---------------------------------------------------------------------------
# commands


def _cmd_det(args, stdin: TextIO, out: TextIO) -> int:
    data = _read_json(args.infile, stdin)
    forest = jsonio.forest_from_json(data)
    payload: dict[str, Any] = {
        "d": discriminant(forest),
        "negative_definite": is_negative_definite(forest),
    }
    if isinstance(data, dict) and "chain" in data:
        chain = jsonio.chain_from_json(data)
        if len(chain) and chain.is_admissible:
            payload["e"] = jsonio.rational_to_json(inductance(chain))
            payload["e_tilde"] = jsonio.rational_to_json(co_inductance(chain))
    _emit(out, payload)
    return 0


def _cmd_normalize(args, stdin: TextIO, out: TextIO) -> int:
    forest = jsonio.forest_from_json(_read_json(args.infile, stdin))
    form = to_standard_form(forest)
    payload = jsonio.standard_form_to_json(form)
    if args.strong:
        payload["strongly_balanced"] = is_strongly_balanced(form.forest)
    _emit(out, payload)
    return 0


def _cmd_fiber(args, stdin: TextIO, out: TextIO) -> int:
    program = jsonio.program_from_json(_read_json(args.program, stdin))
    if args.infile is not None:
        start = jsonio.fiber_from_json(_read_json(args.infile, stdin))
    else:
        start = new_fiber()
    res = replay(start, program)
    payload: dict[str, Any] = {
        "fiber": jsonio.fiber_to_json(res.fiber),
        "created": list(res.created),
        "section_touches": dict(res.section_touches),
        "connected": is_connected_program(start, program),
    }
    if args.validate:
        rep = validate_fiber(res.fiber)
        payload["validation"] = {
            "ok": rep.ok,
            "kernel_law": rep.kernel_law,
            "is_tree": rep.is_tree,
            "minus_one": list(rep.minus_one),
            "unique_c": rep.unique_c,
            "clause_i": rep.clause_i,
            "clause_ii": rep.clause_ii,
            "clause_iii": rep.clause_iii,
        }
    _emit(out, payload)
    return 0


def _params_affine(p: dict) -> dict:
    out: dict[str, Any] = {
        "programs": [jsonio.program_from_json(q) for q in p.get("programs", ())]
    }
    if "section" in p:
        out["section"] = p["section"]
    if "section_weight" in p:
        out["section_weight"] = p["section_weight"]
    return out


def _params_cstar(p: dict, *, twisted: bool, projective: bool) -> dict:
    out: dict[str, Any] = {
        "columns": [jsonio.program_from_json(q) for q in p.get("columns", ())],
        "special": (
            jsonio.program_from_json(p["special"]) if p.get("special") else ()
        ),
    }
    if twisted:
        if "section" in p:
            out["section"] = p["section"]
        return out
    if "sections" in p:
        secs = p["sections"]
        if not (isinstance(secs, list) and len(secs) == 2):
            raise FormatError("sections must be a pair of ids")
        out["sections"] = (secs[0], secs[1])
    if projective:
        if "degree" not in p:
            raise FormatError("the projective-base construction needs a degree")
        out["degree"] = p["degree"]
    return out


def _cmd_construct(args, stdin: TextIO, out: TextIO) -> int:
    params = _read_json(args.params or args.infile, stdin)
    if not isinstance(params, dict):
        raise FormatError("construction parameters must be a JSON object")
    kind = args.kind
    if kind == "affine":
        kwargs = _params_affine(params)
    elif kind == "twisted":
        kwargs = _params_cstar(params, twisted=True, projective=False)
    elif kind == "untwisted-c1":
        kwargs = _params_cstar(params, twisted=False, projective=False)
    elif kind == "untwisted-p1":
        kwargs = _params_cstar(params, twisted=False, projective=True)
    else:  # pragma: no cover - argparse restricts choices
        raise FormatError("unknown construction kind", kind=kind)
    built = construct(kind, **kwargs)
    _emit(
        out,
        {
            "model": jsonio.model_to_json(built.model),
            "report": jsonio.report_to_json(built.report),
        },
    )
    return 0


def _cmd_classify(args, stdin: TextIO, out: TextIO) -> int:
    model = jsonio.model_from_json(_read_json(args.model or args.infile, stdin))
    report = classify(model, exceptional=args.exceptional)
    _emit(out, jsonio.report_to_json(report))
    return 0


def _max_depth() -> int:
    raw = os.environ.get("QHP_MAX_DEPTH", str(DEFAULT_MAX_DEPTH))
    try:
        return int(raw)
    except ValueError as exc:
        raise FormatError("QHP_MAX_DEPTH must be an integer", value=raw) from exc


def _cmd_enumerate(args, stdin: TextIO, out: TextIO) -> int:
    cap = _max_depth()
    if args.depth > cap:
        raise QhpError(
            f"depth {args.depth} exceeds QHP_MAX_DEPTH={cap}"
        )
    if args.seed is not None:
        rng = random.Random(args.seed)
        stream = (random_built(args.kind, rng) for _ in range(args.count))
    else:
        stream = enumerate_models(args.kind, args.depth)
    for built in stream:
        line = {
            "model": jsonio.model_to_json(built.model),
            "report": jsonio.report_to_json(built.report),
        }
        out.write(json.dumps(line, separators=(",", ":")))
        out.write("\n")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


_KINDS = ("affine", "twisted", "untwisted-c1", "untwisted-p1")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qhp", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter
    )
    parser.add_argument("--in", dest="infile", default=None, help="input JSON file (default stdin)")
    parser.add_argument("--out", dest="outfile", default=None, help="output file (default stdout)")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("det", help="determinant and definiteness of a forest")

    p_norm = sub.add_parser("normalize", help="standard form of a boundary forest")
    p_norm.add_argument("--strong", action="store_true", help="also report the strongly-balanced verdict")

    p_fiber = sub.add_parser("fiber", help="replay a blow-up program")
    p_fiber.add_argument("--program", required=True, help="program JSON file ('-' for stdin)")
    p_fiber.add_argument("--validate", action="store_true", help="run the fiber validator")

    p_con = sub.add_parser("construct", help="run a surface construction")
    p_con.add_argument("--kind", required=True, choices=_KINDS)
    p_con.add_argument("--params", default=None, help="parameter JSON file (default --in/stdin)")

    p_cls = sub.add_parser("classify", help="classification report for a model")
    p_cls.add_argument("--model", default=None, help="model JSON file (default --in/stdin)")
    p_cls.add_argument("--exceptional", action="store_true", help="mark the surface exceptional")

    p_enum = sub.add_parser("enumerate", help="stream (model, report) pairs as NDJSON")
    p_enum.add_argument("--depth", type=int, required=True, help="total blow-up budget per model")
    p_enum.add_argument("--kind", required=True, choices=_KINDS)
    p_enum.add_argument("--seed", default=None, help="sample randomly instead of exhaustively")
    p_enum.add_argument("--count", type=int, default=20, help="sample size when --seed is given")

    return parser


_COMMANDS = {
    "det": _cmd_det,
    "normalize": _cmd_normalize,
    "fiber": _cmd_fiber,
    "construct": _cmd_construct,
    "classify": _cmd_classify,
    "enumerate": _cmd_enumerate,
}


def run(argv: list[str] | None = None, stdin: TextIO | None = None, stdout: TextIO | None = None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    parser = _build_parser()
    args = parser.parse_args(argv)

    def dispatch(out: TextIO) -> int:
        try:
            return _COMMANDS[args.command](args, stdin, out)
        except FormatError as exc:
            print(f"malformed input: {exc}", file=sys.stderr)
            if exc.details:
                print(json.dumps(exc.details, default=str), file=sys.stderr)
            return 2
        except QhpError as exc:
            _emit(
                out,
                {
                    "error": type(exc).__name__,
                    "message": str(exc),
                    "details": {k: str(v) for k, v in getattr(exc, "details", {}).items()},
                },
            )
            return 1

    if args.outfile and args.outfile != "-":
        with open(args.outfile, "w", encoding="utf-8") as fh:
            return dispatch(fh)
    return dispatch(stdout)


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
