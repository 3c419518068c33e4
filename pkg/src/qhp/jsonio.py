"""JSON wire formats for forests, fibers, programs, models, and reports.

Every format is self-describing and round-trips through its parser.  Exact
rationals serialize as {"num": "...", "den": "..."} decimal strings so that
arbitrary precision survives JSON; the negative-infinity Kodaira dimension
serializes as the string "-inf".  Malformed payloads raise FormatError,
semantically invalid ones propagate the usual domain errors.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from .counting import RulingCount, SingularityData
from .errors import FormatError
from .fibers import BlowupProgram, FiberTree, Sprout, Step, Subdivide
from .flows import FlowMove, StandardForm
from .graphs import Chain, WeightedForest
from .models import RulingModel, SigmaSummary
from .report import ClassificationReport


def _expect(cond: bool, message: str, **details) -> None:
    if not cond:
        raise FormatError(message, **details)


def _obj(value: Any, what: str) -> dict:
    _expect(isinstance(value, dict), f"{what} must be a JSON object", got=type(value).__name__)
    return value


# ---------------------------------------------------------------------------
# scalars


def rational_to_json(x: Fraction | None) -> dict | None:
    if x is None:
        return None
    return {"num": str(x.numerator), "den": str(x.denominator)}


def rational_from_json(obj: Any) -> Fraction:
    data = _obj(obj, "a rational")
    _expect({"num", "den"} <= set(data), "a rational needs num and den")
    try:
        return Fraction(int(data["num"]), int(data["den"]))
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError("rational fields must be decimal strings") from exc


def kod_to_json(k: float | int | None) -> str | int | None:
    if k is None:
        return None
    if k == float("-inf"):
        return "-inf"
    return int(k)


def kod_from_json(v: Any) -> float | int | None:
    if v is None:
        return None
    if v == "-inf":
        return float("-inf")
    _expect(isinstance(v, int) and v in (0, 1, 2), "a Kodaira dimension is -inf, 0, 1 or 2")
    return v


# ---------------------------------------------------------------------------
# forests and chains


def forest_to_json(forest: WeightedForest) -> dict:
    return {
        "vertices": [
            {"id": v, "weight": forest.weight(v)} for v in forest.vertices
        ],
        "edges": [sorted(e) for e in forest.edge_list()],
    }


def chain_from_json(obj: Any) -> Chain:
    entries = obj.get("chain") if isinstance(obj, dict) else obj
    _expect(
        isinstance(entries, list) and all(isinstance(a, int) for a in entries),
        "a chain is a list of integer entries",
    )
    return Chain(entries)


def forest_from_json(obj: Any) -> WeightedForest:
    data = _obj(obj, "a forest")
    if "chain" in data:
        return chain_from_json(data).to_forest()
    _expect("vertices" in data, "a forest needs vertices (or a chain)")
    weights: dict[str, int] = {}
    for item in data["vertices"]:
        entry = _obj(item, "a vertex")
        _expect(
            isinstance(entry.get("id"), str) and isinstance(entry.get("weight"), int),
            "a vertex is {id: string, weight: integer}",
        )
        _expect(entry["id"] not in weights, "vertex ids must be unique", vertex=entry["id"])
        weights[entry["id"]] = entry["weight"]
    edges = []
    for pair in data.get("edges", ()):
        _expect(
            isinstance(pair, list) and len(pair) == 2
            and all(isinstance(u, str) for u in pair),
            "an edge is a pair of vertex ids",
        )
        edges.append((pair[0], pair[1]))
    return WeightedForest(weights, edges)


# ---------------------------------------------------------------------------
# fibers and programs


def fiber_to_json(fiber: FiberTree) -> dict:
    out = forest_to_json(fiber.forest)
    out["mult"] = {v: fiber.mult[v] for v in fiber.forest.vertices}
    out["role"] = {v: fiber.role[v] for v in fiber.forest.vertices}
    out["attach"] = [list(rec) for rec in fiber.attach]
    return out


def fiber_from_json(obj: Any) -> FiberTree:
    data = _obj(obj, "a fiber")
    forest = forest_from_json(data)
    mult = _obj(data.get("mult"), "fiber mult")
    _expect(all(isinstance(m, int) for m in mult.values()), "multiplicities are integers")
    role = data.get("role")
    if role is not None:
        role = _obj(role, "fiber role")
    attach = []
    for rec in data.get("attach", ()):
        _expect(
            isinstance(rec, list) and len(rec) == 2
            and all(isinstance(u, str) for u in rec),
            "an attach record is a [vertex, section] pair",
        )
        attach.append((rec[0], rec[1]))
    return FiberTree(forest, mult, role, attach)


def step_to_json(step: Step) -> dict:
    if isinstance(step, Sprout):
        return {"sprout": step.target}
    return {"subdivide": [step.a, step.b]}


def step_from_json(obj: Any) -> Step:
    data = _obj(obj, "a step")
    if "sprout" in data:
        _expect(isinstance(data["sprout"], str), "sprout names a vertex")
        return Sprout(data["sprout"])
    _expect("subdivide" in data, "a step is {sprout: v} or {subdivide: [a, b]}")
    pair = data["subdivide"]
    _expect(
        isinstance(pair, list) and len(pair) == 2
        and all(isinstance(u, str) for u in pair),
        "subdivide takes a pair of names",
    )
    return Subdivide(pair[0], pair[1])


def program_to_json(program: BlowupProgram) -> dict:
    return {"steps": [step_to_json(s) for s in program]}


def program_from_json(obj: Any) -> BlowupProgram:
    data = _obj(obj, "a program")
    steps = data.get("steps")
    _expect(isinstance(steps, list), "a program is {steps: [...]}")
    return BlowupProgram(step_from_json(s) for s in steps)


# ---------------------------------------------------------------------------
# flow moves and normal forms


def flow_move_to_json(move: FlowMove) -> dict:
    return {"at": move.at, "center": move.center}


def flow_move_from_json(obj: Any) -> FlowMove:
    data = _obj(obj, "a flow move")
    _expect(isinstance(data.get("at"), str), "a flow move names its 0-vertex")
    center = data.get("center")
    _expect(center is None or isinstance(center, str), "center is a vertex id or null")
    return FlowMove(data["at"], center)


def standard_form_to_json(sf: StandardForm) -> dict:
    return {
        "forest": forest_to_json(sf.forest),
        "moves": [flow_move_to_json(m) for m in sf.moves],
        "chain": list(sf.chain.entries) if sf.chain is not None else None,
        "reversed_chain": (
            list(sf.reversed_chain.entries) if sf.reversed_chain is not None else None
        ),
    }


# ---------------------------------------------------------------------------
# models


def model_to_json(m: RulingModel) -> dict:
    fibers = {f"f{i}": fiber_to_json(F) for i, F in enumerate(m.fibers)}
    out = {
        "ruling": m.ruling,
        "base": m.base,
        "twisted": m.twisted,
        "h": m.h,
        "nu": m.nu,
        "sections": [{"id": n, "weight": w} for n, w in m.sections],
        "fibers": fibers,
        "F0": f"f{m.f0}",
        "F_inf": None,
    }
    if m.f_inf is not None:
        fibers["finf"] = fiber_to_json(m.f_inf)
        out["F_inf"] = "finf"
    if m.blowup_count is not None:
        out["blowup_count"] = m.blowup_count
    return out


def model_from_json(obj: Any) -> RulingModel:
    data = _obj(obj, "a model")
    for key in ("ruling", "base", "sections", "fibers", "F0"):
        _expect(key in data, f"a model needs '{key}'")
    sections = []
    for item in data["sections"]:
        entry = _obj(item, "a section")
        _expect(
            isinstance(entry.get("id"), str) and isinstance(entry.get("weight"), int),
            "a section is {id: string, weight: integer}",
        )
        sections.append((entry["id"], entry["weight"]))
    raw = _obj(data["fibers"], "model fibers")
    f_inf_name = data.get("F_inf")
    _expect(f_inf_name is None or isinstance(f_inf_name, str), "F_inf names a fiber or is null")
    names = [n for n in raw if n != f_inf_name]
    _expect(isinstance(data["F0"], str) and data["F0"] in names, "F0 must name a non-boundary fiber")
    fibers = tuple(fiber_from_json(raw[n]) for n in names)
    f_inf = None
    if f_inf_name is not None:
        _expect(f_inf_name in raw, "F_inf names a missing fiber", name=f_inf_name)
        f_inf = fiber_from_json(raw[f_inf_name])
    model = RulingModel(
        ruling=data["ruling"],
        base=data["base"],
        twisted=bool(data.get("twisted", len(sections) == 1)),
        sections=tuple(sections),
        fibers=fibers,
        f0=names.index(data["F0"]),
        f_inf=f_inf,
        blowup_count=data.get("blowup_count"),
    )
    for key, got in (("h", model.h), ("nu", model.nu)):
        if key in data:
            _expect(data[key] == got, f"declared {key} disagrees with the model", declared=data[key])
    return model


# ---------------------------------------------------------------------------
# reports


def _singularity_to_json(s: SingularityData) -> Any:
    if s.kind == "cyclic":
        assert s.chain is not None
        return list(s.chain.entries)
    if s.kind == "fork":
        return {
            "fork": list(s.fork_type or ()),
            "dynkin": s.dynkin,
            "order": s.order,
        }
    return {"general": True, "order": s.order}


def _ruling_count_to_json(rc: RulingCount | None) -> dict | None:
    if rc is None:
        return None
    return {
        "count": rc.count,
        "rulings": list(rc.rulings),
        "pattern": rc.pattern,
        "pattern_weights": list(rc.pattern_weights),
        "fork_k": rc.fork_k,
    }


def _sigma_to_json(s: SigmaSummary) -> dict:
    return {
        "sigma": s.sigma,
        "h": s.h,
        "nu": s.nu,
        "b2_surface": s.b2_surface,
        "b2_boundary": s.b2_boundary,
        "consistent": s.consistent,
    }


def report_to_json(rep: ClassificationReport) -> dict:
    return {
        "ruling": rep.ruling,
        "twisted": rep.twisted,
        "passed": rep.passed,
        "criterion": [[name, ok] for name, ok in rep.criterion.clauses()],
        "sigma": _sigma_to_json(rep.sigma),
        "d_boundary": rep.d_boundary,
        "d_exceptional": rep.d_exceptional,
        "h1_order": rep.h1_order,
        "h1_decomposition": (
            list(rep.h1_decomposition) if rep.h1_decomposition is not None else None
        ),
        "lambda": rational_to_json(rep.lam),
        "kappa": rational_to_json(rep.kappa),
        "kappa0": rational_to_json(rep.kappa0),
        "kod_S0": kod_to_json(rep.kod_S0),
        "kod_S": kod_to_json(rep.kod_S),
        "F0_case": rep.case_tag,
        "eta_nontrivial": rep.eta_nontrivial,
        "k0_zero": rep.k0_zero,
        "singularities": [_singularity_to_json(s) for s in rep.singularities],
        "logarithmic": rep.logarithmic,
        "exceptional": rep.exceptional,
        "affine_ruled": rep.affine_ruled,
        "r_rulings": _ruling_count_to_json(rep.rulings),
        "contractible_count": rep.contractible,
        "affine_ruling_unique": rep.affine_unique,
    }
