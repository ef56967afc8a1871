"""
JSON codecs for every file the tool reads or writes.

Rationals are written as bare integers when integral and as "p/q" strings
otherwise; floats are rejected on input. Output is key-sorted, UTF-8 and
newline-terminated so identical values give identical bytes.
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from pydantic import ValidationError

from src.bundles.charclass import check_psi
from src.bundles.plmap import from_ray_weights
from src.errors import InputFormatError
from src.fan import build_fan
from src.models import (
    Chart,
    ConeWitness,
    Fan,
    Flag,
    KlyachkoFiltration,
    ModuliCandidate,
    OneParamSubgroup,
    PiecewisePolynomial,
    PLMap,
    PsiData,
    Subspace,
    Verdict,
    VerdictStatus,
    WeightedFlag,
)
from src.utils import polynomials


# =========================================
# Scalars and matrices
# =========================================

def dump_rational(x) -> Any:
    f = Fraction(x)
    return f.numerator if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def dump_matrix(rows) -> list:
    return [[dump_rational(x) for x in row] for row in rows]


def dump_vector(values) -> list:
    return [dump_rational(x) for x in values]


def load_rational(value, file: str, path: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise InputFormatError(file, path, "rationals must be integers or \"p/q\" strings")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InputFormatError(file, path, f"cannot read {value!r} as a rational")
    raise InputFormatError(file, path, "expected a rational number")


def load_integer(value, file: str, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputFormatError(file, path, "expected an integer")
    return value


def _list(value, file: str, path: str) -> list:
    if not isinstance(value, list):
        raise InputFormatError(file, path, "expected a list")
    return value


def _object(value, file: str, path: str) -> dict:
    if not isinstance(value, dict):
        raise InputFormatError(file, path, "expected an object")
    return value


def _field(data: dict, key: str, file: str, path: str):
    if key not in data:
        raise InputFormatError(file, f"{path}.{key}", "required field is missing")
    return data[key]


def load_vector(value, file: str, path: str) -> tuple[Fraction, ...]:
    return tuple(load_rational(x, file, f"{path}[{i}]") for i, x in enumerate(_list(value, file, path)))


def load_int_vector(value, file: str, path: str) -> tuple[int, ...]:
    return tuple(load_integer(x, file, f"{path}[{i}]") for i, x in enumerate(_list(value, file, path)))


def load_matrix(value, file: str, path: str, width: Optional[int] = None) -> tuple[tuple[Fraction, ...], ...]:
    rows = tuple(load_vector(row, file, f"{path}[{i}]") for i, row in enumerate(_list(value, file, path)))
    for i, row in enumerate(rows):
        expected = width if width is not None else len(rows[0])
        if len(row) != expected:
            raise InputFormatError(file, f"{path}[{i}]", f"row must have {expected} entries")
    return rows


def _model(file: str, path: str, build):
    try:
        return build()
    except InputFormatError:
        raise
    except ValidationError as e:
        first = e.errors()[0]
        raise InputFormatError(file, path, first.get("msg", str(e)))
    except ValueError as e:
        raise InputFormatError(file, path, str(e))


# =========================================
# Files
# =========================================

def dumps(document, indent: int = 2) -> str:
    return json.dumps(document, indent=indent, sort_keys=True, ensure_ascii=False) + "\n"


def read_json(path: Path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise InputFormatError(str(path), f"line {e.lineno} column {e.colno}", "invalid JSON")


# =========================================
# Fans
# =========================================

def fan_to_json(fan: Fan) -> dict:
    return {
        "lattice_rank": fan.lattice_rank,
        "rays": [list(r) for r in fan.rays],
        "maximal_cones": [list(c) for c in fan.maximal_cones],
    }


def fan_from_json(data, file: str = "fan") -> Fan:
    data = _object(data, file, "$")
    n = load_integer(_field(data, "lattice_rank", file, "$"), file, "$.lattice_rank")
    rays = [
        load_int_vector(r, file, f"$.rays[{i}]")
        for i, r in enumerate(_list(_field(data, "rays", file, "$"), file, "$.rays"))
    ]
    cones = [
        load_int_vector(c, file, f"$.maximal_cones[{i}]")
        for i, c in enumerate(_list(_field(data, "maximal_cones", file, "$"), file, "$.maximal_cones"))
    ]
    try:
        return build_fan(n, rays, cones)
    except InputFormatError as e:
        raise InputFormatError(file, f"$.{e.path}", e.invariant) from e


# =========================================
# Flags
# =========================================

def flag_to_json(flag: Flag) -> list:
    return [dump_matrix(step.rows) for step in flag.steps]


def flag_from_json(data, rank: int, file: str, path: str) -> Flag:
    steps = tuple(
        Subspace.spanned_by(rank, load_matrix(m, file, f"{path}[{j}]", width=rank))
        for j, m in enumerate(_list(data, file, path))
    )
    return _model(file, path, lambda: Flag(ambient=rank, steps=steps))


def weighted_flag_to_json(wf: WeightedFlag) -> dict:
    return {"steps": flag_to_json(wf.flag), "weights": dump_vector(wf.weights)}


def weighted_flag_from_json(data, rank: int, file: str, path: str) -> WeightedFlag:
    data = _object(data, file, path)
    flag = flag_from_json(_field(data, "steps", file, path), rank, file, f"{path}.steps")
    weights = load_vector(_field(data, "weights", file, path), file, f"{path}.weights")
    return _model(file, path, lambda: WeightedFlag(flag=flag, weights=weights))


def weighted_flags_to_json(rank: int, flags) -> dict:
    return {"rank": rank, "flags": [weighted_flag_to_json(wf) for wf in flags]}


def weighted_flags_from_json(data, file: str = "flags") -> tuple[int, tuple[WeightedFlag, ...]]:
    data = _object(data, file, "$")
    rank = load_integer(_field(data, "rank", file, "$"), file, "$.rank")
    items = _list(_field(data, "flags", file, "$"), file, "$.flags")
    return rank, tuple(weighted_flag_from_json(x, rank, file, f"$.flags[{i}]") for i, x in enumerate(items))


# =========================================
# One-parameter subgroups
# =========================================

def onepar_to_json(lam: OneParamSubgroup) -> dict:
    return {"frame": dump_matrix(lam.frame), "weights": list(lam.weights)}


def onepar_from_json(data, file: str = "onepar") -> OneParamSubgroup:
    data = _object(data, file, "$")
    weights = load_int_vector(_field(data, "weights", file, "$"), file, "$.weights")
    frame = load_matrix(_field(data, "frame", file, "$"), file, "$.frame", width=len(weights))
    if len(frame) != len(weights):
        raise InputFormatError(file, "$.frame", f"frame must be {len(weights)}x{len(weights)}")
    return _model(file, "$", lambda: OneParamSubgroup(frame=frame, weights=weights))


# =========================================
# Piecewise linear maps
# =========================================

def plmap_to_json(phi: PLMap) -> dict:
    charts = sorted(phi.charts, key=lambda c: c.cone)
    return {
        "rank": phi.rank,
        "charts": [
            {
                "cone": list(c.cone),
                "frame": dump_matrix(c.frame),
                "weights_matrix": dump_matrix(c.weights_matrix),
            }
            for c in charts
        ],
    }


def plmap_from_json(data, fan: Fan, file: str = "plmap") -> PLMap:
    """
    Charts give either a "weights_matrix" on the saturated lattice basis or
    "ray_weights", one weight vector per ray of the cone in index order.
    """
    data = _object(data, file, "$")
    rank = load_integer(_field(data, "rank", file, "$"), file, "$.rank")
    charts = []
    for i, raw in enumerate(_list(_field(data, "charts", file, "$"), file, "$.charts")):
        path = f"$.charts[{i}]"
        raw = _object(raw, file, path)
        cone = tuple(sorted(load_int_vector(_field(raw, "cone", file, path), file, f"{path}.cone")))
        frame = load_matrix(_field(raw, "frame", file, path), file, f"{path}.frame")
        if "weights_matrix" in raw:
            matrix = load_matrix(raw["weights_matrix"], file, f"{path}.weights_matrix")
            charts.append(_model(file, path, lambda: Chart(cone=cone, frame=frame, weights_matrix=matrix)))
        elif "ray_weights" in raw:
            weights = load_matrix(raw["ray_weights"], file, f"{path}.ray_weights")
            if cone not in fan.maximal_cones:
                raise InputFormatError(file, f"{path}.cone", "ray weights are only accepted on maximal cones")
            charts.append(from_ray_weights(fan, rank, cone, frame, weights))
        else:
            raise InputFormatError(file, path, "chart needs \"weights_matrix\" or \"ray_weights\"")
    return PLMap(fan=fan, rank=rank, charts=tuple(charts))


# =========================================
# Piecewise polynomials and Ψ
# =========================================

def poly_to_json(p) -> list:
    return [[dump_rational(c), list(exps)] for c, exps in polynomials.to_terms(p)]


def poly_from_json(data, nvars: int, file: str, path: str):
    ring = polynomials.lattice_ring(nvars)
    terms = []
    for i, term in enumerate(_list(data, file, path)):
        term = _list(term, file, f"{path}[{i}]")
        if len(term) != 2:
            raise InputFormatError(file, f"{path}[{i}]", "a term is [coefficient, [exponents]]")
        coeff = load_rational(term[0], file, f"{path}[{i}][0]")
        exps = load_int_vector(term[1], file, f"{path}[{i}][1]")
        if len(exps) != nvars or any(e < 0 for e in exps):
            raise InputFormatError(file, f"{path}[{i}][1]", f"exponents must be {nvars} nonnegative integers")
        terms.append((coeff, exps))
    return polynomials.from_terms(ring, terms)


def pp_to_json(p: PiecewisePolynomial) -> list:
    pieces = sorted(zip(p.fan.maximal_cones, p.pieces), key=lambda item: item[0])
    return [{"cone": list(cone), "poly": poly_to_json(piece)} for cone, piece in pieces]


def pp_from_json(data, fan: Fan, file: str, path: str) -> PiecewisePolynomial:
    found = {}
    for i, raw in enumerate(_list(data, file, path)):
        raw = _object(raw, file, f"{path}[{i}]")
        cone = tuple(sorted(load_int_vector(_field(raw, "cone", file, f"{path}[{i}]"), file, f"{path}[{i}].cone")))
        if cone not in fan.maximal_cones:
            raise InputFormatError(file, f"{path}[{i}].cone", f"{cone} is not a maximal cone of the fan")
        if cone in found:
            raise InputFormatError(file, f"{path}[{i}].cone", "cone listed twice")
        found[cone] = poly_from_json(_field(raw, "poly", file, f"{path}[{i}]"), fan.lattice_rank, file, f"{path}[{i}].poly")
    missing = [c for c in fan.maximal_cones if c not in found]
    if missing:
        raise InputFormatError(file, path, f"no polynomial for maximal cone {missing[0]}")
    return PiecewisePolynomial(fan=fan, pieces=tuple(found[c] for c in fan.maximal_cones))


def psi_to_json(psi: PsiData) -> dict:
    return {"rank": psi.rank, "classes": [pp_to_json(cls) for cls in psi.classes]}


def psi_from_json(data, fan: Fan, file: str = "psi") -> PsiData:
    data = _object(data, file, "$")
    rank = load_integer(_field(data, "rank", file, "$"), file, "$.rank")
    items = _list(_field(data, "classes", file, "$"), file, "$.classes")
    classes = tuple(pp_from_json(x, fan, file, f"$.classes[{k}]") for k, x in enumerate(items))
    psi = _model(file, "$.classes", lambda: PsiData(rank=rank, classes=classes))
    problems = check_psi(psi)
    if problems:
        raise InputFormatError(file, "$.classes", problems[0])
    return psi


def class_to_json(p: PiecewisePolynomial, generator: str) -> dict:
    return {"generator": generator, "pieces": pp_to_json(p)}


# =========================================
# Candidates and verdicts
# =========================================

def candidate_to_json(cand: ModuliCandidate) -> dict:
    return {"rank": cand.rank, "flags": [flag_to_json(f) for f in cand.flags]}


def candidate_from_json(data, fan: Fan, file: str = "candidate") -> ModuliCandidate:
    data = _object(data, file, "$")
    rank = load_integer(_field(data, "rank", file, "$"), file, "$.rank")
    items = _list(_field(data, "flags", file, "$"), file, "$.flags")
    flags = tuple(flag_from_json(x, rank, file, f"$.flags[{i}]") for i, x in enumerate(items))
    return _model(file, "$.flags", lambda: ModuliCandidate(fan=fan, rank=rank, flags=flags))


def witness_to_json(w: ConeWitness, full: bool = True) -> dict:
    out = {"cone": list(w.cone), "status": w.status.value, "reason": w.reason}
    if full:
        out.update({
            "basis": dump_matrix(w.basis) if w.basis is not None else None,
            "cocharacters": [list(g) for g in w.cocharacters],
            "kernel": [dump_vector(c) for c in w.kernel],
            "residuals": [dump_vector(c) for c in w.residuals],
        })
    return out


def verdict_to_json(verdict: Verdict, witnesses: bool = True) -> dict:
    return {
        "status": verdict.status.value,
        "witnesses": [witness_to_json(w, witnesses) for w in sorted(verdict.witnesses, key=lambda w: w.cone)],
    }


def verdict_from_json(data, file: str = "verdict") -> Verdict:
    data = _object(data, file, "$")
    witnesses = []
    for i, raw in enumerate(_list(_field(data, "witnesses", file, "$"), file, "$.witnesses")):
        path = f"$.witnesses[{i}]"
        raw = _object(raw, file, path)
        basis = raw.get("basis")
        witnesses.append(_model(file, path, lambda: ConeWitness(
            cone=load_int_vector(_field(raw, "cone", file, path), file, f"{path}.cone"),
            status=VerdictStatus(_field(raw, "status", file, path)),
            basis=load_matrix(basis, file, f"{path}.basis") if basis is not None else None,
            cocharacters=tuple(
                load_int_vector(g, file, f"{path}.cocharacters[{j}]")
                for j, g in enumerate(raw.get("cocharacters", []))
            ),
            reason=raw.get("reason"),
            kernel=tuple(load_vector(c, file, f"{path}.kernel[{j}]") for j, c in enumerate(raw.get("kernel", []))),
            residuals=tuple(load_vector(c, file, f"{path}.residuals[{j}]") for j, c in enumerate(raw.get("residuals", []))),
        )))
    try:
        status = VerdictStatus(_field(data, "status", file, "$"))
    except ValueError:
        raise InputFormatError(file, "$.status", "status must be ACCEPTED, REJECTED or INDETERMINATE")
    return _model(file, "$", lambda: Verdict(status=status, witnesses=tuple(witnesses)))


def census_to_json(points) -> dict:
    return {"count": len(points), "candidates": [candidate_to_json(c) for c in points]}


# =========================================
# Klyachko filtrations
# =========================================

def klyachko_to_json(rank: int, filtrations) -> dict:
    return {
        "rank": rank,
        "filtrations": [
            [{"index": i, "basis": dump_matrix(space.rows)} for i, space in f.pieces]
            for f in filtrations
        ],
    }


def klyachko_from_json(data, file: str = "klyachko") -> tuple[int, tuple[KlyachkoFiltration, ...]]:
    data = _object(data, file, "$")
    rank = load_integer(_field(data, "rank", file, "$"), file, "$.rank")
    out = []
    for k, raw in enumerate(_list(_field(data, "filtrations", file, "$"), file, "$.filtrations")):
        path = f"$.filtrations[{k}]"
        pieces = []
        for j, piece in enumerate(_list(raw, file, path)):
            piece = _object(piece, file, f"{path}[{j}]")
            index = load_integer(_field(piece, "index", file, f"{path}[{j}]"), file, f"{path}[{j}].index")
            basis = load_matrix(_field(piece, "basis", file, f"{path}[{j}]"), file, f"{path}[{j}].basis", width=rank)
            pieces.append((index, Subspace.spanned_by(rank, basis)))
        out.append(_model(file, path, lambda: KlyachkoFiltration(ambient=rank, pieces=tuple(pieces))))
    return rank, tuple(out)


# =========================================
# Schemas
# =========================================

_RATIONAL = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": "^-?[0-9]+(/[0-9]+)?$"}]}
_MATRIX = {"type": "array", "items": {"type": "array", "items": _RATIONAL}}
_INDEX_LIST = {"type": "array", "items": {"type": "integer", "minimum": 0}}
_POLY = {
    "type": "array",
    "items": {"type": "array", "prefixItems": [_RATIONAL, {"type": "array", "items": {"type": "integer"}}]},
}
_PIECES = {
    "type": "array",
    "items": {"type": "object", "required": ["cone", "poly"], "properties": {"cone": _INDEX_LIST, "poly": _POLY}},
}
_FLAG = {"type": "array", "items": _MATRIX}

SCHEMAS = {
    "onepar": {
        "type": "object",
        "required": ["frame", "weights"],
        "properties": {"frame": _MATRIX, "weights": {"type": "array", "items": {"type": "integer"}}},
    },
    "fan": {
        "type": "object",
        "required": ["lattice_rank", "rays", "maximal_cones"],
        "properties": {
            "lattice_rank": {"type": "integer", "minimum": 1},
            "rays": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
            "maximal_cones": {"type": "array", "items": _INDEX_LIST},
        },
    },
    "plmap": {
        "type": "object",
        "required": ["rank", "charts"],
        "properties": {
            "rank": {"type": "integer", "minimum": 1},
            "charts": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["cone", "frame"],
                    "properties": {
                        "cone": _INDEX_LIST,
                        "frame": _MATRIX,
                        "weights_matrix": _MATRIX,
                        "ray_weights": _MATRIX,
                    },
                },
            },
        },
    },
    "psi": {
        "type": "object",
        "required": ["rank", "classes"],
        "properties": {"rank": {"type": "integer", "minimum": 1}, "classes": {"type": "array", "items": _PIECES}},
    },
    "class": {
        "type": "object",
        "required": ["generator", "pieces"],
        "properties": {"generator": {"type": "string"}, "pieces": _PIECES},
    },
    "candidate": {
        "type": "object",
        "required": ["rank", "flags"],
        "properties": {"rank": {"type": "integer", "minimum": 1}, "flags": {"type": "array", "items": _FLAG}},
    },
    "verdict": {
        "type": "object",
        "required": ["status", "witnesses"],
        "properties": {
            "status": {"enum": ["ACCEPTED", "REJECTED", "INDETERMINATE"]},
            "witnesses": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["cone", "status"],
                    "properties": {
                        "cone": _INDEX_LIST,
                        "status": {"enum": ["ACCEPTED", "REJECTED", "INDETERMINATE"]},
                        "reason": {"type": ["string", "null"]},
                        "basis": {"oneOf": [_MATRIX, {"type": "null"}]},
                        "cocharacters": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
                        "kernel": _MATRIX,
                        "residuals": _MATRIX,
                    },
                },
            },
        },
    },
    "flags": {
        "type": "object",
        "required": ["rank", "flags"],
        "properties": {
            "rank": {"type": "integer", "minimum": 1},
            "flags": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["steps", "weights"],
                    "properties": {"steps": _FLAG, "weights": {"type": "array", "items": _RATIONAL}},
                },
            },
        },
    },
    "klyachko": {
        "type": "object",
        "required": ["rank", "filtrations"],
        "properties": {
            "rank": {"type": "integer", "minimum": 1},
            "filtrations": {
                "type": "array",
                "items": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["index", "basis"],
                        "properties": {"index": {"type": "integer"}, "basis": _MATRIX},
                    },
                },
            },
        },
    },
}


def schema_text(name: str) -> str:
    if name not in SCHEMAS:
        raise KeyError(f"unknown schema '{name}'; choose from {', '.join(sorted(SCHEMAS))}")
    document = {"$schema": "https://json-schema.org/draft/2020-12/schema", "title": name, **SCHEMAS[name]}
    return dumps(document)
