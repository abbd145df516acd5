"""Problem files: eigenvalue expressions and JSON validation."""

from __future__ import annotations

import ast
import json
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

import jsonschema

from .multgroup import MultElement
from .spectral import ClassSpec, ValidationError

PROBLEM_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["classes"],
    "additionalProperties": False,
    "properties": {
        "description": {"type": "string"},
        "symbols": {"type": "array", "items": {"type": "string", "pattern": "^[A-Za-z_][A-Za-z0-9_]*$"}},
        "classes": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["eigenvalues"],
                "additionalProperties": False,
                "properties": {
                    "n": {"type": "integer", "minimum": 1},
                    "semisimple": {"type": "boolean"},
                    "eigenvalues": {
                        "type": "array",
                        "minItems": 1,
                        "items": {"type": ["string", "integer"]},
                    },
                    "multiplicities": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                    "ranks": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                },
                "oneOf": [{"required": ["multiplicities"]}, {"required": ["ranks"]}],
            },
        },
        "theta": {
            "type": "object",
            "additionalProperties": {"type": ["string", "integer"]},
        },
    },
}


def _pointer(path: Iterable[Any]) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in path)


_ALLOWED = (
    ast.Expression,
    ast.BinOp,
    ast.UnaryOp,
    ast.Mult,
    ast.Div,
    ast.Pow,
    ast.USub,
    ast.UAdd,
    ast.Constant,
    ast.Name,
    ast.Call,
    ast.Load,
)


def parse_eigenvalue(text: str | int, symbols: set[str] | None = None, pointer: str = "") -> MultElement:
    """Parse products and integer powers of rationals, zeta(N) and symbols.

    ``^`` and ``**`` both mean power.  When ``symbols`` is given, identifiers
    outside it are rejected.
    """
    if isinstance(text, bool):
        raise ValidationError("boolean is not an eigenvalue", pointer)
    if isinstance(text, int):
        return MultElement.from_rational(text) if text else _zero(pointer)
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError:
        raise ValidationError(f"cannot parse eigenvalue {text!r}", pointer) from None
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED):
            raise ValidationError(f"unsupported syntax in {text!r}", pointer)

    def ev(node: ast.AST) -> MultElement | int | Fraction:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                raise ValidationError(f"only integer literals are allowed, got {node.value!r}", pointer)
            return node.value
        if isinstance(node, ast.Name):
            if node.id == "zeta":
                raise ValidationError("zeta must be called as zeta(N)", pointer)
            if symbols is not None and node.id not in symbols:
                raise ValidationError(f"undeclared symbol {node.id!r}", pointer)
            return MultElement.symbol(node.id)
        if isinstance(node, ast.Call):
            if not (isinstance(node.func, ast.Name) and node.func.id == "zeta") or node.keywords or len(node.args) != 1:
                raise ValidationError("the only function is zeta(N)", pointer)
            order = ev(node.args[0])
            if not isinstance(order, int) or order < 1:
                raise ValidationError("zeta(N) needs a positive integer N", pointer)
            return MultElement.root_of_unity(order)
        if isinstance(node, ast.UnaryOp):
            val = ev(node.operand)
            if isinstance(node.op, ast.UAdd):
                return val
            return -val if not isinstance(val, MultElement) else MultElement.root_of_unity(2) * val
        if isinstance(node, ast.BinOp):
            left, right = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Pow):
                if not isinstance(right, int):
                    raise ValidationError("exponents must be integer literals", pointer)
                if isinstance(left, MultElement):
                    return left**right
                return Fraction(left) ** right
            if not isinstance(left, MultElement) and not isinstance(right, MultElement):
                if isinstance(node.op, ast.Mult):
                    return left * right
                if right == 0:
                    raise ValidationError("division by zero", pointer)
                return Fraction(left, 1) / right
            a, b = _lift(left, pointer), _lift(right, pointer)
            return a * b if isinstance(node.op, ast.Mult) else a / b
        raise ValidationError(f"unsupported syntax in {text!r}", pointer)

    return _lift(ev(tree), pointer)


def _zero(pointer: str) -> MultElement:
    raise ValidationError("0 is not an invertible eigenvalue", pointer)


def _lift(x: MultElement | int | Fraction, pointer: str) -> MultElement:
    if isinstance(x, MultElement):
        return x
    if x == 0:
        _zero(pointer)
    return MultElement.from_rational(Fraction(x))


def _rational(value: Any, pointer: str) -> Fraction:
    if isinstance(value, bool):
        raise ValidationError("expected a rational", pointer)
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError):
        raise ValidationError(f"expected a rational like 1/2, got {value!r}", pointer) from None


def validate_problem(doc: Any) -> None:
    validator = jsonschema.Draft202012Validator(PROBLEM_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ValidationError(err.message, _pointer(err.absolute_path))


def load_problem(doc: Mapping[str, Any]) -> tuple[list[ClassSpec], dict[str, Fraction]]:
    """Validate a problem document and return (classes, theta)."""
    validate_problem(doc)
    symbols = set(doc["symbols"]) if "symbols" in doc else None
    classes = []
    for j, raw in enumerate(doc["classes"]):
        base = f"/classes/{j}"
        eig = [parse_eigenvalue(x, symbols, f"{base}/eigenvalues/{i}") for i, x in enumerate(raw["eigenvalues"])]
        try:
            if "multiplicities" in raw:
                if raw.get("semisimple") is False:
                    raise ValidationError("multiplicities describe a semisimple class", "/semisimple")
                c = ClassSpec.from_multiplicities(eig, raw["multiplicities"])
            else:
                c = ClassSpec(tuple(eig), tuple(raw["ranks"]), bool(raw.get("semisimple", False)))
        except ValidationError as exc:
            raise ValidationError(exc.args[0], base + exc.pointer) from None
        if "n" in raw and raw["n"] != c.n:
            raise ValidationError(f"n = {raw['n']} but the class has size {c.n}", f"{base}/n")
        if j and c.n != classes[0].n:
            raise ValidationError(f"class has size {c.n}, expected {classes[0].n}", f"{base}")
        classes.append(c)
    theta = {k: _rational(v, f"/theta/{k}") for k, v in doc.get("theta", {}).items()}
    return classes, theta


def read_json(path: str, stdin=None) -> Any:
    import sys

    try:
        if path == "-":
            return json.load(stdin or sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc.msg} (line {exc.lineno})", "") from None


def problem_document(classes: Sequence[ClassSpec], theta: Mapping[str, Fraction] | None = None, description: str = "") -> dict:
    """Serialize classes back into the problem-file format."""
    symbols = sorted({s for c in classes for x in c.eigenvalues for s in x.symbols()})
    out: dict[str, Any] = {}
    if description:
        out["description"] = description
    out["symbols"] = symbols
    out["classes"] = []
    for c in classes:
        entry: dict[str, Any] = {"n": c.n, "semisimple": c.semisimple, "eigenvalues": [str(x) for x in c.eigenvalues]}
        if c.semisimple:
            entry["multiplicities"] = list(c.increments())
        else:
            entry["ranks"] = list(c.ranks)
        out["classes"].append(entry)
    if theta:
        out["theta"] = {k: str(v) for k, v in theta.items()}
    return out
