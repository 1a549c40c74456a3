"""JSON encoding of scalars, operators and run configurations.

Scalars
    exact: ``"p/q"`` when real, ``["p/q", "r/s"]`` otherwise;
    float: a number when real, ``[re, im]`` otherwise.
Operators
    ``{"form": ..., "order": m, "backend": "exact"|"float",
    "precision_bits": 53, "coeffs": [...]}``.  Polynomials are ascending
    coefficient lists; a standard-form coefficient is a polynomial or
    ``{"num": [...], "den": [...]}``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import resources

import jsonschema
import mpmath

from .errors import OperatorError
from .operator_core import DifferentialOperator, make_operator, to_backend
from .polynomials import Poly, RatFunc
from .scalars import Backend, GaussRat, is_exact

__all__ = [
    "OperatorFileError",
    "RunConfig",
    "scalar_to_json",
    "scalar_from_json",
    "parse_scalar_text",
    "operator_to_json",
    "operator_from_json",
    "load_operator",
    "load_schema",
    "schema_names",
    "validate",
]


class OperatorFileError(ValueError):
    """Unreadable operator file; ``line``/``column`` locate JSON syntax errors."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


def _frac_str(q: Fraction) -> str:
    return str(q)


def scalar_to_json(x):
    if isinstance(x, bool):
        raise TypeError("boolean is not a scalar")
    if is_exact(x):
        g = GaussRat._coerce(x)
        if not g.im:
            return _frac_str(g.re)
        return [_frac_str(g.re), _frac_str(g.im)]
    if isinstance(x, (mpmath.mpf, mpmath.mpc)):
        x = complex(x)
    x = complex(x)
    if x.imag == 0:
        return x.real
    return [x.real, x.imag]


def _component(v, exact: bool):
    if isinstance(v, bool):
        raise OperatorError("boolean is not a number")
    if isinstance(v, str):
        try:
            q = Fraction(v.strip())
        except ValueError as exc:
            raise OperatorError(f"bad number {v!r}") from exc
        return q if exact else float(q)
    if isinstance(v, int):
        return Fraction(v) if exact else float(v)
    if isinstance(v, float):
        return Fraction(v) if exact else v
    raise OperatorError(f"bad number {v!r}")


def scalar_from_json(obj, backend: Backend):
    exact = backend.exact
    if isinstance(obj, list):
        if len(obj) != 2:
            raise OperatorError("complex scalars are [re, im] pairs")
        re, im = (_component(v, exact) for v in obj)
    else:
        re, im = _component(obj, exact), 0
    if exact:
        return GaussRat(re, im)
    return backend.coerce(complex(re, im))


def parse_scalar_text(text: str, backend: Backend):
    """``"0.2"``, ``"1/5"`` or ``"re,im"`` (each part a decimal or fraction)."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) not in (1, 2) or not all(parts):
        raise ValueError(f"expected 're' or 're,im', got {text!r}")
    return scalar_from_json(parts if len(parts) == 2 else parts[0], backend)


def _poly_to_json(p: Poly):
    return [scalar_to_json(c) for c in p.coeffs]


def operator_to_json(op: DifferentialOperator) -> dict:
    if op.form == "standard":
        coeffs = []
        for q in op.coeffs:
            if q.den.degree == 0 and q.den.lc == 1:
                coeffs.append(_poly_to_json(q.num))
            else:
                coeffs.append({"num": _poly_to_json(q.num), "den": _poly_to_json(q.den)})
    else:
        coeffs = [_poly_to_json(p) for p in op.coeffs]
    out = {"form": op.form, "order": op.order, "coeffs": coeffs}
    out.update(op.backend.to_json())
    return out


def _poly_from_json(items, backend: Backend) -> Poly:
    return Poly([scalar_from_json(c, backend) for c in items])


def operator_from_json(doc: dict, backend: Backend | None = None) -> DifferentialOperator:
    """Build an operator; ``backend`` overrides the document's own choice."""
    validate(doc, "operator")
    declared = Backend(doc.get("backend", "exact"), int(doc.get("precision_bits", 53)))
    be = declared
    form = doc["form"]
    coeffs = []
    with be.context():
        for c in doc["coeffs"]:
            if form == "standard" and isinstance(c, dict):
                coeffs.append(RatFunc(_poly_from_json(c["num"], be), _poly_from_json(c["den"], be), reduce=be.exact))
            elif form == "standard":
                coeffs.append(RatFunc(_poly_from_json(c, be), reduce=be.exact))
            else:
                coeffs.append(_poly_from_json(c, be))
    op = make_operator(form, coeffs, order=doc.get("order"), backend=be)
    if backend is not None and backend != op.backend:
        op = to_backend(op, backend)
    return op


def load_operator(path: str, backend: Backend | None = None) -> DifferentialOperator:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise OperatorFileError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OperatorFileError(f"{path}: {exc.msg}", exc.lineno, exc.colno) from exc
    return operator_from_json(doc, backend)


# ---------------------------------------------------------------------------
# schemas


def schema_names() -> list[str]:
    files = resources.files("fuchsian_cf").joinpath("schemas")
    return sorted(p.name[: -len(".schema.json")] for p in files.iterdir() if p.name.endswith(".schema.json"))


def load_schema(name: str) -> dict:
    path = resources.files("fuchsian_cf").joinpath("schemas", f"{name}.schema.json")
    return json.loads(path.read_text(encoding="utf-8"))


def validate(doc, name: str):
    try:
        jsonschema.validate(doc, load_schema(name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise OperatorError(f"{name} document invalid at {where}: {exc.message}") from exc


# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    """Every setting of one CLI run; serializes to plain JSON and back."""

    subcommand: str
    op_path: str | None = None
    z: str | None = None
    grid: str | None = None
    tol: float | None = None
    n_max: int | None = None
    depth: int | None = None
    backend: str = "exact"
    precision_bits: int = 53
    out: str = "json"
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, doc: dict) -> "RunConfig":
        return cls(**doc)
