"""Setup files: a TOML document declaring variables, named operators and options.

Example::

    independent = ["x"]
    dependent = ["u"]

    [operators]
    J1 = "D"
    J2 = "D^3 + 2/3*u*D + 1/3*u_x"
    P = [["0", "D"], ["D", "0"]]   # matrix form, one string per entry

    [options]
    max_degree = 3
    max_order = 2
    seed = 0
"""

from __future__ import annotations

import hashlib
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..diffops import DiffOperator
from ..jetalgebra import Signature
from .syntax import ParseError, is_reserved_name, parse_operator

DEFAULT_OPTIONS = {"max_degree": 3, "max_order": 2, "seed": 0, "samples": 20}
_IDENT = re.compile(r"^[A-Za-z][A-Za-z0-9]*$")


class SetupError(ValueError):
    def __init__(self, message: str, source: str = "<setup>", location: str | None = None):
        self.source = source
        self.location = location
        where = f"{source}: {location}" if location else source
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class Setup:
    sig: Signature
    operators: dict[str, DiffOperator] = field(default_factory=dict)
    operator_text: dict[str, object] = field(default_factory=dict)
    options: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_OPTIONS))
    digest: str = ""
    source: str = "<setup>"


def _names(doc, key, source, allow_empty=False) -> tuple[str, ...]:
    if key not in doc:
        raise SetupError(f"missing required key {key!r}", source, key)
    vals = doc[key]
    if not isinstance(vals, list) or not all(isinstance(v, str) for v in vals):
        raise SetupError("expected a list of names", source, key)
    if not vals and not allow_empty:
        raise SetupError("list must not be empty", source, key)
    for v in vals:
        if not _IDENT.match(v):
            raise SetupError(f"invalid name {v!r}", source, key)
        if is_reserved_name(v):
            raise SetupError(f"name {v!r} is reserved for total derivatives", source, key)
    if len(set(vals)) != len(vals):
        raise SetupError("duplicate names", source, key)
    return tuple(vals)


def parse_setup(text: str, source: str = "<setup>") -> Setup:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise SetupError(f"invalid TOML: {exc}", source) from None
    unknown = set(doc) - {"independent", "dependent", "operators", "options"}
    if unknown:
        raise SetupError(f"unknown keys {sorted(unknown)}", source)
    indep = _names(doc, "independent", source)
    dep = _names(doc, "dependent", source)
    clash = set(indep) & set(dep)
    if clash:
        raise SetupError(f"names used as both independent and dependent: {sorted(clash)}", source)
    sig = Signature(indep, dep)

    ops_doc = doc.get("operators", {})
    if not isinstance(ops_doc, dict):
        raise SetupError("expected a table", source, "operators")
    operators, operator_text = {}, {}
    for name, spec in ops_doc.items():
        loc = f"operators.{name}"
        if isinstance(spec, str):
            text_op = spec
        elif isinstance(spec, list) and spec and all(
                isinstance(row, list) and all(isinstance(e, str) for e in row) for row in spec):
            text_op = "[" + ", ".join("[" + ", ".join(f"({e})" for e in row) + "]" for row in spec) + "]"
        else:
            raise SetupError("operator must be a string or a matrix of strings", source, loc)
        try:
            op = parse_operator(text_op, sig)
        except ParseError as exc:
            raise SetupError(str(exc), source, loc) from None
        except ValueError as exc:
            raise SetupError(str(exc), source, loc) from None
        operators[name] = op
        operator_text[name] = spec

    options = dict(DEFAULT_OPTIONS)
    opt_doc = doc.get("options", {})
    if not isinstance(opt_doc, dict):
        raise SetupError("expected a table", source, "options")
    for key, val in opt_doc.items():
        if key not in DEFAULT_OPTIONS:
            raise SetupError(f"unknown option {key!r}", source, f"options.{key}")
        if not isinstance(val, int) or isinstance(val, bool) or val < 0:
            raise SetupError("option must be a non-negative integer", source, f"options.{key}")
        options[key] = val

    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
    return Setup(sig, operators, operator_text, options, digest, source)


def load_setup(path: str | Path) -> Setup:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SetupError(f"cannot read file: {exc.strerror}", str(path)) from None
    return parse_setup(text, path.name)
