"""The Normative Meta Form: deontic connective vocabulary and validation."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .errors import ToolchainError
from .syntax import (
    Apply,
    Binary,
    Lambda,
    LogicSpec,
    NonClassical,
    Not,
    Problem,
    Quant,
)

OBLIGATION = "$$obligation"
PERMISSION = "$$permission"
PROHIBITION = "$$prohibition"
CONSTITUTIVE = "$$constitutive"
DEONTIC_CONNECTIVES = (OBLIGATION, PERMISSION, PROHIBITION)
NMF_CONNECTIVES = DEONTIC_CONNECTIVES + (CONSTITUTIVE,)

NORMATIVE = "$$normative"
LOGIC_KEY = "$$logic"


class TargetLogic(enum.Enum):
    SDL = "sdl"
    AQVIST_E = "aqvistE"
    CARMO_JONES = "carmoJones"

    @property
    def designator(self) -> str:
        return "$$" + self.value

    @classmethod
    def parse(cls, text: str) -> "TargetLogic":
        name = text[2:] if text.startswith("$$") else text
        for t in cls:
            if t.value == name:
                return t
        raise InvalidLogicSpec(f"unknown target logic {text!r}")


class InvalidLogicSpec(ToolchainError):
    pass


class NmfValidationError(ToolchainError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True)
class Diagnostic:
    formula: str
    path: Tuple[int, ...]
    message: str

    def __str__(self):
        where = self.formula + ("@" + ".".join(map(str, self.path)) if self.path else "")
        return f"{where}: {self.message}"


def children(f):
    """Immediate formula children, in the order used by diagnostic paths."""
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, Binary):
        return (f.left, f.right)
    if isinstance(f, (Quant, Lambda)):
        return (f.body,)
    if isinstance(f, NonClassical):
        return f.args
    if isinstance(f, Apply):
        return (f.function,)
    return ()


def walk_with_paths(f, path=()):
    yield path, f
    for i, c in enumerate(children(f)):
        yield from walk_with_paths(c, path + (i,))


def _check_connective(f: NonClassical) -> List[str]:
    problems = []
    if f.connective not in NMF_CONNECTIVES:
        return [f"unknown user-defined connective {f.connective}"]
    if len(f.args) != 2:
        problems.append(f"{f.connective} takes 2 arguments (body, head), got {len(f.args)}")
    for p in f.params:
        if p.key != "bearer":
            label = f"#{p.value}" if p.key is None else p.key
            problems.append(f"{f.connective}: unsupported parameter {label}")
    bearers = [p for p in f.params if p.key == "bearer"]
    if bearers and f.connective == CONSTITUTIVE:
        problems.append("constitutive norms take no bearer")
    if len(bearers) > 1:
        problems.append(f"{f.connective}: more than one bearer")
    return problems


def _check_spec(spec: LogicSpec) -> List[str]:
    if spec.logic_name != NORMATIVE:
        return [f"logic specification must be {NORMATIVE}, got {spec.logic_name}"]
    if len(spec.options) != 1 or spec.options[0].key != LOGIC_KEY or isinstance(spec.options[0].value, tuple):
        return [f"logic specification must have the shape {NORMATIVE} == [{LOGIC_KEY} == <target>]"]
    return []


def validate_nmf(p: Problem) -> List[Diagnostic]:
    """Return diagnostics; an empty list means ``p`` is well-formed NMF."""
    out = []
    for af in p:
        if af.role == "logic":
            out.extend(Diagnostic(af.name, (), m) for m in _check_spec(af.payload))
            continue
        if af.role == "type":
            continue
        for path, g in walk_with_paths(af.payload):
            if isinstance(g, NonClassical) and g.connective.startswith("$$"):
                out.extend(Diagnostic(af.name, path, m) for m in _check_connective(g))
    return out


def require_nmf(p: Problem) -> None:
    diags = validate_nmf(p)
    if diags:
        raise NmfValidationError(diags)


def read_logic_spec(p: Problem) -> Optional[TargetLogic]:
    """Declared target logic, or None for an underspecified problem."""
    af = p.logic_spec
    if af is None:
        return None
    problems = _check_spec(af.payload)
    if problems:
        raise InvalidLogicSpec(problems[0])
    return TargetLogic.parse(af.payload.options[0].value)


def has_bearers(p: Problem) -> bool:
    return any(
        isinstance(g, NonClassical) and g.connective in NMF_CONNECTIVES and g.param("bearer") is not None
        for af in p
        if af.role not in ("logic", "type")
        for _, g in walk_with_paths(af.payload)
    )
