"""Abstract syntax for the TPTP subset used throughout the toolchain.

One set of node classes serves both surface languages: TFF/NXF input and
THF output.  All nodes are frozen dataclasses, so values can be shared,
hashed and compared structurally.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Tuple, Union

from .errors import ToolchainError

LOWER_WORD = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
UPPER_WORD = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")
DOLLAR_WORD = re.compile(r"\$\$?[a-z][A-Za-z0-9_]*\Z")
INTEGER = re.compile(r"[0-9]+\Z")

LANGUAGES = ("tff", "thf")
ROLES = ("axiom", "type", "definition", "conjecture", "logic")
BINARY_OPS = ("&", "|", "=>", "<=>")
QUANTIFIERS = ("!", "?")


class TptpError(ToolchainError):
    pass


class DuplicateName(TptpError):
    def __init__(self, name: str):
        super().__init__(f"duplicate formula name {name!r}")
        self.name = name


class ArityMismatch(TptpError):
    pass


# -- types -----------------------------------------------------------------


@dataclass(frozen=True)
class BaseType:
    name: str


@dataclass(frozen=True)
class FunType:
    """``(a1 * ... * an) > result``; curried THF arrows nest one arg each."""

    args: Tuple["Type", ...]
    result: "Type"


Type = Union[BaseType, FunType]

TYPE_I = BaseType("$i")
TYPE_O = BaseType("$o")
TYPE_TTYPE = BaseType("$tType")


def curried(*types: Type) -> Type:
    """``curried(a, b, c)`` is ``a > b > c``."""
    result = types[-1]
    for arg in reversed(types[:-1]):
        result = FunType((arg,), result)
    return result


# -- terms -----------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str
    type: Optional[Type] = None


@dataclass(frozen=True)
class Func:
    """Function application; constants are nullary applications."""

    name: str
    args: Tuple["Term", ...] = ()


Term = Union[Var, Func]


# -- formulas --------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    pred: str
    args: Tuple[Term, ...] = ()


@dataclass(frozen=True)
class Truth:
    value: bool


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Formula"
    right: "Formula"

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise TptpError(f"unknown binary connective {self.op!r}")


@dataclass(frozen=True)
class Quant:
    quantifier: str
    variables: Tuple[Var, ...]
    body: "Formula"

    def __post_init__(self):
        if self.quantifier not in QUANTIFIERS:
            raise TptpError(f"unknown quantifier {self.quantifier!r}")
        if not self.variables:
            raise TptpError("quantifier without bound variables")


@dataclass(frozen=True)
class Param:
    """Connective parameter: ``key := value``, or the index ``#value`` if key is None."""

    key: Optional[str]
    value: Term


@dataclass(frozen=True)
class NonClassical:
    connective: str
    args: Tuple["Formula", ...]
    params: Tuple[Param, ...] = ()

    def __post_init__(self):
        if not self.connective.startswith("$"):
            raise TptpError(f"connective name must start with '$': {self.connective!r}")

    def param(self, key: Optional[str]) -> Optional[Term]:
        for p in self.params:
            if p.key == key:
                return p.value
        return None


@dataclass(frozen=True)
class Lambda:
    variables: Tuple[Var, ...]
    body: "Formula"


@dataclass(frozen=True)
class Apply:
    """Higher-order application whose head is not a constant symbol."""

    function: "Formula"
    args: Tuple[Term, ...]


Formula = Union[Atom, Truth, Not, Binary, Quant, NonClassical, Lambda, Apply]

TRUE = Truth(True)
FALSE = Truth(False)


def conj(*fs: Formula) -> Formula:
    if not fs:
        return TRUE
    out = fs[0]
    for f in fs[1:]:
        out = Binary("&", out, f)
    return out


def disj(*fs: Formula) -> Formula:
    if not fs:
        return FALSE
    out = fs[0]
    for f in fs[1:]:
        out = Binary("|", out, f)
    return out


def implies(a: Formula, b: Formula) -> Formula:
    return Binary("=>", a, b)


# -- non-formula payloads --------------------------------------------------


@dataclass(frozen=True)
class TypeDecl:
    symbol: str
    type: Type


@dataclass(frozen=True)
class Option:
    key: str
    value: Union[str, Tuple["Option", ...]]


@dataclass(frozen=True)
class LogicSpec:
    logic_name: str
    options: Tuple[Option, ...] = ()

    def __post_init__(self):
        _check_unique_keys(self.options)

    def get(self, key: str):
        for opt in self.options:
            if opt.key == key:
                return opt.value
        return None


def _check_unique_keys(options):
    seen = set()
    for opt in options:
        if opt.key in seen:
            raise TptpError(f"duplicate logic option key {opt.key!r}")
        seen.add(opt.key)
        if isinstance(opt.value, tuple):
            _check_unique_keys(opt.value)


@dataclass(frozen=True)
class GTerm:
    """Uninterpreted general term as used by sources and annotations.

    ``functor`` keeps its surface spelling (quotes included) since these terms
    are never interpreted.
    """

    functor: str
    args: Tuple["GeneralTerm", ...] = ()


@dataclass(frozen=True)
class GList:
    items: Tuple["GeneralTerm", ...] = ()


GeneralTerm = Union[GTerm, GList]

Payload = Union[Formula, TypeDecl, LogicSpec]


@dataclass(frozen=True)
class AnnotatedFormula:
    language: str
    name: str
    role: str
    payload: Payload
    source: Optional[GeneralTerm] = None
    annotations: Optional[Tuple[GeneralTerm, ...]] = None

    def __post_init__(self):
        if self.language not in LANGUAGES:
            raise TptpError(f"unsupported language {self.language!r}")
        if self.role not in ROLES:
            raise TptpError(f"unsupported role {self.role!r}")
        if (self.role == "logic") != isinstance(self.payload, LogicSpec):
            raise TptpError(f"{self.name}: logic specifications need role 'logic' and vice versa")
        if (self.role == "type") != isinstance(self.payload, TypeDecl):
            raise TptpError(f"{self.name}: type declarations need role 'type' and vice versa")
        if not self.name:
            raise TptpError("empty formula name")
        if self.annotations is not None and self.source is None:
            raise TptpError(f"{self.name}: annotations require a source")

    @property
    def formula(self) -> Formula:
        return self.payload  # type: ignore[return-value]


@dataclass(frozen=True)
class Problem:
    formulas: Tuple[AnnotatedFormula, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "formulas", tuple(self.formulas))
        seen = set()
        logic = 0
        for af in self.formulas:
            if af.name in seen:
                raise DuplicateName(af.name)
            seen.add(af.name)
            logic += af.role == "logic"
        if logic > 1:
            raise TptpError("a problem may contain at most one logic specification")

    def __iter__(self) -> Iterator[AnnotatedFormula]:
        return iter(self.formulas)

    def __len__(self) -> int:
        return len(self.formulas)

    @property
    def logic_spec(self) -> Optional[AnnotatedFormula]:
        for af in self.formulas:
            if af.role == "logic":
                return af
        return None

    def names(self):
        return [af.name for af in self.formulas]


# -- traversal helpers -----------------------------------------------------


def term_vars(t: Term) -> Iterator[str]:
    if isinstance(t, Var):
        yield t.name
    else:
        for a in t.args:
            yield from term_vars(a)


def free_vars(f: Formula) -> frozenset:
    """Names of the variables occurring unbound in ``f``."""
    return frozenset(_free(f))


def _free(f) -> Iterator[str]:
    if isinstance(f, (Atom,)):
        for a in f.args:
            yield from term_vars(a)
    elif isinstance(f, Truth):
        return
    elif isinstance(f, Not):
        yield from _free(f.arg)
    elif isinstance(f, Binary):
        yield from _free(f.left)
        yield from _free(f.right)
    elif isinstance(f, (Quant, Lambda)):
        bound = {v.name for v in f.variables}
        yield from (v for v in _free(f.body) if v not in bound)
    elif isinstance(f, NonClassical):
        for p in f.params:
            yield from term_vars(p.value)
        for a in f.args:
            yield from _free(a)
    elif isinstance(f, Apply):
        yield from _free(f.function)
        for a in f.args:
            yield from term_vars(a)
    else:
        raise TypeError(f"not a formula: {f!r}")


def ordered_free_vars(f: Formula) -> list:
    """Free variables in order of first occurrence."""
    out = []
    for v in _free(f):
        if v not in out:
            out.append(v)
    return out


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order walk over formula nodes (terms are not visited)."""
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.arg)
    elif isinstance(f, Binary):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Quant, Lambda)):
        yield from subformulas(f.body)
    elif isinstance(f, NonClassical):
        for a in f.args:
            yield from subformulas(a)
    elif isinstance(f, Apply):
        yield from subformulas(f.function)


def map_formula(f: Formula, fn) -> Formula:
    """Rebuild ``f`` bottom-up, applying ``fn`` to every rebuilt node."""
    if isinstance(f, Not):
        f = Not(map_formula(f.arg, fn))
    elif isinstance(f, Binary):
        f = Binary(f.op, map_formula(f.left, fn), map_formula(f.right, fn))
    elif isinstance(f, Quant):
        f = Quant(f.quantifier, f.variables, map_formula(f.body, fn))
    elif isinstance(f, Lambda):
        f = Lambda(f.variables, map_formula(f.body, fn))
    elif isinstance(f, NonClassical):
        f = NonClassical(f.connective, tuple(map_formula(a, fn) for a in f.args), f.params)
    elif isinstance(f, Apply):
        f = Apply(map_formula(f.function, fn), f.args)
    return fn(f)


def is_ground(f: Formula) -> bool:
    return not any(isinstance(g, (Quant, Lambda, Apply)) for g in subformulas(f)) and not free_vars(f)


def _term_symbols(t: Term, out: dict):
    if isinstance(t, Func):
        _record(out, ("function", t.name), len(t.args))
        for a in t.args:
            _term_symbols(a, out)


def _record(out, key, arity):
    if out.setdefault(key, arity) != arity:
        raise ArityMismatch(f"{key[0]} {key[1]!r} used with arities {out[key]} and {arity}")


def signature(problem_or_formulas) -> dict:
    """Map ``(kind, name)`` to arity for every predicate and function symbol.

    ``kind`` is ``"predicate"`` or ``"function"``.  Raises ArityMismatch when a
    symbol is used with two different arities.
    """
    out: dict = {}
    items = problem_or_formulas
    if isinstance(items, Problem):
        items = [af.payload for af in items if af.role not in ("logic", "type")]
    for f in items:
        for g in subformulas(f):
            if isinstance(g, Atom):
                _record(out, ("predicate", g.pred), len(g.args))
                for a in g.args:
                    _term_symbols(a, out)
            elif isinstance(g, NonClassical):
                for p in g.params:
                    _term_symbols(p.value, out)
            elif isinstance(g, Apply):
                for a in g.args:
                    _term_symbols(a, out)
    return out


def needs_quotes(name: str) -> bool:
    return not (LOWER_WORD.match(name) or DOLLAR_WORD.match(name) or INTEGER.match(name))


def quote_atom(name: str) -> str:
    if not needs_quotes(name):
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"
