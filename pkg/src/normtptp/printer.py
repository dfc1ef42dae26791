"""Pretty printer for TFF/NXF and THF.

Output is deterministic and reparses to a structurally equal AST.  Binary
operands that are themselves binary or quantified are always parenthesized,
which sidesteps TPTP's rules about mixing connectives.
"""

from __future__ import annotations

from .syntax import (
    AnnotatedFormula,
    Apply,
    Atom,
    BaseType,
    Binary,
    FunType,
    GList,
    Lambda,
    LogicSpec,
    NonClassical,
    Not,
    Option,
    Param,
    Problem,
    Quant,
    Truth,
    TypeDecl,
    Var,
    quote_atom,
)


def print_problem(p: Problem) -> str:
    chunks = []
    for af in p:
        chunks.append(print_annotated(af))
        if af.role == "logic":
            chunks.append("")
    return "\n".join(chunks) + ("\n" if chunks else "")


def print_annotated(af: AnnotatedFormula) -> str:
    lang = af.language
    if isinstance(af.payload, LogicSpec):
        body = print_logic_spec(af.payload)
    elif isinstance(af.payload, TypeDecl):
        body = f"{quote_atom(af.payload.symbol)}: {print_type(af.payload.type, lang)}"
    else:
        body = print_formula(af.payload, lang)
    parts = [quote_atom(af.name), af.role, body]
    if af.source is not None:
        parts.append(print_general(af.source))
        if af.annotations is not None:
            parts.append(print_general(GList(af.annotations)))
    return f"{lang}({', '.join(parts)})."


def print_logic_spec(spec: LogicSpec) -> str:
    return f"{quote_atom(spec.logic_name)} == {_options(spec.options)}"


def _options(opts) -> str:
    return "[" + ", ".join(_option(o) for o in opts) + "]"


def _option(o: Option) -> str:
    value = _options(o.value) if isinstance(o.value, tuple) else quote_atom(o.value)
    return f"{quote_atom(o.key)} == {value}"


def print_general(t) -> str:
    if isinstance(t, GList):
        return "[" + ", ".join(print_general(i) for i in t.items) + "]"
    if t.args:
        return f"{t.functor}(" + ", ".join(print_general(a) for a in t.args) + ")"
    return t.functor


def print_type(ty, lang: str = "tff") -> str:
    if isinstance(ty, BaseType):
        return quote_atom(ty.name)
    if lang == "thf":
        args = [_thf_type_arg(a) for a in ty.args]
        return " > ".join(args + [print_type(ty.result, lang)])
    if len(ty.args) == 1:
        dom = _tff_type_arg(ty.args[0])
    else:
        dom = "(" + " * ".join(_tff_type_arg(a) for a in ty.args) + ")"
    return f"{dom} > {print_type(ty.result, lang)}"


def _thf_type_arg(ty) -> str:
    s = print_type(ty, "thf")
    return f"({s})" if isinstance(ty, FunType) else s


def _tff_type_arg(ty) -> str:
    s = print_type(ty, "tff")
    return f"({s})" if isinstance(ty, FunType) else s


def print_formula(f, lang: str = "tff") -> str:
    return _thf(f) if lang == "thf" else _tff(f)


def print_term(t, lang: str = "tff") -> str:
    return _thf_term(t) if lang == "thf" else _tff_term(t)


def _binder(vs, lang) -> str:
    out = []
    for v in vs:
        out.append(v.name if v.type is None else f"{v.name}: {print_type(v.type, lang)}")
    return "[" + ", ".join(out) + "]"


def _param(p: Param, lang: str) -> str:
    if p.key is None:
        return "#" + print_term(p.value, lang)
    return f"{quote_atom(p.key)} := {print_term(p.value, lang)}"


def _connective(f: NonClassical, lang: str) -> str:
    if f.params:
        return "{" + quote_atom(f.connective) + "(" + ", ".join(_param(p, lang) for p in f.params) + ")}"
    return "{" + quote_atom(f.connective) + "}"


# -- TFF / NXF


def _tff_term(t) -> str:
    if isinstance(t, Var):
        return t.name
    if t.args:
        return quote_atom(t.name) + "(" + ", ".join(_tff_term(a) for a in t.args) + ")"
    return quote_atom(t.name)


def _tff_operand(f) -> str:
    s = _tff(f)
    return f"({s})" if isinstance(f, (Binary, Quant)) else s


def _tff(f) -> str:
    if isinstance(f, Atom):
        if f.args:
            return quote_atom(f.pred) + "(" + ", ".join(_tff_term(a) for a in f.args) + ")"
        return quote_atom(f.pred)
    if isinstance(f, Truth):
        return "$true" if f.value else "$false"
    if isinstance(f, Not):
        return "~" + _tff_operand(f.arg)
    if isinstance(f, Binary):
        return f"{_tff_operand(f.left)} {f.op} {_tff_operand(f.right)}"
    if isinstance(f, Quant):
        body = _tff(f.body)
        if isinstance(f.body, Binary):
            body = f"({body})"
        return f"{f.quantifier} {_binder(f.variables, 'tff')} : {body}"
    if isinstance(f, NonClassical):
        return _connective(f, "tff") + " @ (" + ", ".join(_tff(a) for a in f.args) + ")"
    raise TypeError(f"cannot print {type(f).__name__} in TFF")


# -- THF


def _thf_term(t) -> str:
    if isinstance(t, Var):
        return t.name
    if t.args:
        return "(" + " @ ".join([quote_atom(t.name)] + [_thf_term(a) for a in t.args]) + ")"
    return quote_atom(t.name)


def _thf_atomic(f) -> bool:
    return isinstance(f, Truth) or (isinstance(f, Atom) and not f.args)


def _thf_unit(f) -> str:
    s = _thf(f)
    if _thf_atomic(f) or (isinstance(f, (Atom, Apply)) and f.args) or isinstance(f, NonClassical):
        return s
    return f"({s})"


def _thf(f) -> str:
    if isinstance(f, Atom):
        if f.args:
            return "(" + " @ ".join([quote_atom(f.pred)] + [_thf_term(a) for a in f.args]) + ")"
        return quote_atom(f.pred)
    if isinstance(f, Truth):
        return "$true" if f.value else "$false"
    if isinstance(f, Not):
        return "~ " + _thf_unit(f.arg)
    if isinstance(f, Binary):
        return f"{_thf_unit(f.left)} {f.op} {_thf_unit(f.right)}"
    if isinstance(f, (Quant, Lambda)):
        sym = "^" if isinstance(f, Lambda) else f.quantifier
        return f"{sym} {_binder(f.variables, 'thf')} : {_thf_unit(f.body)}"
    if isinstance(f, Apply):
        return "(" + " @ ".join([_thf_unit(f.function)] + [_thf_term(a) for a in f.args]) + ")"
    if isinstance(f, NonClassical):
        return "(" + " @ ".join([_connective(f, "thf")] + [_thf_unit(a) for a in f.args]) + ")"
    raise TypeError(f"cannot print {type(f).__name__}")
