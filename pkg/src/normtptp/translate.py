"""Specialize NMF problems into SDL (modal D) or dyadic deontic logic."""

from __future__ import annotations

from dataclasses import replace
from typing import List, Optional, Union

from .errors import ToolchainError, UnsupportedFeature
from .nmf import (
    CONSTITUTIVE,
    NMF_CONNECTIVES,
    OBLIGATION,
    PERMISSION,
    PROHIBITION,
    Diagnostic,
    TargetLogic,
    has_bearers,
    read_logic_spec,
    require_nmf,
    walk_with_paths,
)
from .syntax import (
    AnnotatedFormula,
    Binary,
    LogicSpec,
    NonClassical,
    Not,
    Option,
    Param,
    Problem,
    Truth,
    map_formula,
)

BOX = "$box"
DIA = "$dia"
DDL_OBL = "$$obl"

SDL_SPEC = LogicSpec("$modal", (
    Option("$quantification", "$constant"),
    Option("$constants", "$rigid"),
    Option("$modalities", "$modal_system_D"),
))


def ddl_spec(system: TargetLogic) -> LogicSpec:
    return LogicSpec("$$ddl", (Option("$$system", system.designator),))


class LogicConflict(ToolchainError):
    pass


def _implies(body, head, simplify: bool):
    if simplify and body == Truth(True):
        return head
    return Binary("=>", body, head)


def _sdl_node(simplify: bool):
    def rewrite(f):
        if not (isinstance(f, NonClassical) and f.connective in NMF_CONNECTIVES):
            return f
        body, head = f.args
        if f.connective == CONSTITUTIVE:
            return _implies(body, head, simplify)
        bearer = f.param("bearer")
        params = (Param(None, bearer),) if bearer is not None else ()
        if f.connective == OBLIGATION:
            modal = NonClassical(BOX, (head,), params)
        elif f.connective == PERMISSION:
            modal = NonClassical(DIA, (head,), params)
        else:
            modal = NonClassical(BOX, (Not(head),), params)
        return _implies(body, modal, simplify)
    return rewrite


def _ddl_node(simplify: bool):
    def rewrite(f):
        if not (isinstance(f, NonClassical) and f.connective in NMF_CONNECTIVES):
            return f
        body, head = f.args
        if f.connective == OBLIGATION:
            return NonClassical(DDL_OBL, (head, body))
        if f.connective == PERMISSION:
            return Not(NonClassical(DDL_OBL, (Not(head), body)))
        if f.connective == PROHIBITION:
            return NonClassical(DDL_OBL, (Not(head), body))
        return _implies(body, head, simplify)
    return rewrite


def _rewrite(p: Problem, rewrite, spec: LogicSpec, suffix: str) -> Problem:
    out = [AnnotatedFormula("tff", "target", "logic", spec)]
    for af in p:
        if af.role == "logic":
            continue
        payload = af.payload
        if af.role != "type":
            payload = map_formula(payload, rewrite)
        out.append(replace(af, name=af.name + suffix, payload=payload))
    return Problem(tuple(out))


def to_sdl(p: Problem, simplify: bool = True) -> Problem:
    """NMF to SDL, narrow-scope reading; ``$true =>`` antecedents are dropped if ``simplify``."""
    require_nmf(p)
    return _rewrite(p, _sdl_node(simplify), SDL_SPEC, "-sdl")


def to_ddl(p: Problem, system: Union[TargetLogic, str] = TargetLogic.AQVIST_E, simplify: bool = True) -> Problem:
    if not isinstance(system, TargetLogic):
        system = TargetLogic.parse(system)
    if system not in (TargetLogic.AQVIST_E, TargetLogic.CARMO_JONES):
        raise ToolchainError(f"{system.value} is not a dyadic deontic logic")
    require_nmf(p)
    if has_bearers(p):
        raise UnsupportedFeature(None, "directed (bearer) deontic operators have no DDL translation")
    return _rewrite(p, _ddl_node(simplify), ddl_spec(system), "-ddl")


def specialize(p: Problem, target: Optional[Union[TargetLogic, str]] = None, simplify: bool = True) -> Problem:
    """Translate to ``target``, reconciling it with any logic spec already in ``p``."""
    if target is not None and not isinstance(target, TargetLogic):
        target = TargetLogic.parse(target)
    declared = read_logic_spec(p)
    if declared is not None and target is not None and declared != target:
        raise LogicConflict(f"problem declares {declared.value} but {target.value} was requested")
    target = target or declared
    if target is None:
        raise LogicConflict("no target logic: the problem is underspecified and none was requested")
    if target == TargetLogic.SDL:
        return to_sdl(p, simplify)
    return to_ddl(p, target, simplify)


def nested_obligations(p: Problem) -> List[Diagnostic]:
    """Flag ``$$obl`` occurring inside the arguments of another non-classical operator."""
    out = []
    for af in p:
        if af.role in ("logic", "type"):
            continue
        for path, g in walk_with_paths(af.payload):
            if isinstance(g, NonClassical):
                for sub_path, h in walk_with_paths(g):
                    if sub_path and isinstance(h, NonClassical) and h.connective == DDL_OBL:
                        out.append(Diagnostic(af.name, path + sub_path, "$$obl nested under a modal operator"))
    return out
