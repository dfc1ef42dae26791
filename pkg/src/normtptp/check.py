"""Run the ground decision procedures on a specialized (SDL or DDL) problem."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

from .embed import GLOBAL, LOCAL, UnsupportedTarget, _require_modal_d, ddl_system
from .errors import ToolchainError
from .semantics import (
    DEFAULT_BUDGET,
    DEFAULT_MAX_WORLDS,
    KripkeModel,
    NoModelUpTo,
    Satisfiable,
    Unsatisfiable,
    Verdict,
    decide_sdl,
    search_ddl_e,
    szs_status,
)
from .syntax import Not, Problem

ASSUMPTION_ROLES = ("axiom", "hypothesis", "definition", "lemma", "theorem", "assumption", "negated_conjecture")


@dataclass(frozen=True)
class CheckResult:
    status: str
    verdict: Verdict

    def szs_line(self, name: str) -> str:
        return f"% SZS status {self.status} for {name}"


def _split(p: Problem):
    axioms, conjectures = [], []
    for af in p:
        if af.role in ("logic", "type"):
            continue
        if af.role == "conjecture":
            conjectures.append(af.payload)
        elif af.role in ASSUMPTION_ROLES:
            axioms.append(af.payload)
        else:
            raise ToolchainError(f"{af.name}: role {af.role} is not supported for checking")
    if len(conjectures) > 1:
        raise ToolchainError("at most one conjecture is supported")
    return axioms, (conjectures[0] if conjectures else None)


def _conjecture_status(v: Verdict) -> str:
    if isinstance(v, Unsatisfiable):
        return "Theorem"
    if isinstance(v, Satisfiable):
        return "CounterSatisfiable"
    return "GaveUp"


def check_problem(
    p: Problem,
    mode: str = GLOBAL,
    max_worlds: int = DEFAULT_MAX_WORLDS,
    budget: int = DEFAULT_BUDGET,
) -> CheckResult:
    """Decide a ground SDL problem or search for an E model.

    Without a conjecture the status is about satisfiability of the axioms.
    A conjecture is refuted by looking for a world falsifying it, so the
    status becomes Theorem, CounterSatisfiable or GaveUp.
    """
    if mode not in (GLOBAL, LOCAL):
        raise ValueError(f"unknown assumption mode {mode!r}")
    spec = p.logic_spec.payload if p.logic_spec else None
    if spec is None:
        raise ToolchainError("problem has no logic specification")
    axioms, conjecture = _split(p)
    negated = [Not(conjecture)] if conjecture is not None else []

    if spec.logic_name == "$modal":
        _require_modal_d(p)
        if mode == GLOBAL:
            verdict = decide_sdl(axioms, negated)
        else:
            verdict = decide_sdl((), axioms + negated)
    elif spec.logic_name == "$$ddl":
        system = ddl_system(p)
        if system != "$$aqvistE":
            raise UnsupportedTarget("unsupported target for checking")
        if mode == GLOBAL:
            verdict = search_ddl_e(axioms, max_worlds, budget, local_axioms=negated)
        else:
            verdict = search_ddl_e((), max_worlds, budget, local_axioms=axioms + negated)
    elif spec.logic_name == "$$normative":
        raise ToolchainError("NMF problems must be specialized with nmf2logic before checking")
    else:
        raise UnsupportedTarget("unsupported target for checking")

    status = szs_status(verdict) if conjecture is None else _conjecture_status(verdict)
    return CheckResult(status, verdict)


def describe_model(verdict: Verdict) -> List[str]:
    """Comment lines describing a witness model, in a canonical order."""
    if not isinstance(verdict, Satisfiable):
        return []
    m = verdict.model
    lines = [f"% worlds: {sorted(m.worlds)}"]
    if verdict.designated is not None:
        lines.append(f"% designated: {verdict.designated}")
    if isinstance(m, KripkeModel):
        lines.append(f"% accessibility: {sorted(m.relation)}")
        for bearer, rel in sorted(m.indexed.items()):
            lines.append(f"% accessibility[{bearer}]: {sorted(rel)}")
    else:
        lines.append(f"% betterness: {sorted(m.betterness)}")
    for atom, ws in sorted(m.valuation.items()):
        lines.append(f"% {atom}: {sorted(ws)}")
    return lines


__all__ = ["CheckResult", "check_problem", "describe_model", "NoModelUpTo"]
