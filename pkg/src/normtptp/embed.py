"""Shallow semantical embedding of SDL and Aqvist E problems into THF.

Formulas are lifted to predicates on worlds and emitted in beta-normal
form: atoms gain a trailing world argument, ``{$box}`` quantifies over
accessible worlds, ``{$$obl}`` over the best worlds of its condition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .errors import ToolchainError, UnsupportedFeature
from .semantics import FiniteInterpretation, KripkeModel, PreferenceModel, atom_key
from .syntax import (
    TYPE_I,
    TYPE_O,
    TYPE_TTYPE,
    AnnotatedFormula,
    Apply,
    Atom,
    BaseType,
    Binary,
    Func,
    FunType,
    Lambda,
    LogicSpec,
    NonClassical,
    Not,
    Problem,
    Quant,
    Truth,
    TypeDecl,
    Var,
    curried,
    signature,
    subformulas,
)

GLOBAL = "global"
LOCAL = "local"


class UnsupportedConnective(ToolchainError):
    pass


class UnsupportedTarget(ToolchainError):
    pass


class EmbeddingError(ToolchainError):
    pass


@dataclass
class EmbeddingSignature:
    """Symbols introduced by an embedding plus the lifted problem symbols."""

    world_type: str
    relation: str
    kind: str  # "kripke" or "preference"
    mode: str = GLOBAL
    bearer_relation: Optional[str] = None
    current_world: Optional[str] = None
    predicates: Dict[str, int] = field(default_factory=dict)
    functions: Dict[str, int] = field(default_factory=dict)

    @property
    def w(self) -> BaseType:
        return BaseType(self.world_type)

    def types(self) -> Dict[str, object]:
        w = self.w
        out = {self.relation: curried(w, w, TYPE_O)}
        if self.bearer_relation:
            out[self.bearer_relation] = curried(TYPE_I, w, w, TYPE_O)
        if self.current_world:
            out[self.current_world] = w
        for p, n in self.predicates.items():
            out[p] = curried(*([TYPE_I] * n), w, TYPE_O)
        for f, n in self.functions.items():
            out[f] = curried(*([TYPE_I] * n), TYPE_I)
        return out

    def interpretation(self, model, individuals=None, current=None) -> FiniteInterpretation:
        """Read a ground Kripke or preference model as a THF interpretation.

        Individuals are interpreted by themselves (constants only); atoms
        missing from the valuation are false.  ``current`` picks the world
        denoted by the current-world constant (default: the least world).
        """
        consts = [f for f, n in self.functions.items() if n == 0]
        if any(n for n in self.functions.values()):
            raise EmbeddingError("finite interpretations support constants only, not function symbols")
        individuals = list(individuals or consts or ["emb_d"])
        worlds = sorted(model.worlds)
        symbols: Dict[str, object] = {c: c for c in consts}
        for p, n in self.predicates.items():
            ext = set()
            for args in _tuples(individuals, n):
                key = atom_key(Atom(p, tuple(Func(a) for a in args)))
                for w in model.valuation.get(key, ()):
                    ext.add(tuple(args) + (w,))
            symbols[p] = ext
        if isinstance(model, KripkeModel):
            symbols[self.relation] = set(model.relation)
            if self.bearer_relation:
                symbols[self.bearer_relation] = {
                    (b, u, v) for b, rel in model.indexed.items() for u, v in rel
                }
        elif isinstance(model, PreferenceModel):
            symbols[self.relation] = set(model.betterness)
        if self.current_world:
            symbols[self.current_world] = worlds[0] if current is None else current
        return FiniteInterpretation(
            carriers={self.world_type: worlds, "$i": individuals},
            types=self.types(),
            symbols=symbols,
        )


def _tuples(items, n):
    if n == 0:
        yield ()
        return
    for head in items:
        for rest in _tuples(items, n - 1):
            yield (head,) + rest


class _Fresh:
    def __init__(self, taken):
        self.taken = set(taken)

    def __call__(self, base: str) -> str:
        name, n = base, 0
        while name in self.taken:
            n += 1
            name = f"{base}_{n}"
        self.taken.add(name)
        return name


def _problem_names(p: Problem):
    symbols, variables = set(), set()
    for af in p:
        symbols.add(af.name)
        if af.role in ("logic", "type"):
            continue
        for g in subformulas(af.payload):
            if isinstance(g, (Quant, Lambda)):
                variables.update(v.name for v in g.variables)
    for kind, name in signature(p):
        symbols.add(name)
    return symbols, variables


class _Lifter:
    def __init__(self, sig: EmbeddingSignature, world_vars: _Fresh):
        self.sig = sig
        self.world_vars = world_vars

    def world_var(self) -> Var:
        return Var(self.world_vars("W"))

    def lift(self, f, w):
        """Lifted formula evaluated at world term ``w`` (already beta-reduced)."""
        if isinstance(f, Atom):
            return Atom(f.pred, f.args + (w,))
        if isinstance(f, Truth):
            return f
        if isinstance(f, Not):
            return Not(self.lift(f.arg, w))
        if isinstance(f, Binary):
            return Binary(f.op, self.lift(f.left, w), self.lift(f.right, w))
        if isinstance(f, Quant):
            variables = []
            for v in f.variables:
                if v.type not in (None, TYPE_I):
                    raise UnsupportedFeature(None, f"quantification over type {v.type}")
                variables.append(Var(v.name, TYPE_I))
            return Quant(f.quantifier, tuple(variables), self.lift(f.body, w))
        if isinstance(f, NonClassical):
            return self.connective(f, w)
        raise UnsupportedConnective(f"cannot embed {type(f).__name__}")

    def connective(self, f: NonClassical, w):
        raise UnsupportedConnective(f"residual connective {f.connective}")

    def lift_term(self, f):
        """``^[W: w]: lift(f) @ W`` as a lambda term."""
        v = self.world_var()
        return Lambda((Var(v.name, self.sig.w),), self.lift(f, v))


class _ModalLifter(_Lifter):
    def connective(self, f, w):
        if f.connective not in ("$box", "$dia") or len(f.args) != 1:
            raise UnsupportedConnective(f"residual connective {f.connective}")
        v = self.world_var()
        if f.params:
            if len(f.params) != 1 or f.params[0].key is not None:
                raise UnsupportedConnective(f"{f.connective} with parameters other than a bearer index")
            access = Atom(self.sig.bearer_relation, (f.params[0].value, w, v))
        else:
            access = Atom(self.sig.relation, (w, v))
        body = self.lift(f.args[0], v)
        typed = (Var(v.name, self.sig.w),)
        if f.connective == "$box":
            return Quant("!", typed, Binary("=>", access, body))
        return Quant("?", typed, Binary("&", access, body))


class _PreferenceLifter(_Lifter):
    def connective(self, f, w):
        if f.connective != "$$obl" or len(f.args) != 2 or f.params:
            raise UnsupportedConnective(f"residual connective {f.connective}")
        head, body = f.args
        v, u = self.world_var(), self.world_var()
        wt = self.sig.w
        best = Binary(
            "&",
            self.lift(body, v),
            Quant("!", (Var(u.name, wt),), Binary("=>", self.lift(body, u), Atom(self.sig.relation, (v, u)))),
        )
        return Quant("!", (Var(v.name, wt),), Binary("=>", best, self.lift(head, v)))


def _spec_of(p: Problem) -> Optional[LogicSpec]:
    af = p.logic_spec
    return af.payload if af else None


def _require_modal_d(p: Problem):
    spec = _spec_of(p)
    if spec is None or spec.logic_name != "$modal":
        raise EmbeddingError("modal embedding needs a $modal logic specification")
    if spec.get("$modalities") != "$modal_system_D":
        raise UnsupportedTarget(f"only $modal_system_D is supported, got {spec.get('$modalities')}")
    for key, expected in (("$quantification", "$constant"), ("$constants", "$rigid")):
        value = spec.get(key)
        if value is not None and value != expected:
            raise UnsupportedTarget(f"{key} == {value} is not supported (only {expected})")


def ddl_system(p: Problem) -> Optional[str]:
    spec = _spec_of(p)
    if spec is None or spec.logic_name != "$$ddl":
        return None
    return spec.get("$$system")


def _check_input_types(p: Problem):
    for af in p:
        if af.role == "type":
            ty = af.payload.type
            if ty == TYPE_TTYPE:
                raise UnsupportedFeature(af.name, "user-defined sorts")
            for base in _base_types(ty):
                if base not in (TYPE_I, TYPE_O):
                    raise UnsupportedFeature(af.name, f"type {base.name}")


def _base_types(ty):
    if isinstance(ty, BaseType):
        yield ty
    else:
        for a in ty.args:
            yield from _base_types(a)
        yield from _base_types(ty.result)


def _build(p: Problem, lifter_cls, sig: EmbeddingSignature, fresh: _Fresh, world_vars: _Fresh,
           extra_axioms) -> Problem:
    lifter = lifter_cls(sig, world_vars)
    out: List[AnnotatedFormula] = []
    out.append(AnnotatedFormula("thf", fresh(f"{sig.world_type}_type"), "type", TypeDecl(sig.world_type, TYPE_TTYPE)))
    for sym, ty in sig.types().items():
        out.append(AnnotatedFormula("thf", fresh(f"{sym}_type"), "type", TypeDecl(sym, ty)))
    out.extend(extra_axioms(lifter, fresh))
    for af in p:
        if af.role in ("logic", "type"):
            continue
        if af.role == "conjecture" or sig.mode == GLOBAL:
            w = lifter.world_var()
            payload = Quant("!", (Var(w.name, sig.w),), lifter.lift(af.payload, w))
        else:
            payload = lifter.lift(af.payload, Func(sig.current_world))
        role = "conjecture" if af.role == "conjecture" else "axiom"
        out.append(AnnotatedFormula("thf", af.name, role, payload, af.source, af.annotations))
    return Problem(tuple(out))


def _prepare(p: Problem):
    _check_input_types(p)
    symbols, variables = _problem_names(p)
    fresh = _Fresh(symbols)
    world_vars = _Fresh(variables)
    sig_counts = signature(p)
    predicates = {n: a for (k, n), a in sig_counts.items() if k == "predicate"}
    functions = {n: a for (k, n), a in sig_counts.items() if k == "function"}
    return fresh, world_vars, predicates, functions


def embed_modal_d(p: Problem, mode: str = GLOBAL) -> Problem:
    """Embed an SDL (modal D) problem; ``mode`` selects global or local assumptions."""
    if mode not in (GLOBAL, LOCAL):
        raise ValueError(f"unknown assumption mode {mode!r}")
    _require_modal_d(p)
    fresh, world_vars, predicates, functions = _prepare(p)
    directed = any(
        isinstance(g, NonClassical) and g.params
        for af in p if af.role not in ("logic", "type")
        for g in subformulas(af.payload)
    )
    sig = EmbeddingSignature(
        world_type=fresh("emb_w"),
        relation=fresh("emb_acc"),
        kind="kripke",
        mode=mode,
        bearer_relation=fresh("emb_acc_bearer") if directed else None,
        current_world=fresh("emb_cw") if mode == LOCAL else None,
        predicates=predicates,
        functions=functions,
    )

    def seriality(lifter, fresh):
        w, v = lifter.world_var(), lifter.world_var()
        wt = sig.w
        axioms = [AnnotatedFormula("thf", fresh("emb_serial"), "axiom", Quant(
            "!", (Var(w.name, wt),), Quant("?", (Var(v.name, wt),), Atom(sig.relation, (w, v)))))]
        if sig.bearer_relation:
            b = Var(world_vars("B"), TYPE_I)
            axioms.append(AnnotatedFormula("thf", fresh("emb_serial_bearer"), "axiom", Quant(
                "!", (b, Var(w.name, wt)),
                Quant("?", (Var(v.name, wt),), Atom(sig.bearer_relation, (Var(b.name), w, v))))))
        return axioms

    out = _build(p, _ModalLifter, sig, fresh, world_vars, seriality)
    return out


def embed_aqvist_e(p: Problem) -> Problem:
    """Embed an Aqvist E problem with the opt rule over an unconstrained betterness relation."""
    system = ddl_system(p)
    if system is None:
        raise EmbeddingError("preference embedding needs a $$ddl logic specification")
    if system == "$$carmoJones":
        raise UnsupportedTarget("no embedding for the Carmo-Jones system")
    if system != "$$aqvistE":
        raise UnsupportedTarget(f"unknown dyadic deontic system {system}")
    fresh, world_vars, predicates, functions = _prepare(p)
    sig = EmbeddingSignature(
        world_type=fresh("emb_w"),
        relation=fresh("emb_bet"),
        kind="preference",
        predicates=predicates,
        functions=functions,
    )
    return _build(p, _PreferenceLifter, sig, fresh, world_vars, lambda lifter, fresh: [])


def embed(p: Problem, mode: str = GLOBAL) -> Problem:
    """Dispatch on the problem's logic specification."""
    spec = _spec_of(p)
    if spec is not None and spec.logic_name == "$modal":
        return embed_modal_d(p, mode)
    if spec is not None and spec.logic_name == "$$ddl":
        if mode != GLOBAL:
            raise UnsupportedFeature(None, "local assumption mode for dyadic deontic logic")
        return embed_aqvist_e(p)
    if spec is not None and spec.logic_name == "$$normative":
        raise EmbeddingError("NMF problems must be specialized to a concrete logic before embedding")
    raise EmbeddingError("problem has no supported logic specification")


def lift_term(f, sig: EmbeddingSignature):
    """The lambda term ``^[W: w]: lift(f)`` for one formula under ``sig``."""
    taken = {v.name for g in subformulas(f) if isinstance(g, (Quant, Lambda)) for v in g.variables}
    lifter_cls = _PreferenceLifter if sig.kind == "preference" else _ModalLifter
    return lifter_cls(sig, _Fresh(taken)).lift_term(f)


def signature_of(embedded: Problem) -> EmbeddingSignature:
    """Recover the embedding signature from an embedded problem's type declarations."""
    decls = {af.payload.symbol: af.payload.type for af in embedded if af.role == "type"}
    world = next(s for s, t in decls.items() if t == TYPE_TTYPE)
    w = BaseType(world)
    rel = next(s for s, t in decls.items() if t == curried(w, w, TYPE_O))
    bearer = next((s for s, t in decls.items() if t == curried(TYPE_I, w, w, TYPE_O)), None)
    current = next((s for s, t in decls.items() if t == w), None)
    predicates, functions = {}, {}
    for s, t in decls.items():
        if s in (world, rel, bearer, current):
            continue
        args, result = _uncurry(t)
        if result == TYPE_O and args and args[-1] == w:
            predicates[s] = len(args) - 1
        elif result == TYPE_I:
            functions[s] = len(args)
    kind = "preference" if rel.startswith("emb_bet") else "kripke"
    return EmbeddingSignature(world, rel, kind, LOCAL if current else GLOBAL, bearer, current, predicates, functions)


def _uncurry(ty):
    args = []
    while isinstance(ty, FunType):
        args.extend(ty.args)
        ty = ty.result
    return args, ty


# -- static checks on THF output --------------------------------------------


def type_errors(p: Problem) -> List[str]:
    """Type-check every THF formula against the problem's own declarations."""
    errors: List[str] = []
    decls: Dict[str, object] = {}
    sorts = {"$i", "$o"}
    for af in p:
        if af.role == "type":
            if af.payload.type == TYPE_TTYPE:
                sorts.add(af.payload.symbol)
            else:
                decls[af.payload.symbol] = af.payload.type
    for sym, ty in decls.items():
        for base in _base_types(ty):
            if base.name not in sorts:
                errors.append(f"{sym}: undeclared sort {base.name}")
    for af in p:
        if af.role in ("type", "logic"):
            continue
        try:
            ty = _infer(af.payload, {}, decls, sorts)
            if ty != TYPE_O:
                errors.append(f"{af.name}: formula has type {ty}, not $o")
        except EmbeddingError as exc:
            errors.append(f"{af.name}: {exc}")
    return errors


def _infer_term(t, env, decls):
    if isinstance(t, Var):
        if t.name not in env:
            raise EmbeddingError(f"unbound variable {t.name}")
        return env[t.name]
    return _apply_symbol(t.name, [_infer_term(a, env, decls) for a in t.args], decls)


def _apply_symbol(name, arg_types, decls):
    if name not in decls:
        raise EmbeddingError(f"undeclared symbol {name}")
    ty = decls[name]
    for at in arg_types:
        if not isinstance(ty, FunType) or len(ty.args) != 1 or ty.args[0] != at:
            raise EmbeddingError(f"ill-typed application of {name}")
        ty = ty.result
    return ty


def _infer(f, env, decls, sorts):
    if isinstance(f, Truth):
        return TYPE_O
    if isinstance(f, Atom):
        ty = _apply_symbol(f.pred, [_infer_term(a, env, decls) for a in f.args], decls)
        if ty != TYPE_O:
            raise EmbeddingError(f"{f.pred} applied as a formula has type {ty}")
        return ty
    if isinstance(f, Not):
        _expect_o(f.arg, env, decls, sorts)
        return TYPE_O
    if isinstance(f, Binary):
        _expect_o(f.left, env, decls, sorts)
        _expect_o(f.right, env, decls, sorts)
        return TYPE_O
    if isinstance(f, (Quant, Lambda)):
        inner = dict(env)
        for v in f.variables:
            if v.type is None:
                raise EmbeddingError(f"untyped bound variable {v.name}")
            for base in _base_types(v.type):
                if base.name not in sorts:
                    raise EmbeddingError(f"undeclared sort {base.name}")
            inner[v.name] = v.type
        body = _infer(f.body, inner, decls, sorts)
        if isinstance(f, Quant):
            if body != TYPE_O:
                raise EmbeddingError("quantified body is not a formula")
            return TYPE_O
        return curried(*[v.type for v in f.variables], body)
    if isinstance(f, Apply):
        ty = _infer(f.function, env, decls, sorts)
        for a in f.args:
            at = _infer_term(a, env, decls)
            if not isinstance(ty, FunType) or ty.args != (at,):
                raise EmbeddingError("ill-typed application")
            ty = ty.result
        return ty
    if isinstance(f, NonClassical):
        raise EmbeddingError(f"non-classical connective {f.connective} in THF output")
    raise EmbeddingError(f"unexpected node {type(f).__name__}")


def _expect_o(f, env, decls, sorts):
    if _infer(f, env, decls, sorts) != TYPE_O:
        raise EmbeddingError("expected a formula of type $o")


def is_classical(p: Problem) -> bool:
    return not any(
        isinstance(g, NonClassical)
        for af in p if af.role not in ("logic", "type")
        for g in subformulas(af.payload)
    )
