"""Ground-fragment semantics and model finding.

* Kripke semantics for modal D (SDL) with a complete decision procedure by
  type elimination; works for global assumptions, local ones, or a mix.
* Preference semantics for Aqvist's E (opt rule) with a bounded model search
  that can only ever answer Satisfiable or NoModelUpTo.
* A finite evaluator for the THF terms produced by the embedder.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import ToolchainError
from .printer import print_formula, print_term
from .syntax import (
    Apply,
    Atom,
    BaseType,
    Binary,
    Func,
    FunType,
    Lambda,
    NonClassical,
    Not,
    Quant,
    Truth,
    Var,
    free_vars,
    subformulas,
    term_vars,
)

DEFAULT_MAX_WORLDS = 3
DEFAULT_BUDGET = 10**7
# 2**MAX_LETTERS candidate types are enumerated by the SDL decider
MAX_LETTERS = 22


class UnknownAtom(ToolchainError):
    pass


class FragmentError(ToolchainError):
    pass


class ResourceError(ToolchainError):
    pass


class TypeMismatch(ToolchainError):
    pass


# -- models ----------------------------------------------------------------


def _pairs(rel, worlds, what):
    rel = frozenset((int(a), int(b)) for a, b in rel)
    for a, b in rel:
        if a not in worlds or b not in worlds:
            raise ValueError(f"{what} mentions a world outside the model: {(a, b)}")
    return rel


def _valuation(valuation, worlds):
    out = {}
    for k, v in valuation.items():
        v = frozenset(v)
        if not v <= worlds:
            raise ValueError(f"valuation of {k!r} mentions unknown worlds")
        out[k] = v
    return out


@dataclass(frozen=True, eq=True)
class KripkeModel:
    """Finite serial Kripke model.

    ``indexed`` holds one accessibility relation per bearer (keyed by the
    bearer term as printed) for the directed operators ``$box(#x)``.
    """

    worlds: FrozenSet[int]
    relation: FrozenSet[Tuple[int, int]]
    valuation: Mapping[str, FrozenSet[int]]
    indexed: Mapping[str, FrozenSet[Tuple[int, int]]] = field(default_factory=dict)

    def __post_init__(self):
        worlds = frozenset(self.worlds)
        if not worlds:
            raise ValueError("a model needs at least one world")
        object.__setattr__(self, "worlds", worlds)
        object.__setattr__(self, "relation", _pairs(self.relation, worlds, "relation"))
        object.__setattr__(self, "valuation", _valuation(self.valuation, worlds))
        object.__setattr__(self, "indexed", {k: _pairs(r, worlds, f"relation {k}") for k, r in self.indexed.items()})
        for name, rel in [(None, self.relation)] + list(self.indexed.items()):
            sources = {a for a, _ in rel}
            if sources != worlds:
                label = "relation" if name is None else f"relation for {name}"
                raise ValueError(f"{label} is not serial")

    def successors(self, w: int, index: Optional[str] = None) -> List[int]:
        rel = self.relation if index is None else self.indexed[index]
        return sorted(b for a, b in rel if a == w)

    def __hash__(self):
        return hash((self.worlds, self.relation, tuple(sorted(self.valuation.items()))))


@dataclass(frozen=True, eq=True)
class PreferenceModel:
    """Finite betterness model; ``(v, u)`` in ``betterness`` reads "v is at least as good as u"."""

    worlds: FrozenSet[int]
    betterness: FrozenSet[Tuple[int, int]]
    valuation: Mapping[str, FrozenSet[int]]

    def __post_init__(self):
        worlds = frozenset(self.worlds)
        if not worlds:
            raise ValueError("a model needs at least one world")
        object.__setattr__(self, "worlds", worlds)
        object.__setattr__(self, "betterness", _pairs(self.betterness, worlds, "betterness"))
        object.__setattr__(self, "valuation", _valuation(self.valuation, worlds))

    def __hash__(self):
        return hash((self.worlds, self.betterness, tuple(sorted(self.valuation.items()))))


# -- verdicts --------------------------------------------------------------


@dataclass(frozen=True)
class Satisfiable:
    model: Union[KripkeModel, PreferenceModel]
    designated: Optional[int] = None


@dataclass(frozen=True)
class Unsatisfiable:
    pass


@dataclass(frozen=True)
class NoModelUpTo:
    bound: int


Verdict = Union[Satisfiable, Unsatisfiable, NoModelUpTo]


def szs_status(v: Verdict) -> str:
    if isinstance(v, Satisfiable):
        return "Satisfiable"
    if isinstance(v, Unsatisfiable):
        return "Unsatisfiable"
    return "GaveUp"


def szs_line(v: Verdict, name: str) -> str:
    return f"% SZS status {szs_status(v)} for {name}"


# -- direct evaluation -----------------------------------------------------


def atom_key(a: Atom) -> str:
    return print_formula(a)


def _lookup(valuation, a: Atom):
    key = atom_key(a)
    try:
        return valuation[key]
    except KeyError:
        raise UnknownAtom(f"atom {key} has no valuation") from None


def _classical(f, recurse):
    if isinstance(f, Truth):
        return f.value
    if isinstance(f, Not):
        return not recurse(f.arg)
    if isinstance(f, Binary):
        if f.op == "&":
            return recurse(f.left) and recurse(f.right)
        if f.op == "|":
            return recurse(f.left) or recurse(f.right)
        if f.op == "=>":
            return (not recurse(f.left)) or recurse(f.right)
        return recurse(f.left) == recurse(f.right)
    return None


def _modal_index(f: NonClassical) -> Optional[str]:
    if not f.params:
        return None
    if len(f.params) != 1 or f.params[0].key is not None:
        raise FragmentError(f"unsupported parameters on {f.connective}")
    return print_term(f.params[0].value)


def eval_kripke(f, m: KripkeModel, at: int) -> bool:
    """Truth of a ground modal formula at world ``at``."""
    if isinstance(f, Atom):
        return at in _lookup(m.valuation, f)
    if isinstance(f, NonClassical) and f.connective in ("$box", "$dia") and len(f.args) == 1:
        index = _modal_index(f)
        if index is not None and index not in m.indexed:
            raise UnknownAtom(f"no accessibility relation for bearer {index}")
        succ = m.successors(at, index)
        if f.connective == "$box":
            return all(eval_kripke(f.args[0], m, v) for v in succ)
        return any(eval_kripke(f.args[0], m, v) for v in succ)
    value = _classical(f, lambda g: eval_kripke(g, m, at))
    if value is None:
        raise FragmentError(f"not in the ground modal fragment: {print_formula(f)}")
    return value


def opt_worlds(m: PreferenceModel, extension: FrozenSet[int]) -> FrozenSet[int]:
    """The best worlds of ``extension``: members at least as good as every member."""
    return frozenset(v for v in extension if all((v, u) in m.betterness for u in extension))


def eval_pref(f, m: PreferenceModel, at: int) -> bool:
    """Truth at ``at`` under preference semantics; ``$$obl`` uses the opt rule."""
    if isinstance(f, Atom):
        return at in _lookup(m.valuation, f)
    if isinstance(f, NonClassical) and f.connective == "$$obl" and len(f.args) == 2 and not f.params:
        head, body = f.args
        body_ext = frozenset(w for w in m.worlds if eval_pref(body, m, w))
        return all(eval_pref(head, m, v) for v in opt_worlds(m, body_ext))
    value = _classical(f, lambda g: eval_pref(g, m, at))
    if value is None:
        raise FragmentError(f"not in the ground dyadic fragment: {print_formula(f)}")
    return value


# -- SDL: type elimination ---------------------------------------------------


def _check_ground(formulas, allowed):
    for f in formulas:
        if free_vars(f):
            raise FragmentError(f"formula is not ground: {print_formula(f)}")
        for g in subformulas(f):
            if isinstance(g, (Quant, Lambda, Apply)):
                raise FragmentError(f"quantifiers are outside the ground fragment: {print_formula(f)}")
            if isinstance(g, NonClassical) and not allowed(g):
                raise FragmentError(f"connective {g.connective} is not supported here")
            if isinstance(g, Atom) and any(True for a in g.args for _ in term_vars(a)):
                raise FragmentError(f"atom is not ground: {print_formula(g)}")


def _is_modal(g: NonClassical) -> bool:
    return g.connective in ("$box", "$dia") and len(g.args) == 1


def _dia_free(f):
    """Rewrite ``{$dia}@(p)`` as ``~{$box}@(~p)`` throughout."""
    if isinstance(f, NonClassical):
        args = tuple(_dia_free(a) for a in f.args)
        if f.connective == "$dia":
            return Not(NonClassical("$box", (Not(args[0]),), f.params))
        return NonClassical(f.connective, args, f.params)
    if isinstance(f, Not):
        return Not(_dia_free(f.arg))
    if isinstance(f, Binary):
        return Binary(f.op, _dia_free(f.left), _dia_free(f.right))
    return f


class _Letters:
    """Atoms and box subformulas, each assigned a bit position."""

    def __init__(self, formulas):
        self.index: Dict[object, int] = {}
        self.boxes: List[Tuple[int, Optional[str], object]] = []
        self.atoms: List[Tuple[int, Atom]] = []
        for f in formulas:
            self._collect(f)

    def _collect(self, f):
        if isinstance(f, Atom):
            if f not in self.index:
                self.index[f] = len(self.index)
                self.atoms.append((self.index[f], f))
        elif isinstance(f, NonClassical):
            self._collect(f.args[0])
            if f not in self.index:
                self.index[f] = len(self.index)
                self.boxes.append((self.index[f], _modal_index(f), f.args[0]))
        elif isinstance(f, Not):
            self._collect(f.arg)
        elif isinstance(f, Binary):
            self._collect(f.left)
            self._collect(f.right)

    def value(self, f, mask: int) -> bool:
        if isinstance(f, (Atom, NonClassical)):
            return bool(mask >> self.index[f] & 1)
        return _classical(f, lambda g: self.value(g, mask))


def decide_sdl(global_axioms: Sequence = (), local_axioms: Sequence = ()) -> Verdict:
    """Decide satisfiability in modal D by type elimination.

    ``global_axioms`` must hold at every world, ``local_axioms`` at one
    designated world.  The answer is complete; a Satisfiable verdict carries
    a model whose worlds are surviving types, re-checked by ``eval_kripke``.
    """
    originals = list(global_axioms), list(local_axioms)
    _check_ground(originals[0] + originals[1], _is_modal)
    gl = [_dia_free(f) for f in originals[0]]
    lo = [_dia_free(f) for f in originals[1]]
    letters = _Letters(gl + lo)
    n = len(letters.index)
    if n > MAX_LETTERS:
        raise ResourceError(f"{n} propositional/modal letters exceed the limit of {MAX_LETTERS}")

    types = [mask for mask in range(1 << n) if all(letters.value(f, mask) for f in gl)]
    pos = {t: i for i, t in enumerate(types)}
    all_bits = (1 << len(types)) - 1

    # arg_true[j]: bitset of types in which the argument of box letter j holds
    arg_true = {}
    for j, _, arg in letters.boxes:
        bits = 0
        for i, t in enumerate(types):
            if letters.value(arg, t):
                bits |= 1 << i
        arg_true[j] = bits
    modalities = [None] + sorted({k for _, k, _ in letters.boxes if k is not None})

    def successors(t, k, alive):
        bits = alive
        for j, kk, _ in letters.boxes:
            if kk == k and t >> j & 1:
                bits &= arg_true[j]
        return bits

    def requirements_met(t, alive, pool):
        for k in modalities:
            succ = successors(t, k, alive) & pool
            if not succ:
                return False
            for j, kk, _ in letters.boxes:
                if kk == k and not t >> j & 1 and not succ & ~arg_true[j]:
                    return False
        return True

    alive = all_bits
    changed = True
    while changed:
        changed = False
        for i, t in enumerate(types):
            if alive >> i & 1 and not requirements_met(t, alive, alive):
                alive &= ~(1 << i)
                changed = True

    survivors = [t for i, t in enumerate(types) if alive >> i & 1]
    roots = [t for t in survivors if all(letters.value(f, t) for f in lo)]
    if not roots:
        return Unsatisfiable()

    chosen = _small_closed_subset(survivors, roots, pos, alive, requirements_met)
    if chosen is None:
        chosen = _generated(roots[0], pos, alive, successors, modalities)
    model, designated = _kripke_from_types(chosen, roots, pos, letters, successors, modalities)
    for f in originals[0]:
        assert all(eval_kripke(f, model, w) for w in model.worlds), "witness failed a global axiom"
    for f in originals[1]:
        assert eval_kripke(f, model, designated), "witness failed a local axiom"
    return Satisfiable(model, designated if originals[1] else None)


def _small_closed_subset(survivors, roots, pos, alive, requirements_met, limit=3, max_pool=64):
    if len(survivors) > max_pool:
        return None
    root_set = set(roots)
    for size in range(1, limit + 1):
        for combo in itertools.combinations(survivors, size):
            if not root_set.intersection(combo):
                continue
            pool = 0
            for t in combo:
                pool |= 1 << pos[t]
            if all(requirements_met(t, alive, pool) for t in combo):
                return list(combo)
    return None


def _generated(root, pos, alive, successors, modalities):
    seen, todo = [root], [root]
    types_by_pos = {i: t for t, i in pos.items()}
    while todo:
        t = todo.pop()
        for k in modalities:
            bits = successors(t, k, alive)
            while bits:
                low = bits & -bits
                s = types_by_pos[low.bit_length() - 1]
                bits ^= low
                if s not in seen:
                    seen.append(s)
                    todo.append(s)
    return seen


def _kripke_from_types(chosen, roots, pos, letters, successors, modalities):
    world_of = {t: i for i, t in enumerate(chosen)}
    pool = 0
    for t in chosen:
        pool |= 1 << pos[t]
    rels = {}
    for k in modalities:
        rel = set()
        for t in chosen:
            bits = successors(t, k, pool)
            for s in chosen:
                if bits >> pos[s] & 1:
                    rel.add((world_of[t], world_of[s]))
        rels[k] = rel
    valuation = {
        atom_key(a): {world_of[t] for t in chosen if t >> j & 1} for j, a in letters.atoms
    }
    designated = next(world_of[t] for t in chosen if t in roots)
    model = KripkeModel(
        worlds=frozenset(range(len(chosen))),
        relation=rels[None],
        valuation=valuation,
        indexed={k: r for k, r in rels.items() if k is not None},
    )
    return model, designated


def decide_sdl_global(axioms: Sequence) -> Verdict:
    return decide_sdl(axioms, ())


def decide_sdl_local(axioms: Sequence) -> Verdict:
    return decide_sdl((), axioms)


def entails_sdl(premises: Sequence, conclusion, local: bool = False) -> bool:
    """Global (default) or local consequence in modal D."""
    if local:
        return isinstance(decide_sdl((), list(premises) + [Not(conclusion)]), Unsatisfiable)
    return isinstance(decide_sdl(premises, [Not(conclusion)]), Unsatisfiable)


# -- Aqvist E: bounded search ----------------------------------------------


def _is_obl(g: NonClassical) -> bool:
    return g.connective == "$$obl" and len(g.args) == 2 and not g.params


def _atoms_of(formulas) -> List[Atom]:
    out = []
    for f in formulas:
        for g in subformulas(f):
            if isinstance(g, Atom) and g not in out:
                out.append(g)
    return out


def search_ddl_e(
    axioms: Sequence = (),
    max_worlds: int = DEFAULT_MAX_WORLDS,
    budget: int = DEFAULT_BUDGET,
    local_axioms: Sequence = (),
) -> Verdict:
    """Look for a preference model with at most ``max_worlds`` worlds.

    ``axioms`` hold everywhere, ``local_axioms`` at some world.  Valuations
    are enumerated as sorted tuples, which loses no model up to isomorphism
    because every betterness relation is tried.  Never answers Unsatisfiable.
    """
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    gl, lo = list(axioms), list(local_axioms)
    _check_ground(gl + lo, _is_obl)
    atoms = _atoms_of(gl + lo)
    keys = [atom_key(a) for a in atoms]
    checked = 0
    for k in range(1, max_worlds + 1):
        worlds = range(k)
        all_pairs = [(a, b) for a in worlds for b in worlds]
        for labels in itertools.combinations_with_replacement(range(1 << len(atoms)), k):
            valuation = {key: frozenset(w for w in worlds if labels[w] >> i & 1) for i, key in enumerate(keys)}
            for rel_bits in range(1 << len(all_pairs)):
                checked += 1
                if checked > budget:
                    raise ResourceError(f"enumeration budget of {budget} models exhausted")
                bet = frozenset(p for i, p in enumerate(all_pairs) if rel_bits >> i & 1)
                m = PreferenceModel(frozenset(worlds), bet, valuation)
                if not all(eval_pref(f, m, w) for f in gl for w in worlds):
                    continue
                for w in worlds:
                    if all(eval_pref(f, m, w) for f in lo):
                        return Satisfiable(m, w if lo else None)
    return NoModelUpTo(max_worlds)


# -- finite evaluation of embedded THF terms -----------------------------------


@dataclass
class FiniteInterpretation:
    """Finite carriers per base type plus denotations for signature symbols.

    A symbol of type ``t1 > ... > tn > $o`` denotes the set of argument tuples
    for which it is true; other function symbols denote a dict from argument
    tuples to elements; base-typed constants denote an element and ``$o``
    constants a bool.
    """

    carriers: Dict[str, Sequence]
    types: Dict[str, object]
    symbols: Dict[str, object]


def _uncurry(ty) -> Tuple[list, object]:
    args = []
    while isinstance(ty, FunType):
        args.extend(ty.args)
        ty = ty.result
    return args, ty


def _rename(f, old: str, new: str):
    return _subst(f, {old: Var(new)})


def _subst_term(t, sub):
    if isinstance(t, Var):
        return sub.get(t.name, t)
    return Func(t.name, tuple(_subst_term(a, sub) for a in t.args))


def _term_free(t):
    return set(term_vars(t))


def _subst(f, sub):
    """Capture-avoiding substitution of terms for variables."""
    if not sub:
        return f
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(_subst_term(a, sub) for a in f.args))
    if isinstance(f, Truth):
        return f
    if isinstance(f, Not):
        return Not(_subst(f.arg, sub))
    if isinstance(f, Binary):
        return Binary(f.op, _subst(f.left, sub), _subst(f.right, sub))
    if isinstance(f, (Quant, Lambda)):
        sub = {k: v for k, v in sub.items() if k not in {x.name for x in f.variables}}
        incoming = set().union(*(_term_free(t) for t in sub.values())) if sub else set()
        variables, body = list(f.variables), f.body
        taken = incoming | set(free_vars(body)) | {x.name for x in variables}
        for i, x in enumerate(variables):
            if x.name in incoming:
                n = 0
                while f"{x.name}_{n}" in taken:
                    n += 1
                fresh = f"{x.name}_{n}"
                taken.add(fresh)
                body = _rename(body, x.name, fresh)
                variables[i] = Var(fresh, x.type)
        body = _subst(body, sub)
        return Quant(f.quantifier, tuple(variables), body) if isinstance(f, Quant) else Lambda(tuple(variables), body)
    if isinstance(f, NonClassical):
        return NonClassical(f.connective, tuple(_subst(a, sub) for a in f.args),
                            tuple(type(p)(p.key, _subst_term(p.value, sub)) for p in f.params))
    if isinstance(f, Apply):
        return Apply(_subst(f.function, sub), tuple(_subst_term(a, sub) for a in f.args))
    raise TypeError(f"not a formula: {f!r}")


def beta_normalize(f):
    """Contract every ``(^[X..]: body) @ args`` redex."""
    if isinstance(f, Apply):
        fn = beta_normalize(f.function)
        if isinstance(fn, Lambda):
            n = len(fn.variables)
            if len(f.args) < n:
                raise TypeMismatch("partial application of a lambda term is not supported")
            body = _subst(fn.body, {v.name: a for v, a in zip(fn.variables, f.args)})
            rest = f.args[n:]
            return beta_normalize(Apply(body, rest) if rest else body)
        return Apply(fn, f.args)
    if isinstance(f, Not):
        return Not(beta_normalize(f.arg))
    if isinstance(f, Binary):
        return Binary(f.op, beta_normalize(f.left), beta_normalize(f.right))
    if isinstance(f, Quant):
        return Quant(f.quantifier, f.variables, beta_normalize(f.body))
    if isinstance(f, Lambda):
        return Lambda(f.variables, beta_normalize(f.body))
    if isinstance(f, NonClassical):
        return NonClassical(f.connective, tuple(beta_normalize(a) for a in f.args), f.params)
    return f


def _carrier(interp: FiniteInterpretation, ty) -> Sequence:
    if not isinstance(ty, BaseType) or ty.name not in interp.carriers:
        raise TypeMismatch(f"no finite carrier for type {ty}")
    return interp.carriers[ty.name]


def _eval_term(t, interp, env, expected=None):
    if isinstance(t, Var):
        if t.name not in env:
            raise TypeMismatch(f"unbound variable {t.name}")
        value, ty = env[t.name]
    else:
        if t.name not in interp.types:
            raise TypeMismatch(f"undeclared symbol {t.name}")
        arg_types, ty = _uncurry(interp.types[t.name])
        if len(arg_types) != len(t.args):
            raise TypeMismatch(f"{t.name} expects {len(arg_types)} arguments, got {len(t.args)}")
        args = tuple(_eval_term(a, interp, env, at) for a, at in zip(t.args, arg_types))
        denotation = interp.symbols[t.name]
        value = denotation[args] if args else denotation
    if expected is not None and ty != expected:
        raise TypeMismatch(f"term of type {ty} where {expected} was expected")
    return value


def eval_thf_finite(t, interp: FiniteInterpretation, env: Optional[Mapping[str, object]] = None):
    """Evaluate an embedded THF formula or lambda term over finite carriers.

    ``env`` binds free variables to elements; their types are recovered from
    the carriers.  Formulas yield a bool, lambda terms a dict from argument
    tuples to values.
    """
    typed_env = {}
    for name, value in (env or {}).items():
        ty = next((BaseType(c) for c, els in interp.carriers.items() if value in els), None)
        if ty is None:
            raise TypeMismatch(f"value {value!r} for {name} is in no carrier")
        typed_env[name] = (value, ty)
    return _eval(beta_normalize(t), interp, typed_env)


def _eval(f, interp, env):
    if isinstance(f, Truth):
        return f.value
    if isinstance(f, Atom):
        if f.pred not in interp.types:
            raise TypeMismatch(f"undeclared symbol {f.pred}")
        arg_types, result = _uncurry(interp.types[f.pred])
        if result != BaseType("$o") or len(arg_types) != len(f.args):
            raise TypeMismatch(f"{f.pred} applied to {len(f.args)} arguments does not yield $o")
        args = tuple(_eval_term(a, interp, env, at) for a, at in zip(f.args, arg_types))
        denotation = interp.symbols[f.pred]
        return bool(denotation) if not args else args in denotation
    if isinstance(f, Not):
        return not _eval(f.arg, interp, env)
    if isinstance(f, Binary):
        return _classical(f, lambda g: _eval(g, interp, env))
    if isinstance(f, Quant):
        domains = [_carrier(interp, v.type) for v in f.variables]
        combos = itertools.product(*domains)
        test = all if f.quantifier == "!" else any
        return test(
            _eval(f.body, interp, {**env, **{v.name: (x, v.type) for v, x in zip(f.variables, combo)}})
            for combo in combos
        )
    if isinstance(f, Lambda):
        domains = [_carrier(interp, v.type) for v in f.variables]
        return {
            combo: _eval(f.body, interp, {**env, **{v.name: (x, v.type) for v, x in zip(f.variables, combo)}})
            for combo in itertools.product(*domains)
        }
    if isinstance(f, Apply):
        raise TypeMismatch("application of a non-lambda head")
    raise TypeMismatch(f"{type(f).__name__} is not a classical HOL term")
