import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normtptp.parser import parse_formula
from normtptp.semantics import (
    FragmentError,
    KripkeModel,
    NoModelUpTo,
    PreferenceModel,
    ResourceError,
    Satisfiable,
    Unsatisfiable,
    UnknownAtom,
    decide_sdl,
    decide_sdl_global,
    decide_sdl_local,
    entails_sdl,
    eval_kripke,
    eval_pref,
    search_ddl_e,
    szs_line,
)
from normtptp.syntax import NonClassical, Not
from oracles import find_kripke, find_preference, kripke_eval, pref_eval
from strategies import dyadic_formulas, kripke_models, modal_formulas, preference_models

F = parse_formula
SDL_V1 = [F("{$box} @ (help)"), F("{$box} @ (help => tell)"), F("~help => {$box} @ (~tell)"), F("~help")]
SDL_V3 = [F("{$box} @ (help)"), F("help => {$box} @ (tell)"), F("~help => {$box} @ (~tell)"), F("~help")]
DDL = [F("{$$obl} @ (help, $true)"), F("{$$obl} @ (tell, help)"), F("{$$obl} @ (~tell, ~help)"), F("~help")]


def oracle_view(m: KripkeModel):
    return {w: m.successors(w) for w in m.worlds}, {k: set(v) for k, v in m.valuation.items()}


def assert_kripke_witness(v, global_axioms, local_axioms=()):
    assert isinstance(v, Satisfiable)
    rel, val = oracle_view(v.model)
    for f in global_axioms:
        assert all(kripke_eval(f, rel, val, w) for w in v.model.worlds)
    for f in local_axioms:
        assert kripke_eval(f, rel, val, v.designated)


# -- direct evaluation ------------------------------------------------------

TWO = KripkeModel({0, 1}, {(0, 1), (1, 1)}, {"help": {1}})


def test_eval_kripke_examples():
    loop = KripkeModel({0}, {(0, 0)}, {"help": set()})
    assert eval_kripke(F("~help"), loop, 0)
    assert eval_kripke(F("{$box} @ (help)"), TWO, 0)
    assert not eval_kripke(F("{$dia} @ (~help)"), TWO, 0)


def test_unknown_atom_is_an_error():
    with pytest.raises(UnknownAtom):
        eval_kripke(F("tell"), TWO, 0)


def test_models_must_be_serial():
    with pytest.raises(ValueError):
        KripkeModel({0, 1}, {(0, 1)}, {})


def test_bearer_indexed_box():
    m = KripkeModel({0, 1}, {(0, 0), (1, 1)}, {"p": {1}}, indexed={"alice": {(0, 1), (1, 1)}})
    assert eval_kripke(F("{$box(#alice)} @ (p)"), m, 0)
    assert not eval_kripke(F("{$box} @ (p)"), m, 0)


def test_eval_pref_examples():
    one_empty = PreferenceModel({0}, set(), {"h": set(), "b": {0}})
    assert eval_pref(F("{$$obl} @ (h, b)"), one_empty, 0)
    reflexive = PreferenceModel({0}, {(0, 0)}, {"h": set(), "b": {0}})
    assert not eval_pref(F("{$$obl} @ (h, b)"), reflexive, 0)
    assert eval_pref(F("$true"), reflexive, 0)


@settings(max_examples=300)
@given(modal_formulas(), kripke_models())
def test_eval_kripke_matches_oracle_and_duality(f, m):
    rel, val = oracle_view(m)
    dia = NonClassical("$dia", (f,))
    dual = Not(NonClassical("$box", (Not(f),)))
    for w in m.worlds:
        assert eval_kripke(f, m, w) == kripke_eval(f, rel, val, w)
        assert eval_kripke(dia, m, w) == eval_kripke(dual, m, w)


@settings(max_examples=300)
@given(dyadic_formulas(), preference_models())
def test_eval_pref_matches_oracle(f, m):
    val = {k: set(v) for k, v in m.valuation.items()}
    worlds = sorted(m.worlds)
    values = {eval_pref(f, m, w) for w in worlds}
    for w in worlds:
        assert eval_pref(f, m, w) == pref_eval(f, set(m.betterness), val, worlds, w)
    if isinstance(f, NonClassical):
        assert len(values) == 1  # dyadic obligations are world-independent


# -- SDL decision -----------------------------------------------------------


def test_chisholm_verdicts():
    assert decide_sdl_global(SDL_V3) == Unsatisfiable()
    assert decide_sdl_global(SDL_V1) == Unsatisfiable()


def test_empty_set_has_one_world_model():
    v = decide_sdl_global([])
    assert isinstance(v, Satisfiable) and len(v.model.worlds) == 1


def test_local_reading_is_satisfiable():
    axioms = [F("{$box} @ (help)"), F("{$box} @ (~tell)"), F("~help")]
    v = decide_sdl_local(axioms)
    assert_kripke_witness(v, [], axioms)
    assert len(v.model.worlds) == 2
    # frozen by exhaustive enumeration: no 1-world model, a 2-world one exists
    assert find_kripke([], axioms, max_worlds=1) is None
    assert find_kripke([], axioms, max_worlds=2)[0] == 2


def test_fragment_errors():
    with pytest.raises(FragmentError):
        decide_sdl_global([F("! [X] : p(X)")])
    with pytest.raises(FragmentError):
        decide_sdl_global([F("{$$obl} @ (a, b)")])


def test_table_one_dependencies():
    # {O h} entails O(~h -> ~t) globally
    assert decide_sdl([F("{$box} @ (help)")], [F("~ ({$box} @ ((~help) => (~tell)))")]) == Unsatisfiable()
    assert decide_sdl_global([F("{$box} @ (help)"), F("~ ({$box} @ ((~help) => (~tell)))")]) == Unsatisfiable()
    # {~h} entails h -> O t
    assert entails_sdl([F("~help")], F("help => {$box} @ (tell)"))
    assert not entails_sdl([F("{$box} @ (help)")], F("help"))


small = modal_formulas(("p", "q"))


@settings(max_examples=150)
@given(st.lists(small, min_size=1, max_size=3), st.lists(small, max_size=2))
def test_decider_agrees_with_enumeration(gl, lo):
    v = decide_sdl(gl, lo)
    found = find_kripke(gl, lo, max_worlds=2)
    if found is not None:
        assert isinstance(v, Satisfiable)
    if isinstance(v, Satisfiable):
        assert_kripke_witness(v, gl, lo)
    else:
        assert found is None


@settings(max_examples=20)
@given(st.lists(modal_formulas(("p",)), min_size=1, max_size=3))
def test_decider_complete_up_to_three_worlds(gl):
    if find_kripke(gl, (), max_worlds=3) is not None:
        assert isinstance(decide_sdl_global(gl), Satisfiable)


def test_witness_always_verifies():
    for axioms in ([F("{$dia} @ (p) & {$dia} @ (~p)")], [F("{$box} @ ({$dia} @ (q))"), F("{$dia} @ (~q)")]):
        assert find_kripke(axioms, (), max_worlds=2) is not None
        v = decide_sdl_global(axioms)
        assert_kripke_witness(v, axioms)


# -- E search ---------------------------------------------------------------


def test_chisholm_ddl_one_world():
    v = search_ddl_e(DDL)
    assert isinstance(v, Satisfiable)
    m = v.model
    assert len(m.worlds) == 1 and not m.betterness
    assert all(eval_pref(f, m, 0) for f in DDL)


def test_ddl_contradiction_and_empty():
    o = F("{$$obl} @ (help, $true)")
    assert search_ddl_e([o, Not(o)], max_worlds=2) == NoModelUpTo(2)
    v = search_ddl_e([])
    assert isinstance(v, Satisfiable) and len(v.model.worlds) == 1


def test_ddl_budget():
    with pytest.raises(ResourceError):
        search_ddl_e([F("a & ~a")], max_worlds=3, budget=100)


@settings(max_examples=100)
@given(st.lists(dyadic_formulas(("p", "q")), min_size=1, max_size=3))
def test_ddl_search_agrees_with_enumeration(axioms):
    v = search_ddl_e(axioms, max_worlds=2)
    found = find_preference(axioms, max_worlds=2)
    assert isinstance(v, Satisfiable) == (found is not None)
    if isinstance(v, Satisfiable):
        m = v.model
        val = {k: set(x) for k, x in m.valuation.items()}
        worlds = sorted(m.worlds)
        assert all(pref_eval(f, set(m.betterness), val, worlds, w) for f in axioms for w in worlds)


def test_szs_lines():
    assert szs_line(Unsatisfiable(), "x") == "% SZS status Unsatisfiable for x"
    assert szs_line(NoModelUpTo(3), "x") == "% SZS status GaveUp for x"


def test_unsatisfiable_without_small_model():
    # every successor needs a q-successor, but q-worlds only see ~q-worlds
    axioms = [F("{$box} @ ({$dia} @ (q))"), F("q => {$box} @ (~q)")]
    assert find_kripke(axioms, (), max_worlds=3) is None
    assert decide_sdl_global(axioms) == Unsatisfiable()
