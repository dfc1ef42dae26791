import pytest
from hypothesis import given, settings

from normtptp.embed import (
    EmbeddingError,
    UnsupportedConnective,
    UnsupportedTarget,
    embed,
    embed_aqvist_e,
    embed_modal_d,
    is_classical,
    lift_term,
    signature_of,
    type_errors,
)
from normtptp.errors import UnsupportedFeature
from normtptp.parser import parse_formula, parse_problem
from normtptp.printer import print_formula, print_problem
from normtptp.semantics import KripkeModel, eval_kripke, eval_pref, eval_thf_finite
from normtptp.syntax import AnnotatedFormula, Problem, Quant
from normtptp.translate import to_ddl
from normtptp.nmf import TargetLogic
from oracles import serial_models
from strategies import dyadic_formulas, kripke_models, modal_formulas, preference_models

F = parse_formula
SDL_HEAD = "tff(target, logic, $modal == [$quantification == $constant, $constants == $rigid, $modalities == $modal_system_D]).\n"
DDL_HEAD = "tff(target, logic, $$ddl == [$$system == $$aqvistE]).\n"
CHISHOLM_SDL = parse_problem(SDL_HEAD + """
tff('norm1-sdl', axiom, {$box} @ (help)).
tff('norm2-sdl', axiom, help => {$box} @ (tell)).
tff('norm3-sdl', axiom, ~help => {$box} @ (~tell)).
tff('fact1-sdl', axiom, ~help).
""")
CHISHOLM_DDL = parse_problem(DDL_HEAD + """
tff('norm1-ddl', axiom, {$$obl} @ (help, $true)).
tff('norm2-ddl', axiom, {$$obl} @ (tell, help)).
tff('norm3-ddl', axiom, {$$obl} @ (~tell, ~help)).
tff('fact1-ddl', axiom, ~help).
""")


def with_spec(spec_text, *formulas, role="axiom"):
    spec = parse_problem(spec_text).formulas
    body = tuple(AnnotatedFormula("tff", f"f{i}", role, f) for i, f in enumerate(formulas))
    return Problem(spec + body)


def seriality_axioms(p):
    return [af for af in p if af.name.startswith("emb_serial")]


def test_box_help_lifts_to_expected_term():
    sig = signature_of(embed_modal_d(with_spec(SDL_HEAD, F("{$box} @ (help)"))))
    term = lift_term(F("{$box} @ (help)"), sig)
    assert print_formula(term, "thf") == "^ [W: emb_w] : (! [W_1: emb_w] : ((emb_acc @ W @ W_1) => (help @ W_1)))"
    for n in (1, 2):
        for rel, val in serial_models(["help"], n):
            m = KripkeModel(range(n), {(a, b) for a in rel for b in rel[a]}, val)
            table = eval_thf_finite(term, sig.interpretation(m))
            assert table == {(w,): eval_kripke(F("{$box} @ (help)"), m, w) for w in range(n)}


def test_literal_global_lift():
    out = embed_modal_d(with_spec(SDL_HEAD, F("~help")))
    (ax,) = [af for af in out if af.name == "f0"]
    (w,) = ax.payload.variables
    assert ax.payload.quantifier == "!" and w.type.name == "emb_w"
    assert print_formula(ax.payload.body, "thf") == f"~ (help @ {w.name})"


def test_exactly_one_seriality_axiom():
    for mode in ("global", "local"):
        out = embed_modal_d(CHISHOLM_SDL, mode)
        (serial,) = seriality_axioms(out)
        assert serial.role == "axiom"


def test_bearer_relation_and_its_seriality():
    out = embed_modal_d(with_spec(SDL_HEAD, F("p => {$box(#alice)} @ (q)")))
    sig = signature_of(out)
    assert sig.bearer_relation is not None
    assert len(seriality_axioms(out)) == 2
    assert type_errors(out) == []
    m = KripkeModel({0, 1}, {(0, 0), (1, 1)}, {"p": {0, 1}, "q": {1}}, indexed={"alice": {(0, 1), (1, 1)}})
    interp = sig.interpretation(m)
    for af in out:
        if af.role == "axiom":
            assert eval_thf_finite(af.payload, interp) is True


def test_local_mode_uses_current_world():
    out = embed_modal_d(with_spec(SDL_HEAD, F("~help")), "local")
    (ax,) = [af for af in out if af.name == "f0"]
    assert print_formula(ax.payload, "thf") == "~ (help @ emb_cw)"


def test_conjecture_becomes_validity():
    out = embed_modal_d(with_spec(SDL_HEAD, F("help"), role="conjecture"), "local")
    (c,) = [af for af in out if af.role == "conjecture"]
    assert isinstance(c.payload, Quant) and c.payload.quantifier == "!"


def test_fresh_symbols_avoid_clashes():
    p = with_spec(SDL_HEAD, F("emb_w & emb_acc(a) & {$box} @ (emb_serial)"))
    out = embed_modal_d(p)
    sig = signature_of(out)
    assert sig.world_type != "emb_w" and sig.relation != "emb_acc"
    assert type_errors(out) == []
    assert parse_problem(print_problem(out)) == out


def test_world_variables_avoid_problem_variables():
    p = with_spec(SDL_HEAD, F("! [W] : (p(W) => {$box} @ (? [W_1] : q(W_1)))"))
    out = embed_modal_d(p)
    assert type_errors(out) == []


def test_first_order_lift_is_typed():
    p = with_spec(SDL_HEAD, F("! [X] : (owns(X, car1) => {$box} @ (register(X)))"))
    out = embed_modal_d(p)
    assert type_errors(out) == []
    sig = signature_of(out)
    assert sig.predicates == {"owns": 2, "register": 1}
    assert sig.functions == {"car1": 0}


def test_residual_nmf_connective_rejected():
    with pytest.raises(UnsupportedConnective):
        embed_modal_d(with_spec(SDL_HEAD, F("{$$obligation} @ ($true, help)")))
    with pytest.raises(UnsupportedConnective):
        embed_aqvist_e(with_spec(DDL_HEAD, F("{$box} @ (help)")))


def test_wrong_specs():
    with pytest.raises(UnsupportedTarget):
        embed_aqvist_e(to_ddl(to_nmf(), TargetLogic.CARMO_JONES))
    with pytest.raises(EmbeddingError):
        embed_modal_d(CHISHOLM_DDL)
    with pytest.raises(UnsupportedTarget):
        embed_modal_d(with_spec("tff(s, logic, $modal == [$modalities == $modal_system_K]).\n", F("p")))
    with pytest.raises(UnsupportedFeature):
        embed(CHISHOLM_DDL, "local")


def to_nmf():
    return parse_problem("tff(norm1, axiom, {$$obligation} @ ($true, help)).")


def test_chisholm_outputs_are_classical_and_typed():
    for out in (embed_modal_d(CHISHOLM_SDL), embed_modal_d(CHISHOLM_SDL, "local"), embed_aqvist_e(CHISHOLM_DDL)):
        assert is_classical(out)
        assert type_errors(out) == []
        assert all(af.language == "thf" for af in out)
        assert out.logic_spec is None
        assert parse_problem(print_problem(out)) == out


def test_type_checker_catches_errors():
    bad = parse_problem("thf(w, type, w: $tType).\nthf(p, type, p: w > $o).\nthf(a, axiom, p @ c).")
    assert type_errors(bad)
    untyped = parse_problem("thf(p, type, p: $i > $o).\nthf(a, axiom, ! [X: $i] : (p @ X @ X)).")
    assert type_errors(untyped)


def test_seriality_axiom_true_in_serial_models():
    out = embed_modal_d(CHISHOLM_SDL)
    sig = signature_of(out)
    (serial,) = seriality_axioms(out)
    m = KripkeModel({0, 1, 2}, {(0, 1), (1, 2), (2, 2)}, {"help": {1}, "tell": set()})
    assert eval_thf_finite(serial.payload, sig.interpretation(m)) is True


def test_embedded_literal_is_pointwise_negation():
    sig = signature_of(embed_modal_d(with_spec(SDL_HEAD, F("~help"))))
    m = KripkeModel({0, 1, 2}, {(0, 0), (1, 1), (2, 0)}, {"help": {0, 2}})
    assert eval_thf_finite(lift_term(F("~help"), sig), sig.interpretation(m)) == {(0,): False, (1,): True, (2,): False}


ATOMS = ("p", "q", "r")
DECLARE_ALL = F("p | q | r")


@settings(max_examples=250)
@given(modal_formulas(ATOMS), kripke_models(ATOMS))
def test_sdl_faithfulness(f, m):
    out = embed_modal_d(with_spec(SDL_HEAD, DECLARE_ALL, f))
    sig = signature_of(out)
    interp = sig.interpretation(m)
    table = eval_thf_finite(lift_term(f, sig), interp)
    assert table == {(w,): eval_kripke(f, m, w) for w in m.worlds}
    (ax,) = [af for af in out if af.name == "f1"]
    assert eval_thf_finite(ax.payload, interp) == all(eval_kripke(f, m, w) for w in m.worlds)


@settings(max_examples=250)
@given(dyadic_formulas(ATOMS), preference_models(ATOMS))
def test_aqvist_faithfulness(f, m):
    out = embed_aqvist_e(with_spec(DDL_HEAD, DECLARE_ALL, f))
    sig = signature_of(out)
    interp = sig.interpretation(m)
    table = eval_thf_finite(lift_term(f, sig), interp)
    assert table == {(w,): eval_pref(f, m, w) for w in m.worlds}
    assert type_errors(out) == []


@settings(max_examples=100)
@given(modal_formulas(ATOMS), kripke_models(ATOMS))
def test_local_mode_faithfulness(f, m):
    out = embed_modal_d(with_spec(SDL_HEAD, DECLARE_ALL, f), "local")
    sig = signature_of(out)
    interp = sig.interpretation(m)
    (ax,) = [af for af in out if af.name == "f1"]
    assert eval_thf_finite(ax.payload, interp) == eval_kripke(f, m, interp.symbols[sig.current_world])
