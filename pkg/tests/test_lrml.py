import pytest

from normtptp.errors import UnsupportedFeature
from normtptp.lrml import (
    IdentifierError,
    LAtom,
    LInd,
    LNeg,
    LrmlDocument,
    LrmlStatement,
    LVar,
    NameTable,
    TranslationError,
    XmlError,
    lrml_to_nmf,
    parse_lrml,
    tr_formula,
    translate_document,
    translate_statement,
)
from normtptp.nmf import validate_nmf
from normtptp.parser import parse_formula, parse_problem
from normtptp.syntax import Atom, Func, Not, Var, free_vars

NS = 'xmlns:lrml="http://docs.oasis-open.org/legalruleml/ns/v1.0/" xmlns:ruleml="http://ruleml.org/spec"'


def doc(statements: str) -> str:
    return f"<lrml:LegalRuleML {NS}><lrml:Statements key='s'>{statements}</lrml:Statements></lrml:LegalRuleML>"


def atom(rel, *args):
    inner = "".join(f"<ruleml:{k}>{v}</ruleml:{k}>" for k, v in args)
    return f"<ruleml:Atom><ruleml:Rel>{rel}</ruleml:Rel>{inner}</ruleml:Atom>"


def prescriptive(key, head, body=None, op="Obligation", closure=' closure="universal"', extra=""):
    if_node = f"<ruleml:if>{body}</ruleml:if>" if body else ""
    return (f'<lrml:PrescriptiveStatement key="{key}"><ruleml:Rule{closure}>{if_node}'
            f"<ruleml:then><lrml:{op}>{extra}{head}</lrml:{op}></ruleml:then></ruleml:Rule></lrml:PrescriptiveStatement>")


CHISHOLM_NMF = parse_problem("""
tff(norm1, axiom, {$$obligation} @ ($true, help)).
tff(norm2, axiom, {$$obligation} @ (help, tell)).
tff(norm3, axiom, {$$obligation} @ (~help, ~tell)).
tff(fact1, axiom, ~help).
""")


def test_chisholm_document(chisholm_xml):
    d = parse_lrml(chisholm_xml)
    assert [s.kind for s in d.statements] == ["prescriptive"] * 3 + ["factual"]
    norm1 = d.statements[0]
    assert norm1.deontic == "obligation" and norm1.body is None and norm1.closure == "universal"
    assert lrml_to_nmf(chisholm_xml) == CHISHOLM_NMF


def test_prescriptive_statement_shape():
    d = parse_lrml(doc(prescriptive("k", atom("b"), atom("a"))))
    (s,) = d.statements
    assert (s.kind, s.closure, s.deontic) == ("prescriptive", "universal", "obligation")
    assert s.body == LAtom("a", ()) and s.head == LAtom("b", ())


def test_constitutive_statement():
    xml = doc('<lrml:ConstitutiveStatement key="c"><ruleml:Rule closure="universal">'
              f"<ruleml:if>{atom('a')}</ruleml:if><ruleml:then>{atom('b')}</ruleml:then>"
              "</ruleml:Rule></lrml:ConstitutiveStatement>")
    (s,) = parse_lrml(xml).statements
    assert s.kind == "constitutive" and s.deontic is None
    assert translate_statement(s).payload == parse_formula("{$$constitutive} @ (a, b)")


def test_suborder_list_rejected():
    xml = doc(prescriptive("k", "<lrml:SuborderList>" + atom("b") + "</lrml:SuborderList>"))
    with pytest.raises(UnsupportedFeature):
        parse_lrml(xml)


def test_deontic_in_if_node_rejected():
    body = f"<lrml:Obligation>{atom('a')}</lrml:Obligation>"
    with pytest.raises(UnsupportedFeature):
        parse_lrml(doc(prescriptive("k", atom("b"), body)))


def test_compound_deontic_head_rejected():
    head = (f"<ruleml:And><lrml:Obligation>{atom('a')}</lrml:Obligation>"
            f"<lrml:Obligation>{atom('b')}</lrml:Obligation></ruleml:And>")
    xml = doc(f'<lrml:PrescriptiveStatement key="k"><ruleml:Rule closure="universal">'
              f"<ruleml:then>{head}</ruleml:then></ruleml:Rule></lrml:PrescriptiveStatement>")
    with pytest.raises(UnsupportedFeature):
        parse_lrml(xml)


def test_deontic_in_constitutive_rejected():
    xml = doc('<lrml:ConstitutiveStatement key="c"><ruleml:Rule closure="universal">'
              f"<ruleml:then><lrml:Obligation>{atom('b')}</lrml:Obligation></ruleml:then>"
              "</ruleml:Rule></lrml:ConstitutiveStatement>")
    with pytest.raises(UnsupportedFeature):
        parse_lrml(xml)


def test_malformed_xml():
    with pytest.raises(XmlError):
        parse_lrml("<lrml:LegalRuleML")


def test_duplicate_keys():
    with pytest.raises(XmlError):
        parse_lrml(doc(prescriptive("k", atom("a")) + prescriptive("k", atom("b"))))


def test_tr_formula_examples():
    assert tr_formula(LAtom("help", ())) == Atom("help")
    assert tr_formula(LNeg(LAtom("help", ()))) == Not(Atom("help"))
    assert tr_formula(LAtom("owns", (LVar("X"), LInd("car1")))) == Atom("owns", (Var("X"), Func("car1")))


def test_name_sanitization():
    names = NameTable()
    assert names.symbol("Has License") == "has_License"
    assert names.variable("person") == "Person"
    # distinct source names that sanitize identically are kept apart
    assert names.symbol("has-License") == "has_License_1"
    assert names.symbol("Has License") == "has_License"
    with pytest.raises(IdentifierError):
        names.symbol("--")


def test_quantified_closure():
    xml = doc(prescriptive("register", atom("register", ("Var", "X")), atom("owns", ("Var", "X"), ("Ind", "car1"))))
    (af,) = lrml_to_nmf(xml)
    assert af.payload == parse_formula("! [X] : ({$$obligation} @ (owns(X, car1), register(X)))")


def test_existential_closure_and_bearer(vehicles_xml):
    p = lrml_to_nmf(vehicles_xml)
    by_name = {af.name: af for af in p}
    assert by_name["someInspection"].payload == parse_formula("? [Z] : ({$$obligation} @ ($true, inspects(Z, car1)))")
    no_parking = by_name["noParking"].payload
    assert no_parking.body.param("bearer") == Func("alice")
    assert no_parking.body.connective == "$$prohibition"


def test_references_become_annotations(vehicles_xml):
    p = lrml_to_nmf(vehicles_xml)
    by_name = {af.name: af for af in p}
    from normtptp.printer import print_annotated
    assert "references([reference(ref_reg, 'Traffic Act s.12')])" in print_annotated(by_name["register"])
    assert by_name["licence"].annotations is None


def test_default_closure_is_recorded():
    xml = doc(prescriptive("k", atom("p", ("Var", "X")), closure=""))
    (af,) = lrml_to_nmf(xml)
    assert af.payload.quantifier == "!"
    from normtptp.printer import print_annotated
    assert "closure_default(universal)" in print_annotated(af)


def test_document_invariants(vehicles_xml, chisholm_xml):
    for xml in (vehicles_xml, chisholm_xml):
        d = parse_lrml(xml)
        p = translate_document(d)
        assert validate_nmf(p) == []
        assert len(p) == len(d.statements)
        names = NameTable()
        assert sorted(af.name for af in p) == sorted(names.key(s.key) for s in d.statements)
        assert all(not free_vars(af.payload) for af in p)


def test_empty_and_factual_documents():
    assert len(translate_document(LrmlDocument())) == 0
    fact = LrmlStatement("factual", "fact1", LNeg(LAtom("help", ())))
    (af,) = translate_document(LrmlDocument([fact]))
    assert af.payload == Not(Atom("help"))


def test_errors_are_aggregated_by_key():
    bad = LrmlStatement("factual", "f1", LAtom("--", ()))
    worse = LrmlStatement("factual", "f2", LAtom("**", ()))
    with pytest.raises(TranslationError) as info:
        translate_document(LrmlDocument([bad, worse]))
    assert [k for k, _ in info.value.failures] == ["f1", "f2"]


def test_skipped_statements_are_recorded():
    xml = doc('<lrml:PenaltyStatement key="pen"/>' + prescriptive("k", atom("a")))
    d = parse_lrml(xml)
    assert d.skipped == [("pen", "PenaltyStatement")]
    assert len(d.statements) == 1
