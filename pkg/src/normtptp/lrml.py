"""LegalRuleML ingestion and translation to NMF.

Supported fragment: prescriptive, constitutive and factual statements whose
rule bodies use RuleML Atom/Rel/Var/Ind/And/Or/Neg.  Each statement becomes
one NMF annotated formula named after its key.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from .errors import ToolchainError, UnsupportedFeature
from .syntax import (
    TRUE,
    AnnotatedFormula,
    Atom,
    Binary,
    FALSE,
    Func,
    GList,
    GTerm,
    NonClassical,
    Not,
    Param,
    Problem,
    Quant,
    Var,
    ordered_free_vars,
    quote_atom,
)


class XmlError(ToolchainError):
    pass


class IdentifierError(ToolchainError):
    """A source name has no usable TPTP spelling."""


class TranslationError(ToolchainError):
    def __init__(self, failures):
        self.failures = list(failures)
        lines = "; ".join(f"{key}: {exc}" for key, exc in self.failures)
        super().__init__(f"{len(self.failures)} statement(s) failed: {lines}")


# -- RuleML formula model --------------------------------------------------


@dataclass(frozen=True)
class LVar:
    name: str


@dataclass(frozen=True)
class LInd:
    name: str


@dataclass(frozen=True)
class LAtom:
    rel: str
    args: Tuple[Union[LVar, LInd], ...] = ()

    def __post_init__(self):
        if not self.rel.strip():
            raise XmlError("atom with empty relation name")


@dataclass(frozen=True)
class LAnd:
    items: Tuple["LrmlFormula", ...]


@dataclass(frozen=True)
class LOr:
    items: Tuple["LrmlFormula", ...]


@dataclass(frozen=True)
class LNeg:
    arg: "LrmlFormula"


LrmlFormula = Union[LAtom, LAnd, LOr, LNeg]

KINDS = ("prescriptive", "constitutive", "factual")
DEONTIC = ("obligation", "permission", "prohibition")


@dataclass(frozen=True)
class LrmlStatement:
    kind: str
    key: str
    head: LrmlFormula
    body: Optional[LrmlFormula] = None
    closure: str = "universal"
    deontic: Optional[str] = None
    bearer: Optional[Union[LVar, LInd]] = None
    closure_defaulted: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown statement kind {self.kind!r}")
        if self.closure not in ("universal", "existential"):
            raise UnsupportedFeature(self.key, f"closure {self.closure!r}")
        if self.kind != "prescriptive" and (self.deontic or self.bearer):
            raise UnsupportedFeature(self.key, f"deontic operator in a {self.kind} statement")
        if self.kind == "factual" and self.body is not None:
            raise ValueError("factual statements have no rule body")
        if self.kind == "prescriptive" and self.deontic not in DEONTIC:
            raise UnsupportedFeature(self.key, "prescriptive statement without a deontic operator")


@dataclass
class LrmlDocument:
    statements: List[LrmlStatement] = field(default_factory=list)
    references: Dict[str, str] = field(default_factory=dict)
    associations: Dict[str, List[str]] = field(default_factory=dict)
    skipped: List[Tuple[str, str]] = field(default_factory=list)

    def __post_init__(self):
        keys = [s.key for s in self.statements]
        dupes = {k for k in keys if keys.count(k) > 1}
        if dupes:
            raise XmlError(f"duplicate statement keys: {sorted(dupes)}")


# -- XML reading -----------------------------------------------------------

_STATEMENT_KINDS = {
    "PrescriptiveStatement": "prescriptive",
    "ConstitutiveStatement": "constitutive",
    "FactualStatement": "factual",
}
_OTHER_STATEMENTS = ("PenaltyStatement", "ReparationStatement", "OverrideStatement")
_DEONTIC_TAGS = {"Obligation": "obligation", "Permission": "permission", "Prohibition": "prohibition"}
# RuleML role tags that only wrap a formula
_EDGE_TAGS = ("formula", "strong", "weak")


def _local(el) -> str:
    tag = el.tag
    return tag.rsplit("}", 1)[-1] if isinstance(tag, str) else ""


def _ref(value: str) -> str:
    return value[1:] if value.startswith("#") else value


def _children(el):
    return [c for c in el if isinstance(c.tag, str)]


def _contains(el, names) -> bool:
    return any(_local(d) in names for d in el.iter())


def parse_lrml(xml: str) -> LrmlDocument:
    """Read the supported LegalRuleML fragment, statements in document order."""
    try:
        root = ET.fromstring(xml.encode("utf-8") if isinstance(xml, str) else xml)
    except ET.ParseError as exc:
        raise XmlError(f"malformed XML: {exc}") from None

    doc = LrmlDocument()
    for el in root.iter():
        name = _local(el)
        if name in ("LegalReference", "Reference"):
            key = el.get("refersTo") or el.get("key")
            if not key:
                raise XmlError(f"{name} without refersTo/key attribute")
            text = el.get("refID") or (el.text or "").strip() or key
            doc.references[key] = text
        elif name == "Association":
            sources = [_ref(c.get("keyref", "")) for c in el if _local(c) == "appliesSource"]
            targets = [_ref(c.get("keyref", "")) for c in el if _local(c) == "toTarget"]
            for t in targets:
                doc.associations.setdefault(t, []).extend(s for s in sources if s)

    statements = []
    for el in root.iter():
        name = _local(el)
        if name in _STATEMENT_KINDS:
            statements.append(_statement(el, _STATEMENT_KINDS[name]))
        elif name in _OTHER_STATEMENTS:
            doc.skipped.append((el.get("key", "?"), name))
    doc.statements = statements
    doc.__post_init__()
    return doc


def _statement(el, kind: str) -> LrmlStatement:
    key = el.get("key")
    if not key:
        raise XmlError(f"{_local(el)} without key attribute")
    if _contains(el, ("SuborderList",)):
        raise UnsupportedFeature(key, "suborder list")

    if kind == "factual":
        if _contains(el, _DEONTIC_TAGS):
            raise UnsupportedFeature(key, "deontic operator in a factual statement")
        return LrmlStatement("factual", key, _single_formula(el, key))

    rules = [c for c in _children(el) if _local(c) == "Rule"]
    if len(rules) != 1:
        raise XmlError(f"{key}: expected exactly one ruleml:Rule, found {len(rules)}")
    rule = rules[0]
    closure = rule.get("closure")
    defaulted = closure is None
    closure = closure or "universal"

    if_nodes = [c for c in _children(rule) if _local(c) == "if"]
    then_nodes = [c for c in _children(rule) if _local(c) == "then"]
    if len(then_nodes) != 1 or len(if_nodes) > 1:
        raise XmlError(f"{key}: a rule needs one then-node and at most one if-node")
    body = None
    if if_nodes:
        if _contains(if_nodes[0], _DEONTIC_TAGS):
            raise UnsupportedFeature(key, "deontic operator in the if-node")
        body = _single_formula(if_nodes[0], key)

    then = then_nodes[0]
    if kind == "constitutive":
        if _contains(then, _DEONTIC_TAGS):
            raise UnsupportedFeature(key, "deontic operator in a constitutive statement")
        return LrmlStatement("constitutive", key, _single_formula(then, key), body, closure,
                             closure_defaulted=defaulted)

    content = _children(then)
    deontics = [d for d in then.iter() if _local(d) in _DEONTIC_TAGS]
    if not deontics:
        raise UnsupportedFeature(key, "prescriptive statement without a deontic operator")
    if len(content) != 1 or len(deontics) != 1 or _local(content[0]) not in _DEONTIC_TAGS:
        raise UnsupportedFeature(key, "compound or multiple deontic operators in the head")
    op = content[0]
    bearer = None
    formula_children = []
    for c in _children(op):
        cname = _local(c)
        if cname == "Bearer":
            bearer = _bearer(c, key)
        elif cname in _FORMULA_TAGS or cname in _EDGE_TAGS:
            formula_children.append(c)
        # other lrml metadata on the operator (strength, exceptions) is ignored
    if len(formula_children) != 1:
        raise XmlError(f"{key}: deontic operator must wrap exactly one formula")
    head = _formula(formula_children[0], key)
    return LrmlStatement("prescriptive", key, head, body, closure, _DEONTIC_TAGS[_local(op)], bearer, defaulted)


def _bearer(el, key):
    ref = el.get("iri") or el.get("keyref")
    if ref:
        return LInd(_ref(ref))
    kids = _children(el)
    if len(kids) == 1 and _local(kids[0]) in ("Ind", "Var"):
        return _arg(kids[0], key)
    text = (el.text or "").strip()
    if text:
        return LInd(text)
    raise XmlError(f"{key}: empty Bearer")


def _single_formula(el, key) -> LrmlFormula:
    kids = _children(el)
    if len(kids) != 1:
        raise XmlError(f"{key}: expected exactly one formula in {_local(el)}, found {len(kids)}")
    return _formula(kids[0], key)


_FORMULA_TAGS = ("Atom", "And", "Or", "Neg")


def _formula(el, key) -> LrmlFormula:
    name = _local(el)
    if name in _EDGE_TAGS:
        return _single_formula(el, key)
    if name == "Atom":
        rel = None
        args = []
        for c in _children(el):
            cname = _local(c)
            if cname == "op":
                (c,) = _children(c) or (None,)
                cname = _local(c) if c is not None else ""
            if cname == "Rel":
                rel = _ref(c.get("iri", "")) or (c.text or "").strip()
            elif cname in ("Ind", "Var"):
                args.append(_arg(c, key))
            elif cname == "arg":
                args.extend(_arg(g, key) for g in _children(c))
            else:
                raise UnsupportedFeature(key, f"atom argument <{cname}>")
        if not rel:
            raise XmlError(f"{key}: atom without relation name")
        return LAtom(rel, tuple(args))
    if name in ("And", "Or"):
        items = tuple(_formula(c, key) for c in _children(el))
        return LAnd(items) if name == "And" else LOr(items)
    if name == "Neg":
        return LNeg(_single_formula(el, key))
    if name in _DEONTIC_TAGS:
        raise UnsupportedFeature(key, f"nested deontic operator <{name}>")
    raise UnsupportedFeature(key, f"RuleML element <{name}>")


def _arg(el, key):
    text = _ref(el.get("iri", "")) or (el.text or "").strip()
    if not text:
        raise XmlError(f"{key}: empty <{_local(el)}>")
    return LVar(text) if _local(el) == "Var" else LInd(text)


# -- translation -----------------------------------------------------------


def _sanitize(raw: str, upper: bool) -> str:
    s = re.sub(r"[^A-Za-z0-9_]", "_", raw.strip())
    if not s.strip("_"):
        raise IdentifierError(f"cannot turn {raw!r} into a TPTP identifier")
    if not s[0].isalpha():
        s = ("V" if upper else "x") + s
    return (s[0].upper() if upper else s[0].lower()) + s[1:]


class NameTable:
    """Consistent source-name to TPTP-name mapping with collision suffixes.

    Separate namespaces are kept for symbols (relations and individuals),
    variables and formula names.
    """

    def __init__(self):
        self._maps = {"symbol": {}, "variable": {}, "key": {}}
        self._used = {"symbol": set(), "variable": set(), "key": set()}

    def _get(self, space: str, raw: str, upper: bool) -> str:
        mapping = self._maps[space]
        if raw not in mapping:
            base = _sanitize(raw, upper)
            name, n = base, 0
            while name in self._used[space]:
                n += 1
                name = f"{base}_{n}"
            mapping[raw] = name
            self._used[space].add(name)
        return mapping[raw]

    def symbol(self, raw: str) -> str:
        return self._get("symbol", raw, upper=False)

    def variable(self, raw: str) -> str:
        return self._get("variable", raw, upper=True)

    def key(self, raw: str) -> str:
        return self._get("key", raw, upper=False)


def _tr_arg(a, names: NameTable):
    if isinstance(a, LVar):
        return Var(names.variable(a.name))
    return Func(names.symbol(a.name))


def tr_formula(f: LrmlFormula, names: Optional[NameTable] = None):
    """Map a RuleML formula onto a TFF formula."""
    names = names or NameTable()
    if isinstance(f, LAtom):
        return Atom(names.symbol(f.rel), tuple(_tr_arg(a, names) for a in f.args))
    if isinstance(f, LNeg):
        return Not(tr_formula(f.arg, names))
    if isinstance(f, (LAnd, LOr)):
        op = "&" if isinstance(f, LAnd) else "|"
        parts = [tr_formula(i, names) for i in f.items]
        if not parts:
            return TRUE if op == "&" else FALSE
        out = parts[0]
        for p in parts[1:]:
            out = Binary(op, out, p)
        return out
    raise TypeError(f"not a RuleML formula: {f!r}")


def _annotations(s: LrmlStatement, doc: LrmlDocument):
    notes = []
    refs = doc.associations.get(s.key, [])
    if refs:
        items = tuple(
            GTerm("reference", (GTerm(quote_atom(r)), GTerm(quote_atom(doc.references.get(r, r)))))
            for r in refs
        )
        notes.append(GTerm("references", (GList(items),)))
    if s.closure_defaulted and s.kind != "factual":
        notes.append(GTerm("closure_default", (GTerm(s.closure),)))
    return tuple(notes)


def translate_statement(s: LrmlStatement, doc: Optional[LrmlDocument] = None,
                        names: Optional[NameTable] = None) -> AnnotatedFormula:
    doc = doc or LrmlDocument()
    names = names or NameTable()
    if s.kind == "factual":
        formula = tr_formula(s.head, names)
    else:
        body = tr_formula(s.body, names) if s.body is not None else TRUE
        head = tr_formula(s.head, names)
        connective = "$$" + (s.deontic if s.kind == "prescriptive" else "constitutive")
        params = ()
        if s.bearer is not None:
            params = (Param("bearer", _tr_arg(s.bearer, names)),)
        formula = NonClassical(connective, (body, head), params)
    fv = ordered_free_vars(formula)
    if fv:
        # factual statements carry no closure attribute; TPTP needs closed formulas
        q = "?" if s.closure == "existential" else "!"
        formula = Quant(q, tuple(Var(v) for v in fv), formula)
    notes = _annotations(s, doc)
    source = GTerm("unknown") if notes else None
    return AnnotatedFormula("tff", names.key(s.key), "axiom", formula, source, notes or None)


def translate_document(doc: LrmlDocument) -> Problem:
    """Translate every statement in order; failures are collected per key."""
    names = NameTable()
    out, failures = [], []
    for s in doc.statements:
        try:
            out.append(translate_statement(s, doc, names))
        except ToolchainError as exc:
            failures.append((s.key, exc))
    if failures:
        raise TranslationError(failures)
    return Problem(tuple(out))


def lrml_to_nmf(xml: str) -> Problem:
    return translate_document(parse_lrml(xml))
