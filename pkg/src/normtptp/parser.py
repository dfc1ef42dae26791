"""Recursive-descent parser for the TFF/NXF and THF subset.

Only the constructs the pipeline produces or consumes are accepted: no
arithmetic, tuples, ``let``, CNF or polymorphic types.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Tuple

from .syntax import (
    FALSE,
    TRUE,
    AnnotatedFormula,
    Apply,
    Atom,
    BaseType,
    Binary,
    DuplicateName,
    Func,
    FunType,
    GList,
    GTerm,
    Lambda,
    LogicSpec,
    NonClassical,
    Not,
    Option,
    Param,
    Problem,
    Quant,
    TptpError,
    TypeDecl,
    Var,
)


class ParseError(TptpError):
    def __init__(self, position: Tuple[int, int], expected: str, found: str = ""):
        line, col = position
        msg = f"{line}:{col}: expected {expected}"
        if found:
            msg += f", found {found}"
        super().__init__(msg)
        self.position = position
        self.expected = expected
        self.found = found


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_TOKEN_SPEC = [
    ("ws", r"[ \t\r\n]+"),
    ("comment", r"%[^\n]*"),
    ("block_comment", r"/\*.*?\*/"),
    ("single_quoted", r"'(?:[^'\\]|\\.)+'"),
    ("distinct_object", r'"(?:[^"\\]|\\.)*"'),
    ("dollar_dollar_word", r"\$\$[a-z][A-Za-z0-9_]*"),
    ("dollar_word", r"\$[a-z][A-Za-z0-9_]*"),
    ("upper_word", r"[A-Z][A-Za-z0-9_]*"),
    ("lower_word", r"[a-z][A-Za-z0-9_]*"),
    ("number", r"[+-]?[0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?"),
    ("op", r"<=>|:=|==|=>|!=|[()\[\]{},.:~&|!?^@#>*=]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{k}>{p})" for k, p in _TOKEN_SPEC), re.DOTALL)


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError((line, pos - line_start + 1), "a token", repr(text[pos]))
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment", "block_comment"):
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def _unquote(text: str) -> str:
    body = text[1:-1]
    return re.sub(r"\\(.)", r"\1", body)


_WORD_KINDS = ("lower_word", "single_quoted", "dollar_word", "dollar_dollar_word")


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.lang = "tff"

    # -- token plumbing

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def fail(self, expected: str):
        t = self.tok
        raise ParseError((t.line, t.col), expected, repr(t.text) if t.kind != "eof" else "end of input")

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        t = self.tok
        self.i += 1
        return t

    def take(self, *kinds: str) -> Token:
        if self.tok.kind not in kinds:
            self.fail(" or ".join(k.replace("_", " ") for k in kinds))
        t = self.tok
        self.i += 1
        return t

    def word(self, *kinds: str) -> str:
        t = self.take(*kinds)
        return _unquote(t.text) if t.kind == "single_quoted" else t.text

    # -- top level

    def problem(self) -> Problem:
        formulas = []
        names = set()
        while self.tok.kind != "eof":
            af = self.annotated()
            if af.name in names:
                raise DuplicateName(af.name)
            names.add(af.name)
            formulas.append(af)
        return Problem(tuple(formulas))

    def annotated(self) -> AnnotatedFormula:
        t = self.tok
        if t.kind != "lower_word" or t.text not in ("tff", "thf"):
            self.fail("'tff(' or 'thf('")
        self.lang = t.text
        self.i += 1
        self.expect("(")
        name = self.word("lower_word", "single_quoted", "number")
        self.expect(",")
        role_tok = self.tok
        role = self.word("lower_word")
        self.expect(",")
        if role == "logic":
            payload = self.logic_spec()
        elif role == "type":
            payload = self.type_decl()
        elif role in ("axiom", "definition", "conjecture"):
            payload = self.formula()
        else:
            raise ParseError((role_tok.line, role_tok.col), "a supported role", repr(role))
        source = annotations = None
        if self.accept(","):
            source = self.general_term()
            if self.accept(","):
                if not self.at("["):
                    self.fail("annotation list '['")
                annotations = self.general_term().items
        self.expect(")")
        self.expect(".")
        return AnnotatedFormula(self.lang, name, role, payload, source, annotations)

    # -- logic specifications

    def logic_spec(self) -> LogicSpec:
        name = self.word(*_WORD_KINDS)
        self.expect("==")
        return LogicSpec(name, self.option_list())

    def option_list(self) -> Tuple[Option, ...]:
        self.expect("[")
        opts = []
        if not self.at("]"):
            opts.append(self.option())
            while self.accept(","):
                opts.append(self.option())
        self.expect("]")
        keys = [o.key for o in opts]
        if len(set(keys)) != len(keys):
            self.fail("unique option keys")
        return tuple(opts)

    def option(self) -> Option:
        key = self.word(*_WORD_KINDS)
        self.expect("==")
        if self.at("["):
            return Option(key, self.option_list())
        return Option(key, self.word(*_WORD_KINDS))

    # -- types

    def type_decl(self) -> TypeDecl:
        parens = 0
        while self.accept("("):
            parens += 1
        sym = self.word(*_WORD_KINDS)
        self.expect(":")
        ty = self.type_expr()
        for _ in range(parens):
            self.expect(")")
        return TypeDecl(sym, ty)

    def type_expr(self):
        left = self.type_product()
        if self.accept(">"):
            right = self.type_expr()
            args = left if isinstance(left, tuple) else (left,)
            return FunType(args, right)
        if isinstance(left, tuple):
            self.fail("'>' after a product type")
        return left

    def type_product(self):
        first = self.type_unit()
        if not self.at("*"):
            return first
        items = [first]
        while self.accept("*"):
            items.append(self.type_unit())
        return tuple(items)

    def type_unit(self):
        if self.accept("("):
            inner = self.type_product_or_expr()
            self.expect(")")
            return inner
        return BaseType(self.word("lower_word", "single_quoted", "dollar_word"))

    def type_product_or_expr(self):
        left = self.type_product()
        if self.accept(">"):
            args = left if isinstance(left, tuple) else (left,)
            return FunType(args, self.type_expr())
        return left

    # -- formulas (shared binary layer)

    def formula(self):
        left = self.disjunction()
        for op in ("=>", "<=>"):
            if self.accept(op):
                return Binary(op, left, self.disjunction())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.accept("|"):
            left = Binary("|", left, self.conjunction())
        return left

    def conjunction(self):
        left = self.unary()
        while self.accept("&"):
            left = Binary("&", left, self.unary())
        return left

    def unary(self):
        if self.accept("~"):
            return Not(self.unary())
        if self.lang == "thf":
            return self.thf_application()
        return self.tff_unit()

    def bound_variables(self) -> Tuple[Var, ...]:
        self.expect("[")
        vs = [self.bound_variable()]
        while self.accept(","):
            vs.append(self.bound_variable())
        self.expect("]")
        self.expect(":")
        return tuple(vs)

    def bound_variable(self) -> Var:
        name = self.take("upper_word").text
        if self.accept(":"):
            return Var(name, self.type_unit_or_arrow())
        return Var(name)

    def type_unit_or_arrow(self):
        left = self.type_unit()
        if self.accept(">"):
            return FunType((left,), self.type_unit_or_arrow())
        return left

    def connective(self) -> Tuple[str, Tuple[Param, ...]]:
        self.expect("{")
        name = self.word("dollar_word", "dollar_dollar_word")
        params = []
        if self.accept("("):
            params.append(self.param())
            while self.accept(","):
                params.append(self.param())
            self.expect(")")
        self.expect("}")
        return name, tuple(params)

    def param(self) -> Param:
        if self.accept("#"):
            return Param(None, self.term())
        key = self.word("lower_word", "dollar_word", "dollar_dollar_word")
        self.expect(":=")
        return Param(key, self.term())

    # -- TFF

    def tff_unit(self):
        t = self.tok
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "op" and t.text in ("!", "?"):
            self.i += 1
            vs = self.bound_variables()
            return Quant(t.text, vs, self.unary())
        if self.at("{"):
            name, params = self.connective()
            self.expect("@")
            self.expect("(")
            args = [self.formula()]
            while self.accept(","):
                args.append(self.formula())
            self.expect(")")
            return NonClassical(name, tuple(args), params)
        if t.kind == "dollar_word" and t.text in ("$true", "$false"):
            self.i += 1
            return TRUE if t.text == "$true" else FALSE
        if t.kind in _WORD_KINDS:
            pred = self.word(*_WORD_KINDS)
            return Atom(pred, self.term_args())
        self.fail("a formula")

    def term_args(self) -> tuple:
        if not self.accept("("):
            return ()
        args = [self.term()]
        while self.accept(","):
            args.append(self.term())
        self.expect(")")
        return tuple(args)

    def term(self):
        if self.lang == "thf":
            return self.thf_term()
        if self.tok.kind == "upper_word":
            return Var(self.take("upper_word").text)
        name = self.word("lower_word", "single_quoted", "dollar_word")
        return Func(name, self.term_args())

    # -- THF
    #
    # Application chains are parsed generically and then read back in the
    # context they occur in: formula position yields Atom/Apply/NonClassical,
    # argument position of a constant head yields terms.

    def thf_application(self):
        head = self.thf_unit()
        args = []
        while self.accept("@"):
            args.append(self.thf_unit_raw())
        return self._thf_formula(head, args)

    def thf_unit_raw(self):
        """A unit in argument position: returned as ('raw', start_index) for later reading."""
        start = self.i
        self._skip_unit()
        return ("raw", start, self.i)

    def _skip_unit(self):
        depth = 0
        if self.tok.kind == "op" and self.tok.text in ("(", "{", "["):
            opener = self.tok.text
            closer = {"(": ")", "{": "}", "[": "]"}[opener]
            depth = 0
            while True:
                t = self.tok
                if t.kind == "eof":
                    self.fail(repr(closer))
                if t.kind == "op" and t.text in ("(", "{", "["):
                    depth += 1
                elif t.kind == "op" and t.text in (")", "}", "]"):
                    depth -= 1
                self.i += 1
                if depth == 0:
                    return
        if self.tok.kind in _WORD_KINDS or self.tok.kind == "upper_word":
            self.i += 1
            return
        self.fail("an application argument")

    def _reparse(self, raw, method):
        _, start, end = raw
        saved = self.i
        self.i = start
        value = method()
        if self.i != end:
            self.fail("end of argument")
        self.i = saved
        return value

    def _thf_formula(self, head, args):
        if not args:
            if isinstance(head, tuple) and head[0] == "word":
                name = head[1]
                if name == "$true":
                    return TRUE
                if name == "$false":
                    return FALSE
                return Atom(name)
            if isinstance(head, tuple) and head[0] == "conn":
                self.fail("'@' after a connective")
            if isinstance(head, tuple) and head[0] == "var":
                self.fail("a formula (bare variables are not formulas here)")
            return head
        if isinstance(head, tuple) and head[0] == "word":
            return Atom(head[1], tuple(self._reparse(a, self.thf_term) for a in args))
        if isinstance(head, tuple) and head[0] == "conn":
            return NonClassical(head[1], tuple(self._reparse(a, self.thf_formula_unit) for a in args), head[2])
        if isinstance(head, Lambda):
            return Apply(head, tuple(self._reparse(a, self.thf_term) for a in args))
        self.fail("an applicable head")

    def thf_formula_unit(self):
        return self._thf_formula(self.thf_unit(), [])

    def thf_unit(self):
        t = self.tok
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "op" and t.text in ("!", "?", "^"):
            self.i += 1
            vs = self.bound_variables()
            body = self.unary()
            return Lambda(vs, body) if t.text == "^" else Quant(t.text, vs, body)
        if self.at("{"):
            name, params = self.connective()
            return ("conn", name, params)
        if t.kind == "upper_word":
            self.i += 1
            return ("var", t.text)
        if t.kind in _WORD_KINDS:
            return ("word", self.word(*_WORD_KINDS))
        self.fail("a formula")

    def thf_term(self):
        t = self.tok
        if t.kind == "upper_word":
            self.i += 1
            return Var(t.text)
        if self.accept("("):
            name = self.word("lower_word", "single_quoted", "dollar_word")
            args = []
            while self.accept("@"):
                args.append(self.thf_term())
            self.expect(")")
            return Func(name, tuple(args))
        return Func(self.word("lower_word", "single_quoted", "dollar_word"))

    # -- general terms (sources, annotations)

    def general_term(self):
        if self.accept("["):
            items = []
            if not self.at("]"):
                items.append(self.general_term())
                while self.accept(","):
                    items.append(self.general_term())
            self.expect("]")
            return GList(tuple(items))
        t = self.take(*_WORD_KINDS, "upper_word", "number", "distinct_object")
        args = []
        if t.kind != "upper_word" and self.accept("("):
            args.append(self.general_term())
            while self.accept(","):
                args.append(self.general_term())
            self.expect(")")
        return GTerm(t.text, tuple(args))


def parse_problem(text: str) -> Problem:
    """Parse a whole TPTP problem; ``%`` and ``/* */`` comments are skipped."""
    return _Parser(text).problem()


def parse_formula(text: str, language: str = "tff"):
    """Parse a single formula in ``language`` (handy in tests and at the REPL)."""
    p = _Parser(text)
    p.lang = language
    f = p.formula()
    if p.tok.kind != "eof":
        p.fail("end of input")
    return f
