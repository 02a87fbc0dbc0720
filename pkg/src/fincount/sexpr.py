"""Text format for vocabularies, formulas, and class specs.

Grammar (informal):

    spec     := vocab sentence
    vocab    := "(vocab" reldecl* "(consts" INT "))"
    reldecl  := "(rel" NAME INT ")"
    sentence := "(sentence" formula ")"
    formula  := "(true)" | "(false)"
              | "(" NAME term* ")" | "(=" term term ")"
              | "(not" f ")" | "(and" f f ")" | "(or" f f ")"
              | "(implies" f f ")" | "(iff" f f ")"
              | "(exists" VAR f ")" | "(forall" VAR f ")"
              | "(count" INT INT VAR f ")"
              | "(existsrel" NAME INT f ")" | "(forallrel" NAME INT f ")"
              | "(existsrel-sub" NAME NAME f ")" | "(forallrel-sub" NAME NAME f ")"
    term     := VAR | "a" INT

Tokens "a1", "a2", ... are constants; any other name in term position is a
variable. ASCII only; ';' starts a line comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .logic import (
    And, Atom, Bottom, ClassSpec, Const, Count, Eq, Exists, ExistsRel,
    ExistsRelSub, Forall, ForallRel, ForallRelSub, Formula, Iff, Implies,
    Not, Or, Term, Top, Var, Vocabulary, validate_class_spec,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class SpecValidationError(Exception):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class _Token:
    kind: str  # "(", ")", "atom"
    text: str
    line: int
    col: int


_CONST_TOKEN = re.compile(r"a([0-9]+)$")
_INT_TOKEN = re.compile(r"[0-9]+$")

_CONNECTIVES = {"not": Not, "and": And, "or": Or, "implies": Implies, "iff": Iff}
_RESERVED = frozenset(
    {"true", "false", "not", "and", "or", "implies", "iff", "exists", "forall",
     "count", "existsrel", "forallrel", "existsrel-sub", "forallrel-sub", "=",
     "vocab", "rel", "consts", "sentence"}
)


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
        elif c in " \t\r":
            col += 1
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            tokens.append(_Token(c, c, line, col))
            col += 1
            i += 1
        else:
            start = i
            start_col = col
            while i < n and text[i] not in " \t\r\n();":
                i += 1
                col += 1
            tokens.append(_Token("atom", text[start:i], line, start_col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        if not text.strip():
            raise ParseError("empty input", 1, 1)

    def _here(self) -> tuple[int, int]:
        if self.pos < len(self.tokens):
            t = self.tokens[self.pos]
            return t.line, t.col
        if self.tokens:
            t = self.tokens[-1]
            return t.line, t.col + len(t.text)
        return 1, 1

    def fail(self, message: str):
        line, col = self._here()
        raise ParseError(message, line, col)

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, expected: str) -> _Token:
        tok = self.peek()
        if tok is None:
            self.fail(f"unexpected end of input, expected {expected}")
        self.pos += 1
        return tok

    def expect_open(self, what: str) -> None:
        tok = self.next(f"'(' to start {what}")
        if tok.kind != "(":
            self.fail(f"expected '(' to start {what}, got {tok.text!r}")

    def expect_close(self, what: str) -> None:
        tok = self.next(f"')' to close {what}")
        if tok.kind != ")":
            self.fail(f"expected ')' to close {what}, got {tok.text!r}")

    def expect_atom(self, what: str) -> _Token:
        tok = self.next(what)
        if tok.kind != "atom":
            self.fail(f"expected {what}, got {tok.text!r}")
        return tok

    def expect_int(self, what: str) -> int:
        tok = self.expect_atom(what)
        if not _INT_TOKEN.match(tok.text):
            self.fail(f"expected {what} (an integer), got {tok.text!r}")
        return int(tok.text)

    def expect_keyword(self, word: str) -> None:
        tok = self.expect_atom(f"keyword {word!r}")
        if tok.text != word:
            self.fail(f"expected keyword {word!r}, got {tok.text!r}")

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def parse_term(self) -> Term:
        tok = self.expect_atom("a term")
        m = _CONST_TOKEN.match(tok.text)
        if m:
            return Const(int(m.group(1)))
        return Var(tok.text)

    def parse_formula(self) -> Formula:
        self.expect_open("a formula")
        head = self.expect_atom("a formula head")
        text = head.text
        if text == "true":
            self.expect_close("(true)")
            return Top()
        if text == "false":
            self.expect_close("(false)")
            return Bottom()
        if text in _CONNECTIVES:
            ctor = _CONNECTIVES[text]
            if text == "not":
                body = self.parse_formula()
                self.expect_close("(not ...)")
                return Not(body)
            left = self.parse_formula()
            right = self.parse_formula()
            self.expect_close(f"({text} ...)")
            return ctor(left, right)
        if text == "=":
            left = self.parse_term()
            right = self.parse_term()
            self.expect_close("(= ...)")
            return Eq(left, right)
        if text in ("exists", "forall"):
            var = self.expect_atom("a variable").text
            body = self.parse_formula()
            self.expect_close(f"({text} ...)")
            return Exists(var, body) if text == "exists" else Forall(var, body)
        if text == "count":
            residue = self.expect_int("a residue")
            modulus = self.expect_int("a modulus")
            var = self.expect_atom("a variable").text
            body = self.parse_formula()
            self.expect_close("(count ...)")
            return Count(residue, modulus, var, body)
        if text in ("existsrel", "forallrel"):
            rel = self.expect_atom("a relation name").text
            arity = self.expect_int("an arity")
            body = self.parse_formula()
            self.expect_close(f"({text} ...)")
            ctor2 = ExistsRel if text == "existsrel" else ForallRel
            return ctor2(rel, arity, body)
        if text in ("existsrel-sub", "forallrel-sub"):
            rel = self.expect_atom("a relation name").text
            guard = self.expect_atom("a guard relation name").text
            body = self.parse_formula()
            self.expect_close(f"({text} ...)")
            ctor3 = ExistsRelSub if text == "existsrel-sub" else ForallRelSub
            return ctor3(rel, guard, body)
        # Anything else heads a relation atom.
        args: list[Term] = []
        while True:
            tok = self.peek()
            if tok is None:
                self.fail(f"unexpected end of input inside ({text} ...)")
            if tok.kind == ")":
                self.pos += 1
                return Atom(text, tuple(args))
            if tok.kind == "(":
                self.fail(f"expected a term or ')' in ({text} ...)")
            args.append(self.parse_term())

    def parse_vocab(self) -> Vocabulary:
        self.expect_open("the vocab block")
        self.expect_keyword("vocab")
        relations: list[tuple[str, int]] = []
        num_constants = None
        while True:
            tok = self.peek()
            if tok is None:
                self.fail("unexpected end of input in vocab block")
            if tok.kind == ")":
                self.pos += 1
                break
            self.expect_open("a vocab entry")
            word = self.expect_atom("'rel' or 'consts'")
            if word.text == "rel":
                name = self.expect_atom("a relation name").text
                arity = self.expect_int("an arity")
                self.expect_close("(rel ...)")
                relations.append((name, arity))
            elif word.text == "consts":
                num_constants = self.expect_int("a constant count")
                self.expect_close("(consts ...)")
            else:
                self.fail(f"expected 'rel' or 'consts', got {word.text!r}")
        if num_constants is None:
            self.fail("vocab block is missing (consts N)")
        return Vocabulary(tuple(relations), num_constants)

    def parse_sentence(self) -> Formula:
        self.expect_open("the sentence block")
        self.expect_keyword("sentence")
        body = self.parse_formula()
        self.expect_close("(sentence ...)")
        return body


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.parse_formula()
    if not p.at_end():
        p.fail("trailing input after formula")
    return f


def parse_class_spec(text: str) -> ClassSpec:
    """Parse and validate a (vocab ...) (sentence ...) pair.

    Raises ParseError with position info on syntax errors and
    SpecValidationError when the parsed spec fails validation.
    """
    p = _Parser(text)
    vocab = p.parse_vocab()
    sentence = p.parse_sentence()
    if not p.at_end():
        p.fail("trailing input after sentence block")
    spec = ClassSpec(vocab, sentence)
    problems = validate_class_spec(spec)
    if problems:
        raise SpecValidationError(problems)
    return spec


def print_term(t: Term) -> str:
    if isinstance(t, Const):
        return f"a{t.index}"
    return t.name


def print_formula(f: Formula) -> str:
    parts: list[str] = []
    _emit(f, parts)
    return "".join(parts)


def _emit(f: Formula, out: list[str]) -> None:
    # Iterative on the right spine via explicit work stack: printed formulas
    # produced by the eliminators can nest thousands of levels deep.
    stack: list[object] = [f]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        g = item
        if isinstance(g, Top):
            out.append("(true)")
        elif isinstance(g, Bottom):
            out.append("(false)")
        elif isinstance(g, Atom):
            if g.args:
                out.append(f"({g.rel} {' '.join(print_term(t) for t in g.args)})")
            else:
                out.append(f"({g.rel})")
        elif isinstance(g, Eq):
            out.append(f"(= {print_term(g.left)} {print_term(g.right)})")
        elif isinstance(g, Not):
            out.append("(not ")
            stack += [")", g.body]
        elif isinstance(g, And):
            out.append("(and ")
            stack += [")", g.right, " ", g.left]
        elif isinstance(g, Or):
            out.append("(or ")
            stack += [")", g.right, " ", g.left]
        elif isinstance(g, Implies):
            out.append("(implies ")
            stack += [")", g.right, " ", g.left]
        elif isinstance(g, Iff):
            out.append("(iff ")
            stack += [")", g.right, " ", g.left]
        elif isinstance(g, Exists):
            out.append(f"(exists {g.var} ")
            stack += [")", g.body]
        elif isinstance(g, Forall):
            out.append(f"(forall {g.var} ")
            stack += [")", g.body]
        elif isinstance(g, Count):
            out.append(f"(count {g.residue} {g.modulus} {g.var} ")
            stack += [")", g.body]
        elif isinstance(g, ExistsRel):
            out.append(f"(existsrel {g.rel} {g.arity} ")
            stack += [")", g.body]
        elif isinstance(g, ForallRel):
            out.append(f"(forallrel {g.rel} {g.arity} ")
            stack += [")", g.body]
        elif isinstance(g, ExistsRelSub):
            out.append(f"(existsrel-sub {g.rel} {g.guard} ")
            stack += [")", g.body]
        elif isinstance(g, ForallRelSub):
            out.append(f"(forallrel-sub {g.rel} {g.guard} ")
            stack += [")", g.body]
        else:
            raise TypeError(f"unexpected node {g!r}")


def print_vocabulary(vocab: Vocabulary) -> str:
    decls = "".join(f"(rel {name} {arity}) " for name, arity in vocab.relations)
    return f"(vocab {decls}(consts {vocab.num_constants}))"


def print_class_spec(spec: ClassSpec) -> str:
    """Canonical text; parse_class_spec(print_class_spec(s)) equals s."""
    return f"{print_vocabulary(spec.vocab)}\n(sentence {print_formula(spec.sentence)})\n"
