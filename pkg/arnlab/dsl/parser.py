"""Recursive-descent parser for the neuron program language.

The surface syntax is the SML subset printed by the synthesis system:
``fun``/``case``/``of``/``let``/``in``/``end``, ``=>`` arms, tuples in
parentheses, ``~`` for negative literals and ``E~d`` exponents.
Application is by juxtaposition and binds tighter than the infix operators.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from arnlab.dsl.ast import (
    ACTIVATIONS,
    LIST_PARAMS,
    N_MAPPINGS,
    PARAMS,
    SCALAR_PARAMS,
    Activation,
    Apply,
    BinOp,
    Bias,
    Case,
    Cons,
    Expr,
    LetFun,
    LinCombApply,
    ListVar,
    NeuronProgram,
    RealConst,
    Tuple,
    Var,
)
from arnlab.errors import ParseError, UnknownIdentifierError

KEYWORDS = frozenset({"fun", "case", "of", "let", "in", "end"})

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\(\*)
  | (?P<num>~?\d+(?:\.\d+)?(?:[eE]~?\d+)?)
  | (?P<ident>[A-Za-z][A-Za-z0-9_']*)
  | (?P<sym>=>|[(),=+\-*/])
    """,
    re.VERBOSE,
)

_LC_RE = re.compile(r"lc(\d+)$")


@dataclass(frozen=True)
class Token:
    kind: str  # num | ident | kw | sym | eof
    text: str
    line: int
    column: int


def tokenize(source: str) -> list[Token]:
    """Split program text into tokens, skipping whitespace and ``(* *)`` comments."""
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        column = pos - line_start + 1
        if match is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, column)
        kind = match.lastgroup
        text = match.group()
        if kind == "comment":
            end = source.find("*)", pos + 2)
            if end < 0:
                raise ParseError("unterminated comment", line, column)
            text = source[pos : end + 2]
        elif kind == "ident" and text in KEYWORDS:
            tokens.append(Token("kw", text, line, column))
        elif kind != "ws":
            tokens.append(Token(kind, text, line, column))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rfind("\n") + 1
        pos += len(text)
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def parse_real(text: str) -> float:
    """Convert an SML real literal such as ``~0.145E~1`` to a float."""
    return float(text.replace("~", "-"))


class Parser:
    """Parses one neuron program while tracking the names in scope."""

    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0
        # name -> "var" | "fun"
        self.scopes: list[dict[str, str]] = [{name: "var" for name in SCALAR_PARAMS}]

    # token helpers

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.current
        self.pos += 1
        return token

    def check(self, kind: str, text: str | None = None) -> bool:
        token = self.current
        return token.kind == kind and (text is None or token.text == text)

    def expect(self, kind: str, text: str | None = None) -> Token:
        if not self.check(kind, text):
            token = self.current
            wanted = text or kind
            found = token.text or "end of input"
            raise ParseError(f"expected {wanted!r}, found {found!r}", token.line, token.column)
        return self.advance()

    def error(self, message: str, token: Token | None = None) -> ParseError:
        token = token or self.current
        return ParseError(message, token.line, token.column)

    # scope helpers

    def lookup(self, name: str) -> str | None:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    def push(self, names: dict[str, str]) -> None:
        self.scopes.append(names)

    def pop(self) -> None:
        self.scopes.pop()

    # grammar

    def parse_program(self) -> NeuronProgram:
        if self.check("kw", "fun"):
            self.advance()
            name = self.expect("ident").text
            params = self.parse_signature()
            self.expect("sym", "=")
        else:
            name, params = "f", PARAMS
        body = self.parse_expr()
        if not self.check("eof"):
            raise self.error(f"unexpected {self.current.text!r} after program body")
        return NeuronProgram(body=body, params=params, name=name)

    def parse_signature(self) -> tuple[str, ...]:
        start = self.expect("sym", "(")
        params = [self.expect("ident").text]
        while self.check("sym", ","):
            self.advance()
            params.append(self.expect("ident").text)
        self.expect("sym", ")")
        if tuple(params) != PARAMS:
            raise self.error(f"parameters must be ({', '.join(PARAMS)})", start)
        return PARAMS

    def parse_expr(self) -> Expr:
        if self.check("kw", "case"):
            return self.parse_case()
        return self.parse_additive()

    def parse_case(self) -> Case:
        self.expect("kw", "case")
        scrutinee = self.parse_expr()
        self.expect("kw", "of")
        names, is_tuple = self.parse_pattern()
        self.expect("sym", "=>")
        self.push({name: "var" for name in names})
        body = self.parse_expr()
        self.pop()
        return Case(scrutinee, names, body, tuple_pattern=is_tuple)

    def parse_pattern(self) -> tuple[tuple[str, ...], bool]:
        if not self.check("sym", "("):
            return (self.expect("ident").text,), False
        start = self.advance()
        names = [self.expect("ident").text]
        while self.check("sym", ","):
            self.advance()
            names.append(self.expect("ident").text)
        self.expect("sym", ")")
        if len(set(names)) != len(names):
            raise self.error("pattern variables must be distinct", start)
        return tuple(names), len(names) > 1

    def parse_additive(self) -> Expr:
        lhs = self.parse_multiplicative()
        while self.current.kind == "sym" and self.current.text in ("+", "-"):
            op = self.advance().text
            lhs = BinOp(op, lhs, self.parse_multiplicative())
        return lhs

    def parse_multiplicative(self) -> Expr:
        lhs = self.parse_application()
        while self.current.kind == "sym" and self.current.text in ("*", "/"):
            op = self.advance().text
            lhs = BinOp(op, lhs, self.parse_application())
        return lhs

    def starts_atom(self, token: Token) -> bool:
        return (
            token.kind in ("num", "ident")
            or (token.kind == "sym" and token.text == "(")
            or (token.kind == "kw" and token.text == "let")
        )

    def parse_application(self) -> Expr:
        token = self.current
        if token.kind != "ident" or not self.starts_atom(self.peek()):
            return self.parse_atom()
        name = self.advance().text
        arg = self.parse_atom()
        if name == "cons":
            if not isinstance(arg, Tuple) or len(arg.elements) != 2:
                raise self.error("cons expects a (head, tail) pair", token)
            return Cons(*arg.elements)
        if name in ACTIVATIONS:
            return Activation(name, arg)
        lc = _LC_RE.match(name)
        if lc:
            mapping = int(lc.group(1))
            if mapping >= N_MAPPINGS:
                raise self.error(f"weight mapping {name} out of range lc0..lc{N_MAPPINGS - 1}", token)
            return LinCombApply(mapping, arg)
        kind = self.lookup(name)
        if kind == "fun":
            return Apply(name, arg)
        if kind is None and name not in LIST_PARAMS:
            raise UnknownIdentifierError(f"unknown function {name!r}", token.line, token.column)
        raise self.error(f"{name!r} is not a function", token)

    def parse_atom(self) -> Expr:
        token = self.current
        if token.kind == "num":
            self.advance()
            return RealConst(parse_real(token.text))
        if token.kind == "kw" and token.text == "let":
            return self.parse_let()
        if token.kind == "sym" and token.text == "(":
            self.advance()
            elements = [self.parse_expr()]
            while self.check("sym", ","):
                self.advance()
                elements.append(self.parse_expr())
            self.expect("sym", ")")
            return elements[0] if len(elements) == 1 else Tuple(tuple(elements))
        if token.kind == "ident":
            self.advance()
            name = token.text
            if name == "bias":
                return Bias()
            if name in LIST_PARAMS and self.lookup(name) is None:
                return ListVar(name)
            kind = self.lookup(name)
            if kind == "var":
                return Var(name)
            if kind == "fun" or name in ACTIVATIONS or name == "cons" or _LC_RE.match(name):
                raise self.error(f"function {name!r} used without an argument", token)
            raise UnknownIdentifierError(f"unknown identifier {name!r}", token.line, token.column)
        found = token.text or "end of input"
        raise self.error(f"unexpected {found!r}")

    def parse_let(self) -> LetFun:
        self.expect("kw", "let")
        self.expect("kw", "fun")
        fn_name = self.expect("ident").text
        if self.check("sym", "("):
            raise self.error("local functions take exactly one parameter")
        param = self.expect("ident").text
        if self.check("ident"):
            raise self.error("local functions take exactly one parameter")
        self.expect("sym", "=")
        self.push({param: "var"})
        fn_body = self.parse_expr()
        self.pop()
        self.expect("kw", "in")
        self.push({fn_name: "fun"})
        in_body = self.parse_expr()
        self.pop()
        self.expect("kw", "end")
        return LetFun(fn_name, param, fn_body, in_body)


def parse(source: str) -> NeuronProgram:
    """Parse a neuron program.

    Accepts either a full ``fun f (SelfPeep0, ..., InputsLC) = body``
    definition or a bare body expression, which gets the standard signature.

    Raises:
        ParseError: on malformed text, with line and column.
        UnknownIdentifierError: on a reference to a name not in scope.
    """
    return Parser(source).parse_program()
