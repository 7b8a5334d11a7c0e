"""Boolean node filters for ``filter_layer``.

Grammar (keywords are lowercase and case-sensitive)::

    expr       := or
    or         := and ("or" and)*
    and        := unary ("and" unary)*
    unary      := "not" unary | "(" expr ")" | comparison | "true" | "false"
    comparison := term op term              op: == != < <= > >=
    term       := "degree" | "actor" | identifier | number | string

Identifiers name node attributes.  Evaluation is total: a missing attribute
makes its comparison false, and comparing a number with a string is false
except for ``!=``, which is true.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Union

from mlnstore.errors import PredicateSyntaxError, UnknownKeyword

KEYWORDS = frozenset({"and", "or", "not", "true", "false", "degree", "actor"})
OPERATORS = ("==", "!=", "<=", ">=", "<", ">")


# ---------------------------------------------------------------------- AST

@dataclass(frozen=True)
class Degree:
    pass


@dataclass(frozen=True)
class ActorName:
    pass


@dataclass(frozen=True)
class Attr:
    name: str


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Str:
    value: str


Term = Union[Degree, ActorName, Attr, Num, Str]


@dataclass(frozen=True)
class Compare:
    lhs: Term
    op: str
    rhs: Term


@dataclass(frozen=True)
class LiteralBool:
    value: bool


@dataclass(frozen=True)
class Not:
    operand: "Predicate"


@dataclass(frozen=True)
class And:
    left: "Predicate"
    right: "Predicate"


@dataclass(frozen=True)
class Or:
    left: "Predicate"
    right: "Predicate"


Predicate = Union[Compare, LiteralBool, Not, And, Or]


@dataclass
class NodeContext:
    actor: str
    degree: int
    attributes: Mapping[str, Union[float, str]] = field(default_factory=dict)


# ------------------------------------------------------------------- lexer

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>-?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>==|!=|<=|>=|<|>)
  | (?P<lp>\()
  | (?P<rp>\))
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass
class _Tok:
    kind: str  # num str name op lp rp eof
    text: str
    offset: int  # 1-based


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos] == '"':
                raise PredicateSyntaxError("unterminated string literal", pos + 1, text)
            raise PredicateSyntaxError(f"unexpected character {text[pos]!r}", pos + 1, text)
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text) + 1))
    return toks


def _unquote(lit: str) -> str:
    return re.sub(r"\\(.)", lambda m: {"n": "\n", "t": "\t"}.get(m.group(1), m.group(1)),
                  lit[1:-1], flags=re.DOTALL)


# ------------------------------------------------------------------ parser

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _fail(self, message: str, tok: _Tok | None = None):
        tok = tok or self.tok
        what = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise PredicateSyntaxError(f"{message}, found {what}", tok.offset, self.text)

    def _is_kw(self, word: str) -> bool:
        return self.tok.kind == "name" and self.tok.text == word

    def parse(self) -> Predicate:
        expr = self.parse_or()
        if self.tok.kind != "eof":
            tok = self.tok
            if tok.kind == "name" and tok.text not in KEYWORDS:
                raise UnknownKeyword(
                    f"unknown keyword {tok.text!r}, expected 'and', 'or' or end of input",
                    tok.offset,
                    self.text,
                )
            self._fail("expected 'and', 'or' or end of input")
        return expr

    def parse_or(self) -> Predicate:
        left = self.parse_and()
        while self._is_kw("or"):
            self.i += 1
            left = Or(left, self.parse_and())
        return left

    def parse_and(self) -> Predicate:
        left = self.parse_unary()
        while self._is_kw("and"):
            self.i += 1
            left = And(left, self.parse_unary())
        return left

    def parse_unary(self) -> Predicate:
        tok = self.tok
        if tok.kind == "name" and tok.text == "not":
            self.i += 1
            return Not(self.parse_unary())
        if tok.kind == "lp":
            self.i += 1
            inner = self.parse_or()
            if self.tok.kind != "rp":
                if self.tok.kind == "name" and self.tok.text not in KEYWORDS:
                    raise UnknownKeyword(
                        f"unknown keyword {self.tok.text!r}, expected ')'", self.tok.offset, self.text
                    )
                self._fail("expected ')'")
            self.i += 1
            return inner
        if tok.kind == "name" and tok.text in ("true", "false"):
            self.i += 1
            return LiteralBool(tok.text == "true")
        return self.parse_comparison()

    def parse_term(self) -> Term:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "str":
            self.i += 1
            return Str(_unquote(tok.text))
        if tok.kind == "name":
            if tok.text == "degree":
                self.i += 1
                return Degree()
            if tok.text == "actor":
                self.i += 1
                return ActorName()
            if tok.text in KEYWORDS:
                self._fail("expected a term")
            self.i += 1
            return Attr(tok.text)
        self._fail("expected a term")

    def parse_comparison(self) -> Compare:
        lhs = self.parse_term()
        if self.tok.kind != "op":
            self._fail("expected a comparison operator")
        op = self.tok.text
        self.i += 1
        rhs = self.parse_term()
        if self.tok.kind == "op":
            self._fail("comparisons do not chain")
        return Compare(lhs, op, rhs)


def parse(text: str) -> Predicate:
    """Parse predicate text; raises :class:`PredicateSyntaxError` with a 1-based offset."""
    return _Parser(text).parse()


# ----------------------------------------------------------------- printer

_PREC = {Or: 1, And: 2}


def _fmt_num(x: float) -> str:
    if math.isinf(x):
        return "1e999" if x > 0 else "-1e999"
    return repr(float(x))


def _fmt_term(t: Term) -> str:
    if isinstance(t, Degree):
        return "degree"
    if isinstance(t, ActorName):
        return "actor"
    if isinstance(t, Attr):
        return t.name
    if isinstance(t, Num):
        return _fmt_num(t.value)
    escaped = t.value.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def to_text(p: Predicate) -> str:
    """Deterministic printer; ``parse(to_text(p)) == p`` for parsed predicates."""
    if isinstance(p, LiteralBool):
        return "true" if p.value else "false"
    if isinstance(p, Compare):
        return f"{_fmt_term(p.lhs)} {p.op} {_fmt_term(p.rhs)}"
    if isinstance(p, Not):
        inner = to_text(p.operand)
        if isinstance(p.operand, (And, Or)):
            inner = f"({inner})"
        return f"not {inner}"
    prec = _PREC[type(p)]
    word = "and" if isinstance(p, And) else "or"
    left, right = to_text(p.left), to_text(p.right)
    if _PREC.get(type(p.left), 3) < prec:
        left = f"({left})"
    # binary connectives parse left-associatively
    if _PREC.get(type(p.right), 3) <= prec:
        right = f"({right})"
    return f"{left} {word} {right}"


# --------------------------------------------------------------- evaluator

_MISSING = object()


def _resolve(t: Term, ctx: NodeContext):
    if isinstance(t, Degree):
        return float(ctx.degree)
    if isinstance(t, ActorName):
        return ctx.actor
    if isinstance(t, Attr):
        return ctx.attributes.get(t.name, _MISSING)
    return t.value


def _compare(a, op: str, b) -> bool:
    if a is _MISSING or b is _MISSING:
        return False
    a_num = isinstance(a, (int, float))
    if a_num != isinstance(b, (int, float)):
        return op == "!="
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    return a >= b


def evaluate(p: Predicate, ctx: NodeContext) -> bool:
    if isinstance(p, Compare):
        return _compare(_resolve(p.lhs, ctx), p.op, _resolve(p.rhs, ctx))
    if isinstance(p, And):
        return evaluate(p.left, ctx) and evaluate(p.right, ctx)
    if isinstance(p, Or):
        return evaluate(p.left, ctx) or evaluate(p.right, ctx)
    if isinstance(p, Not):
        return not evaluate(p.operand, ctx)
    return p.value
