"""Recursive-descent parser for final answers.

Covers plain arithmetic plus a LaTeX-math subset: \\frac, \\sqrt (with
optional index), \\binom, \\pi, exponents, \\cdot, \\times, \\left/\\right
fences, parenthesised tuples, and \\{...\\} set literals.  The full grammar
is documented in docs/answer-grammar.ebnf.

Unknown LaTeX commands are rejected rather than guessed at: a malformed
answer routes to the reformat follow-up, which is the intended remedy.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Optional

from ..registry import AnswerSpec
from . import tree as t
from .tree import Expr


class ParseError(Exception):
    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class MalformedAnswer(ParseError):
    pass


class ConstraintViolation(ParseError):
    pass


_TOKEN_RE = re.compile(r"""
    (?P<number>\d+(?:\.\d+)?)
  | (?P<command>\\[a-zA-Z]+)
  | (?P<lsetbrace>\\\{) | (?P<rsetbrace>\\\})
  | (?P<name>[a-zA-Z]+)
  | (?P<op>[-+*/^!(),{}\[\]])
  | (?P<space>[\s~]+)
  | (?P<other>.)
""", re.VERBOSE)

# pure layout, dropped at lex time so fences never block the parser
_LAYOUT_COMMANDS = {
    r"\left", r"\right", r"\,", r"\;", r"\!", r"\ ", r"\displaystyle",
    r"\limits",
}
# wrappers whose braced argument is parsed normally
_IGNORED_COMMANDS = {r"\mathrm", r"\text", r"\textbf", r"\mathbf"}

_COMMAND_ALIASES = {
    r"\frac": "frac", r"\dfrac": "frac", r"\tfrac": "frac",
    r"\sqrt": "sqrt", r"\binom": "binom", r"\dbinom": "binom",
    r"\pi": "pi", r"\cdot": "*", r"\times": "*", r"\div": "/",
    r"\log": "log", r"\ln": "ln", r"\exp": "exp",
    r"\sin": "sin", r"\cos": "cos", r"\tan": "tan",
}

_FUNC_NAMES = {"sqrt", "log", "ln", "exp", "sin", "cos", "tan", "abs"}


class _Tokens:
    def __init__(self, text: str):
        self.toks: list[tuple[str, str, int]] = []
        for m in _TOKEN_RE.finditer(text):
            kind = m.lastgroup
            if kind == "space":
                continue
            if kind == "command" and m.group() in _LAYOUT_COMMANDS:
                continue
            self.toks.append((kind, m.group(), m.start()))
        self.i = 0

    def peek(self) -> Optional[tuple[str, str, int]]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise MalformedAnswer("unexpected end of input", self.pos())
        self.i += 1
        return tok

    def pos(self) -> int:
        if self.i < len(self.toks):
            return self.toks[self.i][2]
        return self.toks[-1][2] + 1 if self.toks else 0

    def accept(self, text: str) -> bool:
        tok = self.peek()
        if tok is not None and tok[1] == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            raise MalformedAnswer(f"expected {text!r}", self.pos())


class _Parser:
    MAX_NEST = 40

    def __init__(self, text: str):
        self.ts = _Tokens(text)
        self.nest = 0

    def parse(self) -> Expr:
        e = self.expr_list_or_expr(terminators=())
        if self.ts.peek() is not None:
            raise MalformedAnswer(f"trailing input {self.ts.peek()[1]!r}", self.ts.pos())
        return e

    def _enter(self):
        self.nest += 1
        if self.nest > self.MAX_NEST:
            raise MalformedAnswer("expression nested too deeply", self.ts.pos())

    def _leave(self):
        self.nest -= 1

    def expr_list_or_expr(self, terminators) -> Expr:
        # top level: a bare comma list is a tuple
        items = [self.expr()]
        while self.ts.accept(","):
            items.append(self.expr())
        if len(items) == 1:
            return items[0]
        return t.tuple_(*items)

    def expr(self) -> Expr:
        self._enter()
        try:
            terms = [self.term()]
            while True:
                tok = self.ts.peek()
                if tok is None:
                    break
                if tok[1] == "+" or self._is_cmd(tok, "+"):
                    self.ts.next()
                    terms.append(self.term())
                elif tok[1] == "-":
                    self.ts.next()
                    terms.append(t.neg(self.term()))
                else:
                    break
            return terms[0] if len(terms) == 1 else t.add(*terms)
        finally:
            self._leave()

    def _is_cmd(self, tok, alias) -> bool:
        return tok[0] == "command" and _COMMAND_ALIASES.get(tok[1]) == alias

    def term(self) -> Expr:
        factors = [self.unary()]
        while True:
            tok = self.ts.peek()
            if tok is None:
                break
            txt = tok[1]
            if txt == "*" or self._is_cmd(tok, "*"):
                self.ts.next()
                factors.append(self.unary())
            elif txt == "/" or self._is_cmd(tok, "/"):
                self.ts.next()
                rhs = self.unary()
                factors.append(t.pow_(rhs, t.integer(-1)))
            elif self._starts_factor(tok):
                factors.append(self.unary())   # implicit multiplication
            else:
                break
        return factors[0] if len(factors) == 1 else t.mul(*factors)

    def _starts_factor(self, tok) -> bool:
        kind, txt, _ = tok
        if kind in ("number", "name", "lsetbrace"):
            return True
        if txt in ("(", "{"):
            return True
        if kind == "command":
            alias = _COMMAND_ALIASES.get(txt)
            if alias in (None, "*", "/"):
                return txt in _IGNORED_COMMANDS
            return True
        return False

    def unary(self) -> Expr:
        if self.ts.accept("-"):
            return t.neg(self.unary())
        if self.ts.accept("+"):
            return self.unary()
        return self.postfix()

    def postfix(self) -> Expr:
        e = self.atom()
        while True:
            tok = self.ts.peek()
            if tok is None:
                break
            if tok[1] == "^":
                self.ts.next()
                e = t.pow_(e, self.exponent())
            elif tok[1] == "!":
                self.ts.next()
                e = t.func("factorial", e)
            else:
                break
        return e

    def exponent(self) -> Expr:
        # ^{...} or a single token exponent, per TeX convention
        if self.ts.accept("{"):
            e = self.expr()
            self.ts.expect("}")
            return e
        if self.ts.accept("-"):
            return t.neg(self.exponent())
        tok = self.ts.next()
        kind, txt, pos = tok
        if kind == "number":
            return self._number(txt, single_char=False)
        if kind == "name":
            return self._name_atom(txt, pos, single=True)
        if txt == "(":
            e = self.expr()
            self.ts.expect(")")
            return e
        if kind == "command":
            self.ts.i -= 1
            return self.atom()
        raise MalformedAnswer(f"bad exponent {txt!r}", pos)

    def atom(self) -> Expr:
        self._enter()
        try:
            return self._atom_inner()
        finally:
            self._leave()

    def _atom_inner(self) -> Expr:
        tok = self.ts.peek()
        if tok is None:
            raise MalformedAnswer("expected expression", self.ts.pos())
        kind, txt, pos = tok

        if kind == "number":
            self.ts.next()
            return self._number(txt)

        if txt == "(":
            self.ts.next()
            items = [self.expr()]
            while self.ts.accept(","):
                items.append(self.expr())
            self.ts.expect(")")
            return items[0] if len(items) == 1 else t.tuple_(*items)

        if txt == "{":
            self.ts.next()
            e = self.expr()
            self.ts.expect("}")
            return e

        if kind == "lsetbrace":
            self.ts.next()
            items = []
            if not self.ts.accept("\\}"):
                items.append(self.expr())
                while self.ts.accept(","):
                    items.append(self.expr())
                tok2 = self.ts.next()
                if tok2[0] != "rsetbrace":
                    raise MalformedAnswer("unterminated set literal", tok2[2])
            return t.set_(*items)

        if kind == "name":
            self.ts.next()
            return self._name_atom(txt, pos)

        if kind == "command":
            return self._command_atom()

        raise MalformedAnswer(f"unexpected {txt!r}", pos)

    def _number(self, txt: str, single_char: bool = False) -> Expr:
        if "." in txt:
            # decimals become exact rationals to avoid float-equality pitfalls
            intpart, fracpart = txt.split(".")
            den = 10 ** len(fracpart)
            return t.rational(int(intpart or 0) * den + int(fracpart), den)
        return t.integer(int(txt))

    def _name_atom(self, txt: str, pos: int, single: bool = False) -> Expr:
        if txt in t.KNOWN_CONSTS:
            return t.const(txt)
        if txt in _FUNC_NAMES and self.ts.peek() is not None and self.ts.peek()[1] == "(":
            self.ts.next()
            args = [self.expr()]
            while self.ts.accept(","):
                args.append(self.expr())
            self.ts.expect(")")
            return t.func(txt, *args)
        if len(txt) == 1:
            if txt == "e":
                return t.const("e")
            return t.symbol(txt)
        # multi-letter runs in answers are adjacent single-letter symbols
        parts = [t.const("e") if c == "e" else t.symbol(c) for c in txt]
        return t.mul(*parts)

    def _braced(self) -> Expr:
        self.ts.expect("{")
        e = self.expr()
        self.ts.expect("}")
        return e

    def _command_atom(self) -> Expr:
        kind, txt, pos = self.ts.next()
        if txt in _IGNORED_COMMANDS:
            return self._braced()
        alias = _COMMAND_ALIASES.get(txt)
        if alias is None:
            raise MalformedAnswer(f"unsupported LaTeX command {txt!r}", pos)
        if alias == "pi":
            return t.const("pi")
        if alias == "frac":
            num = self._braced()
            den = self._braced()
            return t.mul(num, t.pow_(den, t.integer(-1)))
        if alias == "binom":
            n = self._braced()
            k = self._braced()
            return t.func("binom", n, k)
        if alias == "sqrt":
            if self.ts.accept("["):
                idx = self.expr()
                self.ts.expect("]")
                body = self._braced()
                return t.pow_(body, t.mul(t.integer(1), t.pow_(idx, t.integer(-1))))
            body = self._braced()
            return t.func("sqrt", body)
        if alias in _FUNC_NAMES:
            # \log{x}, \log(x) or \log x
            if self.ts.peek() is not None and self.ts.peek()[1] == "(":
                self.ts.next()
                arg = self.expr()
                self.ts.expect(")")
            elif self.ts.peek() is not None and self.ts.peek()[1] == "{":
                arg = self._braced()
            else:
                arg = self.atom()
            return t.func(alias, arg)
        if alias in ("*", "/"):
            raise MalformedAnswer(f"operator {txt!r} needs a left operand", pos)
        raise MalformedAnswer(f"unsupported LaTeX command {txt!r}", pos)


def parse(candidate: str, spec: Optional[AnswerSpec] = None) -> Expr:
    """Parse a candidate answer; enforce spec constraints where checkable.

    Raises MalformedAnswer on syntax problems and ConstraintViolation when
    the parsed value breaches the answer spec (integer range, choice set).
    """
    if candidate is None or not candidate.strip():
        raise MalformedAnswer("empty candidate", 0)
    text = candidate.strip().rstrip(".")

    if spec is not None and spec.kind == "multiple-choice":
        label = text.strip().strip("$").strip().upper()
        labels = {c.strip().upper() for c in spec.choices}
        if label not in labels:
            raise ConstraintViolation(f"label {label!r} not among choices", 0)
        return t.symbol(label)

    text = text.strip("$").strip()
    if not text:
        raise MalformedAnswer("empty candidate", 0)
    try:
        expr = _Parser(text).parse()
    except ParseError:
        raise
    except (ValueError, RecursionError) as e:
        raise MalformedAnswer(str(e), 0) from e

    _check_zero_denominators(expr)

    if spec is not None and spec.kind == "integer-range":
        from .canonical import canonical
        c = canonical(expr)
        if c.kind != t.INT:
            raise ConstraintViolation("answer is not an integer", 0)
        lo, hi = spec.range
        if not lo <= c.value <= hi:
            raise ConstraintViolation(f"{c.value} outside [{lo}, {hi}]", 0)
        return c
    return expr


def _check_zero_denominators(e: Expr) -> None:
    if e.kind == t.POW:
        base, exp = e.args
        if exp.is_number() and exp.as_fraction() < 0 and base.is_number() \
                and base.as_fraction() == 0:
            raise MalformedAnswer("division by zero", 0)
    for a in e.args:
        _check_zero_denominators(a)
