"""Expression tree for parsed final answers.

Nodes are immutable and hashable so canonical forms can be compared
structurally and sorted under a total ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

MAX_DEPTH = 64

# node kinds
INT = "int"
RAT = "rat"
SYM = "sym"
CONST = "const"          # named constants: pi, e
SUM = "sum"
PROD = "prod"
POW = "pow"
NEG = "neg"
FUNC = "func"            # sqrt, abs, log, ln, exp, sin, cos, tan, factorial, binom
TUPLE = "tuple"
SET = "set"

KNOWN_FUNCS = {
    "sqrt", "abs", "log", "ln", "exp", "sin", "cos", "tan",
    "factorial", "binom",
}
KNOWN_CONSTS = {"pi", "e"}

_KIND_RANK = {k: i for i, k in enumerate(
    [INT, RAT, CONST, SYM, FUNC, POW, PROD, SUM, NEG, TUPLE, SET])}


@dataclass(frozen=True)
class Expr:
    kind: str
    value: Union[int, Fraction, str, None] = None
    args: tuple["Expr", ...] = ()

    def __post_init__(self):
        if self.depth() > MAX_DEPTH:
            raise ValueError("expression too deep")

    def depth(self) -> int:
        if not self.args:
            return 1
        return 1 + max(a.depth() for a in self.args)

    def free_symbols(self) -> set[str]:
        out = set()
        if self.kind == SYM:
            out.add(self.value)
        for a in self.args:
            out |= a.free_symbols()
        return out

    def is_number(self) -> bool:
        return self.kind in (INT, RAT)

    def as_fraction(self) -> Fraction:
        if self.kind == INT:
            return Fraction(self.value)
        if self.kind == RAT:
            return self.value
        raise ValueError(f"not a number: {self}")

    def sort_key(self):
        if self.kind == INT:
            vk = (0, Fraction(self.value))
        elif self.kind == RAT:
            vk = (0, self.value)
        else:
            vk = (1, str(self.value))
        return (_KIND_RANK.get(self.kind, 99), vk,
                len(self.args), tuple(a.sort_key() for a in self.args))

    def __str__(self) -> str:
        return render(self)


def integer(v: int) -> Expr:
    return Expr(INT, int(v))


def rational(num, den=1) -> Expr:
    f = Fraction(num, den)
    if f.denominator == 1:
        return integer(f.numerator)
    return Expr(RAT, f)


def number(f: Fraction) -> Expr:
    return rational(f.numerator, f.denominator)


def symbol(name: str) -> Expr:
    return Expr(SYM, name)


def const(name: str) -> Expr:
    if name not in KNOWN_CONSTS:
        raise ValueError(f"unknown constant {name}")
    return Expr(CONST, name)


def add(*args: Expr) -> Expr:
    return Expr(SUM, None, tuple(args))


def mul(*args: Expr) -> Expr:
    return Expr(PROD, None, tuple(args))


def pow_(base: Expr, exp: Expr) -> Expr:
    return Expr(POW, None, (base, exp))


def neg(x: Expr) -> Expr:
    return Expr(NEG, None, (x,))


def func(name: str, *args: Expr) -> Expr:
    if name not in KNOWN_FUNCS:
        raise ValueError(f"unknown function {name}")
    return Expr(FUNC, name, tuple(args))


def tuple_(*args: Expr) -> Expr:
    return Expr(TUPLE, None, tuple(args))


def set_(*args: Expr) -> Expr:
    return Expr(SET, None, tuple(args))


def render(e: Expr) -> str:
    """Plain-text rendering, mostly for error messages and logs."""
    if e.kind == INT:
        return str(e.value)
    if e.kind == RAT:
        return f"{e.value.numerator}/{e.value.denominator}"
    if e.kind in (SYM, CONST):
        return str(e.value)
    if e.kind == SUM:
        return "(" + " + ".join(render(a) for a in e.args) + ")"
    if e.kind == PROD:
        return "(" + "*".join(render(a) for a in e.args) + ")"
    if e.kind == POW:
        return f"({render(e.args[0])})^({render(e.args[1])})"
    if e.kind == NEG:
        return f"-({render(e.args[0])})"
    if e.kind == FUNC:
        return f"{e.value}(" + ", ".join(render(a) for a in e.args) + ")"
    if e.kind == TUPLE:
        return "(" + ", ".join(render(a) for a in e.args) + ")"
    if e.kind == SET:
        return "{" + ", ".join(render(a) for a in e.args) + "}"
    return f"<{e.kind}>"
