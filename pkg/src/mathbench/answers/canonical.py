"""Canonical form for expression trees.

The canonicalizer is a normal form enabling structural equality, not a
general simplifier: rationals are reduced, sums/products are flattened and
sorted under a total node ordering, multiplicative/additive identities are
removed, and square roots of integers are written as a*sqrt(b) with b
square-free.  It is idempotent and value-preserving.
"""

from __future__ import annotations

import math
from fractions import Fraction

from . import tree as t
from .tree import Expr

_HALF = Fraction(1, 2)
_FOLD_EXP_LIMIT = 128
_FOLD_BITS_LIMIT = 512
_SQRT_LIMIT = 10 ** 12


def canonical(e: Expr) -> Expr:
    kind = e.kind
    if kind == t.INT:
        return e
    if kind == t.RAT:
        return t.number(e.value)
    if kind in (t.SYM, t.CONST):
        return e
    if kind == t.NEG:
        return canonical(t.mul(t.integer(-1), e.args[0]))
    if kind == t.SUM:
        return _canon_sum(e)
    if kind == t.PROD:
        return _canon_prod(e)
    if kind == t.POW:
        return _canon_pow(canonical(e.args[0]), canonical(e.args[1]))
    if kind == t.FUNC:
        return _canon_func(e)
    if kind == t.TUPLE:
        return t.tuple_(*(canonical(a) for a in e.args))
    if kind == t.SET:
        elems = sorted({canonical(a) for a in e.args}, key=lambda x: x.sort_key())
        return t.set_(*elems)
    raise ValueError(f"unknown node kind {kind}")


def _canon_sum(e: Expr) -> Expr:
    terms: list[Expr] = []
    acc = Fraction(0)
    stack = [canonical(a) for a in e.args]
    for a in stack:
        if a.kind == t.SUM:
            inner = list(a.args)
        else:
            inner = [a]
        for x in inner:
            if x.is_number():
                acc += x.as_fraction()
            else:
                terms.append(x)
    if acc != 0 or not terms:
        terms.append(t.number(acc))
    terms.sort(key=lambda x: x.sort_key())
    if len(terms) == 1:
        return terms[0]
    return Expr(t.SUM, None, tuple(terms))


def _canon_prod(e: Expr) -> Expr:
    factors: list[Expr] = []
    acc = Fraction(1)
    for a in (canonical(x) for x in e.args):
        inner = list(a.args) if a.kind == t.PROD else [a]
        for x in inner:
            if x.is_number():
                acc *= x.as_fraction()
            else:
                factors.append(x)
    if acc == 0:
        return t.integer(0)
    if acc != 1 or not factors:
        factors.append(t.number(acc))
    factors.sort(key=lambda x: x.sort_key())
    if len(factors) == 1:
        return factors[0]
    return Expr(t.PROD, None, tuple(factors))


def _canon_pow(base: Expr, exp: Expr) -> Expr:
    if exp.is_number():
        ef = exp.as_fraction()
        if ef == 1:
            return base
        if ef == 0:
            return t.integer(1)
        if base.is_number():
            folded = _fold_numeric_pow(base.as_fraction(), ef)
            if folded is not None:
                return folded
        # (b^p)^q -> b^(pq) when q is an integer (always sound)
        if base.kind == t.POW and base.args[1].is_number() and ef.denominator == 1:
            return _canon_pow(base.args[0], t.number(base.args[1].as_fraction() * ef))
        # distribute integer exponents over products
        if base.kind == t.PROD and ef.denominator == 1:
            return _canon_prod(t.mul(*(t.pow_(f, exp) for f in base.args)))
    return Expr(t.POW, None, (base, exp))


def _fold_numeric_pow(b: Fraction, ef: Fraction):
    """Fold number**number where it stays exact and small; None otherwise."""
    if ef.denominator == 1:
        n = ef.numerator
        if b == 0:
            return None if n < 0 else t.integer(0)
        if abs(n) <= _FOLD_EXP_LIMIT and _bits(b) * abs(n) <= _FOLD_BITS_LIMIT:
            return t.number(b ** n)
        return None
    if ef.denominator == 2:
        return _fold_half_pow(b, ef)
    # other fractional exponents: fold only perfect powers of integers
    if b.denominator == 1 and 0 < b.numerator <= _SQRT_LIMIT and ef > 0:
        root = round(b.numerator ** (1.0 / ef.denominator))
        for r in (root - 1, root, root + 1):
            if r > 1 and r ** ef.denominator == b.numerator:
                return _fold_numeric_pow(Fraction(r), Fraction(ef.numerator))
    return None


def _fold_half_pow(b: Fraction, ef: Fraction):
    """Rewrite b**(k/2) as rational * sqrt(square-free integer)."""
    if b < 0:
        return None
    k = ef.numerator  # odd by construction (denominator 2 after reduction)
    # b^(k/2) = b^m * sqrt(b) with m = (k-1)//2
    m = (k - 1) // 2
    # sqrt(p/q) = sqrt(p*q) / q
    p, q = b.numerator, b.denominator
    if p * q > _SQRT_LIMIT:
        return None
    outer, inner = _split_square(p * q)
    coeff = (b ** m) * Fraction(outer, q)
    if inner == 1:
        return t.number(coeff)
    root = Expr(t.POW, None, (t.integer(inner), t.number(_HALF)))
    if coeff == 1:
        return root
    return _canon_prod(t.mul(t.number(coeff), root))


def _split_square(n: int) -> tuple[int, int]:
    """n = outer**2 * inner with inner square-free (trial division)."""
    outer, inner = 1, 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            cnt = 0
            while n % d == 0:
                n //= d
                cnt += 1
            outer *= d ** (cnt // 2)
            if cnt % 2:
                inner *= d
        d += 1 if d == 2 else 2
    inner *= n
    return outer, inner


def _bits(f: Fraction) -> int:
    return max(f.numerator.bit_length(), f.denominator.bit_length())


def _canon_func(e: Expr) -> Expr:
    args = tuple(canonical(a) for a in e.args)
    name = e.value
    if name == "sqrt" and len(args) == 1:
        return _canon_pow(args[0], t.number(_HALF))
    if name == "abs" and len(args) == 1 and args[0].is_number():
        return t.number(abs(args[0].as_fraction()))
    if name == "factorial" and len(args) == 1:
        a = args[0]
        if a.kind == t.INT and 0 <= a.value <= 170:
            return t.integer(math.factorial(a.value))
    if name == "binom" and len(args) == 2:
        n, k = args
        if n.kind == t.INT and k.kind == t.INT and 0 <= k.value and 0 <= n.value <= 1000:
            if k.value > n.value:
                return t.integer(0)
            return t.integer(math.comb(n.value, k.value))
    return Expr(t.FUNC, name, args)
