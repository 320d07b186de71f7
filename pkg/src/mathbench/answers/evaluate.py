"""Floating-point evaluation and the numeric-probe equivalence oracle."""

from __future__ import annotations

import math
import random

from . import tree as t
from .tree import Expr

PROBE_K = 16
PROBE_TOL = 1e-9
PROBE_LOW, PROBE_HIGH = -10.0, 10.0
_MAX_REJECTS = 200


class EvalError(Exception):
    """Point lies outside the expression's domain (pole, log of <=0, ...)."""


class NonEvaluable(Exception):
    """No valid sample point could be found for the probe."""


def evaluate(e: Expr, env: dict[str, float]) -> float:
    kind = e.kind
    if kind == t.INT:
        return float(e.value)
    if kind == t.RAT:
        return e.value.numerator / e.value.denominator
    if kind == t.SYM:
        try:
            return env[e.value]
        except KeyError:
            raise EvalError(f"unbound symbol {e.value}")
    if kind == t.CONST:
        return math.pi if e.value == "pi" else math.e
    if kind == t.NEG:
        return -evaluate(e.args[0], env)
    if kind == t.SUM:
        return math.fsum(evaluate(a, env) for a in e.args)
    if kind == t.PROD:
        out = 1.0
        for a in e.args:
            out *= evaluate(a, env)
            if math.isinf(out) or math.isnan(out):
                raise EvalError("overflow")
        return out
    if kind == t.POW:
        return _eval_pow(e, env)
    if kind == t.FUNC:
        return _eval_func(e, env)
    raise EvalError(f"cannot evaluate {kind} node numerically")


def _eval_pow(e: Expr, env: dict[str, float]) -> float:
    base = evaluate(e.args[0], env)
    exp = evaluate(e.args[1], env)
    if base == 0 and exp < 0:
        raise EvalError("division by zero")
    if base < 0 and exp != int(exp):
        raise EvalError("fractional power of a negative base")
    try:
        out = base ** exp
    except (OverflowError, ValueError, ZeroDivisionError) as err:
        raise EvalError(str(err))
    if isinstance(out, complex) or math.isinf(out) or math.isnan(out):
        raise EvalError("overflow")
    return out


def _eval_func(e: Expr, env: dict[str, float]) -> float:
    name = e.value
    xs = [evaluate(a, env) for a in e.args]
    try:
        if name == "sqrt":
            if xs[0] < 0:
                raise EvalError("sqrt of a negative")
            return math.sqrt(xs[0])
        if name == "abs":
            return abs(xs[0])
        if name == "exp":
            return math.exp(xs[0])
        if name == "ln":
            if xs[0] <= 0:
                raise EvalError("log of non-positive")
            return math.log(xs[0])
        if name == "log":
            if xs[0] <= 0:
                raise EvalError("log of non-positive")
            return math.log10(xs[0])
        if name == "sin":
            return math.sin(xs[0])
        if name == "cos":
            return math.cos(xs[0])
        if name == "tan":
            return math.tan(xs[0])
        if name == "factorial":
            return _int_only(math.factorial, xs[0], limit=170)
        if name == "binom":
            n = _as_int(xs[0])
            k = _as_int(xs[1])
            if n < 0 or k < 0 or n > 1000:
                raise EvalError("binom out of range")
            return float(math.comb(n, k)) if k <= n else 0.0
    except OverflowError:
        raise EvalError("overflow")
    raise EvalError(f"unknown function {name}")


def _as_int(x: float) -> int:
    r = round(x)
    if abs(x - r) > 1e-9:
        raise EvalError("non-integer argument")
    return r


def _int_only(fn, x: float, limit: int) -> float:
    n = _as_int(x)
    if n < 0 or n > limit:
        raise EvalError("argument out of range")
    return float(fn(n))


def numeric_probe(a: Expr, b: Expr, seed: int = 0,
                  k: int = PROBE_K, tol: float = PROBE_TOL) -> bool:
    """True iff a and b agree numerically at k sampled points.

    Free symbols are sampled uniformly in [-10, 10]; points where either
    expression is singular are rejected and resampled.  Deterministic for
    a given seed.
    """
    syms = sorted(a.free_symbols() | b.free_symbols())
    rng = random.Random(seed)
    points = k if syms else 1
    for _ in range(points):
        for attempt in range(_MAX_REJECTS + 1):
            if attempt == _MAX_REJECTS:
                raise NonEvaluable("no valid sample point found")
            env = {s: rng.uniform(PROBE_LOW, PROBE_HIGH) for s in syms}
            try:
                va = evaluate(a, env)
                vb = evaluate(b, env)
            except EvalError:
                continue
            break
        if abs(va - vb) > tol * max(1.0, abs(va)):
            return False
    return True
