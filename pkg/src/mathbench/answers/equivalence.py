"""Answer extraction and mathematical-equivalence decisions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..registry import AnswerSpec
from . import tree as t
from .canonical import canonical
from .evaluate import NonEvaluable, numeric_probe
from .parser import MalformedAnswer, ParseError, parse
from .tree import Expr

DEFAULT_PROBE_SEED = 0


@dataclass(frozen=True)
class ExtractionResult:
    candidate: str
    span: tuple[int, int]
    method: str = "boxed"  # or "reformatted-followup"


@dataclass(frozen=True)
class Verdict:
    outcome: str            # equivalent | different | malformed
    evidence: str           # structural | numeric-probe | constraint
    probe_seed: Optional[int] = None
    detail: str = ""

    def __post_init__(self):
        if self.evidence == "numeric-probe":
            assert self.probe_seed is not None


def extract_final_answer(text: str) -> Optional[ExtractionResult]:
    """Return the LAST balanced \\boxed{...} group, or None.

    Models often revise answers mid-solution; the final boxed statement is
    authoritative.
    """
    marker = r"\boxed"
    best = None
    start = 0
    while True:
        i = text.find(marker, start)
        if i < 0:
            break
        j = i + len(marker)
        while j < len(text) and text[j] in " \t":
            j += 1
        if j < len(text) and text[j] == "{":
            end = _match_brace(text, j)
            if end is not None:
                best = ExtractionResult(text[j + 1:end], (j + 1, end))
        start = i + len(marker)
    return best


def _match_brace(text: str, open_idx: int) -> Optional[int]:
    depth = 0
    i = open_idx
    while i < len(text):
        c = text[i]
        if c == "\\" and i + 1 < len(text) and text[i + 1] in "{}":
            i += 2
            continue
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                return i
        i += 1
    return None


def equivalent(a: Expr, b: Expr, spec: Optional[AnswerSpec] = None,
               seed: int = DEFAULT_PROBE_SEED) -> Verdict:
    """Decide whether two parsed answers denote the same value."""
    if spec is not None and spec.kind == "multiple-choice":
        same = a.kind == t.SYM and b.kind == t.SYM and \
            str(a.value).upper() == str(b.value).upper()
        return Verdict("equivalent" if same else "different", "structural")

    ca, cb = canonical(a), canonical(b)
    if ca == cb:
        return Verdict("equivalent", "structural")

    if ca.kind in (t.TUPLE, t.SET) or cb.kind in (t.TUPLE, t.SET):
        return _compound_verdict(ca, cb, seed)

    return _probe_verdict(ca, cb, seed)


def _probe_verdict(ca: Expr, cb: Expr, seed: int) -> Verdict:
    try:
        same = numeric_probe(ca, cb, seed=seed)
    except NonEvaluable as e:
        return Verdict("different", "constraint", detail=str(e))
    return Verdict("equivalent" if same else "different", "numeric-probe",
                   probe_seed=seed)


def _compound_verdict(ca: Expr, cb: Expr, seed: int) -> Verdict:
    if ca.kind != cb.kind:
        return Verdict("different", "constraint", detail="shape mismatch")
    if len(ca.args) != len(cb.args):
        return Verdict("different", "constraint", detail="length mismatch")
    if ca.kind == t.TUPLE:
        pairs = list(zip(ca.args, cb.args))
    else:
        # sets: canonical sorting aligns structurally-equal elements; fall
        # back to greedy probe matching for value-equal-but-distinct forms
        pairs = _match_set_elements(ca.args, cb.args, seed)
        if pairs is None:
            return Verdict("different", "numeric-probe", probe_seed=seed)
    for x, y in pairs:
        v = equivalent(x, y, seed=seed)
        if v.outcome != "equivalent":
            return Verdict("different", v.evidence, probe_seed=v.probe_seed,
                           detail="element mismatch")
    return Verdict("equivalent", "numeric-probe", probe_seed=seed)


def _match_set_elements(xs, ys, seed):
    remaining = list(ys)
    pairs = []
    for x in xs:
        hit = None
        for y in remaining:
            if equivalent(x, y, seed=seed).outcome == "equivalent":
                hit = y
                break
        if hit is None:
            return None
        remaining.remove(hit)
        pairs.append((x, x))  # already verified equivalent
    return pairs


def check_answer(candidate: str, gold: str, spec: Optional[AnswerSpec] = None,
                 seed: int = DEFAULT_PROBE_SEED) -> Verdict:
    """Parse both sides and decide; parse failures yield a malformed verdict."""
    try:
        g = parse(gold, spec)
    except ParseError as e:
        return Verdict("malformed", "constraint", detail=f"gold: {e}")
    try:
        c = parse(candidate, spec)
    except MalformedAnswer as e:
        return Verdict("malformed", "constraint", detail=str(e))
    except ParseError as e:
        return Verdict("different", "constraint", detail=str(e))
    return equivalent(c, g, spec, seed=seed)
