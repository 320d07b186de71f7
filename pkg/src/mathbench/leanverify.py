"""Formal-benchmark support: statement splicing, compile check, axiom audit,
and semantic guard over a pluggable proof-checker adapter.

The adapter contract is file-in / structured-result-out so a real
toolchain-backed adapter and the test mock implement the same interface.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Protocol

from .runner import Message, ModelClient, TransportError

DEFAULT_AXIOM_ALLOWLIST = frozenset({
    "propext", "Classical.choice", "Quot.sound",
})
DEFAULT_SIZE_CAP = 1_000_000  # bytes


class VerificationError(Exception):
    pass


@dataclass(frozen=True)
class FormalProblem:
    problem_id: str
    natural_statement: str
    formal_statement: str      # full signature up to (and including) ":="
    theorem_name: str
    environment_pin: str


@dataclass(frozen=True)
class Submission:
    problem_id: str
    file: str
    model_id: str = ""
    run_index: int = 0

    def __post_init__(self):
        if not self.file.strip():
            raise VerificationError("empty submission")
        if len(self.file.encode()) > DEFAULT_SIZE_CAP:
            raise VerificationError("submission exceeds size cap")


@dataclass(frozen=True)
class VerificationVerdict:
    outcome: str   # accepted | compile-error | axiom-violation |
                   # semantic-violation | statement-mismatch
    checker_log: str = ""


class CheckerAdapter(Protocol):
    def compile(self, file: str) -> tuple[bool, str]: ...
    def axiom_report(self, file: str, theorem_name: str) -> list[str]: ...
    def semantic_report(self, file: str, reference_statement: str
                        ) -> tuple[bool, str]: ...


@dataclass
class MockCheckerAdapter:
    """Scripted adapter for tests; content-insensitive unless configured."""
    compile_ok: bool = True
    axioms: list = field(default_factory=list)
    semantic_ok: bool = True
    log: str = "mock"

    def compile(self, file):
        return self.compile_ok, self.log

    def axiom_report(self, file, theorem_name):
        return list(self.axioms)

    def semantic_report(self, file, reference_statement):
        return self.semantic_ok, self.log


_THEOREM_RE_TMPL = r"(?m)^(\s*)(theorem|lemma)\s+{name}\b"


def splice_statement(submission: Submission, problem: FormalProblem) -> str:
    """Replace the target theorem's statement (signature through the proof
    delimiter ':=' or 'by') byte-for-byte with the canonical formalization.

    Auxiliary lemmas and other content are preserved untouched.  The theorem
    must appear exactly once under the expected name.
    """
    pattern = re.compile(_THEOREM_RE_TMPL.format(name=re.escape(problem.theorem_name)))
    matches = list(pattern.finditer(submission.file))
    if len(matches) != 1:
        raise StatementMismatch(
            f"expected exactly one theorem named {problem.theorem_name!r}, "
            f"found {len(matches)}")
    m = matches[0]
    start = m.start(2)  # keep leading indentation
    end = _find_proof_delimiter(submission.file, m.end())
    if end is None:
        raise StatementMismatch("no proof delimiter after theorem statement")
    return submission.file[:start] + problem.formal_statement + submission.file[end:]


class StatementMismatch(VerificationError):
    pass


def _find_proof_delimiter(text: str, from_idx: int) -> Optional[int]:
    """Index just past ':=' at paren/bracket depth zero."""
    depth = 0
    i = from_idx
    while i < len(text) - 1:
        c = text[i]
        if c in "([{":
            depth += 1
        elif c in ")]}":
            depth -= 1
        elif depth == 0 and text[i:i + 2] == ":=":
            return i + 2
        i += 1
    return None


def verify(submission: Submission, problem: FormalProblem,
           adapter: CheckerAdapter,
           axiom_allowlist: frozenset[str] = DEFAULT_AXIOM_ALLOWLIST
           ) -> VerificationVerdict:
    """splice -> compile -> axiom audit -> semantic guard; the first failing
    check determines the outcome, and full logs are retained."""
    try:
        spliced = splice_statement(submission, problem)
    except StatementMismatch as e:
        return VerificationVerdict("statement-mismatch", str(e))

    ok, log = adapter.compile(spliced)
    if not ok:
        return VerificationVerdict("compile-error", log)

    axioms = adapter.axiom_report(spliced, problem.theorem_name)
    illegal = [a for a in axioms if a not in axiom_allowlist]
    if illegal:
        return VerificationVerdict(
            "axiom-violation", f"axioms outside the trust base: {illegal}")

    ok, findings = adapter.semantic_report(spliced, problem.formal_statement)
    if not ok:
        return VerificationVerdict("semantic-violation", findings)
    return VerificationVerdict("accepted", log)


def formalize(problem_id: str, natural_statement: str,
              formalizer_client: ModelClient, adapter: CheckerAdapter,
              environment_pin: str = "pinned",
              attempt_budget: int = 3) -> Optional[FormalProblem]:
    """Ask the formalizer for a compiling theorem statement; dropped (None)
    when the client declines or nothing compiles within the budget."""
    prompt = (f"Formalize as a single theorem statement (reply DROP if a "
              f"faithful formalization is difficult or needs new definitions):\n"
              f"{natural_statement}")
    for _ in range(attempt_budget):
        try:
            reply = formalizer_client.send([Message("user", prompt)], frozenset())
        except TransportError:
            continue
        text = reply.content.strip()
        if text.upper().startswith("DROP"):
            return None
        name = _theorem_name(text)
        if name is None:
            continue
        placeholder = text if text.rstrip().endswith(":=") else text + " :="
        ok, _ = adapter.compile(placeholder + " sorry")
        if ok:
            return FormalProblem(problem_id, natural_statement,
                                 placeholder, name, environment_pin)
    return None


def _theorem_name(statement: str) -> Optional[str]:
    m = re.search(r"\b(?:theorem|lemma)\s+([A-Za-z_][\w'.]*)", statement)
    return m.group(1) if m else None


def semantic_agreement(problem: FormalProblem,
                       judge_clients: list[ModelClient]) -> bool:
    """Dual-model faithfulness gate: pass iff both judges independently call
    the formalization faithful; any judge failure fails safe."""
    if len(judge_clients) != 2:
        raise VerificationError("exactly two judge clients required")
    prompt = (f"Natural statement:\n{problem.natural_statement}\n\n"
              f"Formal statement:\n{problem.formal_statement}\n\n"
              "Is the formalization faithful? Reply FAITHFUL or UNFAITHFUL.")
    for client in judge_clients:
        try:
            reply = client.send([Message("user", prompt)], frozenset())
        except TransportError:
            return False
        if not reply.content.strip().upper().startswith("FAITHFUL"):
            return False
    return True
