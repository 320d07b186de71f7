"""Grading pipelines: final-answer (parser + judge + disagreement queue),
rubric-based LLM jury for proofs, reliability scoring for perturbed claims,
and human-override bookkeeping.
"""

from __future__ import annotations

import re
import uuid
from dataclasses import dataclass, field
from typing import Optional

from .answers import check_answer
from .registry import AnswerSpec
from .runner import Message, ModelClient, RunRecord, TransportError

# Judge prompts are versioned text assets.  The final-answer judge sees the
# problem, gold answer, and candidate only (no model identity); the
# reliability judge decides a behavioral category, never proof validity.
FINAL_ANSWER_JUDGE_PROMPT = (
    "You are grading a final answer.\nProblem: {problem}\nGold answer: "
    "{gold}\nCandidate answer: {candidate}\nReply CORRECT or INCORRECT."
)
JURY_JUDGE_PROMPT = (
    "Grade the following proof against the rubric on a 0-{scale} scale.\n"
    "Rubric:\n{rubric}\n\nProof:\n{proof}\n\nReply with 'SCORE: <n>' and a "
    "justification."
)
RECONCILE_PROMPT = (
    "The three initial evaluations disagree. All initial evaluations:\n"
    "{evaluations}\n\nReconsider and reply with a revised 'SCORE: <n>'."
)
BROKEN_CLAIM_JUDGE_PROMPT = (
    "A model was asked to prove this statement, which is known to be false:\n"
    "{perturbed}\n\nThe original (true) statement was:\n{original}\n\n"
    "Model response:\n{response}\n\nClassify the model's BEHAVIOR only (do "
    "not judge mathematical validity):\nBASE=0 if it proves the given "
    "statement unmodified; BASE=1 if it silently repairs the statement; "
    "BASE=2 otherwise (declares falsehood or inability).\nCONTRADICTS=1 if "
    "a repaired statement still directly contradicts the original, else 0.\n"
    "Reply 'BASE: <n>' and 'CONTRADICTS: <n>'."
)
FORMATTER_PROMPT = (
    "Rewrite the following proof according to the formatting guidelines: "
    "remove obvious redundancies such as restating the problem, and present "
    "it in formal mathematical language with correct LaTeX. Preserve the "
    "mathematical content exactly.\n\n{proof}"
)


class GradingError(Exception):
    pass


@dataclass
class GradeRecord:
    problem_id: str
    model_id: str
    run_index: int
    score: float
    max_score: float
    method: str            # parser | parser+judge | jury | broken-arxiv | formal | human-override
    judge_transcripts: list = field(default_factory=list)
    flags: set = field(default_factory=set)
    final: bool = False
    grade_id: str = ""
    supersedes: Optional[str] = None
    audit_note: Optional[str] = None

    def __post_init__(self):
        if not 0 <= self.score <= self.max_score:
            raise GradingError(f"score {self.score} outside [0, {self.max_score}]")
        if self.method == "human-override" and not self.audit_note:
            raise GradingError("human override requires an audit note")
        if not self.grade_id:
            self.grade_id = uuid.uuid4().hex

    def to_dict(self) -> dict:
        return {
            "problem_id": self.problem_id, "model_id": self.model_id,
            "run_index": self.run_index, "score": self.score,
            "max_score": self.max_score, "method": self.method,
            "judge_transcripts": self.judge_transcripts,
            "flags": sorted(self.flags), "final": self.final,
            "grade_id": self.grade_id, "supersedes": self.supersedes,
            "audit_note": self.audit_note,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GradeRecord":
        d = dict(d)
        d["flags"] = set(d.get("flags", []))
        return cls(**d)


@dataclass(frozen=True)
class Rubric:
    problem_id: str
    items: tuple[tuple[str, int], ...]
    scale_max: int
    deductions: tuple[tuple[str, int], ...] = ()
    provenance: str = "generated"   # generated | human-edited

    def __post_init__(self):
        if sum(p for _, p in self.items) != self.scale_max:
            raise GradingError("rubric items must sum to scale-max")
        if any(p > 0 for _, p in self.deductions):
            raise GradingError("deductions must be non-positive")


@dataclass(frozen=True)
class JuryConfig:
    judges: tuple[str, str, str]
    agreement_threshold: int = 1
    scale_max: int = 7
    code_execution_enabled: bool = False

    def __post_init__(self):
        if len(set(self.judges)) != 3:
            raise GradingError("jury requires exactly 3 distinct judges")
        if self.agreement_threshold < 0:
            raise GradingError("threshold must be >= 0")


@dataclass(frozen=True)
class BrokenClaimVerdict:
    base: int                    # 0, 1, 2
    contradiction_deduction: int # 0 or -1
    judge_rationale: str = ""

    @property
    def final(self) -> int:
        return max(0, self.base + self.contradiction_deduction)


def grade_final_answer(run: RunRecord, gold: str, spec: AnswerSpec,
                       judge_client: Optional[ModelClient],
                       problem_statement: str = "") -> GradeRecord:
    """Parser verdict plus an independent LLM judge; disagreement is flagged
    for human review with the parser's score held provisionally."""
    if run.status not in ("ok", "token-limit"):
        raise GradingError(f"run not gradeable (status {run.status})")

    candidate = run.extracted_answer
    if candidate is None:
        return GradeRecord(run.problem_id, run.model_id, run.run_index,
                           0, 1, "parser", flags={"needs-human-review"},
                           audit_note=None)
    verdict = check_answer(candidate, gold, spec)
    parser_correct = verdict.outcome == "equivalent"

    if judge_client is None:
        return GradeRecord(run.problem_id, run.model_id, run.run_index,
                           1 if parser_correct else 0, 1, "parser")
    prompt = FINAL_ANSWER_JUDGE_PROMPT.format(
        problem=problem_statement, gold=gold, candidate=candidate)
    try:
        reply = judge_client.send([Message("user", prompt)], frozenset())
    except TransportError:
        return GradeRecord(run.problem_id, run.model_id, run.run_index,
                           1 if parser_correct else 0, 1, "parser",
                           flags={"needs-human-review"})
    judge_correct = reply.content.strip().upper().startswith("CORRECT")
    transcripts = [{"prompt": prompt, "reply": reply.content}]
    if judge_correct == parser_correct:
        return GradeRecord(run.problem_id, run.model_id, run.run_index,
                           1 if parser_correct else 0, 1, "parser+judge",
                           judge_transcripts=transcripts, final=True)
    return GradeRecord(run.problem_id, run.model_id, run.run_index,
                       1 if parser_correct else 0, 1, "parser+judge",
                       judge_transcripts=transcripts,
                       flags={"parser-judge-disagreement", "needs-human-review"})


def standardize_proof(text: str, formatter_client: ModelClient) -> tuple[str, dict]:
    """Reformat a proof for grading; the original is always retained by the
    caller alongside the returned text."""
    if not text.strip():
        raise GradingError("empty proof")
    prompt = FORMATTER_PROMPT.format(proof=text)
    try:
        reply = formatter_client.send([Message("user", prompt)], frozenset())
    except TransportError:
        return text, {"formatter_failed": True}
    return reply.content, {"formatter_failed": False}


_SCORE_RE = re.compile(r"SCORE:\s*(\d+)")


def _judge_score(client: ModelClient, prompt: str, scale_max: int):
    for _ in range(2):  # one retry before the judge is declared failed
        try:
            reply = client.send([Message("user", prompt)], frozenset())
        except TransportError:
            continue
        m = _SCORE_RE.search(reply.content)
        if m:
            s = int(m.group(1))
            return min(max(s, 0), scale_max), reply.content
    return None, None


def jury_grade(proof: str, rubric: Rubric, jury: JuryConfig,
               judge_clients: dict[str, ModelClient],
               problem_id: str = "", model_id: str = "", run_index: int = 0,
               rubric_waived: bool = False) -> GradeRecord:
    """Three independent judges; min if they agree within the threshold,
    otherwise one reconciliation round then min of revised scores."""
    if rubric.provenance != "human-edited" and not rubric_waived:
        raise GradingError("rubric must be human-edited (or explicitly waived) "
                           "before jury grading")
    rubric_text = "\n".join(f"- {c} ({p} pts)" for c, p in rubric.items)
    prompt = JURY_JUDGE_PROMPT.format(scale=jury.scale_max, rubric=rubric_text,
                                      proof=proof)
    scores: dict[str, int] = {}
    transcripts = []
    flags = set()
    for j in jury.judges:
        s, raw = _judge_score(judge_clients[j], prompt, jury.scale_max)
        if s is None:
            flags.add("needs-human-review")  # judge degraded out of the jury
            transcripts.append({"judge": j, "failed": True})
        else:
            scores[j] = s
            transcripts.append({"judge": j, "reply": raw, "initial_score": s})
    if len(scores) < 2:
        raise GradingError("fewer than two working judges")

    vals = list(scores.values())
    if max(vals) - min(vals) <= jury.agreement_threshold:
        final_score = min(vals)
    else:
        revised = reconcile(proof, rubric, scores, jury, judge_clients,
                            transcripts)
        rvals = list(revised.values())
        final_score = min(rvals)
        if max(rvals) - min(rvals) > jury.agreement_threshold:
            flags.add("needs-human-review")  # still apart after reconciliation
    return GradeRecord(problem_id, model_id, run_index, final_score,
                       jury.scale_max, "jury",
                       judge_transcripts=transcripts, flags=flags)


def reconcile(proof: str, rubric: Rubric, initial: dict[str, int],
              jury: JuryConfig, judge_clients: dict[str, ModelClient],
              transcripts: Optional[list] = None) -> dict[str, int]:
    """Exactly one round: every judge sees all initial evaluations and may
    revise; a failing judge keeps its initial score."""
    evaluations = "\n".join(f"judge {j}: {s}" for j, s in sorted(initial.items()))
    prompt = RECONCILE_PROMPT.format(evaluations=evaluations)
    revised = {}
    for j, s0 in initial.items():
        s, raw = _judge_score(judge_clients[j], prompt, jury.scale_max)
        revised[j] = s if s is not None else s0
        if transcripts is not None:
            transcripts.append({"judge": j, "reconciled_score": revised[j],
                                "reply": raw})
    return revised


def generate_rubric(problem_id: str, reference_solutions: list[str],
                    generator_client: ModelClient, scale_max: int = 7) -> Rubric:
    """Rubrics come out with provenance 'generated' and cannot be used for
    jury grading until a human marks them edited."""
    if not reference_solutions:
        raise GradingError("at least one reference solution required")
    prompt = ("Generate a grading rubric with point-weighted criteria summing "
              f"to {scale_max} for this problem, based on the reference "
              "solutions:\n" + "\n---\n".join(reference_solutions))
    reply = generator_client.send([Message("user", prompt)], frozenset())
    items = []
    for line in reply.content.splitlines():
        m = re.match(r"-\s*(.+?)\s*\((\d+)\s*pts?\)", line.strip())
        if m:
            items.append((m.group(1), int(m.group(2))))
    return Rubric(problem_id, tuple(items), scale_max, provenance="generated")


def mark_rubric_human_edited(rubric: Rubric) -> Rubric:
    return Rubric(rubric.problem_id, rubric.items, rubric.scale_max,
                  rubric.deductions, provenance="human-edited")


_BASE_RE = re.compile(r"BASE:\s*([0-2])")
_CONTRA_RE = re.compile(r"CONTRADICTS:\s*([01])")


def broken_claim_score(run: RunRecord, original: str, perturbed: str,
                       judge_client: ModelClient) -> BrokenClaimVerdict:
    """Behavioral scoring of a response to a known-false statement:
    0 = proves it as given, 1 = silent repair, 2 = identifies falsehood or
    declines; -1 if the repaired claim still contradicts the original."""
    prompt = BROKEN_CLAIM_JUDGE_PROMPT.format(
        original=original, perturbed=perturbed, response=run.final_text)
    try:
        reply = judge_client.send([Message("user", prompt)], frozenset())
    except TransportError:
        raise GradingError("judge unavailable; needs human review")
    mb = _BASE_RE.search(reply.content)
    mc = _CONTRA_RE.search(reply.content)
    if not mb:
        raise GradingError(f"judge reply unclassifiable: {reply.content!r}")
    base = int(mb.group(1))
    contradicts = bool(mc and mc.group(1) == "1")
    deduction = -1 if (contradicts and base > 0) else 0
    return BrokenClaimVerdict(base, deduction, reply.content)


def broken_claim_grade(run: RunRecord, original: str, perturbed: str,
                       judge_client: ModelClient) -> GradeRecord:
    v = broken_claim_score(run, original, perturbed, judge_client)
    return GradeRecord(run.problem_id, run.model_id, run.run_index,
                       v.final, 2, "broken-arxiv",
                       judge_transcripts=[{"rationale": v.judge_rationale}])


_TRUE_RE = re.compile(r"\b(TRUE)\b", re.I)
_FALSE_RE = re.compile(r"\b(FALSE)\b", re.I)


@dataclass
class BinaryAccuracy:
    original_correct: int = 0
    original_total: int = 0
    perturbed_correct: int = 0
    perturbed_total: int = 0
    flagged: list = field(default_factory=list)

    @property
    def original_accuracy(self) -> float:
        return self.original_correct / self.original_total if self.original_total else 0.0

    @property
    def perturbed_accuracy(self) -> float:
        return self.perturbed_correct / self.perturbed_total if self.perturbed_total else 0.0

    @property
    def total_accuracy(self) -> float:
        n = self.original_total + self.perturbed_total
        return (self.original_correct + self.perturbed_correct) / n if n else 0.0


def classify_binary(text: str) -> Optional[bool]:
    """Extract a true/false classification; None when unclassifiable."""
    has_t = _TRUE_RE.search(text) is not None
    has_f = _FALSE_RE.search(text) is not None
    if has_t == has_f:
        return None
    return has_t


def broken_claim_binary(run_pairs: list[tuple[RunRecord, RunRecord]]) -> BinaryAccuracy:
    """Accuracy on the explicit prove-or-disprove variant, split by whether
    the statement shown was the original (true) or the perturbed (false) one.
    Each pair is (original-statement run, perturbed-statement run)."""
    acc = BinaryAccuracy()
    for orig_run, pert_run in run_pairs:
        for run, truth, is_orig in ((orig_run, True, True), (pert_run, False, False)):
            c = classify_binary(run.final_text)
            correct = (c == truth)
            if c is None:
                acc.flagged.append((run.problem_id, run.run_index))
                correct = False
            if is_orig:
                acc.original_total += 1
                acc.original_correct += int(correct)
            else:
                acc.perturbed_total += 1
                acc.perturbed_correct += int(correct)
    return acc


def record_human_review(grade: GradeRecord, decision: str,
                        score: Optional[float] = None,
                        note: Optional[str] = None) -> GradeRecord:
    """Confirm or override.  Never mutates: an override (or a re-review of a
    final grade) produces a new record superseding the old one."""
    if decision == "confirm":
        return GradeRecord(grade.problem_id, grade.model_id, grade.run_index,
                           grade.score, grade.max_score, grade.method,
                           judge_transcripts=grade.judge_transcripts,
                           flags=grade.flags - {"needs-human-review"},
                           final=True, supersedes=grade.grade_id,
                           audit_note=note or grade.audit_note)
    if decision == "override":
        if score is None or not note:
            raise GradingError("override requires a score and an audit note")
        return GradeRecord(grade.problem_id, grade.model_id, grade.run_index,
                           score, grade.max_score, "human-override",
                           judge_transcripts=grade.judge_transcripts,
                           flags=set(), final=True,
                           supersedes=grade.grade_id, audit_note=note)
    raise GradingError(f"unknown decision {decision!r}")
