"""Paper-to-benchmark extraction pipeline: candidate generation, perturbation
pairing, the five-filter chain, human review, monthly versioning, and
difficulty-based curation.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from typing import Callable, Optional

from .registry import AnswerSpec, BenchmarkSpec, ProblemRecord
from .runner import Message, ModelClient, TransportError

FILTER_STAGES = (
    "self-contained",
    "missing-context-revision",
    "guessability",
    "ai-usage",
    "author-verification",
)

STATES = ("generated", "filtering", "awaiting-review", "accepted", "rejected",
          "parked")

_TRANSITIONS = {
    "generated": {"filtering", "rejected"},
    "filtering": {"filtering", "awaiting-review", "rejected", "parked"},
    "parked": {"filtering"},
    "awaiting-review": {"accepted", "rejected", "awaiting-review"},
    "accepted": {"awaiting-review"},   # post-model-run reopen
    "rejected": set(),
}


class PipelineError(Exception):
    pass


@dataclass(frozen=True)
class FilterOutcome:
    stage: str
    verdict: str               # pass | fail | revised
    rationale: str = ""
    revised_text: Optional[str] = None

    def __post_init__(self):
        if self.verdict == "revised" and self.stage != "missing-context-revision":
            raise PipelineError("only the missing-context stage may revise")


@dataclass(frozen=True)
class ReviewDecision:
    reviewer_id: str
    decision: str              # accept | revise | reject
    revised_text: Optional[str] = None
    reason: Optional[str] = None
    timestamp: str = ""

    def __post_init__(self):
        if self.decision == "reject" and not self.reason:
            raise PipelineError("rejection requires a reason")
        if self.decision == "revise" and not self.revised_text:
            raise PipelineError("revision requires new text")


@dataclass
class CandidateQuestion:
    candidate_id: str
    paper_id: str
    abstract: str
    kind: str                  # final-answer | perturbed-pair | formal-claim
    question: str
    gold: Optional[str] = None
    pair: Optional[tuple[str, str]] = None    # (original, perturbed)
    fulltext_ref: Optional[str] = None
    state: str = "generated"
    stage_history: list = field(default_factory=list)

    def record(self, stage: str, outcome: str, rationale: str = "",
               timestamp: str = "") -> None:
        self.stage_history.append(
            {"stage": stage, "outcome": outcome, "rationale": rationale,
             "timestamp": timestamp})

    def transition(self, new_state: str) -> None:
        if new_state not in _TRANSITIONS.get(self.state, set()):
            raise PipelineError(f"illegal transition {self.state} -> {new_state}")
        self.state = new_state

    def passed_stages(self) -> set[str]:
        return {h["stage"] for h in self.stage_history
                if h["stage"] in FILTER_STAGES and h["outcome"] in ("pass", "revised")}

    def replay_state(self) -> str:
        """Recompute the state purely from the stage history."""
        state = "generated"
        for h in self.stage_history:
            if h["stage"] in FILTER_STAGES:
                state = "rejected" if h["outcome"] == "fail" else "filtering"
                if h["outcome"] == "parked":
                    state = "parked"
            elif h["stage"] == "submit-review":
                state = "awaiting-review"
            elif h["stage"] == "review":
                if h["outcome"] == "accept":
                    state = "accepted"
                elif h["outcome"] == "reject":
                    state = "rejected"
                else:
                    state = "awaiting-review"
            elif h["stage"] == "reopen":
                state = "awaiting-review"
        return state


def generate_candidates(papers: list[dict], generator_client: ModelClient,
                        kind: str = "final-answer",
                        log: Optional[Callable[[str], None]] = None
                        ) -> list[CandidateQuestion]:
    """Abstract-only candidate generation; the generator may decline a paper.

    The scripted/live generator replies either 'REJECT' or a block with
    QUESTION:/GOLD: (final-answer), ORIGINAL:/PERTURBED: (perturbed-pair), or
    CLAIM: (formal-claim) lines.
    """
    out = []
    for paper in papers:
        prompt = (f"Kind: {kind}\nAbstract:\n{paper['abstract']}\n"
                  "Generate a candidate question, or reply REJECT.")
        try:
            reply = generator_client.send([Message("user", prompt)], frozenset())
        except TransportError:
            if log:
                log(f"generator failed on {paper['paper_id']}; skipped")
            continue
        fields = _parse_generator_reply(reply.content)
        if fields is None:
            continue
        cand = CandidateQuestion(
            candidate_id=uuid.uuid4().hex[:12],
            paper_id=paper["paper_id"],
            abstract=paper["abstract"],
            kind=kind,
            question=fields.get("question", fields.get("claim", "")),
            gold=fields.get("gold"),
            pair=fields.get("pair"),
            fulltext_ref=paper.get("fulltext_ref"),
        )
        cand.record("generate", "pass")
        out.append(cand)
    if log:
        log(f"generated {len(out)} candidates from {len(papers)} papers")
    return out


def _parse_generator_reply(text: str) -> Optional[dict]:
    if text.strip().upper().startswith("REJECT"):
        return None
    fields = {}
    for line in text.splitlines():
        for key in ("QUESTION", "GOLD", "ORIGINAL", "PERTURBED", "CLAIM"):
            if line.startswith(f"{key}:"):
                fields[key.lower()] = line[len(key) + 1:].strip()
    if "original" in fields and "perturbed" in fields:
        fields["pair"] = (fields["original"], fields["perturbed"])
    if not fields.get("question") and not fields.get("pair") and not fields.get("claim"):
        return None
    if fields.get("pair") and not fields.get("question"):
        fields["question"] = fields["pair"][1]
    return fields


def perturb_statement(candidate: CandidateQuestion,
                      perturber_client: ModelClient) -> CandidateQuestion:
    """Attach a (original, perturbed) pair where each statement directly
    contradicts the other; candidates the perturber declines are rejected."""
    if candidate.kind != "perturbed-pair":
        raise PipelineError("perturbation applies to perturbed-pair candidates")
    prompt = ("Produce a perturbed version that directly contradicts this "
              f"statement, keeping it highly plausible:\n{candidate.question}\n"
              "Reply ORIGINAL:/PERTURBED: or REJECT.")
    reply = perturber_client.send([Message("user", prompt)], frozenset())
    fields = _parse_generator_reply(reply.content)
    if fields is None or "pair" not in fields:
        candidate.record("perturb", "fail", "perturber declined")
        candidate.transition("rejected")
        return candidate
    candidate.pair = fields["pair"]
    candidate.record("perturb", "pass")
    return candidate


def apply_filter(candidate: CandidateQuestion, stage: str,
                 filter_client: ModelClient, retries: int = 1) -> FilterOutcome:
    """Run one filter stage; stages must be applied in FILTER_STAGES order.

    fail -> rejected; revised (missing-context only) -> question replaced,
    history kept; pass -> stays in filtering; after the last stage the
    caller moves the candidate to awaiting-review.  Filter-client failures
    park the candidate rather than silently passing it.
    """
    if candidate.state == "generated":
        candidate.transition("filtering")
    if candidate.state == "parked":
        candidate.transition("filtering")
    if candidate.state != "filtering":
        raise PipelineError(f"candidate not in filtering (state {candidate.state})")
    done = candidate.passed_stages()
    expected = next(s for s in FILTER_STAGES if s not in done)
    if stage != expected:
        raise PipelineError(f"stage {stage!r} out of order; expected {expected!r}")

    prompt = f"Filter stage: {stage}\nQuestion:\n{candidate.question}\n" \
             f"Abstract:\n{candidate.abstract}"
    reply = None
    for _ in range(retries + 1):
        try:
            reply = filter_client.send([Message("user", prompt)], frozenset())
            break
        except TransportError:
            continue
    if reply is None:
        candidate.record(stage, "parked", "filter client unavailable")
        candidate.transition("parked")
        return FilterOutcome(stage, "fail", "filter client unavailable")

    outcome = _parse_filter_reply(stage, reply.content)
    candidate.record(stage, outcome.verdict, outcome.rationale)
    if outcome.verdict == "fail":
        candidate.transition("rejected")
    elif outcome.verdict == "revised":
        candidate.question = outcome.revised_text
    if candidate.state == "filtering" and \
            candidate.passed_stages() == set(FILTER_STAGES):
        candidate.record("submit-review", "pass")
        candidate.transition("awaiting-review")
    return outcome


def _parse_filter_reply(stage: str, text: str) -> FilterOutcome:
    head, _, rest = text.partition("\n")
    head = head.strip().upper()
    if head.startswith("FAIL"):
        return FilterOutcome(stage, "fail", rest.strip() or "filter failed")
    if head.startswith("REVISED") and stage == "missing-context-revision":
        return FilterOutcome(stage, "revised", "revised by filter",
                             revised_text=rest.strip())
    return FilterOutcome(stage, "pass", rest.strip())


def record_review_decision(candidate: CandidateQuestion,
                           decision: ReviewDecision) -> CandidateQuestion:
    if candidate.state != "awaiting-review":
        raise PipelineError(f"cannot review candidate in state {candidate.state}")
    if decision.decision == "accept":
        candidate.record("review", "accept", timestamp=decision.timestamp)
        candidate.transition("accepted")
    elif decision.decision == "reject":
        candidate.record("review", "reject", decision.reason,
                         timestamp=decision.timestamp)
        candidate.transition("rejected")
    elif decision.decision == "revise":
        candidate.question = decision.revised_text
        candidate.record("review", "revise", "text revised by reviewer",
                         timestamp=decision.timestamp)
    else:
        raise PipelineError(f"unknown decision {decision.decision!r}")
    return candidate


def reopen_candidate(candidate: CandidateQuestion, reason: str) -> CandidateQuestion:
    """Model answers sometimes reveal issues after acceptance."""
    if candidate.state != "accepted":
        raise PipelineError("only accepted candidates can be reopened")
    candidate.record("reopen", "pass", reason)
    candidate.transition("awaiting-review")
    return candidate


def export_monthly(candidates: list[CandidateQuestion], month: str,
                   benchmark_prefix: str = "arxivmath",
                   family_tag: str = "research",
                   answer_spec: Optional[AnswerSpec] = None
                   ) -> tuple[BenchmarkSpec, list[ProblemRecord]]:
    """Freeze accepted candidates into a monthly benchmark version."""
    accepted = [c for c in candidates if c.state == "accepted"]
    bench_id = f"{benchmark_prefix}-{month}"
    spec_kind = answer_spec or AnswerSpec("symbolic-expression")
    records = []
    for c in accepted:
        if c.kind == "perturbed-pair":
            rec = ProblemRecord(
                problem_id=c.candidate_id, benchmark_id=bench_id,
                statement=c.pair[1], statement_pair=c.pair,
                answer_spec=AnswerSpec("perturbed-claim-pair"),
                source={"paper_id": c.paper_id, "month": month})
        else:
            rec = ProblemRecord(
                problem_id=c.candidate_id, benchmark_id=bench_id,
                statement=c.question, gold_answer=c.gold,
                answer_spec=spec_kind,
                source={"paper_id": c.paper_id, "month": month})
        records.append(rec)
    category = "research-reliability" if benchmark_prefix.startswith("broken") \
        else "research-final"
    spec = BenchmarkSpec(
        benchmark_id=bench_id, name=f"{benchmark_prefix} {month}",
        category=category, family_tag=family_tag, size=len(records))
    return spec, records


def curate_by_difficulty(problems: list[str],
                         probe_results: dict[tuple[str, str, int], bool]
                         ) -> tuple[set[str], set[str], set[str]]:
    """Partition problems by probe-model difficulty.

    probe_results maps (model, problem, attempt) -> passed.  A problem is
    apex iff every probe model fails all attempts; shortlist iff at least one
    model fails at least one attempt (and not apex); excluded otherwise.
    Problems with an incomplete probe grid are held back (error).
    """
    models = sorted({m for m, _, _ in probe_results})
    attempts = sorted({a for _, _, a in probe_results})
    if not models or not attempts:
        raise PipelineError("empty probe grid")
    apex, shortlist, excluded = set(), set(), set()
    for p in problems:
        cells = [(m, a) for m in models for a in attempts]
        missing = [c for c in cells if (c[0], p, c[1]) not in probe_results]
        if missing:
            raise PipelineError(f"incomplete probe grid for {p}: missing {missing[:3]}")
        outcomes = [probe_results[(m, p, a)] for m, a in cells]
        if not any(outcomes):
            apex.add(p)
        elif not all(outcomes):
            shortlist.add(p)
        else:
            excluded.add(p)
    return apex, shortlist, excluded
