"""Model campaign execution: prompt assembly, retries, n-run repetition,
tool loops with call caps, reformat follow-up, and exact cost accounting.

Model clients implement a narrow interface so the whole engine is testable
with scripted clients; live provider clients are thin wrappers kept out of
the tested path.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Callable, Optional, Protocol

from .answers import extract_final_answer, parse, ParseError
from .registry import ProblemRecord

PROBLEM_PROMPT = (
    "Solve the following problem. Output your final answer in a boxed "
    "environment, e.g. \\boxed{42}.\n\n{statement}"
)
REFORMAT_PROMPT = (
    "Your previous answer was not in the expected format. Restate your "
    "final answer in a boxed environment, e.g. \\boxed{42}, with no other "
    "text."
)
# "think step by step" is deliberately absent from every prompt: it is a
# documented underthinking trigger for some models.

DEFAULT_TOOL_TIMEOUT = 120.0  # seconds per tool call


@dataclass(frozen=True)
class ModelEndpointConfig:
    model_id: str
    endpoint: str = "scripted"
    max_tokens: int = 64_000
    reasoning_effort: Optional[str] = None
    price_per_input_token: Optional[Decimal] = None
    price_per_output_token: Optional[Decimal] = None
    open_weights: bool = False
    supports_streaming: bool = True

    def __post_init__(self):
        if self.max_tokens < 1:
            raise ValueError("max tokens must be >= 1")
        for p in (self.price_per_input_token, self.price_per_output_token):
            if p is not None and p < 0:
                raise ValueError("pricing must be non-negative")


@dataclass(frozen=True)
class ToolPolicy:
    tools: frozenset[str] = frozenset()
    max_calls: int = 0
    per_call_timeout: float = DEFAULT_TOOL_TIMEOUT

    def __post_init__(self):
        if self.max_calls < 0:
            raise ValueError("max-calls must be >= 0")


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 5
    backoff_base: float = 0.0        # seconds; tests use 0
    exclude_threshold: float = 0.5   # failure rate that excludes the pair

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError("max-attempts must be >= 1")


@dataclass
class Message:
    role: str                  # system | user | assistant | tool
    content: str
    tool_call: Optional[dict] = None   # {"tool": ..., "args": ...}
    tool_result: Optional[dict] = None # {"output": ..., "wall_time": ...}


@dataclass
class Usage:
    input_tokens: int = 0
    output_tokens: int = 0

    def add(self, other: "Usage") -> None:
        self.input_tokens += other.input_tokens
        self.output_tokens += other.output_tokens


@dataclass
class RunRecord:
    problem_id: str
    benchmark_id: str
    model_id: str
    run_index: int
    transcript: list[Message]
    final_text: str
    usage: Usage
    cost: Optional[Decimal]
    status: str                # ok | failed-excluded | token-limit | tool-cap
    attempts: int = 1
    tool_calls: int = 0
    latency: float = 0.0       # isolated so records are comparable modulo timing
    extraction_method: Optional[str] = None
    extracted_answer: Optional[str] = None
    rounds_used: int = 0

    def to_dict(self) -> dict:
        return {
            "problem_id": self.problem_id,
            "benchmark_id": self.benchmark_id,
            "model_id": self.model_id,
            "run_index": self.run_index,
            "transcript": [
                {"role": m.role, "content": m.content,
                 "tool_call": m.tool_call, "tool_result": m.tool_result}
                for m in self.transcript
            ],
            "final_text": self.final_text,
            "usage": {"input_tokens": self.usage.input_tokens,
                      "output_tokens": self.usage.output_tokens},
            "cost": str(self.cost) if self.cost is not None else None,
            "status": self.status,
            "attempts": self.attempts,
            "tool_calls": self.tool_calls,
            "extraction_method": self.extraction_method,
            "extracted_answer": self.extracted_answer,
            "rounds_used": self.rounds_used,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(
            problem_id=d["problem_id"],
            benchmark_id=d["benchmark_id"],
            model_id=d["model_id"],
            run_index=d["run_index"],
            transcript=[Message(m["role"], m["content"], m.get("tool_call"),
                                m.get("tool_result"))
                        for m in d.get("transcript", [])],
            final_text=d["final_text"],
            usage=Usage(**d.get("usage", {})),
            cost=Decimal(d["cost"]) if d.get("cost") is not None else None,
            status=d["status"],
            attempts=d.get("attempts", 1),
            tool_calls=d.get("tool_calls", 0),
            extraction_method=d.get("extraction_method"),
            extracted_answer=d.get("extracted_answer"),
            rounds_used=d.get("rounds_used", 0),
        )


class TransportError(Exception):
    """Retryable transport failure from a model client."""


@dataclass
class ClientReply:
    content: str
    usage: Usage = field(default_factory=Usage)
    tool_call: Optional[dict] = None
    hit_token_limit: bool = False


class ModelClient(Protocol):
    def send(self, messages: list[Message], tools: frozenset[str]) -> ClientReply: ...


class ScriptedClient:
    """Deterministic client driven by a list of replies (or exceptions)."""

    def __init__(self, replies):
        self._replies = list(replies)
        self.calls = 0

    def send(self, messages, tools=frozenset()) -> ClientReply:
        self.calls += 1
        if not self._replies:
            raise TransportError("script exhausted")
        # items are consumed in order; the last one repeats
        item = self._replies.pop(0) if len(self._replies) > 1 else self._replies[0]
        if isinstance(item, Exception):
            raise item
        if isinstance(item, str):
            return ClientReply(content=item, usage=Usage(10, 10))
        return item


class FnClient:
    """Client backed by a callable(messages, tools) -> ClientReply | str."""

    def __init__(self, fn: Callable):
        self.fn = fn
        self.calls = 0

    def send(self, messages, tools=frozenset()) -> ClientReply:
        self.calls += 1
        out = self.fn(messages, tools)
        if isinstance(out, str):
            return ClientReply(content=out, usage=Usage(10, 10))
        return out


class ToolAdapter(Protocol):
    def run(self, args: dict, timeout: float) -> dict: ...


class ToolRegistry:
    def __init__(self):
        self._adapters: dict[str, ToolAdapter] = {}

    def register(self, name: str, adapter) -> None:
        self._adapters[name] = adapter

    def get(self, name: str):
        return self._adapters.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._adapters


def compute_cost(usage: Usage, model: ModelEndpointConfig) -> Optional[Decimal]:
    """Exact decimal arithmetic; None when pricing is unknown (imputed later)."""
    if model.price_per_input_token is None or model.price_per_output_token is None:
        return None
    return (Decimal(usage.input_tokens) * model.price_per_input_token
            + Decimal(usage.output_tokens) * model.price_per_output_token)


def tool_loop(client: ModelClient, policy: ToolPolicy, transcript: list[Message],
              tools: ToolRegistry, usage: Usage) -> tuple[list[Message], str]:
    """Alternate model turns and tool results until a final answer, the call
    cap, or the token limit.  Returns (transcript, status)."""
    calls = 0
    while True:
        reply = client.send(transcript, policy.tools)
        usage.add(reply.usage)
        if reply.tool_call is None:
            transcript.append(Message("assistant", reply.content))
            return transcript, ("token-limit" if reply.hit_token_limit else "ok")
        if calls >= policy.max_calls:
            transcript.append(Message("assistant", reply.content,
                                      tool_call=reply.tool_call))
            transcript.append(Message(
                "tool", "tool call limit reached",
                tool_result={"error": "tool-cap", "wall_time": 0.0}))
            return transcript, "tool-cap"
        calls += 1
        name = reply.tool_call.get("tool")
        adapter = tools.get(name)
        transcript.append(Message("assistant", reply.content, tool_call=reply.tool_call))
        if adapter is None:
            result = {"error": f"unknown tool {name!r}", "wall_time": 0.0}
        else:
            # wall time is measured around the adapter call and reported to
            # the model for every tool; a wrong timer is a known foot-gun
            t0 = time.monotonic()
            try:
                result = adapter.run(reply.tool_call.get("args", {}),
                                     policy.per_call_timeout)
            except Exception as e:  # adapter failure goes back to the model
                result = {"error": str(e)}
            result.setdefault("wall_time", time.monotonic() - t0)
        transcript.append(Message("tool", str(result.get("output", result.get("error", ""))),
                                  tool_result=result))


def _attempt(client, problem, policy, tools, model) -> RunRecord:
    usage = Usage()
    prompt = PROBLEM_PROMPT.replace("{statement}", problem.statement)
    transcript = [Message("user", prompt)]
    transcript, status = tool_loop(client, policy, transcript, tools, usage)
    final_text = transcript[-1].content if transcript[-1].role == "assistant" else ""
    n_calls = sum(1 for m in transcript if m.tool_call is not None)
    return RunRecord(
        problem_id=problem.problem_id,
        benchmark_id=problem.benchmark_id,
        model_id=model.model_id,
        run_index=0,
        transcript=transcript,
        final_text=final_text,
        usage=usage,
        cost=compute_cost(usage, model),
        status=status,
        tool_calls=n_calls,
    )


def execute_problem(model: ModelEndpointConfig, problem: ProblemRecord,
                    policy: ToolPolicy | None = None,
                    retry: RetryPolicy | None = None,
                    client: ModelClient | None = None,
                    tools: ToolRegistry | None = None,
                    run_index: int = 0) -> RunRecord:
    """One graded attempt at a problem, with transport retries and the
    reformat follow-up when the final answer does not extract/parse."""
    policy = policy or ToolPolicy()
    retry = retry or RetryPolicy()
    tools = tools or ToolRegistry()
    if client is None:
        raise ValueError(f"no client registered for model {model.model_id}")

    failures = 0
    record = None
    for attempt in range(1, retry.max_attempts + 1):
        try:
            record = _attempt(client, problem, policy, tools, model)
            record.attempts = attempt
            break
        except TransportError:
            failures += 1
            if retry.backoff_base:
                time.sleep(retry.backoff_base * (2 ** (attempt - 1)))
    if record is None:
        return RunRecord(
            problem_id=problem.problem_id, benchmark_id=problem.benchmark_id,
            model_id=model.model_id, run_index=run_index, transcript=[],
            final_text="", usage=Usage(), cost=Decimal(0),
            status="failed-excluded", attempts=retry.max_attempts,
        )

    record.run_index = run_index
    if problem.answer_spec.kind in ("integer-range", "symbolic-expression",
                                    "multiple-choice"):
        record = _finalize_extraction(record, problem, client)
    return record


def _finalize_extraction(record: RunRecord, problem: ProblemRecord,
                         client: ModelClient) -> RunRecord:
    ext = extract_final_answer(record.final_text)
    if ext is not None and _parses(ext.candidate, problem):
        record.extraction_method = "boxed"
        record.extracted_answer = ext.candidate
        return record
    return reformat_followup(record, client, problem)


def _parses(candidate: str, problem: ProblemRecord) -> bool:
    try:
        parse(candidate, problem.answer_spec)
        return True
    except ParseError:
        return False


def reformat_followup(run: RunRecord, client: ModelClient,
                      problem: ProblemRecord) -> RunRecord:
    """One extra turn asking the model to restate its answer in the expected
    format; the prior transcript is carried along in full."""
    if run.extraction_method == "boxed":
        raise ValueError("follow-up requires a failed extraction")
    transcript = list(run.transcript)
    transcript.append(Message("user", REFORMAT_PROMPT))
    try:
        reply = client.send(transcript, frozenset())
    except TransportError:
        run.transcript = transcript
        return run
    run.usage.add(reply.usage)
    transcript.append(Message("assistant", reply.content))
    run.transcript = transcript
    run.final_text = reply.content
    ext = extract_final_answer(reply.content)
    if ext is not None and _parses(ext.candidate, problem):
        run.extraction_method = "reformatted-followup"
        run.extracted_answer = ext.candidate
    return run


def run_campaign(model: ModelEndpointConfig, benchmark_id: str, problems,
                 client_factory: Callable[[], ModelClient],
                 n: int = 4,
                 policy: ToolPolicy | None = None,
                 retry: RetryPolicy | None = None,
                 tools: ToolRegistry | None = None,
                 existing: Optional[list[RunRecord]] = None,
                 max_workers: int = 1) -> list[RunRecord]:
    """Exactly n records per problem; already-present (problem, run-index)
    pairs are not rerun, making resume idempotent."""
    retry = retry or RetryPolicy()
    done = {(r.problem_id, r.run_index) for r in (existing or [])}
    jobs = [(p, i) for p in problems for i in range(n)
            if (p.problem_id, i) not in done]

    failure_counts: dict[str, int] = {}

    def one(job):
        problem, idx = job
        client = client_factory()
        rec = execute_problem(model, problem, policy, retry,
                              client=client, tools=tools, run_index=idx)
        return rec

    if max_workers <= 1:
        new = [one(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            new = list(pool.map(one, jobs))

    # exclusion: too many transport-level failures on this model/benchmark
    total = len(new)
    failed = sum(1 for r in new if r.status == "failed-excluded")
    if total and failed / total > retry.exclude_threshold:
        new = [replace_status(r, "failed-excluded") for r in new]
    out = list(existing or []) + new
    out.sort(key=lambda r: (r.problem_id, r.run_index))
    return out


def replace_status(r: RunRecord, status: str) -> RunRecord:
    r.status = status
    return r


def self_correction_loop(model: ModelEndpointConfig, problem: ProblemRecord,
                         client: ModelClient, verifier: ModelClient,
                         max_rounds: int = 2,
                         policy: ToolPolicy | None = None,
                         retry: RetryPolicy | None = None,
                         tools: ToolRegistry | None = None) -> RunRecord:
    """Initial attempt plus up to max_rounds (critique -> revision) cycles;
    stops early when the verifier accepts.  `rounds_used` counts the total
    generation attempts."""
    if max_rounds < 0:
        raise ValueError("max-rounds must be >= 0")
    record = execute_problem(model, problem, policy, retry,
                             client=client, tools=tools)
    rounds = 1
    for _ in range(max_rounds):
        critique = verifier.send(
            record.transcript + [Message("user", "Critique the proposed solution. "
                                                 "Reply ACCEPT if it is correct.")],
            frozenset())
        record.transcript.append(Message("user", critique.content))
        if critique.content.strip().upper().startswith("ACCEPT"):
            break
        revision = client.send(record.transcript, frozenset())
        record.usage.add(revision.usage)
        record.transcript.append(Message("assistant", revision.content))
        record.final_text = revision.content
        rounds += 1
    record.rounds_used = rounds
    record.cost = compute_cost(record.usage, model)
    return record
