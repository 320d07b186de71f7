"""Benchmark registry: benchmark/problem definitions, bundle loading, validation.

A benchmark lives on disk as a versioned bundle directory:

    <bundle>/
      manifest.json          benchmark-level metadata
      problems/<id>.json     one file per problem
      attachments/<hash>     binary attachments (images), content-addressed

The registry is immutable after load; reloading swaps the whole registry.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Optional

ANSWER_KINDS = (
    "integer-range",
    "symbolic-expression",
    "multiple-choice",
    "free-proof",
    "formal-statement",
    "perturbed-claim-pair",
)

CATEGORIES = (
    "final-answer",
    "visual",
    "proof",
    "research-final",
    "research-reliability",
    "research-formal",
    "euler-like",
)

GOLD_ANSWER_KINDS = ("integer-range", "symbolic-expression", "multiple-choice")


class RegistryError(Exception):
    """Base error for bundle loading."""


class SchemaViolation(RegistryError):
    """A bundle field is missing or has the wrong type."""


class IntegrityViolation(RegistryError):
    """Bundle contents contradict the manifest (size mismatch, duplicate ids)."""


@dataclass(frozen=True)
class AnswerSpec:
    kind: str
    range: Optional[tuple[int, int]] = None
    choices: Optional[tuple[str, ...]] = None
    proof_scale_max: Optional[int] = None

    def violations(self) -> list[str]:
        out = []
        if self.kind not in ANSWER_KINDS:
            out.append(f"unknown answer kind {self.kind!r}")
        if self.kind == "integer-range":
            if self.range is None or self.range[0] > self.range[1]:
                out.append("integer-range requires a non-empty interval")
        if self.kind == "multiple-choice":
            if self.choices is None or len(set(self.choices)) < 2:
                out.append("multiple-choice requires >=2 distinct labels")
        if self.kind == "free-proof":
            if self.proof_scale_max is None or self.proof_scale_max < 1:
                out.append("free-proof requires proof-scale-max >= 1")
        return out

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.range is not None:
            d["range"] = list(self.range)
        if self.choices is not None:
            d["choices"] = list(self.choices)
        if self.proof_scale_max is not None:
            d["proof_scale_max"] = self.proof_scale_max
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "AnswerSpec":
        if not isinstance(d, dict) or "kind" not in d:
            raise SchemaViolation(f"bad answer spec: {d!r}")
        rng = d.get("range")
        return cls(
            kind=d["kind"],
            range=tuple(rng) if rng is not None else None,
            choices=tuple(d["choices"]) if d.get("choices") is not None else None,
            proof_scale_max=d.get("proof_scale_max"),
        )


@dataclass(frozen=True)
class ProblemRecord:
    problem_id: str
    benchmark_id: str
    statement: str
    answer_spec: AnswerSpec
    gold_answer: Optional[str] = None
    image: Optional[str] = None  # attachment content hash
    statement_pair: Optional[tuple[str, str]] = None  # (original, perturbed)
    rubric_id: Optional[str] = None
    source: dict = field(default_factory=dict, hash=False, compare=False)

    def to_dict(self) -> dict:
        d = {
            "problem_id": self.problem_id,
            "benchmark_id": self.benchmark_id,
            "statement": self.statement,
            "answer_spec": self.answer_spec.to_dict(),
        }
        if self.gold_answer is not None:
            d["gold_answer"] = self.gold_answer
        if self.image is not None:
            d["image"] = self.image
        if self.statement_pair is not None:
            d["statement_pair"] = list(self.statement_pair)
        if self.rubric_id is not None:
            d["rubric_id"] = self.rubric_id
        if self.source:
            d["source"] = self.source
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemRecord":
        try:
            pair = d.get("statement_pair")
            return cls(
                problem_id=d["problem_id"],
                benchmark_id=d["benchmark_id"],
                statement=d["statement"],
                answer_spec=AnswerSpec.from_dict(d["answer_spec"]),
                gold_answer=d.get("gold_answer"),
                image=d.get("image"),
                statement_pair=tuple(pair) if pair is not None else None,
                rubric_id=d.get("rubric_id"),
                source=d.get("source", {}),
            )
        except KeyError as e:
            raise SchemaViolation(f"problem record missing field {e}") from e


@dataclass(frozen=True)
class BenchmarkSpec:
    benchmark_id: str
    name: str
    category: str
    family_tag: str
    size: int
    grading_pipeline: str = "final"
    tool_policy: Optional[str] = None
    runs_per_model: int = 4
    date_window: Optional[tuple[str, str]] = None
    deprecated: bool = False
    cost_excluded: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["date_window"] is not None:
            d["date_window"] = list(d["date_window"])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "BenchmarkSpec":
        try:
            dw = d.get("date_window")
            return cls(
                benchmark_id=d["benchmark_id"],
                name=d["name"],
                category=d["category"],
                family_tag=d["family_tag"],
                size=int(d["size"]),
                grading_pipeline=d.get("grading_pipeline", "final"),
                tool_policy=d.get("tool_policy"),
                runs_per_model=int(d.get("runs_per_model", 4)),
                date_window=tuple(dw) if dw is not None else None,
                deprecated=bool(d.get("deprecated", False)),
                cost_excluded=bool(d.get("cost_excluded", False)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaViolation(f"bad manifest: {e}") from e


def validate(record: ProblemRecord, spec: BenchmarkSpec) -> list[str]:
    """Pure invariant check; violations are data, not failures."""
    out = list(record.answer_spec.violations())
    kind = record.answer_spec.kind
    needs_gold = kind in GOLD_ANSWER_KINDS
    if needs_gold and record.gold_answer is None:
        out.append("missing gold-answer")
    if not needs_gold and record.gold_answer is not None:
        out.append("gold-answer present for non-machine-checkable kind")
    if kind == "perturbed-claim-pair":
        if record.statement_pair is None or len(record.statement_pair) != 2:
            out.append("missing statement-pair")
    elif record.statement_pair is not None:
        out.append("statement-pair present for non-perturbed kind")
    if record.benchmark_id != spec.benchmark_id:
        out.append("benchmark-id mismatch")
    if spec.runs_per_model < 1:
        out.append("runs-per-model must be >= 1")
    if record.gold_answer is not None and not out:
        out.extend(_check_gold(record.gold_answer, record.answer_spec))
    return out


def _check_gold(gold: str, spec: AnswerSpec) -> list[str]:
    if spec.kind == "integer-range":
        try:
            v = int(gold)
        except ValueError:
            return ["gold-answer is not an integer"]
        lo, hi = spec.range
        if not lo <= v <= hi:
            return [f"out-of-range: {v} not in [{lo}, {hi}]"]
    elif spec.kind == "multiple-choice":
        labels = {c.strip().upper() for c in spec.choices}
        if gold.strip().upper() not in labels:
            return [f"gold-answer {gold!r} not among choices"]
    return []


class Registry:
    """Immutable collection of loaded benchmarks."""

    def __init__(self, benchmarks: dict[str, BenchmarkSpec] | None = None,
                 problems: dict[str, list[ProblemRecord]] | None = None):
        self._benchmarks = dict(benchmarks or {})
        self._problems = {k: list(v) for k, v in (problems or {}).items()}

    def add(self, spec: BenchmarkSpec, records: list[ProblemRecord]) -> None:
        self._benchmarks[spec.benchmark_id] = spec
        self._problems[spec.benchmark_id] = list(records)

    def benchmark(self, benchmark_id: str) -> BenchmarkSpec:
        return self._benchmarks[benchmark_id]

    def problems(self, benchmark_id: str) -> list[ProblemRecord]:
        return list(self._problems[benchmark_id])

    def problem(self, benchmark_id: str, problem_id: str) -> ProblemRecord:
        for p in self._problems[benchmark_id]:
            if p.problem_id == problem_id:
                return p
        raise KeyError(problem_id)

    def active_benchmarks(self) -> list[BenchmarkSpec]:
        return sorted(
            (b for b in self._benchmarks.values() if not b.deprecated),
            key=lambda b: b.benchmark_id,
        )

    def all_benchmarks(self) -> list[BenchmarkSpec]:
        return sorted(self._benchmarks.values(), key=lambda b: b.benchmark_id)


def load_benchmark(path: str | Path) -> tuple[BenchmarkSpec, list[ProblemRecord]]:
    """Load one bundle directory; raises on schema/integrity problems."""
    path = Path(path)
    manifest_path = path / "manifest.json"
    if not manifest_path.is_file():
        raise SchemaViolation(f"no manifest at {manifest_path}")
    spec = BenchmarkSpec.from_dict(json.loads(manifest_path.read_text()))

    problems_dir = path / "problems"
    records = []
    seen = set()
    for f in sorted(problems_dir.glob("*.json")) if problems_dir.is_dir() else []:
        rec = ProblemRecord.from_dict(json.loads(f.read_text()))
        if rec.problem_id in seen:
            raise IntegrityViolation(f"duplicate problem-id {rec.problem_id}")
        seen.add(rec.problem_id)
        records.append(rec)

    if len(records) != spec.size:
        raise IntegrityViolation(
            f"manifest declares size {spec.size} but bundle has {len(records)} problems"
        )
    for rec in records:
        bad = validate(rec, spec)
        if bad:
            raise IntegrityViolation(f"{rec.problem_id}: {'; '.join(bad)}")
        if rec.image is not None:
            att = path / "attachments" / rec.image
            if not att.is_file():
                raise IntegrityViolation(f"{rec.problem_id}: missing attachment {rec.image}")
    return spec, records


def export_benchmark(spec: BenchmarkSpec, records: list[ProblemRecord],
                     out: str | Path,
                     attachments: dict[str, bytes] | None = None) -> Path:
    """Write a bundle directory; inverse of load_benchmark."""
    out = Path(out)
    (out / "problems").mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(json.dumps(spec.to_dict(), indent=2, sort_keys=True))
    for rec in records:
        p = out / "problems" / f"{rec.problem_id}.json"
        p.write_text(json.dumps(rec.to_dict(), indent=2, sort_keys=True))
    for h, blob in (attachments or {}).items():
        d = out / "attachments"
        d.mkdir(exist_ok=True)
        (d / h).write_bytes(blob)
    return out


def attachment_hash(blob: bytes) -> str:
    return hashlib.sha256(blob).hexdigest()


def load_registry(root: str | Path) -> Registry:
    """Load every bundle directory under root into a fresh registry."""
    reg = Registry()
    root = Path(root)
    for d in sorted(p for p in root.iterdir() if (p / "manifest.json").is_file()):
        spec, records = load_benchmark(d)
        reg.add(spec, records)
    return reg
