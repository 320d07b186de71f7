import itertools

import pytest

from mathbench.leanverify import (
    DEFAULT_AXIOM_ALLOWLIST,
    FormalProblem,
    MockCheckerAdapter,
    StatementMismatch,
    Submission,
    VerificationError,
    formalize,
    semantic_agreement,
    splice_statement,
    verify,
)
from mathbench.runner import ScriptedClient, TransportError

PROBLEM = FormalProblem(
    problem_id="seq-1",
    natural_statement="Every natural number n satisfies n + 0 = n.",
    formal_statement="theorem add_zero_id (n : Nat) : n + 0 = n :=",
    theorem_name="add_zero_id",
    environment_pin="toolchain-pin-1")


def sub(file):
    return Submission(problem_id="seq-1", file=file)


# ---------------------------------------------------------------- splice

def test_splice_byte_exact_simple():
    s = sub("theorem add_zero_id (n : Nat) : n = n + 0 := by simp\n")
    assert splice_statement(s, PROBLEM) == \
        "theorem add_zero_id (n : Nat) : n + 0 = n := by simp\n"


def test_splice_preserves_helper_lemmas_byte_exact():
    s = sub(
        "import Mathlib\n\n"
        "lemma helper (k : Nat) : k = k := rfl\n\n"
        "theorem add_zero_id (weakened : False) : True :=\n"
        "  trivial\n")
    spliced = splice_statement(s, PROBLEM)
    assert spliced == (
        "import Mathlib\n\n"
        "lemma helper (k : Nat) : k = k := rfl\n\n"
        "theorem add_zero_id (n : Nat) : n + 0 = n :=\n"
        "  trivial\n")


def test_splice_respects_bracket_depth_for_delimiter():
    # ':=' inside the binder must not be mistaken for the proof delimiter
    s = sub("theorem add_zero_id (h : (fun x := 1) = id) : True := trivial\n")
    spliced = splice_statement(s, PROBLEM)
    assert spliced.endswith(":= trivial\n")
    assert PROBLEM.formal_statement in spliced


def test_splice_keeps_indentation():
    s = sub("namespace Foo\n  theorem add_zero_id : True := trivial\nend Foo\n")
    spliced = splice_statement(s, PROBLEM)
    assert "\n  theorem add_zero_id (n : Nat) : n + 0 = n := trivial" in spliced


def test_wrong_or_duplicate_theorem_name_is_mismatch():
    with pytest.raises(StatementMismatch):
        splice_statement(sub("theorem other_name : True := trivial"), PROBLEM)
    two = ("theorem add_zero_id : True := trivial\n"
           "theorem add_zero_id : True := trivial\n")
    with pytest.raises(StatementMismatch):
        splice_statement(sub(two), PROBLEM)


def test_missing_delimiter_is_mismatch():
    with pytest.raises(StatementMismatch):
        splice_statement(sub("theorem add_zero_id : True\n"), PROBLEM)


# ---------------------------------------------------------------- verify

def test_verify_exhaustive_mock_matrix():
    good = sub("theorem add_zero_id : True := by simp")
    for name_ok, compile_ok, axioms_ok, semantic_ok in \
            itertools.product([True, False], repeat=4):
        s = good if name_ok else sub("theorem wrong : True := by simp")
        adapter = MockCheckerAdapter(
            compile_ok=compile_ok,
            axioms=["propext"] if axioms_ok else ["sorryAx", "propext"],
            semantic_ok=semantic_ok)
        v = verify(s, PROBLEM, adapter)
        if not name_ok:
            assert v.outcome == "statement-mismatch"
        elif not compile_ok:
            assert v.outcome == "compile-error"
        elif not axioms_ok:
            assert v.outcome == "axiom-violation"
            assert "sorryAx" in v.checker_log
        elif not semantic_ok:
            assert v.outcome == "semantic-violation"
        else:
            assert v.outcome == "accepted"


def test_weakened_statement_cannot_slip_through():
    # submission proves a weaker claim; splicing restores the real statement,
    # so the mock "compiler" that only accepts the weak one must fail
    weak = sub("theorem add_zero_id (h : False) : n + 0 = n := h.elim")

    class PickyAdapter(MockCheckerAdapter):
        def compile(self, file):
            return ("(h : False)" in file, "weak proof no longer compiles")

    v = verify(weak, PROBLEM, PickyAdapter())
    assert v.outcome == "compile-error"


def test_allowlisted_axioms_pass():
    adapter = MockCheckerAdapter(axioms=sorted(DEFAULT_AXIOM_ALLOWLIST))
    v = verify(sub("theorem add_zero_id : True := trivial"), PROBLEM, adapter)
    assert v.outcome == "accepted"


def test_empty_and_oversized_submissions_rejected():
    with pytest.raises(VerificationError):
        Submission("p", "   ")
    with pytest.raises(VerificationError):
        Submission("p", "x" * 1_000_001)


# ------------------------------------------------------------- formalize

def test_formalize_drop_and_budget():
    adapter = MockCheckerAdapter(compile_ok=True)
    assert formalize("p", "stmt", ScriptedClient(["DROP"]), adapter) is None
    fp = formalize("p", "stmt",
                   ScriptedClient(["theorem t1 (n : Nat) : n = n"]), adapter)
    assert fp is not None and fp.theorem_name == "t1"
    assert fp.formal_statement.endswith(":=")
    bad = MockCheckerAdapter(compile_ok=False)
    assert formalize("p", "stmt", ScriptedClient(["theorem t1 : True"]), bad,
                     attempt_budget=2) is None


def test_semantic_agreement_requires_both_judges():
    assert semantic_agreement(PROBLEM, [ScriptedClient(["FAITHFUL"]),
                                        ScriptedClient(["FAITHFUL yes"])])
    assert not semantic_agreement(PROBLEM, [ScriptedClient(["FAITHFUL"]),
                                            ScriptedClient(["UNFAITHFUL"])])
    # judge outage fails safe
    assert not semantic_agreement(PROBLEM, [ScriptedClient(["FAITHFUL"]),
                                            ScriptedClient([TransportError("x")])])
    with pytest.raises(VerificationError):
        semantic_agreement(PROBLEM, [ScriptedClient(["FAITHFUL"])])
