import itertools

import pytest

from mathbench.grading import (
    BinaryAccuracy,
    GradeRecord,
    GradingError,
    JuryConfig,
    Rubric,
    broken_claim_binary,
    broken_claim_grade,
    broken_claim_score,
    classify_binary,
    generate_rubric,
    grade_final_answer,
    jury_grade,
    mark_rubric_human_edited,
    record_human_review,
)
from mathbench.registry import AnswerSpec
from mathbench.runner import (
    ClientReply,
    FnClient,
    Message,
    RunRecord,
    ScriptedClient,
    TransportError,
    Usage,
)

SPEC = AnswerSpec("integer-range", range=(0, 999))


def make_run(extracted="4", final_text=None, status="ok"):
    return RunRecord(
        problem_id="p1", benchmark_id="b", model_id="m", run_index=0,
        transcript=[], final_text=final_text or f"\\boxed{{{extracted}}}",
        usage=Usage(), cost=None, status=status,
        extracted_answer=extracted, extraction_method="boxed")


# ---------------------------------------------------------- final answer

def test_parser_and_judge_agree_is_final():
    g = grade_final_answer(make_run("4"), "4", SPEC, ScriptedClient(["CORRECT"]))
    assert g.score == 1 and g.final and not g.flags


def test_disagreement_flags_for_human_review():
    g = grade_final_answer(make_run("4"), "4", SPEC,
                           ScriptedClient(["INCORRECT: looks wrong"]))
    assert g.score == 1  # parser verdict held provisionally
    assert not g.final
    assert {"parser-judge-disagreement", "needs-human-review"} <= g.flags


def test_judge_outage_degrades_to_parser_only():
    g = grade_final_answer(make_run("5"), "4", SPEC,
                           ScriptedClient([TransportError("down")]))
    assert g.score == 0 and g.method == "parser"
    assert "needs-human-review" in g.flags


def test_missing_extraction_scores_zero_flagged():
    run = make_run(extracted=None, final_text="no boxed answer here")
    g = grade_final_answer(run, "4", SPEC, None)
    assert g.score == 0 and "needs-human-review" in g.flags


def test_failed_run_not_gradeable():
    with pytest.raises(GradingError):
        grade_final_answer(make_run(status="failed-excluded"), "4", SPEC, None)


def test_judge_prompt_carries_no_model_identity():
    seen = {}

    def spy(messages, tools):
        seen["prompt"] = messages[0].content
        return ClientReply("CORRECT")

    grade_final_answer(make_run("4"), "4", SPEC, FnClient(spy), "Compute 2+2.")
    assert "m" != seen["prompt"]  # sanity
    assert "model" not in seen["prompt"].lower()


# ------------------------------------------------------------------ jury

def scripted_jury(initial, revised):
    """Judges reply with their initial score, and with the revised score
    whenever the prompt is a reconciliation round."""
    clients = {}
    for name, s0, s1 in zip("ABC", initial, revised):
        def reply(messages, tools, s0=s0, s1=s1):
            text = messages[0].content
            if "initial evaluations" in text:
                return ClientReply(f"SCORE: {s1}")
            return ClientReply(f"SCORE: {s0} because reasons")
        clients[name] = FnClient(reply)
    return clients


RUBRIC = mark_rubric_human_edited(
    Rubric("p1", (("setup", 2), ("key lemma", 3), ("conclusion", 2)), 7))
JURY = JuryConfig(judges=("A", "B", "C"))


def jury_oracle(initial, revised, threshold=1):
    if max(initial) - min(initial) <= threshold:
        return min(initial)
    return min(revised)


def test_jury_exhaustive_grid_matches_oracle():
    revised_of = lambda t: tuple(sorted(t)[1] for _ in t)  # all move to median
    for triple in itertools.product(range(8), repeat=3):
        revised = revised_of(triple)
        g = jury_grade("proof", RUBRIC, JURY, scripted_jury(triple, revised))
        assert g.score == jury_oracle(triple, revised), triple


def test_jury_threshold_two_variant():
    jury2 = JuryConfig(judges=("A", "B", "C"), agreement_threshold=2)
    for triple in [(0, 1, 2), (3, 5, 5), (0, 3, 7), (7, 7, 7)]:
        revised = (4, 4, 4)
        g = jury_grade("proof", RUBRIC, jury2, scripted_jury(triple, revised))
        assert g.score == jury_oracle(triple, revised, threshold=2)


def test_jury_degrades_to_two_judges_with_flag():
    clients = scripted_jury((5, 6, 0), (5, 6, 0))
    clients["C"] = ScriptedClient([TransportError("down")])
    g = jury_grade("proof", RUBRIC, JURY, clients)
    assert g.score == 5
    assert "needs-human-review" in g.flags


def test_jury_fails_below_two_judges():
    clients = {j: ScriptedClient([TransportError("down")]) for j in "ABC"}
    with pytest.raises(GradingError):
        jury_grade("proof", RUBRIC, JURY, clients)


def test_jury_requires_human_edited_rubric():
    generated = Rubric("p1", (("all", 7),), 7)
    with pytest.raises(GradingError):
        jury_grade("proof", generated, JURY, scripted_jury((1, 1, 1), (1, 1, 1)))
    g = jury_grade("proof", generated, JURY, scripted_jury((1, 1, 1), (1, 1, 1)),
                   rubric_waived=True)
    assert g.score == 1


def test_still_apart_after_reconciliation_is_flagged():
    g = jury_grade("proof", RUBRIC, JURY,
                   scripted_jury((0, 0, 7), (0, 0, 7)))
    assert g.score == 0
    assert "needs-human-review" in g.flags


def test_rubric_generation_and_editing():
    reply = "- setup (2 pts)\n- main argument (4 pts)\n- conclusion (1 pt)"
    r = generate_rubric("p1", ["ref solution"], ScriptedClient([reply]))
    assert r.provenance == "generated"
    assert sum(p for _, p in r.items) == 7
    assert mark_rubric_human_edited(r).provenance == "human-edited"


def test_rubric_points_must_sum_to_scale():
    with pytest.raises(GradingError):
        Rubric("p1", (("a", 3), ("b", 3)), 7)


# ---------------------------------------------------------- broken claim

def judge_echo():
    """Judge that reads the scripted classification out of the response."""
    def reply(messages, tools):
        text = messages[0].content
        marker = text.split("Model response:\n")[1]
        return ClientReply(marker.strip())
    return FnClient(reply)


@pytest.mark.parametrize("base,contra,expected", [
    (0, 0, 0), (0, 1, 0),   # proving the falsehood; no deduction below zero
    (1, 0, 1), (1, 1, 0),   # silent repair, minus contradiction
    (2, 0, 2), (2, 1, 1),   # identified falsehood, sloppy restatement
])
def test_broken_claim_score_matrix(base, contra, expected):
    run = make_run(final_text=f"BASE: {base}\nCONTRADICTS: {contra}")
    v = broken_claim_score(run, "orig", "pert", judge_echo())
    assert v.final == expected
    g = broken_claim_grade(run, "orig", "pert", judge_echo())
    assert g.score == expected and g.max_score == 2


def test_broken_claim_judge_sees_behavior_instruction():
    seen = {}

    def spy(messages, tools):
        seen["prompt"] = messages[0].content
        return ClientReply("BASE: 2\nCONTRADICTS: 0")

    broken_claim_score(make_run(final_text="x"), "o", "p", FnClient(spy))
    assert "do not judge mathematical validity" in seen["prompt"]


def test_unclassifiable_judge_reply_raises():
    run = make_run(final_text="hmm")
    with pytest.raises(GradingError):
        broken_claim_score(run, "o", "p", ScriptedClient(["no idea"]))


def test_classify_binary():
    assert classify_binary("The statement is TRUE.") is True
    assert classify_binary("FALSE, here is a counterexample") is False
    assert classify_binary("it is true and false") is None
    assert classify_binary("cannot decide") is None


def test_binary_split_accuracies():
    def pair(orig_text, pert_text):
        return (make_run(final_text=orig_text), make_run(final_text=pert_text))
    acc = broken_claim_binary([
        pair("TRUE", "FALSE"),    # both right
        pair("FALSE", "FALSE"),   # original wrong
        pair("TRUE", "TRUE"),     # perturbed wrong
        pair("unsure", "FALSE"),  # original unclassifiable -> incorrect + flag
    ])
    assert acc.original_total == 4 and acc.perturbed_total == 4
    assert acc.original_accuracy == pytest.approx(2 / 4)
    assert acc.perturbed_accuracy == pytest.approx(3 / 4)
    assert acc.total_accuracy == pytest.approx(5 / 8)
    assert len(acc.flagged) == 1


# ---------------------------------------------------------- human review

def test_confirm_produces_superseding_final_record():
    g = grade_final_answer(make_run("4"), "4", SPEC,
                           ScriptedClient(["INCORRECT"]))
    confirmed = record_human_review(g, "confirm", note="parser is right")
    assert confirmed.final
    assert confirmed.supersedes == g.grade_id
    assert "needs-human-review" not in confirmed.flags


def test_override_requires_score_and_note():
    g = grade_final_answer(make_run("4"), "4", SPEC, None)
    with pytest.raises(GradingError):
        record_human_review(g, "override", score=0.0)
    o = record_human_review(g, "override", score=0.0, note="misread problem")
    assert o.method == "human-override" and o.score == 0.0
    assert o.supersedes == g.grade_id


def test_grade_record_score_bounds():
    with pytest.raises(GradingError):
        GradeRecord("p", "m", 0, score=8, max_score=7, method="jury")
