from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mathbench.answers import (
    ConstraintViolation,
    MalformedAnswer,
    ParseError,
    check_answer,
    extract_final_answer,
    parse,
)
from mathbench.answers import tree as t
from mathbench.answers.canonical import canonical
from mathbench.answers.evaluate import NonEvaluable, evaluate, numeric_probe
from mathbench.registry import AnswerSpec


# ---------------------------------------------------------------- parsing

@pytest.mark.parametrize("text,expected", [
    ("42", t.integer(42)),
    ("-7", t.neg(t.integer(7))),
    ("3.25", t.rational(13, 4)),
    ("\\pi", t.const("pi")),
])
def test_parse_atoms(text, expected):
    assert parse(text) == expected


def test_parse_frac_is_product_with_inverse():
    e = parse(r"\frac{1}{2}")
    assert canonical(e) == t.rational(1, 2)


def test_decimals_are_exact():
    assert canonical(parse("0.5")) == canonical(parse("1/2"))
    assert canonical(parse("0.1")) != canonical(parse("0.1000000001"))


def test_implicit_multiplication():
    assert canonical(parse("2x")) == canonical(parse(r"2 \cdot x"))
    assert canonical(parse("(1+x)(1-x)")) == canonical(parse(r"(1-x) \times (1+x)"))


def test_multi_letter_names_split_into_symbols():
    assert canonical(parse("ab")) == canonical(parse("a b"))


def test_exponent_conventions():
    assert canonical(parse("x^{10}")) == canonical(parse("(x^5)^2"))
    # an unbraced exponent binds one token; a digit run is one token
    assert canonical(parse("2^34")) == canonical(parse("2^{34}"))
    assert canonical(parse("x^2y")) == canonical(parse("(x^2) * y"))


def test_nth_root():
    assert check_answer(r"\sqrt[3]{8}", "2").outcome == "equivalent"


def test_layout_commands_ignored():
    assert parse(r"\left( 1, 2 \right)") == parse("(1, 2)")
    assert parse(r"\text{abc}") == parse("abc")


def test_unknown_command_is_malformed():
    with pytest.raises(MalformedAnswer):
        parse(r"\operatorname{lcm}(4, 6)")


def test_unbalanced_input_is_malformed():
    for bad in ("(1, 2", "1 +", r"\frac{1}", "", "   ", "2**3"):
        with pytest.raises(MalformedAnswer):
            parse(bad)


def test_zero_denominator_is_malformed():
    with pytest.raises(MalformedAnswer):
        parse(r"\frac{1}{0}")


def test_deep_nesting_is_rejected_not_crash():
    with pytest.raises(MalformedAnswer):
        parse("(" * 100 + "1" + ")" * 100)


# ------------------------------------------------------ answer constraints

AIME = AnswerSpec("integer-range", range=(0, 999))
KANGAROO = AnswerSpec("multiple-choice", choices=("A", "B", "C", "D", "E"))


def test_integer_range_enforced_exactly():
    assert parse("999", AIME) == t.integer(999)
    assert parse("0", AIME) == t.integer(0)
    with pytest.raises(ConstraintViolation):
        parse("1000", AIME)
    with pytest.raises(ConstraintViolation):
        parse("-1", AIME)
    with pytest.raises(ConstraintViolation):
        parse("1/2", AIME)


def test_integer_range_accepts_unreduced_forms():
    assert parse(r"\frac{10}{2}", AIME) == t.integer(5)


def test_choice_labels_enforced_exactly():
    assert parse("c", KANGAROO) == t.symbol("C")
    assert parse("$B$", KANGAROO) == t.symbol("B")
    with pytest.raises(ConstraintViolation):
        parse("F", KANGAROO)
    with pytest.raises(ConstraintViolation):
        parse("AB", KANGAROO)


# ------------------------------------------------------------- extraction

def test_last_boxed_group_wins():
    text = r"First guess \boxed{4}. Actually, the answer is \boxed{7}."
    ext = extract_final_answer(text)
    assert ext.candidate == "7"


def test_boxed_with_nested_braces():
    ext = extract_final_answer(r"\boxed{\frac{1}{2}}")
    assert ext.candidate == r"\frac{1}{2}"


def test_boxed_with_escaped_set_braces():
    ext = extract_final_answer(r"\boxed{\{1, 2\}}")
    assert ext.candidate == r"\{1, 2\}"


def test_no_boxed_returns_none():
    assert extract_final_answer("the answer is 7") is None
    assert extract_final_answer(r"\boxed{unclosed") is None


# ------------------------------------------------------------ equivalence

@pytest.mark.parametrize("a,b", [
    ("1/2", "0.5"),
    (r"\frac{\sqrt{2}}{2}", r"1/\sqrt{2}"),
    (r"\sqrt{8}", r"2\sqrt{2}"),
    ("x^2 - 1", "(x-1)(x+1)"),
    (r"2\pi", r"\pi + \pi"),
    ("(1, 2, 3)", "(1, 2, 3)"),
    (r"\{1, 2\}", r"\{2, 1\}"),
    (r"\{\frac{1}{2}, 3\}", r"\{3, 0.5\}"),
    (r"\binom{5}{2}", "10"),
    ("6!", "720"),
])
def test_equivalent_pairs(a, b):
    assert check_answer(a, b).outcome == "equivalent"


@pytest.mark.parametrize("a,b", [
    ("204", "205"),
    ("x^2", "x^3"),
    ("(1, 2)", "(2, 1)"),
    (r"\{1, 2\}", r"\{1, 3\}"),
    ("(1, 2)", "(1, 2, 3)"),
    (r"\sqrt{2}", "1.414"),
])
def test_different_pairs(a, b):
    assert check_answer(a, b).outcome == "different"


def test_malformed_candidate_verdict():
    v = check_answer(r"\foo{1}", "2")
    assert v.outcome == "malformed"


def test_numeric_probe_verdicts_carry_seed():
    v = check_answer("x(x+1)", "x^2 + x", seed=5)
    assert v.outcome == "equivalent"
    if v.evidence == "numeric-probe":
        assert v.probe_seed == 5


def test_probe_distinguishes_polynomials():
    a, b = parse("x^2"), parse("x^3")
    assert numeric_probe(a, b) is False
    assert numeric_probe(a, parse("x*x")) is True


def test_probe_rejects_unpaired_domains():
    with pytest.raises(NonEvaluable):
        numeric_probe(parse("log(x - 100)"), parse("x"))


def test_evaluate_domain_errors():
    from mathbench.answers.evaluate import EvalError
    with pytest.raises(EvalError):
        evaluate(parse(r"\sqrt{x}"), {"x": -1.0})
    with pytest.raises(EvalError):
        evaluate(parse("log(x)"), {"x": 0.0})


# --------------------------------------------------- canonical properties

@pytest.mark.parametrize("text,expected", [
    ("2/4", "1/2"),
    (r"\sqrt{4}", "2"),
    (r"\sqrt{8}", r"2\sqrt{2}"),
    (r"\sqrt{12}", r"2\sqrt{3}"),
    ("x^1", "x"),
    ("x^0", "1"),
    ("0 + x", "x"),
    ("1 * x", "x"),
])
def test_canonical_simplifications(text, expected):
    assert canonical(parse(text)) == canonical(parse(expected))


_leaf = st.one_of(
    st.integers(-50, 50).map(t.integer),
    st.tuples(st.integers(-30, 30), st.integers(1, 12)).map(
        lambda p: t.rational(p[0], p[1])),
    st.sampled_from("xyz").map(t.symbol),
    st.sampled_from(["pi", "e"]).map(t.const),
)


def _compose(children):
    return st.one_of(
        st.lists(children, min_size=2, max_size=3).map(lambda a: t.add(*a)),
        st.lists(children, min_size=2, max_size=3).map(lambda a: t.mul(*a)),
        children.map(t.neg),
        st.tuples(children, st.integers(-3, 3).map(t.integer)).map(
            lambda p: t.pow_(*p)),
    )


_exprs = st.recursive(_leaf, _compose, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(_exprs)
def test_canonical_is_idempotent(e):
    c = canonical(e)
    assert canonical(c) == c


@settings(max_examples=300, deadline=None)
@given(_exprs, st.integers(0, 10_000))
def test_canonical_preserves_value(e, seed):
    c = canonical(e)
    try:
        assert numeric_probe(e, c, seed=seed) is True
    except NonEvaluable:
        pass  # e.g. 0^-1 after substitution; nothing to compare


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="0123456789+-*/^(){}, x\\abcdefpqrst.!", max_size=40))
def test_parser_total_over_junk(s):
    try:
        parse(s)
    except ParseError:
        pass


def test_commutativity_via_canonical():
    assert canonical(parse("a + b + c")) == canonical(parse("c + a + b"))
    assert canonical(parse("a * b * c")) == canonical(parse("b * c * a"))
