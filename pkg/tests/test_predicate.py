import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import random_context, random_predicate
from mlnstore import errors
from mlnstore.predicate import (
    KEYWORDS,
    ActorName,
    And,
    Attr,
    Compare,
    Degree,
    LiteralBool,
    NodeContext,
    Not,
    Num,
    Or,
    Str,
    evaluate,
    parse,
    to_text,
)

# -- parsing


def test_parse_conjunction():
    got = parse('degree >= 2 and color == "red"')
    assert got == And(Compare(Degree(), ">=", Num(2.0)), Compare(Attr("color"), "==", Str("red")))


def test_parse_literal():
    assert parse("true") == LiteralBool(True)
    assert parse("false") == LiteralBool(False)


def test_incomplete_comparison_offset():
    with pytest.raises(errors.PredicateSyntaxError) as info:
        parse("degree >")
    assert info.value.position == 9


def test_precedence_and_associativity():
    a, b, c = (Compare(Attr(x), "==", Num(1.0)) for x in "abc")
    assert parse("a == 1 or b == 1 and c == 1") == Or(a, And(b, c))
    assert parse("not a == 1 and b == 1") == And(Not(a), b)
    assert parse("a == 1 or b == 1 or c == 1") == Or(Or(a, b), c)
    assert parse("(a == 1 or b == 1) and c == 1") == And(Or(a, b), c)


@pytest.mark.parametrize(
    "text, offset",
    [
        ("", 1),
        ("degree", 7),
        ("degree >= 2 and", 16),
        ("(degree > 1", 12),
        ("degree > 1 > 2", 12),
        ("color == \"red", 10),
        ("degree ~ 1", 8),
        ("and", 1),
        ("degree > 1)", 11),
    ],
)
def test_syntax_error_offsets(text, offset):
    with pytest.raises(errors.PredicateSyntaxError) as info:
        parse(text)
    assert info.value.position == offset
    assert f"offset {offset}" in str(info.value)


def test_unknown_keyword():
    with pytest.raises(errors.UnknownKeyword) as info:
        parse("degree > 1 andd size < 3")
    assert info.value.position == 12
    with pytest.raises(errors.UnknownKeyword):
        parse("(degree > 1 xor size < 3)")


def test_keywords_are_case_sensitive():
    assert parse("AND == 1") == Compare(Attr("AND"), "==", Num(1.0))
    with pytest.raises(errors.UnknownKeyword):
        parse("degree > 1 AND degree < 3")


def test_string_escapes():
    assert parse(r'name == "a\"b\\c"') == Compare(Attr("name"), "==", Str('a"b\\c'))


# -- evaluation


def ctx(actor="x", degree=0, **attrs):
    return NodeContext(actor, degree, attrs)


@pytest.mark.parametrize(
    "text, context, expected",
    [
        ("degree >= 2", ctx(degree=2), True),
        ('color == "red"', ctx(), False),
        ('not (degree < 1 or actor == "a")', ctx("b", 3), True),
        ('not (degree < 1 or actor == "a")', ctx("a", 3), False),
        ('color != "red"', ctx(), False),
        ('color != "red"', ctx(color=1.0), True),
        ("size > 2", ctx(size="big"), False),
        ('actor < "b"', ctx("a"), True),
        ('"B" < "a"', ctx(), True),
        ("1 < degree", ctx(degree=2), True),
        ("size == 2", ctx(size=2.0), True),
        ("-1.5 < size", ctx(size=-1.0), True),
    ],
)
def test_evaluate(text, context, expected):
    assert evaluate(parse(text), context) is expected


def _truth_table_oracle(actor, degree):
    # not (degree < 1 or actor == "a"), evaluated by hand
    left = degree < 1
    right = actor == "a"
    return not (left or right)


def test_truth_table():
    p = parse('not (degree < 1 or actor == "a")')
    for actor in ("a", "b"):
        for degree in (0, 1, 5):
            assert evaluate(p, ctx(actor, degree)) == _truth_table_oracle(actor, degree)


# -- generated predicates

names = st.from_regex(r"[a-z_][a-z0-9_]{0,6}", fullmatch=True).filter(lambda s: s not in KEYWORDS)
terms = st.one_of(
    st.just(Degree()),
    st.just(ActorName()),
    names.map(Attr),
    st.floats(allow_nan=False, width=64).map(Num),
    st.text(max_size=6).map(Str),
)
ops = st.sampled_from(["==", "!=", "<", "<=", ">", ">="])
leaves = st.one_of(st.builds(Compare, terms, ops, terms), st.booleans().map(LiteralBool))
predicates = st.recursive(
    leaves,
    lambda inner: st.one_of(
        inner.map(Not), st.builds(And, inner, inner), st.builds(Or, inner, inner)
    ),
    max_leaves=12,
)
contexts = st.builds(
    NodeContext,
    st.text(max_size=4),
    st.integers(0, 50),
    st.dictionaries(names, st.one_of(st.floats(allow_nan=False), st.text(max_size=4)), max_size=4),
)


@given(predicates)
def test_round_trip(p):
    text = to_text(p)
    assert parse(text) == p
    assert to_text(parse(text)) == text


@given(predicates, predicates, contexts)
def test_de_morgan(p, q, c):
    assert evaluate(Not(And(p, q)), c) == evaluate(Or(Not(p), Not(q)), c)
    assert evaluate(Not(Or(p, q)), c) == evaluate(And(Not(p), Not(q)), c)


def test_evaluation_is_total():
    rng = random.Random(7)
    for _ in range(10_000):
        assert isinstance(evaluate(random_predicate(rng), random_context(rng)), bool)
