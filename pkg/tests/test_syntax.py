from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from miniprove.syntax import (FrontEndError, LexError, ParseError, SourceSpan, parse_expression,
                              parse_source, pretty, pretty_unit, render_snippet, tokenize)
from miniprove.syntax import ast as A


def test_tokenize_folds_keywords_and_drops_comments():
    toks = tokenize("For J in S'Range LOOP -- comment\n null;")
    assert [t.kind for t in toks] == ["keyword", "ident", "keyword", "ident", "tick", "ident",
                                      "keyword", "keyword", "semicolon"]
    assert toks[0].value == "for" and toks[0].text == "For"
    assert toks[7].span.line == 2 and toks[7].span.column == 2


def test_tokenize_character_literal_after_tick():
    # S'First is an attribute, ' ' is a character literal
    kinds = [t.kind for t in tokenize("S'First = ' '")]
    assert kinds == ["ident", "tick", "ident", "eq", "charlit"]


def test_lex_error_carries_span():
    with pytest.raises(LexError) as info:
        tokenize("X := 1 $ 2;", "f.adb")
    assert info.value.span.key == ("f.adb", 1, 8)


def test_parse_error_is_front_end_error():
    with pytest.raises(ParseError) as info:
        parse_source("package body P is procedure Q is begin X := ; end Q; end P;", "p.adb")
    assert isinstance(info.value, FrontEndError)
    assert str(info.value).startswith("p.adb:1:")


def test_mixed_logical_operators_need_parentheses():
    with pytest.raises(ParseError):
        parse_expression("A and then B or else C")
    e = parse_expression("A and then (B or else C)")
    assert isinstance(e, A.Binary) and e.op == "and then"


def test_quantifier_and_attributes():
    e = parse_expression("(for all K in S'First .. J => S (K) = ' ')")
    q = A.strip_parens(e)
    assert isinstance(q, A.Quantified) and q.universal
    assert pretty(e) == "(for all K in S'First .. J => S (K) = ' ')"


def test_pretty_unit_round_trip_on_scenario(scenario):
    unit = scenario("s5c_proved").unit
    text = pretty_unit(unit)
    again = parse_source(text, "x.adb")
    assert pretty_unit(again) == text


def test_snippet_shape():
    src = "line one\n    with Post => All_Blanks (S);\n"
    span = SourceSpan("f.ads", 2, 18, 13)
    assert render_snippet(span, src) == [
        "    2 |    with Post => All_Blanks (S);",
        "      |                 ^~~~~~~~~~~~~",
    ]
    assert render_snippet(SourceSpan("f.ads", 1, 3), src, "here")[1] == "      |  ^ here"


def test_snippet_clips_to_end_of_line():
    src = "abc"
    assert render_snippet(SourceSpan("f", 1, 2, 10), src)[1] == "      | ^~"


# ------------------------------------------------------- round-trip property

names = st.sampled_from(["X", "Y", "Count", "S"])
ints = st.integers(min_value=0, max_value=99).map(str)


def _exprs():
    leaf = st.one_of(names, ints, st.just("True"), st.just("S'Length"), st.just("' '"))

    def extend(inner):
        binop = st.sampled_from(["+", "-", "*", "/", "=", "<", "<=", "/=", "and", "or",
                                 "and then", "or else"])
        return st.one_of(
            st.tuples(inner, binop, inner).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
            inner.map(lambda x: f"not ({x})"),
            st.tuples(inner, inner, inner).map(lambda t: f"(if {t[0]} then {t[1]} else {t[2]})"),
            inner.map(lambda x: f"S ({x})"),
            inner.map(lambda x: f"(for some K in 1 .. 3 => {x})"),
        )
    return st.recursive(leaf, extend, max_leaves=8)


@settings(max_examples=150, deadline=None)
@given(_exprs())
def test_pretty_parse_round_trip(text):
    # oracle: derived (printing then parsing must give back an equal tree)
    e = parse_expression(text)
    printed = pretty(e)
    assert parse_expression(printed) == e
    assert pretty(parse_expression(printed)) == printed
