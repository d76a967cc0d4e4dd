"""Parsing and canonical printing of polynomial text."""

import sys
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from brstbench.brst import phase_roster_for
from brstbench.errors import ExpressionSyntaxError, UnknownIdentifier
from brstbench.expressions import format_canonical, parse_expression
from brstbench.polyvectors import PolyvectorSpace

SPACE = PolyvectorSpace(["x", "y"])


def parse(text: str):
    return parse_expression(text, SPACE.roster)


def test_canonical_order_is_degree_then_variable():
    assert format_canonical(parse("2*x*y + x^2 - 1/2")) == "x^2 + 2*x*y - 1/2"
    assert format_canonical(parse("(x + y)*(x - y)")) == "x^2 - y^2"
    assert format_canonical(parse("0")) == "0"


def test_rationals_and_cancellation():
    assert format_canonical(parse("3/2*x - 1/2*x")) == "x"
    assert parse("etab_x*etab_y + etab_y*etab_x").is_zero()
    assert format_canonical(parse("etab_y*etab_x")) == "-etab_x*etab_y"


def test_syntax_error_reports_position():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse("x + * y")
    assert info.value.position == 4


def test_zero_denominator_is_rejected():
    with pytest.raises(ExpressionSyntaxError):
        parse("1/0*x")


def test_unknown_identifier_names_the_culprit():
    with pytest.raises(UnknownIdentifier) as info:
        parse("x + z")
    assert info.value.name == "z"
    assert info.value.position == 4


def test_jet_names_grow_the_roster():
    roster = phase_roster_for(["x"], 0, 0, max_order=1)
    p = parse_expression("etab_x*x_d3", roster)
    assert "x_d3" in p.variables()


@settings(max_examples=100, deadline=None)
@given(st.lists(
    st.tuples(
        st.integers(min_value=-5, max_value=5).filter(bool),
        st.integers(min_value=1, max_value=4),
        st.integers(min_value=0, max_value=3),
        st.integers(min_value=0, max_value=3),
        st.booleans(),
    ),
    max_size=5,
))
def test_printed_text_parses_back(terms):
    p = SPACE.zero()
    for numerator, denominator, ex, ey, framed in terms:
        term = SPACE.x("x") ** ex * SPACE.x("y") ** ey
        if framed:
            term = term * SPACE.frame("y")
        p = p + term.scale(numerator) * parse(f"1/{denominator}")
    assert parse(format_canonical(p)) == p
