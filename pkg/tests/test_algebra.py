"""Graded polynomial arithmetic and graded derivatives."""

import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from brstbench.algebra import (
    GradingVector,
    SuPoly,
    VariableRoster,
    derive_left,
    derive_right,
    grading_of,
)
from brstbench.errors import InhomogeneousError, RosterMismatch
from brstbench.jets import JetRoster
from brstbench.variables import phase_pairs

ROSTER = VariableRoster.from_gradings([
    ("x", GradingVector()),
    ("y", GradingVector()),
    ("a", GradingVector(parity=1, ghost=1)),
    ("b", GradingVector(parity=1, ghost=-1, mdeg=1)),
])


def v(name: str) -> SuPoly:
    return SuPoly.var(ROSTER, name)


@st.composite
def monomials(draw):
    factors = []
    for name in ("b", "x", "a", "y"):
        top = 1 if name in ("a", "b") else 2
        exponent = draw(st.integers(min_value=0, max_value=top))
        if exponent:
            factors.append((name, exponent))
    coeff = draw(st.integers(min_value=-3, max_value=3).filter(bool))
    return SuPoly.monomial(ROSTER, draw(st.permutations(factors)), coeff)


@st.composite
def polys(draw):
    total = SuPoly(ROSTER)
    for term in draw(st.lists(monomials(), max_size=4)):
        total = total + term
    return total


def test_odd_variables_anticommute():
    assert v("a") * v("b") == -(v("b") * v("a"))
    assert (v("a") * v("a")).is_zero()
    assert (v("x") + v("y")) * (v("x") - v("y")) == v("x") ** 2 - v("y") ** 2


def test_monomial_is_canonical_whatever_the_factor_order():
    left = SuPoly.monomial(ROSTER, [("b", 1), ("a", 1), ("x", 1)])
    right = SuPoly.monomial(ROSTER, [("x", 1), ("a", 1), ("b", 1)])
    assert left == -right


def test_left_and_right_derivatives_of_odd_product():
    ab = v("a") * v("b")
    assert derive_left(ab, "a") == v("b")
    assert derive_left(ab, "b") == -v("a")
    assert derive_right(ab, "b") == v("a")
    assert derive_right(ab, "a") == -v("b")
    assert derive_left(v("x") ** 2 * v("y"), "x") == 2 * v("x") * v("y")


def test_grading_of_ghosts():
    roster = JetRoster([spec for pair in phase_pairs(["x"], 1, 1) for spec in pair])
    c = SuPoly.var(roster, "c_1")
    xi = SuPoly.var(roster, "xi_1")
    assert grading_of(c).as_tuple() == (1, 1, 0, 0)
    assert grading_of(xi).ghost == -2
    assert grading_of(xi).rdeg == 2
    with pytest.raises(InhomogeneousError):
        grading_of(SuPoly.var(roster, "x") + c)


def test_split_by_momentum_degree():
    p = v("x") * v("b") + v("a") + 3
    parts = p.split_by("mdeg")
    assert sorted(parts) == [0, 1]
    assert parts[1] == v("x") * v("b")
    assert parts[0] == v("a") + 3


def test_substitute_keeps_signs():
    p = v("a") * v("b")
    assert p.substitute({"a": v("x") * v("a")}) == v("x") * v("a") * v("b")
    assert (v("x") ** 2 + v("y")).evaluate({"x": Fraction(1, 2), "y": 1}) == Fraction(5, 4)


def test_rosters_refuse_conflicting_declarations():
    other = VariableRoster.from_gradings([("a", GradingVector())])
    with pytest.raises(RosterMismatch):
        ROSTER.merge(other)


@settings(max_examples=100, deadline=None)
@given(polys(), polys(), polys())
def test_product_is_associative_and_distributive(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r


@settings(max_examples=100, deadline=None)
@given(monomials(), monomials())
def test_graded_commutativity(p, q):
    sign = -1 if p.parity and q.parity else 1
    assert p * q == (q * p).scale(sign)


@settings(max_examples=100, deadline=None)
@given(monomials(), polys(), st.sampled_from(["x", "y", "a", "b"]))
def test_left_derivative_is_a_graded_derivation(p, q, name):
    sign = -1 if p.parity and name in ROSTER.odd else 1
    expected = derive_left(p, name) * q + (p * derive_left(q, name)).scale(sign)
    assert derive_left(p * q, name) == expected
