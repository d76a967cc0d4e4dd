"""Schouten bracket, involutive systems and bounded ideal membership."""

import sys
from fractions import Fraction
from pathlib import Path

import pytest
from pydantic import ValidationError
from hypothesis import given, settings
from hypothesis import strategies as st

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from brstbench.errors import InvolutivityViolation, PointNotOnSurface, ShapeError
from brstbench.expressions import parse_expression
from brstbench.polyvectors import (
    IdealSpec,
    InvolutiveSystem,
    PolyvectorSpace,
    check_involutivity,
    check_irreducibility,
    check_rank,
    discover_structure_functions,
    gauge_variation,
    ideal_membership_solve,
    lie_derivative,
    schouten_bracket,
    vector_commutator,
)

SPACE = PolyvectorSpace(["x", "y"])


def p(text: str):
    return parse_expression(text, SPACE.roster)


def circle(**overrides) -> InvolutiveSystem:
    fields = dict(
        coords=["x", "y"],
        V=p("0"),
        R=[p("-y*etab_x + x*etab_y")],
        T=[p("x^2 + y^2 - 1")],
        sigma_points=[{"x": 1, "y": 0}, {"x": Fraction(3, 5), "y": Fraction(4, 5)}],
        name="circle",
    )
    fields.update(overrides)
    return InvolutiveSystem(**fields)


@st.composite
def vectors(draw):
    components = {}
    for name in SPACE.coords:
        total = SPACE.zero()
        for mono in SPACE.coefficient_monomials(2):
            coeff = draw(st.integers(min_value=-2, max_value=2))
            total = total + mono.scale(coeff)
        components[name] = total
    return SPACE.vector(components)


@st.composite
def polyvectors(draw):
    """Homogeneous p-vector with quadratic coefficients, p in 0..2."""
    degree = draw(st.integers(min_value=0, max_value=2))
    total = SPACE.zero()
    for frame in SPACE.frame_monomials(degree):
        for mono in SPACE.coefficient_monomials(2):
            total = total + (mono * frame).scale(draw(st.integers(min_value=-1, max_value=1)))
    return total


def sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


def test_bracket_examples():
    assert schouten_bracket(p("-y*etab_x + x*etab_y"), p("x^2 + y^2 - 1")).is_zero()
    assert schouten_bracket(p("x^2"), p("y")).is_zero()
    assert schouten_bracket(p("x*etab_x"), p("x")) == p("x")
    assert schouten_bracket(p("x"), p("x*etab_x")) == p("-x")


def test_poisson_bracket_of_coordinates():
    P = p("etab_x*etab_y")
    assert schouten_bracket(schouten_bracket(P, p("x")), p("y")) == -1
    assert schouten_bracket(P, P).is_zero()


@settings(max_examples=100, deadline=None)
@given(vectors(), vectors())
def test_bracket_of_vectors_is_their_commutator(u, w):
    assert schouten_bracket(u, w) == vector_commutator(SPACE, u, w)


@settings(max_examples=100, deadline=None)
@given(vectors(), st.sampled_from(["x^2*y", "x - y", "x*y + 1"]))
def test_bracket_with_a_function_is_the_lie_derivative(u, text):
    f = p(text)
    assert schouten_bracket(u, f) == lie_derivative(SPACE, u, f)
    assert schouten_bracket(f, u) == -lie_derivative(SPACE, u, f)


@settings(max_examples=100, deadline=None)
@given(polyvectors(), polyvectors())
def test_schouten_bracket_is_graded_antisymmetric(a, b):
    ea, eb = a.parity, b.parity
    assert schouten_bracket(a, b) == -schouten_bracket(b, a).scale(sign((ea + 1) * (eb + 1)))


@settings(max_examples=100, deadline=None)
@given(polyvectors(), polyvectors(), polyvectors())
def test_schouten_bracket_satisfies_the_jacobi_identity(a, b, c):
    ea, eb, ec = a.parity, b.parity, c.parity
    total = schouten_bracket(a, schouten_bracket(b, c)).scale(sign((ea + 1) * (ec + 1)))
    total = total + schouten_bracket(b, schouten_bracket(c, a)).scale(sign((eb + 1) * (ea + 1)))
    total = total + schouten_bracket(c, schouten_bracket(a, b)).scale(sign((ec + 1) * (eb + 1)))
    assert total.is_zero()


@settings(max_examples=100, deadline=None)
@given(polyvectors(), polyvectors(), polyvectors())
def test_schouten_bracket_is_a_graded_derivation(a, b, c):
    ea, eb = a.parity, b.parity
    expected = schouten_bracket(a, b) * c + (b * schouten_bracket(a, c)).scale(sign((ea + 1) * eb))
    assert schouten_bracket(a, b * c) == expected


def test_circle_is_involutive_and_of_full_rank():
    sys_ = circle()
    assert check_involutivity(sys_).passed
    assert check_rank(sys_).passed
    assert check_irreducibility(sys_).passed


def test_drift_witness_makes_a_scaling_involutive():
    space = PolyvectorSpace(["x"])
    line = InvolutiveSystem(
        coords=["x"],
        V=parse_expression("x*etab_x", space.roster),
        T=[parse_expression("x", space.roster)],
        D=[[parse_expression("1", space.roster)]],
    )
    assert check_involutivity(line).passed
    shifted = InvolutiveSystem(
        coords=["x"],
        V=parse_expression("etab_x", space.roster),
        T=[parse_expression("x", space.roster)],
    )
    report = check_involutivity(shifted)
    assert not report.passed
    assert report.residuals[0].value == "1"


def test_rank_failures():
    with pytest.raises(PointNotOnSurface):
        check_rank(circle(sigma_points=[{"x": 0, "y": 0}]))
    assert not check_rank(circle(sigma_points=[])).passed
    space = PolyvectorSpace(["x"])
    degenerate = InvolutiveSystem(
        coords=["x"],
        V=space.zero(),
        T=[parse_expression("x^2", space.roster)],
        sigma_points=[{"x": 0}],
    )
    report = check_rank(degenerate)
    assert not report.passed
    assert any("rank(dT) = 0" in note for note in report.notes)


def test_sample_points_must_set_every_coordinate():
    with pytest.raises(ShapeError):
        check_rank(circle(sigma_points=[{"x": 1}]))


def test_gauge_variation_of_the_circle():
    delta_x, delta_lam = gauge_variation(circle())
    assert [str(d) for d in delta_x] == ["y*eps_1", "-x*eps_1"]
    assert [str(d) for d in delta_lam] == ["eps_1_d1"]
    free = InvolutiveSystem(coords=["x", "y"], V=p("0"))
    assert gauge_variation(free)[1] == []


def test_membership_witnesses():
    ideal = circle().ideal()
    witness = ideal_membership_solve(p("x^3 + x*y^2 - x"), ideal, 1, SPACE)
    assert witness is not None
    assert witness.f == [p("x")]
    witness = ideal_membership_solve(p("-y*etab_x + x*etab_y"), ideal, 0, SPACE)
    assert witness is not None
    assert witness.g == [p("1")]
    assert ideal_membership_solve(p("1"), ideal, 3, SPACE) is None


def test_discovery_fills_the_gauge_algebra():
    found = discover_structure_functions(
        ["x", "y"], p("0"), [p("etab_x"), p("x*etab_x + etab_y")], [], 1
    )
    assert found.B[0][1][0] == 1
    assert found.B[1][0][0] == -1
    assert found.B[0][1][1].is_zero()
    assert check_involutivity(found).passed


def test_discovery_gives_up_outside_the_ideal():
    with pytest.raises(InvolutivityViolation):
        discover_structure_functions(["x", "y"], p("etab_x"), [], [p("x")], 2)


def test_witness_shapes_are_checked():
    with pytest.raises(ValidationError):
        circle(A=[[[p("0")]], [[p("0")]]])
    with pytest.raises(ValidationError):
        circle(T=[p("etab_x")])


def test_membership_ideal_spec_without_generators():
    assert ideal_membership_solve(p("x"), IdealSpec(), 2, SPACE) is None
