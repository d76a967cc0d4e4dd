"""Antibracket, generating functions and the superfield charge."""

import sys
from functools import lru_cache
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from brstbench.algebra import SuPoly
from brstbench.brst import build_classical_charge, phase, phase_roster_for
from brstbench.documents import bundled_document
from brstbench.errors import MasterViolation, ShapeError
from brstbench.expressions import parse_expression
from brstbench.jets import LocalFunctional, equals_mod_totald, functional_poisson_bracket
from brstbench.polyvectors import InvolutiveSystem, PolyvectorSpace
from brstbench.superfield import (
    AntiSpace,
    GeneratingPair,
    antibracket,
    charge_from_generators,
    check_generating_masters,
    generators_from_structure,
    multibracket,
    split_by_momentum,
    superfield_integral,
    weak_poisson_bracket,
    weak_poisson_jacobi,
)
from brstbench.weak_poisson import derived_bracket


def load(name: str):
    return bundled_document(name).build_system()


GHOSTED = AntiSpace(["x", "y"], 1, 1)
FIELDS = ["x", "y", "etab_x", "etab_y", "eta_1", "xib_1", "c_1", "lamb_1"]
PLANAR_ARGS = ["x", "y", "eta_x", "eta_y"]
PLANAR_PHASE = phase_roster_for(["x", "y"], 0, 0)


def random_products(names, roster):
    @st.composite
    def build(draw):
        total = SuPoly(roster)
        for _ in range(draw(st.integers(min_value=1, max_value=3))):
            factors = draw(st.lists(st.sampled_from(names), min_size=1, max_size=2))
            coeff = draw(st.integers(min_value=-2, max_value=2))
            total = total + SuPoly.monomial(roster, [(f, 1) for f in factors], coeff)
        return total

    return build()


@lru_cache(maxsize=None)
def planar_charge():
    core, whs = load("planar_poisson")
    return charge_from_generators(generators_from_structure(core, whs))


@st.composite
def homogeneous_planar_args(draw):
    parts = draw(random_products(PLANAR_ARGS, PLANAR_PHASE)).split_by("parity")
    if not parts:
        return SuPoly(PLANAR_PHASE)
    return parts[draw(st.sampled_from(sorted(parts)))]


def test_canonical_antibrackets():
    space = AntiSpace(["x", "y"], 0, 0)
    v = space.var
    assert antibracket(v("etab_x"), v("x")) == 1
    assert antibracket(v("x"), v("etab_x")) == -1
    assert antibracket(v("x"), v("y")).is_zero()
    assert antibracket(v("etab_x"), v("y")).is_zero()


def test_circle_generators_satisfy_their_masters():
    circle, _ = load("circle")
    pair = generators_from_structure(circle)
    report = check_generating_masters(pair)
    assert report.passed
    assert pair.Gamma.is_zero()


def test_superfield_charge_reproduces_the_classical_charge():
    circle, _ = load("circle")
    charge = charge_from_generators(generators_from_structure(circle))
    classical = build_classical_charge(circle)
    assert equals_mod_totald(charge.integrand, classical.integrand)


def test_bivector_adds_a_quadratic_momentum_term():
    core, whs = load("planar_poisson")
    charge = charge_from_generators(generators_from_structure(core, whs))
    quadratic = charge.by_momentum().get(2)
    assert quadratic is not None and not quadratic.is_zero()
    ph = phase(core)
    expected = build_classical_charge(core).integrand + ph.tau(ph.lift(whs.P))
    assert equals_mod_totald(charge.integrand, expected)


def test_violated_masters_are_reported():
    affine, _ = load("affine_gauge")
    bare = InvolutiveSystem(coords=affine.coords, V=affine.V, R=affine.R)
    pair = generators_from_structure(bare)
    report = check_generating_masters(pair)
    assert not report.passed
    assert report.residuals[0].name == "(S,S)"
    with pytest.raises(MasterViolation):
        charge_from_generators(pair)
    assert check_generating_masters(generators_from_structure(affine)).passed


def test_empty_system_has_zero_charge():
    empty = InvolutiveSystem(coords=[], V=PolyvectorSpace([]).zero())
    charge = charge_from_generators(generators_from_structure(empty))
    assert charge.integrand.is_zero()


def test_generating_functions_must_have_the_right_gradings():
    space = AntiSpace(["x"], 0, 0)
    with pytest.raises(ValidationError):
        GeneratingPair(S=space.var("x"), Gamma=space.zero(), coords=["x"])
    with pytest.raises(ValidationError):
        GeneratingPair(S=space.zero(), Gamma=space.var("x"), coords=["x"])


def test_multibrackets_of_the_planar_charge():
    core, whs = load("planar_poisson")
    charge = charge_from_generators(generators_from_structure(core, whs))
    ph = phase(core)
    x, eta_y = ph.v("x"), ph.v("eta_y")
    assert multibracket(charge, 2, [x, eta_y]).integrand == 1
    assert multibracket(charge, 3, [x, x, eta_y]).integrand.is_zero()
    with pytest.raises(ShapeError):
        multibracket(charge, 2, [x])
    with pytest.raises(ShapeError):
        multibracket(charge, 1, [ph.v("xb_x")])


def test_weak_poisson_bracket_agrees_with_the_derived_bracket():
    core, whs = load("planar_poisson")
    pair = generators_from_structure(core, whs)
    space = pair.space
    x, y = space.var("x"), space.var("y")
    assert weak_poisson_bracket(pair.S, x, y) == -1
    assert derived_bracket(whs.P, core.space.x("x"), core.space.x("y")) == -1
    assert weak_poisson_jacobi(pair.S, x, y, x).is_zero()


def test_superfield_integral_of_a_bivector():
    space = AntiSpace(["x", "y"], 0, 0)
    P = space.var("etab_x") * space.var("etab_y")
    shifted = superfield_integral(P, space)
    assert shifted == parse_expression("xb_x*etab_y - xb_y*etab_x", space.phase)
    assert list(split_by_momentum(P)) == [2]


@settings(max_examples=100, deadline=None)
@given(random_products(FIELDS, GHOSTED.roster), random_products(FIELDS, GHOSTED.roster))
def test_superfield_integral_maps_antibrackets_to_poisson_brackets(F, G):
    def h(f):
        return superfield_integral(f, GHOSTED)

    bracket = functional_poisson_bracket(h(F), h(G)).integrand
    assert equals_mod_totald(bracket, h(antibracket(F, G, GHOSTED.pairs)))


@settings(max_examples=100, deadline=None)
@given(homogeneous_planar_args(), homogeneous_planar_args())
def test_binary_multibracket_is_graded_symmetric(a, b):
    charge = planar_charge()
    forward = multibracket(charge, 2, [a, b])
    backward = multibracket(charge, 2, [b, a])
    sign = -1 if a.parity * b.parity else 1
    assert equals_mod_totald(forward.integrand, backward.integrand.scale(sign))


@settings(max_examples=100, deadline=None)
@given(homogeneous_planar_args(), homogeneous_planar_args())
def test_differential_is_a_derivation_of_the_binary_multibracket(a, b):
    charge = planar_charge()

    def d(f):
        return multibracket(charge, 1, [f])

    def bracket(f, g):
        return multibracket(charge, 2, [f, g])

    sign = -1 if a.parity else 1
    total = d(bracket(a, b)).integrand + bracket(d(a), b).integrand
    total = total + bracket(a, d(b)).integrand.scale(sign)
    assert equals_mod_totald(total, SuPoly(total.roster))


def test_multibracket_takes_functionals_and_integrands_alike():
    charge = planar_charge()
    x = SuPoly.var(PLANAR_PHASE, "x")
    eta_y = SuPoly.var(PLANAR_PHASE, "eta_y")
    from_functional = multibracket(charge, 2, [LocalFunctional(integrand=x), eta_y])
    assert from_functional.integrand == multibracket(charge, 2, [x, eta_y]).integrand == 1
