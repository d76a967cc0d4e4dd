"""Weak Poisson structures, observables and the Lagrange-structure cocycle."""

import itertools
import sys
from pathlib import Path

import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from brstbench.brst import phase
from brstbench.documents import bundled_document
from brstbench.errors import InvolutivityViolation
from brstbench.expressions import parse_expression
from brstbench.polyvectors import InvolutiveSystem, PolyvectorSpace
from brstbench.weak_poisson import (
    Observable,
    WeakHamiltonianStructure,
    check_poisson_bivector,
    check_weak_hamiltonian,
    derived_bracket,
    derived_observable_bracket,
    discover_weak_witnesses,
    hamiltonian_vector_field,
    jacobi_sum,
    lagrange_cocycle_from_P,
    relative_cocycle_check,
    weak_jacobi_residual,
)

GOLDEN = Path(__file__).parent / "golden"
PLANE = PolyvectorSpace(["x", "y"])


def p(text: str):
    return parse_expression(text, PLANE.roster)


def planar() -> WeakHamiltonianStructure:
    _, whs = bundled_document("planar_poisson").build_system()
    assert whs is not None
    return whs


def test_planar_structure_is_poisson():
    whs = planar()
    assert check_weak_hamiltonian(whs).passed
    assert check_poisson_bivector(whs.P).passed


def test_hamiltonian_drift_preserves_the_bivector():
    P = p("etab_x*etab_y")
    V = hamiltonian_vector_field(P, p("x^2 + y^2"))
    assert V == p("2*y*etab_x - 2*x*etab_y")
    core = InvolutiveSystem(coords=["x", "y"], V=V)
    assert check_weak_hamiltonian(WeakHamiltonianStructure(core=core, P=P)).passed


def test_constraint_must_be_compatible_with_the_bivector():
    core = InvolutiveSystem(coords=["x", "y"], V=p("0"), T=[p("x")])
    report = check_weak_hamiltonian(WeakHamiltonianStructure(core=core, P=p("etab_x*etab_y")))
    assert not report.passed
    assert report.residuals[0].name == "[T1,P]"
    with pytest.raises(InvolutivityViolation):
        discover_weak_witnesses(core, p("etab_x*etab_y"), 2)


def test_bracket_of_coordinates_is_frozen():
    whs = planar()
    x = Observable.build(whs.core, p("x"))
    y = Observable.build(whs.core, p("y"))
    bracket = derived_observable_bracket(whs, x, y)
    golden = (GOLDEN / "planar_bracket.txt").read_text().strip()
    assert bracket.representative == p(golden)
    one = Observable.build(whs.core, p("1"))
    assert derived_observable_bracket(whs, x, one).representative.is_zero()


def test_jacobi_identity_on_a_constant_bivector():
    whs = planar()
    a, b, c = p("x"), p("y"), p("x*y + y^2")
    assert jacobi_sum(whs.P, a, b, c).is_zero()
    observables = [Observable.build(whs.core, f) for f in (a, b, c)]
    assert weak_jacobi_residual(whs, *observables).passed


def test_jacobi_identity_on_every_cubic_monomial():
    P = p("etab_x*etab_y")
    monomials = PLANE.coefficient_monomials(3)
    for a, b, c in itertools.combinations_with_replacement(monomials, 3):
        assert jacobi_sum(P, a, b, c).is_zero(), (a, b, c)


def test_derived_bracket_is_antisymmetric_on_functions():
    P = p("x*etab_x*etab_y")
    f, g = p("x^2"), p("x*y")
    assert derived_bracket(P, f, g) == -derived_bracket(P, g, f)


def test_observables_need_ideal_valued_variations():
    circle = bundled_document("circle").build_system()[0]
    radius = Observable.build(circle, p("x^2 + y^2"))
    assert radius.witness == [[p("0")]]
    with pytest.raises(InvolutivityViolation):
        Observable.build(circle, p("x"))


def test_lagrange_cocycle():
    circle = bundled_document("circle").build_system()[0]
    trivial = WeakHamiltonianStructure(core=circle, P=PLANE.zero())
    assert lagrange_cocycle_from_P(trivial).is_zero()
    whs = planar()
    L = lagrange_cocycle_from_P(whs)
    assert not L.is_zero()
    assert relative_cocycle_check(whs.core, L).passed


def test_relative_cocycle_rejects_junk():
    circle = bundled_document("circle").build_system()[0]
    ph = phase(circle)
    junk = ph.v("xb_x") * ph.v("etab_x")
    assert not relative_cocycle_check(circle, junk).passed
    assert relative_cocycle_check(circle, ph.zero()).passed


def test_bracket_outside_the_observables_is_refused():
    space = PolyvectorSpace(["x", "y", "z"])
    core = InvolutiveSystem(
        coords=["x", "y", "z"], V=space.zero(), R=[parse_expression("etab_x", space.roster)]
    )
    whs = WeakHamiltonianStructure(core=core, P=parse_expression("x*etab_y*etab_z", space.roster))
    y = Observable.build(core, parse_expression("y", space.roster), witness=[[]])
    z = Observable.build(core, parse_expression("z", space.roster), witness=[[]])
    with pytest.raises(InvolutivityViolation):
        derived_observable_bracket(whs, y, z)
