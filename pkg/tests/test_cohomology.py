"""Bounded solvers for observables, stabilizer classes and the Massey square."""

import sys
from pathlib import Path

import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from brstbench.cohomology import (
    SolveRequest,
    dimension_table,
    ideal_subspace,
    massey_square_check,
    solve_conservation_laws,
    solve_lagrange_structures,
    solve_observables,
    solve_stabilizer_classes,
    solve_symmetries,
)
from brstbench.documents import bundled_document
from brstbench.errors import InvalidDegree
from brstbench.expressions import format_canonical, parse_expression
from brstbench.polyvectors import InvolutiveSystem, PolyvectorSpace, schouten_bracket

PLANE = PolyvectorSpace(["x1", "x2"])


def circle() -> InvolutiveSystem:
    return bundled_document("circle").build_system()[0]


def dims(sys_: InvolutiveSystem, p: int, d: int):
    basis = solve_stabilizer_classes(SolveRequest(system=sys_, p=p, degree_bound=d))
    return basis.raw_dimension, basis.dimension


def test_circle_has_no_nontrivial_classes():
    sys_ = circle()
    assert dims(sys_, 0, 1) == (1, 0)
    assert dims(sys_, 0, 2) == (2, 0)
    assert dims(sys_, 1, 1) == (1, 0)
    assert dims(sys_, 2, 1) == (3, 0)
    assert dims(sys_, 2, 2) == (6, 0)
    assert solve_conservation_laws(sys_, 4).dimension == 0
    assert solve_symmetries(sys_, 1).dimension == 0


def test_table_rows_follow_the_request_order():
    report = dimension_table(circle(), [0, 2], [1, 2])
    rows = [(r.p, r.degree_bound, r.raw_dimension, r.dimension) for r in report.dimensions]
    assert rows == [(0, 1, 1, 0), (0, 2, 2, 0), (2, 1, 3, 0), (2, 2, 6, 0)]


def test_free_plane_keeps_every_bivector():
    free = InvolutiveSystem(coords=["x1", "x2"], V=PLANE.zero())
    basis = solve_lagrange_structures(free, 1)
    assert (basis.raw_dimension, basis.dimension) == (3, 3)
    assert basis.modded_out == []


def test_constants_are_modded_out_at_degree_zero():
    basis = solve_conservation_laws(circle(), 2)
    assert "constants" in basis.modded_out
    assert "the ideal J" in basis.modded_out
    report = basis.to_report("solve")
    assert report.notes[-1] == "lower bound at coefficient degree 2"


def test_degree_out_of_range():
    with pytest.raises(InvalidDegree):
        solve_stabilizer_classes(SolveRequest(system=circle(), p=3, degree_bound=1))
    with pytest.raises(InvalidDegree):
        solve_stabilizer_classes(SolveRequest(system=circle(), p=-1, degree_bound=1))


def test_observables_on_a_line():
    line = InvolutiveSystem(
        coords=["x1", "x2"], V=PLANE.zero(), T=[parse_expression("x1", PLANE.roster)]
    )
    basis = solve_observables(line, 2)
    assert basis.raw_dimension == 6
    assert basis.ideal_dimension == 3
    assert basis.dimension == 3
    free = InvolutiveSystem(coords=["x1", "x2"], V=PLANE.zero())
    assert solve_observables(free, 1).dimension == 3


def test_observable_witnesses_hold():
    sys_ = circle()
    basis = solve_observables(sys_, 2)
    assert basis.dimension == 1
    for representative, witness in zip(basis.representatives, basis.witnesses):
        for k, r in enumerate(sys_.R):
            expected = sys_.space.zero()
            for a, t in enumerate(sys_.T):
                expected = expected + witness[k][a] * t
            assert schouten_bracket(r, representative) == expected


def test_circle_observables_are_constants():
    basis = solve_observables(circle(), 4)
    assert basis.dimension == 1
    assert [format_canonical(r) for r in basis.representatives] == ["1"]


def test_ideal_subspace_respects_the_bound():
    T = [parse_expression("x1", PLANE.roster)]
    spanning = ideal_subspace(PLANE, T, [], 0, 1)
    assert len(spanning) == 1
    assert spanning[0] == parse_expression("x1", PLANE.roster)


def test_massey_square_in_four_dimensions():
    space = PolyvectorSpace(["x1", "x2", "x3", "x4"])
    P = parse_expression("etab_x1*etab_x2 + x1*etab_x3*etab_x4", space.roster)
    assert schouten_bracket(P, P) == parse_expression(
        "-2*etab_x2*etab_x3*etab_x4", space.roster
    )
    sys_ = InvolutiveSystem(coords=space.coords, V=space.zero())
    report = massey_square_check(sys_, P, 2)
    assert not report.passed
    assert report.not_found
    assert report.residuals[0].name == "[P,P]"


def test_massey_square_vanishes_in_the_plane():
    free = InvolutiveSystem(coords=["x1", "x2"], V=PLANE.zero())
    P = parse_expression("x1^2*etab_x1*etab_x2", PLANE.roster)
    assert massey_square_check(free, P, 1).passed
