"""Command-line front end: ``workbench check|build-charge|solve|superfield``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage
and parse errors.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence, Tuple

from pydantic import ValidationError

from .brst import (
    build_classical_charge,
    charge_to_text,
    check_noether_identity,
    extend_charge_hpt,
    master_residual,
    phase,
)
from .cohomology import SolveRequest, dimension_table, solve_stabilizer_classes
from .config import get_config, validate_config
from .documents import SystemDocument, bundled_document, bundled_names, load_document
from .errors import (
    AnsatzExhausted,
    InvolutivityViolation,
    PointNotOnSurface,
    WorkbenchError,
)
from .jets import equals_mod_totald
from .log import configure_logging
from .polyvectors import InvolutiveSystem, check_involutivity, check_rank
from .reports import Report, Residual, timed
from .superfield import charge_from_generators, check_generating_masters, generators_from_structure
from .weak_poisson import WeakHamiltonianStructure, check_weak_hamiltonian

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

Outcome = Tuple[Report, Optional[str]]


class UsageError(WorkbenchError):
    """The command line names something that does not exist."""


def resolve_document(source: str) -> SystemDocument:
    """A file path, or the name of a bundled system such as ``circle``."""
    path = Path(source)
    if path.is_file():
        return load_document(path)
    if source in bundled_names():
        return bundled_document(source)
    raise UsageError(
        f"No system file '{source}' (bundled systems: {', '.join(bundled_names())})"
    )


def _build(
    doc: SystemDocument, report: Report
) -> Tuple[Optional[InvolutiveSystem], Optional[WeakHamiltonianStructure]]:
    try:
        return doc.build_system()
    except InvolutivityViolation as exc:
        report.mark_not_found(str(exc))
        return None, None


def cmd_check(doc: SystemDocument) -> Outcome:
    report = Report(command="check")
    with timed(report):
        system, whs = _build(doc, report)
        if system is None:
            return report, None
        report.merge(check_involutivity(system))
        try:
            report.merge(check_rank(system))
        except PointNotOnSurface as exc:
            report.fail(f"rank: {exc}")
        report.merge(check_noether_identity(system))
        if whs is not None:
            report.merge(check_weak_hamiltonian(whs))
    return report, None


def cmd_build_charge(
    doc: SystemDocument, target_rdeg: Optional[int] = None, degree_bound: Optional[int] = None
) -> Outcome:
    report = Report(command="build-charge")
    if target_rdeg is None:
        target_rdeg = doc.target_rdeg
    target = get_config().target_rdeg if target_rdeg is None else target_rdeg
    bound = degree_bound if degree_bound is not None else doc.bound
    with timed(report):
        system, _ = _build(doc, report)
        if system is None:
            return report, None
        try:
            charge = build_classical_charge(system)
        except InvolutivityViolation as exc:
            report.fail(str(exc))
            return report, None
        try:
            charge = extend_charge_hpt(charge, target, bound)
        except AnsatzExhausted as exc:
            report.fail(str(exc))
            if exc.residual is not None:
                report.residuals.append(
                    Residual(name="{Omega,Omega}", value=exc.residual, rdeg=exc.rdeg)
                )
            return report, charge_to_text(charge)
        report.merge(master_residual(charge, target))
    return report, charge_to_text(charge)


def cmd_solve(
    doc: SystemDocument, p: Optional[int] = None, degree_bound: Optional[int] = None
) -> Outcome:
    bound = degree_bound if degree_bound is not None else doc.bound
    report = Report(command="solve")
    with timed(report):
        system, _ = _build(doc, report)
        if system is None:
            return report, None
        if p is None:
            table = dimension_table(system, range(system.n + 1), [bound])
            report.merge(table)
            return report, None
        basis = solve_stabilizer_classes(SolveRequest(system=system, p=p, degree_bound=bound))
        report.merge(basis.to_report("solve"))
        if p == 0 and basis.dimension == 0:
            report.notes.append("conserved quantities: constants only")
    return report, None


def cmd_superfield(doc: SystemDocument) -> Outcome:
    report = Report(command="superfield")
    with timed(report):
        system, whs = _build(doc, report)
        if system is None:
            return report, None
        pair = generators_from_structure(system, whs)
        masters = check_generating_masters(pair)
        report.merge(masters)
        if not masters.passed:
            return report, None
        charge = charge_from_generators(pair, verify=False)
        expected = build_classical_charge(system, verify=False).integrand
        if whs is not None:
            ph = phase(system)
            expected = expected + ph.tau(ph.lift(whs.P))
        same = equals_mod_totald(charge.integrand, expected)
        report.notes.append(f"equal mod D: {'true' if same else 'false'}")
        if not same:
            report.passed = False
    return report, charge_to_text(charge)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="workbench",
        description="Exact checks of BRST charges and bounded BRST cohomology",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Log at DEBUG level")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        command = sub.add_parser(name, help=help_text)
        command.add_argument("file", help="System document (JSON) or bundled system name")
        command.add_argument("--json", action="store_true", help="Emit the report as JSON")
        return command

    add("check", "Structure relations, rank conditions and Noether identities")
    build = add("build-charge", "Classical charge extended by perturbation theory")
    build.add_argument("--target-rdeg", type=int, default=None, help="Highest rdeg to solve")
    build.add_argument("--degree-bound", type=int, default=None, help="Ansatz degree bound")
    build.add_argument("--out", type=Path, default=None, help="Write the charge file here")
    solve = add("solve", "Bounded stabilizer cohomology")
    solve.add_argument("--p", type=int, default=None, help="Polyvector degree (all if omitted)")
    solve.add_argument("--degree-bound", type=int, default=None, help="Coefficient degree bound")
    field = add("superfield", "Charge from the generating functions (S, Gamma)")
    field.add_argument("--out", type=Path, default=None, help="Write the charge file here")
    return parser


def run(args: argparse.Namespace) -> Outcome:
    doc = resolve_document(args.file)
    if args.command == "check":
        return cmd_check(doc)
    if args.command == "build-charge":
        return cmd_build_charge(doc, args.target_rdeg, args.degree_bound)
    if args.command == "solve":
        return cmd_solve(doc, args.p, args.degree_bound)
    return cmd_superfield(doc)


def emit(report: Report, as_json: bool) -> None:
    if as_json:
        print(report.model_dump_json(indent=2))
    else:
        print(report.to_text(with_timing=True))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the workbench command; returns the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_USAGE

    config = get_config()
    if args.verbose:
        config.log_level = "DEBUG"
    try:
        validate_config(config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    configure_logging(config)

    try:
        report, charge_text = run(args)
    except ValidationError as exc:
        print(f"error: invalid system document: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (WorkbenchError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    emit(report, args.json)
    out = getattr(args, "out", None)
    if charge_text is not None:
        if out is not None:
            out.write_text(charge_text)
            logger.info("charge written to %s", out)
        elif not args.json:
            print(charge_text, end="")
    return EXIT_PASS if report.passed else EXIT_FAIL

