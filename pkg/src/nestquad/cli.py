"""Command line interface.

Exit codes: 0 success, 1 invalid arguments or malformed input, 2 a chain
stopped at a failed extension (the completed prefix is still written) or
there were too few moments, 3 verification failed.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .document import DocumentError, RuleDocument, verify_document
from .estimator import NestedQuadrature
from .extension import ExtensionSchedule, InsufficientMomentsError, auto_extend, extend
from .moments import DistributionSpec, MomentError, MomentSequence, dump_moments, load_moments
from .numerics import CertificateViolation, build_nested_rule
from .ratpoly import Interval

log = logging.getLogger("nestquad")

EXIT_OK, EXIT_USAGE, EXIT_CHAIN, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _protect_bounds(argv: list[str]) -> list[str]:
    # argparse reads "-inf" as an option; a leading space hides the dash
    out = list(argv)
    for i, tok in enumerate(out):
        if tok == "--interval":
            for j in (i + 1, i + 2):
                if j < len(out) and out[j].startswith("-"):
                    out[j] = " " + out[j]
    return out


def _add_source(p: argparse.ArgumentParser, required: bool = True):
    src = p.add_mutually_exclusive_group(required=required)
    src.add_argument("--dist", help="built-in distribution: uniform:a,b | beta:alpha,beta | gauss")
    src.add_argument("--moments-file", type=Path, help="JSON moments file")
    p.add_argument("--interval", nargs=2, metavar=("A", "B"), help="integration domain (accepts -inf/inf)")


def _add_output(p: argparse.ArgumentParser, precision: int | None = 50):
    p.add_argument("--precision", type=int, default=precision,
                   help=f"decimal digits of nodes and weights (default {precision or 'from the document'})")
    p.add_argument("--out", type=Path, help="output path (default stdout)")
    p.add_argument("--csv", action="store_true", help="write the top-level node table as CSV instead of JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nestquad", description="Nested quadrature rules from moment sequences.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="generate a nested rule")
    _add_source(g)
    sched = g.add_mutually_exclusive_group(required=True)
    sched.add_argument("--schedule", help="comma separated p values, e.g. 1,2,4,6,12")
    sched.add_argument("--gkp", action="store_true", help="p = n+1 from a single midpoint node")
    g.add_argument("--iterations", type=int, default=4, help="steps for --gkp (default 4)")
    g.add_argument("--description", default="")
    _add_output(g)

    e = sub.add_parser("extend", help="add one level to an existing rule document")
    e.add_argument("document", type=Path)
    grp = e.add_mutually_exclusive_group(required=True)
    grp.add_argument("--p", type=int, help="number of nodes to add")
    grp.add_argument("--candidates", help="comma separated p values tried in order")
    _add_output(e, precision=None)

    v = sub.add_parser("verify", help="re-verify a rule document")
    v.add_argument("document", type=Path)

    m = sub.add_parser("moments", help="write a moments file")
    _add_source(m)
    m.add_argument("--count", type=int, required=True, help="highest moment index")
    m.add_argument("--out", type=Path)
    return parser


def _write(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _parse_interval(args) -> Interval | None:
    if not args.interval:
        return None
    try:
        return Interval.parse(*args.interval)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad --interval: {exc}") from None


def _moments_from_args(args, max_index: int) -> tuple[MomentSequence, str]:
    domain = _parse_interval(args)
    if args.dist:
        spec = DistributionSpec.parse(args.dist)
        seq = MomentSequence.from_distribution(spec, max_index)
        if domain is not None:
            seq = MomentSequence(domain, seq.values, source=seq.source)
        return seq, str(spec)
    if not args.moments_file.exists():
        raise UsageError(f"no such file: {args.moments_file}")
    return load_moments(args.moments_file, domain), "custom"


def _emit(doc: RuleDocument, args):
    _write(doc.to_csv() if args.csv else doc.dumps(), args.out)


def cmd_generate(args) -> int:
    if args.precision < 11:
        raise UsageError("--precision must be at least 11")
    if args.gkp:
        if args.iterations < 1:
            raise UsageError("--iterations must be >= 1")
        schedule = None
    else:
        try:
            schedule = ExtensionSchedule([int(s) for s in args.schedule.split(",")])
        except ValueError as exc:
            raise UsageError(f"invalid --schedule: {exc}") from None
    moments, name = _moments_from_args(args, 100)
    est = NestedQuadrature(schedule=schedule, iterations=args.iterations, precision=args.precision,
                           domain=moments.domain, max_index=moments.max_index)
    # built-in families are regenerated at whatever length the schedule needs
    est.fit(args.dist if args.dist else moments)
    if not est.n_levels_:
        print(f"chain produced no formula: {est.failure_}", file=sys.stderr)
        return EXIT_CHAIN
    doc = RuleDocument.from_estimator(est, name, args.description)
    _emit(doc, args)
    if est.failure_ is not None:
        print(f"chain stopped after {est.n_levels_} level(s): {est.failure_}", file=sys.stderr)
        return EXIT_CHAIN
    return EXIT_OK


def cmd_extend(args) -> int:
    doc = _load_document(args.document)
    moments = doc.moment_sequence()
    F = doc.levels[-1].node_polynomial
    if args.p is not None:
        if args.p < 1:
            raise UsageError("--p must be >= 1")
        need = F.degree + 2 * args.p
        if need > moments.max_index and doc.distribution != "custom":
            moments = doc.moment_sequence(need)
        outcome = extend(F, args.p, moments, doc.domain)
    else:
        try:
            cands = [int(c) for c in args.candidates.split(",")]
        except ValueError:
            raise UsageError(f"invalid --candidates {args.candidates!r}") from None
        if not cands or min(cands) < 1:
            raise UsageError("candidates must be >= 1")
        if doc.distribution != "custom":
            moments = doc.moment_sequence(max(moments.max_index, F.degree + 2 * max(cands)))
        _, outcome = auto_extend(F, moments, doc.domain, cands)
    if not outcome.success:
        print(f"extension failed: {outcome}", file=sys.stderr)
        return EXIT_CHAIN
    polys = [lv.node_polynomial for lv in doc.levels] + [F * outcome.polynomial]
    precision = args.precision or doc.precision
    if precision < 11:
        raise UsageError("--precision must be at least 11")
    rule = build_nested_rule(polys, moments, doc.domain, precision)
    schedule = doc.schedule + [outcome.p] if isinstance(doc.schedule, list) else doc.schedule
    new = RuleDocument.from_rule(
        rule,
        domain=doc.domain,
        precision=precision,
        added=[lv.p for lv in doc.levels] + [outcome.p],
        guaranteed=[lv.guaranteed_degree for lv in doc.levels] + [F.degree + 2 * outcome.p - 1],
        distribution=doc.distribution,
        moments=moments,
        schedule=schedule,
        description=doc.description,
    )
    _emit(new, args)
    return EXIT_OK


def _load_document(path: Path) -> RuleDocument:
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    return RuleDocument.loads(text)


def cmd_verify(args) -> int:
    doc = _load_document(args.document)
    try:
        report = verify_document(doc)
    except CertificateViolation as exc:
        print(f"FAIL certificate: {exc}")
        return EXIT_VERIFY
    print(report)
    if report.ok:
        return EXIT_OK
    name, msg = report.first_failure
    print(f"verification failed: {name}: {msg}", file=sys.stderr)
    return EXIT_VERIFY


def cmd_moments(args) -> int:
    if args.count < 0:
        raise UsageError("--count must be >= 0")
    seq, _ = _moments_from_args(args, args.count)
    if len(seq) <= args.count:
        raise UsageError(f"file has only {len(seq)} moments")
    _write(dump_moments(seq.truncate(args.count)), args.out)
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "extend": cmd_extend, "verify": cmd_verify, "moments": cmd_moments}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(_protect_bounds(argv))
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, MomentError, DocumentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InsufficientMomentsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
