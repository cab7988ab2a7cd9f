"""Command-line driver.

Exit codes: 0 success or property holds, 1 property violated / model
rejected by a check, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import itertools
import sys

from . import __version__
from .csm import check_complete, flatten_state, reachability_graph
from .dot import export_dot
from .errors import ModelError, TcsmError, UnknownErrorState, UnknownState
from .modelio import format_state, parse_state_name, read_model, serialize_model
from .rcsm import (
    DEFAULT_MAX_REGIONS,
    RcsmAutomaton,
    build_rcsm,
    check_region_complete,
    check_zero_time_trap,
    product_rcsm,
)
from .tcsm import TcsmAutomaton, check_timed_complete, product_tcsm
from .verify import SafetyVerdict, shortest_path, check_safety, format_witness

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_ERROR = 2


def _write(path, text, stdout):
    if path in (None, "-"):
        stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _regionize(a, max_regions):
    if isinstance(a, RcsmAutomaton):
        return a
    return build_rcsm(a, max_regions)


def _load_automata(paths):
    automata = []
    for path in paths:
        automata.extend(read_model(path).automata)
    if not automata:
        raise TcsmError(f"no automata in {', '.join(paths)}")
    return automata


def _combine(automata, max_regions) -> RcsmAutomaton:
    """One region automaton from ``automata`` (multiplied if several)."""
    regions = [_regionize(a, max_regions) for a in automata]
    if len(regions) == 1:
        return regions[0]
    return product_rcsm(regions, max_regions=max_regions)


def _load_rcsm(paths, max_regions) -> RcsmAutomaton:
    return _combine(_load_automata(paths), max_regions)


def _matches(state, wanted) -> bool:
    """Exact match, or a plain name occurring among the flattened components."""
    if flatten_state(state) == flatten_state(wanted):
        return True
    return isinstance(wanted, str) and wanted in flatten_state(state)


def cmd_check(args, out):
    model = read_model(args.file)
    problems = 0
    warnings = 0
    rcsms = []
    for a in model.automata:
        if isinstance(a, TcsmAutomaton):
            if a.is_untimed:
                violations = check_complete(a.to_csm())
            else:
                violations = check_timed_complete(a)
            for v in violations:
                where = f" in region {v.region}" if v.region else ""
                out.write(
                    f"{a.name}: not transition-complete at state {format_state(v.state)}{where}; "
                    f"uncovered input {{{','.join(sorted(v.witness))}}}\n"
                )
            problems += len(violations)
            r = build_rcsm(a, args.max_regions)
            for s in a.states:
                if s not in set(r.states):
                    out.write(f"{a.name}: warning: state {format_state(s)} is unreachable\n")
                    warnings += 1
        else:
            r = a
            for rs, witness in check_region_complete(r):
                out.write(
                    f"{a.name}: warning: r.state {format_state(rs)} does not cover input "
                    f"{{{','.join(sorted(witness))}}}\n"
                )
                warnings += 1
        rcsms.append(r)
        problems += _report_traps(r, out)
    if len(rcsms) > 1:
        prod = product_rcsm(rcsms, max_regions=args.max_regions)
        problems += _report_traps(prod, out)
    if problems or (args.strict and warnings):
        out.write(f"FAILED: {problems} error(s), {warnings} warning(s)\n")
        return EXIT_VIOLATION
    out.write(f"OK: {len(model.automata)} automaton(s), {warnings} warning(s)\n")
    return EXIT_OK


def _report_traps(r, out):
    traps = check_zero_time_trap(r)
    for trap in traps:
        members = ", ".join(format_state(rs) for rs in trap)
        out.write(f"{r.name}: zero-time trap: {{{members}}}\n")
    return len(traps)


def cmd_product(args, out):
    model = read_model(args.file)
    if not model.automata:
        raise TcsmError(f"no automata in {args.file}")
    for a in model.automata:
        if not isinstance(a, TcsmAutomaton):
            raise TcsmError(f"{a.name!r} is a region automaton; use 'rproduct'")
    _write(args.output, serialize_model([product_tcsm(model.automata)]), out)
    return EXIT_OK


def cmd_regionize(args, out):
    model = read_model(args.file)
    result = [_regionize(a, args.max_regions) for a in model.automata]
    _write(args.output, serialize_model(result), out)
    return EXIT_OK


def cmd_rproduct(args, out):
    prod = _load_rcsm([args.file1, args.file2], args.max_regions)
    _write(args.output, serialize_model([prod]), out)
    return EXIT_OK


def cmd_reach(args, out):
    automata = _load_automata([args.file])
    wanted = parse_state_name(args.state)
    known = {name for a in automata for s in a.states for name in flatten_state(s)}
    if not set(flatten_state(wanted)) <= known:
        raise UnknownState(f"no automaton in {args.file} has a state {args.state!r}")
    a = _combine(automata, args.max_regions)
    path = shortest_path(a, lambda rs: _matches(rs.state, wanted))
    if path is None:
        out.write(f"unreachable: {args.state} ({len(a.rstates)} r.states explored)\n")
        return EXIT_VIOLATION
    verdict = SafetyVerdict(False, len(a.rstates), path, a)
    out.write(f"reachable: {format_state(verdict.error_rstate)}\n")
    out.write(format_witness(verdict))
    return EXIT_OK


def cmd_verify(args, out):
    system = _load_rcsm([args.system], args.max_regions)
    tests = _load_automata([args.test])
    errors = [parse_state_name(e) for e in args.error]
    if len(tests) == 1:
        declared = set(tests[0].states)
    else:
        declared = set(itertools.product(*(a.states for a in tests)))
    for e, text in zip(errors, args.error):
        if e not in declared:
            raise UnknownErrorState(f"{text!r} is not a state of the testing automaton")
    test = _combine(tests, args.max_regions)
    # error states the testing automaton cannot reach on its own are trivially unreachable
    present = [e for e in errors if e in set(test.states)]
    verdict = check_safety(system, test, present, args.max_regions)
    if verdict.holds:
        out.write(
            f"HOLDS: error state(s) {', '.join(args.error)} unreachable "
            f"({verdict.explored} r.states explored)\n"
        )
        return EXIT_OK
    out.write(
        f"VIOLATED: reached {format_state(verdict.error_rstate)} in {len(verdict.witness)} step(s) "
        f"({verdict.explored} r.states explored)\n"
    )
    report = format_witness(verdict)
    if args.witness:
        _write(args.witness, report, out)
    else:
        out.write(report)
    return EXIT_VIOLATION


def cmd_dot(args, out):
    model = read_model(args.file)
    wanted = [parse_state_name(e) for e in args.error]
    chunks = []
    for a in model.automata:
        if isinstance(a, TcsmAutomaton) and a.is_untimed:
            graph = reachability_graph(a.to_csm())
            nodes = graph.states
        else:
            graph = _regionize(a, args.max_regions)
            nodes = graph.rstates
        highlight = [
            n for n in nodes
            if any(_matches(getattr(n, "state", n), w) for w in wanted)
        ]
        chunks.append(export_dot(graph, highlight))
    _write(args.output, "".join(chunks), out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tcsm", description="Timed concurrent state machine model checker."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def budget(p):
        p.add_argument("--max-regions", type=int, default=DEFAULT_MAX_REGIONS, metavar="N",
                       help="abort when more than N r.states are built")

    p = sub.add_parser("check", help="well-formedness, transition-completeness and zero-time traps")
    p.add_argument("file")
    p.add_argument("--strict", action="store_true", help="treat warnings as failures")
    budget(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("product", help="TCSM product of all automata in FILE")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("regionize", help="build the region automaton of each automaton")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    budget(p)
    p.set_defaults(func=cmd_regionize)

    p = sub.add_parser("rproduct", help="product of region automata")
    p.add_argument("file1")
    p.add_argument("file2")
    p.add_argument("-o", "--output")
    budget(p)
    p.set_defaults(func=cmd_rproduct)

    p = sub.add_parser("reach", help="is some r.state of the given state reachable?")
    p.add_argument("file")
    p.add_argument("--state", required=True)
    budget(p)
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("verify", help="safety check against a testing automaton")
    p.add_argument("--system", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--error", required=True, action="append", help="error state of the test (repeatable)")
    p.add_argument("--witness", help="write the counterexample here instead of stdout")
    budget(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dot", help="Graphviz rendering")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.add_argument("--error", action="append", default=[], help="fill matching states red")
    budget(p)
    p.set_defaults(func=cmd_dot)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return args.func(args, stdout)
    except ModelError as exc:
        stderr.write(f"error: {exc.render()}\n")
    except TcsmError as exc:
        stderr.write(f"error: {type(exc).__name__}: {exc}\n")
    except OSError as exc:
        stderr.write(f"error: {exc}\n")
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
