"""Command line front end.

    wprkit run SCRIPT [--json PATH] [--max-level J] [--order grevlex|lex]
                      [--field Q|Fp:p] [--threads N] [--no-timings]
    wprkit explain REPORT.json COMMAND_ID

``wprkit SCRIPT`` is shorthand for ``wprkit run SCRIPT``.  Exit codes: 0 all
results certified or consistent, 1 a violation was witnessed or a request
refused, 2 something stayed inconclusive, 64 parse or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .arith import field_from_spec
from .errors import DomainError, ParseError
from .report import Report, explain, run_script
from .session import SessionParser

EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wprkit", description="Koszul towers, adic completion and weak proregularity certificates.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    r = sub.add_parser("run", help="run a session script")
    r.add_argument("script", help="session file, or - for stdin")
    r.add_argument("--json", metavar="PATH", help="write the JSON report here (- for stdout)")
    r.add_argument("--max-level", type=int, default=4, metavar="J", help="default J / kmax (default 4)")
    r.add_argument("--order", choices=["grevlex", "lex", "grlex"], default="grevlex")
    r.add_argument("--field", default="Q", help="coefficient field for rings declared without one (Q or Fp:p)")
    r.add_argument("--threads", type=int, default=1)
    r.add_argument("--no-timings", action="store_true", help="omit timings from the JSON report")
    r.add_argument("--quiet", action="store_true", help="no human-readable summary")
    e = sub.add_parser("explain", help="narrate the evidence behind one command of a report")
    e.add_argument("report")
    e.add_argument("id")
    return p


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def run_session(path: str, max_level: int = 4, order: str = "grevlex", field: str = "Q", threads: int = 1):
    """Parse and run a script file; returns ``(report, exit code)``."""
    text = _read(path)
    parser = SessionParser(field_from_spec(field), order, max_level)
    script = parser.parse(text)
    report = run_script(script, max_level, threads)
    return report, report.exit_code


def _cmd_run(ns) -> int:
    if ns.max_level < 1:
        print("wprkit: --max-level must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    if ns.threads < 1:
        print("wprkit: --threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        report, code = run_session(ns.script, ns.max_level, ns.order, ns.field, ns.threads)
    except ParseError as e:
        print(f"{ns.script}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as e:
        print(f"wprkit: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"wprkit: {e}", file=sys.stderr)
        return EXIT_USAGE
    text = report.dumps(timings=not ns.no_timings)
    if ns.json == "-":
        print(text)
    elif ns.json:
        with open(ns.json, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if not ns.quiet and ns.json != "-":
        print(report.human())
    return code


def _cmd_explain(ns) -> int:
    try:
        report = Report.loads(_read(ns.report))
    except (OSError, json.JSONDecodeError) as e:
        print(f"wprkit: cannot read report: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        print(explain(report, ns.id))
    except KeyError as e:
        print(f"wprkit: {e.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] not in ("run", "explain", "-h", "--help"):
        argv.insert(0, "run")
    ns = _build_parser().parse_args(argv)
    if ns.cmd == "run":
        return _cmd_run(ns)
    return _cmd_explain(ns)


if __name__ == "__main__":
    sys.exit(main())
