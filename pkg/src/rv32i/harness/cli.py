"""Command-line front end.

Exit codes: 0 success, 1 spec violations or failing cases, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .corpus import coverage, directed_corpus, run_case
from .runner import (DEFAULT_IMAGE_LIMIT, ImageFormatError, ImageTooLarge,
                     ProgramImage, fuzz_one, read_image_file, run_program)

EXIT_OK, EXIT_VIOLATIONS, EXIT_USAGE = 0, 1, 2


def _hex(text: str) -> int:
    try:
        v = int(text, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a hex number: {text!r}") from None
    if not 0 <= v < 2 ** 32:
        raise argparse.ArgumentTypeError(f"{text} is not a 32-bit address")
    return v


def _fuel(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("fuel must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rv32i", description="Pure RV32I interpreter")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="execute a program image")
    r.add_argument("file")
    r.add_argument("--base", type=_hex, default=0, help="load address (hex)")
    r.add_argument("--entry", type=_hex, default=None, help="initial pc (hex, default: base)")
    r.add_argument("--fuel", type=_fuel, default=1_000_000, help="maximum steps")
    r.add_argument("--check-specs", action="store_true",
                   help="check frame, postcondition and global invariants on every step")
    r.add_argument("--json", action="store_true", help="print the JSON report")
    r.add_argument("--format", choices=("bin", "hex", "auto"), default="bin",
                   help="raw binary (default), one 0x-prefixed word per line, or guess")

    c = sub.add_parser("corpus", help="run the directed instruction corpus")
    c.add_argument("-v", "--verbose", action="store_true", help="list every case")
    c.add_argument("--json", action="store_true")

    f = sub.add_parser("fuzz-one", help="run one fuzzer input (base 0, entry 0, fuel 1000)")
    f.add_argument("file")
    f.add_argument("--json", action="store_true")
    return p


def _cmd_run(args) -> int:
    try:
        data = read_image_file(args.file, args.format)
    except OSError as e:
        print(f"rv32i: cannot read {args.file}: {e.strerror}", file=sys.stderr)
        return EXIT_USAGE
    except ImageFormatError as e:
        print(f"rv32i: {e}", file=sys.stderr)
        return EXIT_USAGE
    entry = args.base if args.entry is None else args.entry
    try:
        rep = run_program(ProgramImage(data, args.base, entry), args.fuel,
                          args.check_specs, DEFAULT_IMAGE_LIMIT)
    except ImageTooLarge as e:
        print(f"rv32i: {e}", file=sys.stderr)
        return EXIT_USAGE
    print(rep.dumps() if args.json else rep.summary())
    return EXIT_OK if rep.ok else EXIT_VIOLATIONS


def _cmd_corpus(args) -> int:
    cases = directed_corpus()
    results = [run_case(c) for c in cases]
    failed = [r for r in results if not r.passed]
    counts = coverage(cases)
    if args.json:
        print(json.dumps({
            "cases": len(results),
            "passed": len(results) - len(failed),
            "coverage": {op.value: n for op, n in counts.items()},
            "failures": [{"name": r.name, "problems": list(r.problems)} for r in failed],
        }, indent=2))
    else:
        for r in results:
            if args.verbose or not r.passed:
                print(f"{'PASS' if r.passed else 'FAIL'} {r.name}")
                for msg in r.problems:
                    print(f"    {msg}")
        thin = sorted(op.value for op, n in counts.items() if n < 5)
        print(f"{len(results) - len(failed)}/{len(results)} cases passed; "
              f"min cases per instruction: {min(counts.values())}"
              + (f"; under-covered: {', '.join(thin)}" if thin else ""))
    return EXIT_OK if not failed else EXIT_VIOLATIONS


def _cmd_fuzz_one(args) -> int:
    try:
        with open(args.file, "rb") as fh:
            data = fh.read()
    except OSError as e:
        print(f"rv32i: cannot read {args.file}: {e.strerror}", file=sys.stderr)
        return EXIT_USAGE
    rep = fuzz_one(data)
    print(rep.dumps() if args.json else rep.summary())
    return EXIT_OK if rep.ok else EXIT_VIOLATIONS


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "corpus": _cmd_corpus, "fuzz-one": _cmd_fuzz_one}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
