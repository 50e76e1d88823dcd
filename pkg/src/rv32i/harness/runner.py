"""Host layer: image loading, the checked run loop and run reports."""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from pyrsistent import pmap

from ..bitops import addr_mod
from ..execute import trace_run
from ..machine import MachineState
from ..speccheck import check_all

DEFAULT_IMAGE_LIMIT = 1 << 24
FUZZ_FUEL = 1000


class ImageTooLarge(ValueError):
    pass


class ImageFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ProgramImage:
    data: bytes
    base: int = 0
    entry: int = 0


class ExitReason(enum.Enum):
    HALTED = "Halted"
    FUEL_EXHAUSTED = "FuelExhausted"


@dataclass(frozen=True)
class StepViolation:
    step: int
    component: str
    expected: str
    observed: str

    def to_json(self) -> dict:
        return {"step": self.step, "component": self.component,
                "expected": self.expected, "observed": self.observed}


@dataclass
class RunReport:
    final: MachineState
    steps: int
    exit_reason: ExitReason
    checks: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        s = self.final
        return {
            "exit_reason": self.exit_reason.value,
            "steps": self.steps,
            "pc": hex(s.pc),
            "regs": [hex(r) for r in s.regs],
            "halt": s.halt,
            "trace": [ev.to_json() for ev in s.trace],
            "violations": [v.to_json() for v in self.violations],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def summary(self) -> str:
        s = self.final
        lines = [f"exit: {self.exit_reason.value} after {self.steps} step(s), pc={s.pc:#010x}"]
        for row in range(0, 32, 4):
            lines.append("  ".join(f"x{r:<2d}={s.regs[r]:08x}" for r in range(row, row + 4)))
        for ev in s.trace:
            lines.append(f"event: {ev.kind.value} at {ev.pc:#010x}")
        lines.append(f"spec checks: {self.checks}, violations: {len(self.violations)}")
        for v in self.violations[:20]:
            lines.append(f"  step {v.step}: {v.component}: expected {v.expected}, got {v.observed}")
        return "\n".join(lines)


def load_image(img: ProgramImage, limit: int = DEFAULT_IMAGE_LIMIT) -> MachineState:
    if len(img.data) > limit:
        raise ImageTooLarge(f"image is {len(img.data)} bytes, limit is {limit}")
    base = img.base
    mem = pmap({addr_mod(base + k): b for k, b in enumerate(img.data)})
    return MachineState(pc=addr_mod(img.entry), mem=mem)


def run_program(img: ProgramImage, fuel: int, check_specs: bool = False,
                limit: int = DEFAULT_IMAGE_LIMIT) -> RunReport:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    s = load_image(img, limit)
    steps = checks = 0
    violations = []
    for pre, d, post in trace_run(s, fuel):
        steps += 1
        if check_specs:
            checks += 1
            verdict = check_all(pre, d, post)
            violations.extend(StepViolation(steps, v.component, v.expected, v.observed)
                              for v in verdict.violations)
        s = post
    reason = ExitReason.HALTED if s.halt else ExitReason.FUEL_EXHAUSTED
    return RunReport(s, steps, reason, checks, violations)


def fuzz_one(data: bytes) -> RunReport:
    """Fuzzer entry point: run arbitrary bytes as an image at address 0."""
    return run_program(ProgramImage(bytes(data)), FUZZ_FUEL, check_specs=True)


# -- image files -----------------------------------------------------------

_HEX_LINE = re.compile(r"0[xX]([0-9a-fA-F]{1,8})")


def parse_hex_words(text: str) -> bytes:
    """Parse one ``0x``-prefixed 32-bit word per line into little-endian bytes.

    Blank lines and ``#`` comments are ignored.
    """
    out = bytearray()
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        m = _HEX_LINE.fullmatch(line)
        if not m:
            raise ImageFormatError(f"line {n}: expected a 0x-prefixed 32-bit word, got {line!r}")
        out += int(m.group(1), 16).to_bytes(4, "little")
    return bytes(out)


def looks_like_hex_words(raw: bytes) -> bool:
    try:
        text = raw.decode("ascii")
    except UnicodeDecodeError:
        return False
    try:
        return bool(parse_hex_words(text)) or not text.strip()
    except ImageFormatError:
        return False


def read_image_file(path: str | Path, fmt: str = "bin") -> bytes:
    """Read an image; ``fmt="auto"`` picks hex when every line parses as a word."""
    raw = Path(path).read_bytes()
    if fmt == "hex" or (fmt == "auto" and raw and looks_like_hex_words(raw)):
        try:
            text = raw.decode("ascii")
        except UnicodeDecodeError as e:
            raise ImageFormatError(f"hex image is not ASCII text: {e}") from None
        return parse_hex_words(text)
    return raw
