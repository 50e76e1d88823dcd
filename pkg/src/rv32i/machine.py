"""Architectural state record and its pure accessors.

A :class:`MachineState` is an immutable value. Memory and the CSR file are
persistent maps, so an update shares structure with the original instead
of copying it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Mapping

from pyrsistent import PMap, pmap

from .bitops import WORD_MOD, addr_mod, is_word, low_bits

NUM_REGS = 32
NUM_CSRS = 4096
ACCESS_WIDTHS = (1, 2, 4)

Regs = tuple  # tuple[int, ...] of length 32

ZERO_REGS: Regs = (0,) * NUM_REGS
EMPTY_MAP: PMap = pmap()


class EventKind(enum.Enum):
    ECALL = "ECall"
    EBREAK = "EBreak"
    ILLEGAL_INSTRUCTION = "IllegalInstruction"


@dataclass(frozen=True)
class HostEvent:
    kind: EventKind
    pc: int

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "pc": hex(self.pc)}


class PrivMode(enum.Enum):
    MACHINE = "Machine"


@dataclass(frozen=True)
class MachineState:
    regs: Regs = ZERO_REGS
    pc: int = 0
    mem: PMap = EMPTY_MAP
    csrs: PMap = EMPTY_MAP
    halt: bool = False
    mode: PrivMode = PrivMode.MACHINE
    trace: tuple = field(default=())

    def invariant_violations(self) -> list[str]:
        """List broken state invariants by component name (empty if valid)."""
        bad = []
        if len(self.regs) != NUM_REGS:
            bad.append("regs.length")
        if self.regs and self.regs[0] != 0:
            bad.append("x0")
        bad.extend(f"x{i}" for i, v in enumerate(self.regs) if not is_word(v))
        if not is_word(self.pc):
            bad.append("pc")
        for a, b in self.mem.items():
            if not is_word(a) or type(b) is not int or not 0 <= b < 256:
                bad.append(f"mem[{a!r}]")
        for a, v in self.csrs.items():
            if type(a) is not int or not 0 <= a < NUM_CSRS or not is_word(v):
                bad.append(f"csr[{a!r}]")
        if type(self.halt) is not bool:
            bad.append("halt")
        if self.mode is not PrivMode.MACHINE:
            bad.append("mode")
        for ev in self.trace:
            if not isinstance(ev, HostEvent) or not is_word(ev.pc):
                bad.append("trace")
                break
        return bad


def fresh_state(pc: int = 0, mem: Mapping[int, int] | None = None) -> MachineState:
    return MachineState(pc=addr_mod(pc), mem=pmap(mem) if mem else EMPTY_MAP)


# -- register file ---------------------------------------------------------

def read_reg(regs: Regs, i: int) -> int:
    return regs[i]


def write_reg(regs: Regs, i: int, v: int) -> Regs:
    """Return ``regs`` with slot ``i`` set to ``v``; writes to x0 are dropped."""
    if i == 0:
        return regs
    return regs[:i] + (v,) + regs[i + 1:]


def st_regs_pc(s: MachineState, regs: Regs, pc: int) -> MachineState:
    return replace(s, regs=regs, pc=pc)


# -- memory ----------------------------------------------------------------

def _check_width(width: int) -> None:
    if width not in ACCESS_WIDTHS:
        raise ValueError(f"access width must be 1, 2 or 4, got {width}")


def mem_load(mem: Mapping[int, int], addr: int, width: int) -> int:
    """Little-endian load of ``width`` bytes; unmapped bytes read as zero."""
    _check_width(width)
    get = mem.get
    v = 0
    for j in range(width):
        v |= get((addr + j) & 0xFFFFFFFF, 0) << (8 * j)
    return v


def mem_store(mem: PMap, addr: int, width: int, v: int) -> PMap:
    """Store the low ``8*width`` bits of ``v`` little-endian at ``addr``."""
    _check_width(width)
    ev = mem.evolver()
    for j in range(width):
        ev[addr_mod(addr + j)] = (v >> (8 * j)) & 0xFF
    return ev.persistent()


# -- CSR file --------------------------------------------------------------

def csr_read(csrs: Mapping[int, int], a: int) -> int:
    return csrs.get(a, 0)


def csr_write(csrs: PMap, a: int, v: int) -> PMap:
    return csrs.set(a, low_bits(32, v))


__all__ = [
    "ACCESS_WIDTHS", "EMPTY_MAP", "EventKind", "HostEvent", "MachineState",
    "NUM_CSRS", "NUM_REGS", "PrivMode", "WORD_MOD", "ZERO_REGS", "csr_read",
    "csr_write", "fresh_state", "mem_load", "mem_store", "read_reg",
    "st_regs_pc", "write_reg",
]
