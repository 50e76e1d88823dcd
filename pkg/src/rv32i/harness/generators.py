"""Seeded random generators for instructions and machine states.

Values are biased toward the boundaries where RV32I semantics get
interesting (sign bits, all-ones, wraparound) rather than drawn uniformly.
"""

from __future__ import annotations

import random

from pyrsistent import pmap

from ..isa import (ALL_OPS, EVEN_FIELDS, FIELD_BITS, Instr, Op, make,
                   operand_fields)
from ..machine import EventKind, HostEvent, MachineState

BOUNDARY_WORDS = (0, 1, 2, 31, 32, 0x7FF, 0x800, 0xFFF, 0x7FFFFFFF,
                  0x80000000, 0x80000001, 0xFFFFFFFE, 0xFFFFFFFF)


def random_word(rng: random.Random) -> int:
    r = rng.random()
    if r < 0.3:
        return rng.choice(BOUNDARY_WORDS)
    if r < 0.45:
        return rng.randrange(64)
    return rng.getrandbits(32)


def random_field(rng: random.Random, name: str) -> int:
    bits = FIELD_BITS[name]
    if rng.random() < 0.2:
        v = rng.choice((0, 1, (1 << bits) - 1, 1 << (bits - 1), (1 << (bits - 1)) - 1))
    else:
        v = rng.getrandbits(bits)
    if name in EVEN_FIELDS:
        v &= ~1
    return v


def random_instr(rng: random.Random, op: Op | None = None) -> Instr:
    op = op or rng.choice(ALL_OPS)
    return make(op, **{name: random_field(rng, name) for name in operand_fields(op)})


def random_state(rng: random.Random, halt_rate: float = 0.05,
                 instr: Instr | None = None) -> MachineState:
    """A valid state; memory is seeded near register-derived addresses so
    that loads and stores through ``instr`` tend to hit mapped bytes."""
    regs = (0,) + tuple(random_word(rng) for _ in range(31))
    pc = rng.choice((0, 0xFFFFFFFC, 0x1000, rng.getrandbits(32) & ~3, rng.getrandbits(32)))
    mem = {}
    for _ in range(rng.randrange(8)):
        mem[rng.getrandbits(32)] = rng.getrandbits(8)
    if instr is not None and hasattr(instr, "rs1") and hasattr(instr, "imm12"):
        base = (regs[instr.rs1] + instr.imm12 - (instr.imm12 & 0x800) * 2) & 0xFFFFFFFF
        for j in range(-2, 6):
            if rng.random() < 0.8:
                mem[(base + j) & 0xFFFFFFFF] = rng.getrandbits(8)
    csrs = {}
    for _ in range(rng.randrange(4)):
        csrs[rng.getrandbits(12)] = random_word(rng)
    if instr is not None and hasattr(instr, "csr") and rng.random() < 0.7:
        csrs[instr.csr] = random_word(rng)
    trace = tuple(HostEvent(rng.choice(list(EventKind)), rng.getrandbits(32))
                  for _ in range(rng.choice((0, 0, 0, 1, 2))))
    return MachineState(regs=regs, pc=pc, mem=pmap(mem), csrs=pmap(csrs),
                        halt=rng.random() < halt_rate, trace=trace)
