"""Pure instruction handlers, the ``step`` dispatcher and the run loop.

Handlers that do not set the pc themselves leave it alone; ``step`` wraps
them in :func:`pc_advance4`. Nothing here mutates its arguments.
"""

from __future__ import annotations

import enum
from dataclasses import replace
from typing import Iterator

from .bitops import addr_mod, jalr_target, low_bits, sext_from, to_signed32
from .isa import (BType, CsrImm, CsrReg, DecodeResult, Fence, IType, Illegal,
                  Instr, JType, Op, RType, ShiftImm, SType, System, UType,
                  decode)
from .machine import (EventKind, HostEvent, MachineState, csr_read, csr_write,
                      mem_load, mem_store, read_reg, st_regs_pc, write_reg)

MASK32 = 0xFFFFFFFF


class AluOp(enum.Enum):
    ADD = "add"
    SUB = "sub"
    SLL = "sll"
    SLT = "slt"
    SLTU = "sltu"
    XOR = "xor"
    SRL = "srl"
    SRA = "sra"
    OR = "or"
    AND = "and"


def alu(op: AluOp, a: int, b: int) -> int:
    """Result of ``op`` on resolved operands, folded to a word."""
    if op is AluOp.ADD:
        r = a + b
    elif op is AluOp.SUB:
        r = a - b
    elif op is AluOp.SLL:
        r = a << (b & 31)
    elif op is AluOp.SLT:
        r = int(to_signed32(a) < to_signed32(b))
    elif op is AluOp.SLTU:
        r = int((a & MASK32) < (b & MASK32))
    elif op is AluOp.XOR:
        r = a ^ b
    elif op is AluOp.SRL:
        r = (a & MASK32) >> (b & 31)
    elif op is AluOp.SRA:
        # Python's >> on ints already floors toward negative infinity
        r = to_signed32(a & MASK32) >> (b & 31)
    elif op is AluOp.OR:
        r = a | b
    elif op is AluOp.AND:
        r = a & b
    else:  # pragma: no cover
        raise ValueError(op)
    return r & MASK32


ALU_OF_OP = {
    Op.ADD: AluOp.ADD, Op.SUB: AluOp.SUB, Op.SLL: AluOp.SLL, Op.SLT: AluOp.SLT,
    Op.SLTU: AluOp.SLTU, Op.XOR: AluOp.XOR, Op.SRL: AluOp.SRL, Op.SRA: AluOp.SRA,
    Op.OR: AluOp.OR, Op.AND: AluOp.AND,
    Op.ADDI: AluOp.ADD, Op.SLTI: AluOp.SLT, Op.SLTIU: AluOp.SLTU,
    Op.XORI: AluOp.XOR, Op.ORI: AluOp.OR, Op.ANDI: AluOp.AND,
    Op.SLLI: AluOp.SLL, Op.SRLI: AluOp.SRL, Op.SRAI: AluOp.SRA,
}


# -- handlers --------------------------------------------------------------

def exec_jalr(s: MachineState, rd: int, rs1: int, off: int) -> MachineState:
    link = low_bits(32, s.pc + 4)
    summed = read_reg(s.regs, rs1) + sext_from(12, off)
    return st_regs_pc(s, write_reg(s.regs, rd, link), jalr_target(summed))


def pc_advance4(s: MachineState) -> MachineState:
    return replace(s, pc=(s.pc + 4) & MASK32)


def exec_alu(s: MachineState, op: AluOp, rd: int, a: int, b: int) -> MachineState:
    if rd == 0:
        return s
    return replace(s, regs=write_reg(s.regs, rd, alu(op, a, b)))


def exec_lui(s: MachineState, rd: int, imm20: int) -> MachineState:
    if rd == 0:
        return s
    return replace(s, regs=write_reg(s.regs, rd, (imm20 << 12) & MASK32))


def exec_auipc(s: MachineState, rd: int, imm20: int) -> MachineState:
    if rd == 0:
        return s
    return replace(s, regs=write_reg(s.regs, rd, (s.pc + (imm20 << 12)) & MASK32))


def exec_jal(s: MachineState, rd: int, imm21: int) -> MachineState:
    target = (s.pc + sext_from(21, imm21)) & MASK32
    return st_regs_pc(s, write_reg(s.regs, rd, (s.pc + 4) & MASK32), target)


def branch_taken(op: Op, x: int, y: int) -> bool:
    if op is Op.BEQ:
        return x == y
    if op is Op.BNE:
        return x != y
    if op is Op.BLT:
        return to_signed32(x) < to_signed32(y)
    if op is Op.BGE:
        return to_signed32(x) >= to_signed32(y)
    if op is Op.BLTU:
        return x < y
    if op is Op.BGEU:
        return x >= y
    raise ValueError(f"not a branch: {op}")


def exec_branch(s: MachineState, op: Op, rs1: int, rs2: int, imm13: int) -> MachineState:
    if branch_taken(op, read_reg(s.regs, rs1), read_reg(s.regs, rs2)):
        return replace(s, pc=(s.pc + sext_from(13, imm13)) & MASK32)
    return replace(s, pc=(s.pc + 4) & MASK32)


_LOAD_SHAPE = {
    Op.LB: (1, True), Op.LH: (2, True), Op.LW: (4, False),
    Op.LBU: (1, False), Op.LHU: (2, False),
}
_STORE_WIDTH = {Op.SB: 1, Op.SH: 2, Op.SW: 4}


def effective_address(s: MachineState, rs1: int, imm12: int) -> int:
    return addr_mod(read_reg(s.regs, rs1) + sext_from(12, imm12))


def exec_load(s: MachineState, op: Op, rd: int, rs1: int, imm12: int) -> MachineState:
    width, signed = _LOAD_SHAPE[op]
    if rd == 0:
        return s
    v = mem_load(s.mem, effective_address(s, rs1, imm12), width)
    if signed:
        v = sext_from(8 * width, v) & MASK32
    return replace(s, regs=write_reg(s.regs, rd, v))


def exec_store(s: MachineState, op: Op, rs1: int, rs2: int, imm12: int) -> MachineState:
    addr = effective_address(s, rs1, imm12)
    return replace(s, mem=mem_store(s.mem, addr, _STORE_WIDTH[op], read_reg(s.regs, rs2)))


_EVENT_OF = {Op.ECALL: EventKind.ECALL, Op.EBREAK: EventKind.EBREAK}


def exec_system(s: MachineState, op: Op) -> MachineState:
    """ECALL/EBREAK: halt and log a host event; the pc stays on the call."""
    return replace(s, halt=True, trace=s.trace + (HostEvent(_EVENT_OF[op], s.pc),))


def exec_illegal(s: MachineState) -> MachineState:
    return replace(s, halt=True,
                   trace=s.trace + (HostEvent(EventKind.ILLEGAL_INSTRUCTION, s.pc),))


def exec_fence(s: MachineState, *_operands) -> MachineState:
    return s


def exec_fence_i(s: MachineState, *_operands) -> MachineState:
    return s


def exec_csr(s: MachineState, op: Op, rd: int, src: int, csr: int,
             writes: bool = True) -> MachineState:
    """Atomic CSR read-modify-write.

    ``src`` is the resolved source (register value or zero-extended
    immediate); ``writes`` is False for CSRRS/CSRRC variants whose source
    operand is x0 / zero, which must leave the CSR untouched.
    """
    old = csr_read(s.csrs, csr)
    csrs = s.csrs
    if writes:
        if op is Op.CSRRW or op is Op.CSRRWI:
            new = src
        elif op is Op.CSRRS or op is Op.CSRRSI:
            new = old | src
        else:
            new = old & ~src & MASK32
        csrs = csr_write(csrs, csr, new)
    return replace(s, regs=write_reg(s.regs, rd, old), csrs=csrs)


# -- dispatch --------------------------------------------------------------

def step(s: MachineState, i: Instr) -> MachineState:
    if s.halt:
        return s
    regs = s.regs
    if isinstance(i, RType):
        return pc_advance4(exec_alu(s, ALU_OF_OP[i.op], i.rd, regs[i.rs1], regs[i.rs2]))
    if isinstance(i, IType):
        op = i.op
        if op is Op.JALR:
            return exec_jalr(s, i.rd, i.rs1, i.imm12)
        if op is Op.FENCE_I:
            return pc_advance4(exec_fence_i(s, i.rd, i.rs1, i.imm12))
        if op in _LOAD_SHAPE:
            return pc_advance4(exec_load(s, op, i.rd, i.rs1, i.imm12))
        return pc_advance4(exec_alu(s, ALU_OF_OP[op], i.rd, regs[i.rs1],
                                    sext_from(12, i.imm12)))
    if isinstance(i, ShiftImm):
        return pc_advance4(exec_alu(s, ALU_OF_OP[i.op], i.rd, regs[i.rs1], i.shamt))
    if isinstance(i, BType):
        return exec_branch(s, i.op, i.rs1, i.rs2, i.imm13)
    if isinstance(i, SType):
        return pc_advance4(exec_store(s, i.op, i.rs1, i.rs2, i.imm12))
    if isinstance(i, UType):
        if i.op is Op.LUI:
            return pc_advance4(exec_lui(s, i.rd, i.imm20))
        return pc_advance4(exec_auipc(s, i.rd, i.imm20))
    if isinstance(i, JType):
        return exec_jal(s, i.rd, i.imm21)
    if isinstance(i, CsrReg):
        writes = i.op is Op.CSRRW or i.rs1 != 0
        return pc_advance4(exec_csr(s, i.op, i.rd, regs[i.rs1], i.csr, writes))
    if isinstance(i, CsrImm):
        writes = i.op is Op.CSRRWI or i.zimm != 0
        return pc_advance4(exec_csr(s, i.op, i.rd, i.zimm, i.csr, writes))
    if isinstance(i, System):
        return exec_system(s, i.op)
    if isinstance(i, Fence):
        return pc_advance4(exec_fence(s, i.fm, i.pred, i.succ, i.rd, i.rs1))
    raise TypeError(f"not an instruction: {i!r}")


def step_decoded(s: MachineState, d: DecodeResult) -> MachineState:
    """Like `step`, but also accepts a failed decode (which halts)."""
    if isinstance(d, Illegal):
        return s if s.halt else exec_illegal(s)
    return step(s, d)


def fetch(s: MachineState) -> DecodeResult:
    return decode(mem_load(s.mem, s.pc, 4))


def trace_run(s: MachineState, fuel: int) -> Iterator[tuple[MachineState, DecodeResult, MachineState]]:
    """Yield ``(pre, decoded, post)`` for each fetch-decode-execute iteration.

    Stops after ``fuel`` iterations or once the machine halts. An illegal
    word halts the machine with an IllegalInstruction event.
    """
    for _ in range(fuel):
        if s.halt:
            return
        d = fetch(s)
        post = step_decoded(s, d)
        yield s, d, post
        s = post


def run(s: MachineState, fuel: int) -> MachineState:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    for _, _, s in trace_run(s, fuel):
        pass
    return s
