"""Executable frame conditions, computes clauses and step invariants.

Three independent checks run over a ``(pre, instr, post)`` triple:

* :func:`check_frame` -- nothing outside the instruction's footprint moved;
* :func:`postcondition_oracle` -- every computed field has the value
  recomputed from ``pre`` with plain integer arithmetic;
* :func:`check_global` -- the invariants every ``step`` must preserve.

The oracle deliberately shares no code with :mod:`rv32i.execute`; it
reads memory byte by byte and evaluates the ISA formulas with ``%``,
``//`` and powers of two instead of masks and shifts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .bitops import addr_mod, is_word, jalr_target, low_bits, sext_from
from .isa import (BType, CsrImm, CsrReg, DecodeResult, Fence, IType, Illegal,
                  JType, Op, RType, ShiftImm, SType, System, UType,
                  is_csr, is_memory_write)
from .machine import EventKind, HostEvent, MachineState, NUM_REGS

W = 2 ** 32


@dataclass(frozen=True)
class FrameFootprint:
    """State components an instruction may modify. ``None`` means "nothing"."""
    writable_regs: frozenset = frozenset()
    may_change_pc: bool = True
    writable_mem: frozenset | None = None
    may_change_csrs: frozenset | None = None
    may_change_halt: bool = False
    may_append_trace: bool = False

    def __post_init__(self):
        if 0 in self.writable_regs:
            raise ValueError("x0 can never be in a footprint")


@dataclass(frozen=True)
class Violation:
    component: str
    expected: str
    observed: str

    def to_json(self) -> dict:
        return {"component": self.component, "expected": self.expected,
                "observed": self.observed}


@dataclass(frozen=True)
class SpecVerdict:
    violations: tuple = field(default=())

    @property
    def passed(self) -> bool:
        return not self.violations

    def components(self) -> list[str]:
        return [v.component for v in self.violations]

    def __add__(self, other: "SpecVerdict") -> "SpecVerdict":
        return SpecVerdict(self.violations + other.violations)


PASS = SpecVerdict()


def _verdict(violations: Iterable[Violation]) -> SpecVerdict:
    v = tuple(violations)
    return SpecVerdict(v) if v else PASS


def _fmt(v) -> str:
    return hex(v) if type(v) is int else repr(v)


# -- footprints ------------------------------------------------------------

_MEM_WIDTH = {Op.SB: 1, Op.SH: 2, Op.SW: 4}

_FROZEN_PC = FrameFootprint(may_change_pc=False, may_change_halt=True,
                            may_append_trace=True)
ILLEGAL_FOOTPRINT = _FROZEN_PC
_PC_ONLY = FrameFootprint()


def _rd_set(rd: int) -> frozenset:
    return frozenset() if rd == 0 else frozenset((rd,))


def footprint_of(i: DecodeResult, pre: MachineState | None = None) -> FrameFootprint:
    """Footprint table. Store footprints need ``pre`` for the effective address."""
    if isinstance(i, Illegal) or isinstance(i, System):
        return _FROZEN_PC
    if isinstance(i, (BType, Fence)) or i.op is Op.FENCE_I:
        return _PC_ONLY
    if isinstance(i, SType):
        if pre is None:
            raise ValueError("store footprints depend on the pre-state")
        base = pre.regs[i.rs1] + sext_from(12, i.imm12)
        span = frozenset(addr_mod(base + j) for j in range(_MEM_WIDTH[i.op]))
        return FrameFootprint(writable_mem=span)
    if isinstance(i, (CsrReg, CsrImm)):
        src = i.rs1 if isinstance(i, CsrReg) else i.zimm
        writes = i.op in (Op.CSRRW, Op.CSRRWI) or src != 0
        return FrameFootprint(writable_regs=_rd_set(i.rd),
                              may_change_csrs=frozenset((i.csr,)) if writes else frozenset())
    # every remaining shape writes rd and moves the pc
    return FrameFootprint(writable_regs=_rd_set(i.rd))


# -- frame check -----------------------------------------------------------

def check_frame(pre: MachineState, post: MachineState, fp: FrameFootprint) -> SpecVerdict:
    out = []
    n = max(len(pre.regs), len(post.regs))
    for r in range(n):
        if r in fp.writable_regs:
            continue
        a = pre.regs[r] if r < len(pre.regs) else None
        b = post.regs[r] if r < len(post.regs) else None
        if a != b:
            out.append(Violation(f"x{r}", f"unchanged {_fmt(a)}", _fmt(b)))
    if not fp.may_change_pc and post.pc != pre.pc:
        out.append(Violation("pc", f"unchanged {_fmt(pre.pc)}", _fmt(post.pc)))
    if post.mem is not pre.mem:
        allowed = fp.writable_mem or ()
        pm, qm = pre.mem, post.mem
        for a in set(pm.keys()) | set(qm.keys()):
            if a in allowed:
                continue
            x, y = pm.get(a, 0), qm.get(a, 0)
            if x != y:
                out.append(Violation(f"mem[{_fmt(a)}]", f"unchanged {_fmt(x)}", _fmt(y)))
    if post.csrs is not pre.csrs:
        allowed = fp.may_change_csrs or ()
        pc_, qc = pre.csrs, post.csrs
        for a in set(pc_.keys()) | set(qc.keys()):
            if a in allowed:
                continue
            x, y = pc_.get(a, 0), qc.get(a, 0)
            if x != y:
                out.append(Violation(f"csr[{_fmt(a)}]", f"unchanged {_fmt(x)}", _fmt(y)))
    if not fp.may_change_halt and post.halt != pre.halt:
        out.append(Violation("halt", f"unchanged {pre.halt}", repr(post.halt)))
    if post.mode != pre.mode:
        out.append(Violation("mode", f"unchanged {pre.mode!r}", repr(post.mode)))
    if post.trace != pre.trace:
        k = len(pre.trace)
        if not fp.may_append_trace:
            out.append(Violation("trace", f"unchanged ({k} events)",
                                 f"{len(post.trace)} events"))
        elif post.trace[:k] != pre.trace:
            out.append(Violation("trace", "existing events preserved",
                                 "prefix rewritten"))
    return _verdict(out)


# -- computes clauses ------------------------------------------------------

def _byte(mem, a: int) -> int:
    return mem.get(a % W, 0)


def _load_unsigned(mem, addr: int, width: int) -> int:
    return sum(_byte(mem, addr + j) * 256 ** j for j in range(width))


def _signed(v: int) -> int:
    v %= W
    return v - W if v >= 2 ** 31 else v


def _alu_expect(op: Op, a: int, b: int) -> int:
    a %= W
    if op in (Op.ADD, Op.ADDI):
        r = a + b
    elif op is Op.SUB:
        r = a - b
    elif op in (Op.SLL, Op.SLLI):
        r = a * 2 ** (b % 32)
    elif op in (Op.SLT, Op.SLTI):
        r = 1 if _signed(a) < _signed(b) else 0
    elif op in (Op.SLTU, Op.SLTIU):
        r = 1 if a < b % W else 0
    elif op in (Op.SRL, Op.SRLI):
        r = a // 2 ** (b % 32)
    elif op in (Op.SRA, Op.SRAI):
        r = _signed(a) // 2 ** (b % 32)
    elif op in (Op.XOR, Op.XORI):
        r = a ^ (b % W)
    elif op in (Op.OR, Op.ORI):
        r = a | (b % W)
    elif op in (Op.AND, Op.ANDI):
        r = a & (b % W)
    else:  # pragma: no cover
        raise ValueError(op)
    return r % W


def _taken(op: Op, x: int, y: int) -> bool:
    return {
        Op.BEQ: x == y,
        Op.BNE: x != y,
        Op.BLT: _signed(x) < _signed(y),
        Op.BGE: _signed(x) >= _signed(y),
        Op.BLTU: x < y,
        Op.BGEU: x >= y,
    }[op]


def expected_effects(i: DecodeResult, pre: MachineState) -> dict:
    """Recompute every field ``i`` writes, keyed by component name.

    Keys: ``pc``, ``x<n>`` (only for rd != 0), ``mem[<addr>]``,
    ``csr[<addr>]``, ``halt``, ``trace``.
    """
    x = pre.regs
    pc = pre.pc
    nxt = (pc + 4) % W
    eff: dict = {}

    def set_rd(rd, v):
        if rd != 0:
            eff[f"x{rd}"] = v % W

    if isinstance(i, (Illegal, System)):
        kind = (EventKind.ILLEGAL_INSTRUCTION if isinstance(i, Illegal)
                else EventKind.ECALL if i.op is Op.ECALL else EventKind.EBREAK)
        eff["pc"] = pc
        eff["halt"] = True
        eff["trace"] = pre.trace + (HostEvent(kind, pc),)
        return eff

    op = i.op
    eff["pc"] = nxt
    if isinstance(i, RType):
        set_rd(i.rd, _alu_expect(op, x[i.rs1], x[i.rs2]))
    elif isinstance(i, ShiftImm):
        set_rd(i.rd, _alu_expect(op, x[i.rs1], i.shamt))
    elif isinstance(i, UType):
        upper = i.imm20 * 2 ** 12
        set_rd(i.rd, upper if op is Op.LUI else pc + upper)
    elif isinstance(i, JType):
        set_rd(i.rd, pc + 4)
        eff["pc"] = (pc + sext_from(21, i.imm21)) % W
    elif isinstance(i, BType):
        if _taken(op, x[i.rs1], x[i.rs2]):
            eff["pc"] = (pc + sext_from(13, i.imm13)) % W
    elif isinstance(i, SType):
        addr = x[i.rs1] + sext_from(12, i.imm12)
        v = x[i.rs2]
        for j in range(_MEM_WIDTH[op]):
            eff[f"mem[{_fmt((addr + j) % W)}]"] = (v // 256 ** j) % 256
    elif isinstance(i, IType):
        if op is Op.JALR:
            set_rd(i.rd, low_bits(32, pc + 4))
            eff["pc"] = jalr_target(x[i.rs1] + sext_from(12, i.imm12))
        elif op is Op.FENCE_I:
            pass
        elif op in (Op.LB, Op.LH, Op.LW, Op.LBU, Op.LHU):
            addr = x[i.rs1] + sext_from(12, i.imm12)
            width = {Op.LB: 1, Op.LBU: 1, Op.LH: 2, Op.LHU: 2, Op.LW: 4}[op]
            v = _load_unsigned(pre.mem, addr, width)
            if op in (Op.LB, Op.LH) and v >= 2 ** (8 * width - 1):
                v -= 2 ** (8 * width)
            set_rd(i.rd, v)
        else:
            set_rd(i.rd, _alu_expect(op, x[i.rs1], sext_from(12, i.imm12)))
    elif isinstance(i, (CsrReg, CsrImm)):
        old = pre.csrs.get(i.csr, 0)
        if isinstance(i, CsrReg):
            src, writes = x[i.rs1], op is Op.CSRRW or i.rs1 != 0
        else:
            src, writes = i.zimm, op is Op.CSRRWI or i.zimm != 0
        if writes:
            if op in (Op.CSRRW, Op.CSRRWI):
                new = src
            elif op in (Op.CSRRS, Op.CSRRSI):
                new = old | src
            else:
                new = old - (old & src)
            eff[f"csr[{_fmt(i.csr)}]"] = new
        set_rd(i.rd, old)
    elif isinstance(i, Fence):
        pass
    else:
        raise TypeError(f"not an instruction: {i!r}")
    return eff


def _observe(post: MachineState, component: str):
    if component == "pc":
        return post.pc
    if component == "halt":
        return post.halt
    if component == "trace":
        return post.trace
    if component.startswith("x"):
        r = int(component[1:])
        return post.regs[r] if r < len(post.regs) else None
    addr = int(component[component.index("[") + 1:-1], 16)
    if component.startswith("mem"):
        return post.mem.get(addr, 0)
    return post.csrs.get(addr, 0)


def postcondition_oracle(i: DecodeResult, pre: MachineState, post: MachineState) -> SpecVerdict:
    """Compare ``post`` against independently recomputed values.

    A halted ``pre`` expects ``post == pre``. JALR additionally reports its
    three named clauses (link, target, bit 0).
    """
    if pre.halt:
        if post != pre:
            return SpecVerdict((Violation("halt_absorption", "post == pre", "state changed"),))
        return PASS
    out = []
    if isinstance(i, IType) and i.op is Op.JALR:
        link = (pre.pc + 4) % W
        target = ((pre.regs[i.rs1] + sext_from(12, i.imm12)) % W // 2) * 2
        if i.rd != 0 and _observe(post, f"x{i.rd}") != link:
            out.append(Violation(f"x{i.rd}", f"jalr_link {_fmt(link)}",
                                 _fmt(_observe(post, f"x{i.rd}"))))
        if post.pc != target:
            out.append(Violation("pc", f"jalr_pc {_fmt(target)}", _fmt(post.pc)))
        if not isinstance(post.pc, int) or post.pc % 2 != 0:
            out.append(Violation("pc.bit0", "jalr_lsb_zero: bit 0 = 0",
                                 f"bit 0 = {post.pc % 2}"))
        return _verdict(out)
    for comp, want in expected_effects(i, pre).items():
        got = _observe(post, comp)
        if got != want:
            if comp == "trace":
                out.append(Violation(comp, f"{len(want)} events ending {want[-1]}",
                                     f"{len(got)} events"))
            else:
                out.append(Violation(comp, _fmt(want), _fmt(got)))
    return _verdict(out)


# -- global step invariants ------------------------------------------------

def check_global(pre: MachineState, i: DecodeResult, post: MachineState) -> SpecVerdict:
    out = []
    if len(post.regs) != NUM_REGS:
        out.append(Violation("regs.length", str(NUM_REGS), str(len(post.regs))))
    if not post.regs or post.regs[0] != 0:
        out.append(Violation("x0", "0", _fmt(post.regs[0] if post.regs else None)))
    if not is_word(post.pc):
        out.append(Violation("pc", "in [0, 2**32)", _fmt(post.pc)))
    if pre.halt:
        if post != pre:
            out.append(Violation("halt_absorption", "post == pre", "state changed"))
        return _verdict(out)
    is_instr = not isinstance(i, Illegal)
    if not (is_instr and is_csr(i)) and post.csrs != pre.csrs:
        out.append(Violation("csrs", "unchanged (non-CSR instruction)", "modified"))
    if not (is_instr and is_memory_write(i)) and post.mem != pre.mem:
        out.append(Violation("mem", "unchanged (non-store instruction)", "modified"))
    return _verdict(out)


def check_all(pre: MachineState, i: DecodeResult, post: MachineState) -> SpecVerdict:
    """Run frame, postcondition and global checks together."""
    return (check_frame(pre, post, footprint_of(i, pre))
            + postcondition_oracle(i, pre, post)
            + check_global(pre, i, post))
