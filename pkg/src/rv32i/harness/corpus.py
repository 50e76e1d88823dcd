"""Deterministic directed test corpus.

Each :class:`Case` pins one instruction on one hand-built pre-state and
lists the exact post-state values it must produce; every component not
listed must be unchanged (enforced by the frame check). ``oracle`` names
where the expected values come from. :class:`ProgramCase` entries run
whole images through the fetch/decode loop.

The generator walks boundary operands per instruction family: zero
operands, sign boundaries, wraparound, x0 as source and destination,
taken and not-taken branches, aligned and misaligned memory access.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Union

from pyrsistent import pmap

from ..execute import step
from ..isa import Instr, Op, encode, make
from ..machine import EventKind, HostEvent, MachineState
from ..speccheck import check_all
from .runner import ExitReason, ProgramImage, run_program

M = 2 ** 32


def _s(v: int) -> int:
    v %= M
    return v - M if v >= 2 ** 31 else v


def _sx(bits: int, v: int) -> int:
    v %= 2 ** bits
    return v - 2 ** bits if v >= 2 ** (bits - 1) else v


@dataclass(frozen=True)
class Case:
    name: str
    instr: Instr
    pre: MachineState
    expect: dict
    oracle: str


@dataclass(frozen=True)
class ProgramCase:
    name: str
    image: ProgramImage
    fuel: int
    exit_reason: ExitReason
    steps: int
    oracle: str
    regs: dict = field(default_factory=dict)
    events: tuple = ()
    instrs: tuple = ()


CorpusEntry = Union[Case, ProgramCase]


def state(regs: dict | None = None, pc: int = 0x1000, mem: dict | None = None,
          csrs: dict | None = None, halt: bool = False, trace: tuple = ()) -> MachineState:
    r = [0] * 32
    for k, v in (regs or {}).items():
        if k != 0:
            r[k] = v % M
    return MachineState(regs=tuple(r), pc=pc, mem=pmap(mem or {}),
                        csrs=pmap(csrs or {}), halt=halt, trace=trace)


def _le(addr: int, value: int, width: int) -> dict:
    return {(addr + j) % M: (value >> (8 * j)) & 0xFF for j in range(width)}


# -- reference formulas ----------------------------------------------------

# (formula over (a, b) with b already resolved, provenance)
ALU_REF: dict[Op, tuple[Callable[[int, int], int], str]] = {
    Op.ADD: (lambda a, b: (a + b) % M, "(a + b) mod 2^32"),
    Op.SUB: (lambda a, b: (a - b) % M, "(a - b) mod 2^32"),
    Op.SLL: (lambda a, b: a * 2 ** (b % 32) % M, "a * 2^(b mod 32) mod 2^32"),
    Op.SLT: (lambda a, b: int(_s(a) < _s(b)), "signed compare via two's-complement reinterpretation"),
    Op.SLTU: (lambda a, b: int(a % M < b % M), "unsigned compare of folded words"),
    Op.XOR: (lambda a, b: (a % M) ^ (b % M), "bitwise xor of folded words"),
    Op.SRL: (lambda a, b: (a % M) // 2 ** (b % 32), "floor(a / 2^(b mod 32))"),
    Op.SRA: (lambda a, b: (_s(a) // 2 ** (b % 32)) % M, "floor(signed(a) / 2^(b mod 32)) refolded"),
    Op.OR: (lambda a, b: (a % M) | (b % M), "bitwise or of folded words"),
    Op.AND: (lambda a, b: (a % M) & (b % M), "bitwise and of folded words"),
}
IMM_ALU = {Op.ADDI: Op.ADD, Op.SLTI: Op.SLT, Op.SLTIU: Op.SLTU, Op.XORI: Op.XOR,
           Op.ORI: Op.OR, Op.ANDI: Op.AND}
SHIFT_IMM = {Op.SLLI: Op.SLL, Op.SRLI: Op.SRL, Op.SRAI: Op.SRA}

PAIRS = [
    (0, 0),
    (1, 0xFFFFFFFF),
    (0x7FFFFFFF, 1),
    (0x80000000, 0xFFFFFFFF),
    (0x80000000, 31),
    (0x12345678, 0x21),
    (0xFFFFFFFF, 0x7FFFFFFF),
]
IMMS = [0, 1, 0x7FF, 0x800, 0xFFF, 0x555]
SHAMTS = [0, 1, 4, 31]


def _alu_cases() -> Iterator[Case]:
    for op, (f, prov) in ALU_REF.items():
        for n, (a, b) in enumerate(PAIRS):
            yield Case(f"{op.value}/pair{n}", make(op, rd=3, rs1=1, rs2=2),
                       state({1: a, 2: b}), {"x3": f(a, b), "pc": 0x1004}, prov)
        yield Case(f"{op.value}/x0-source", make(op, rd=4, rs1=0, rs2=2),
                   state({2: 0x80000001}), {"x4": f(0, 0x80000001), "pc": 0x1004},
                   prov + "; x0 reads 0")
        yield Case(f"{op.value}/x0-dest", make(op, rd=0, rs1=1, rs2=2),
                   state({1: 5, 2: 7}), {"pc": 0x1004}, "writes to x0 are discarded")
        yield Case(f"{op.value}/rd-aliases-rs1", make(op, rd=1, rs1=1, rs2=1),
                   state({1: 0x80000003}), {"x1": f(0x80000003, 0x80000003), "pc": 0x1004},
                   prov + "; operands read before write")


def _imm_alu_cases() -> Iterator[Case]:
    for op, base in IMM_ALU.items():
        f, prov = ALU_REF[base]
        for imm in IMMS:
            a = 0x80000000 if imm == 0x555 else 0x7FFFFFFF
            b = _sx(12, imm)
            yield Case(f"{op.value}/imm{imm:#x}", make(op, rd=5, rs1=6, imm12=imm),
                       state({6: a}), {"x5": f(a, b), "pc": 0x1004},
                       prov + "; imm = sext12")
        yield Case(f"{op.value}/x0-source", make(op, rd=5, rs1=0, imm12=0xFFF),
                   state(), {"x5": f(0, -1), "pc": 0x1004}, prov + "; x0 reads 0")
        yield Case(f"{op.value}/x0-dest", make(op, rd=0, rs1=6, imm12=1),
                   state({6: 9}), {"pc": 0x1004}, "writes to x0 are discarded")
    yield Case("addi/nop", make(Op.ADDI, rd=0, rs1=0, imm12=0), state(),
               {"pc": 0x1004}, "canonical NOP 0x00000013: pc-only change")
    yield Case("addi/pc-wrap", make(Op.ADDI, rd=1, rs1=1, imm12=1),
               state({1: 0xFFFFFFFF}, pc=0xFFFFFFFC), {"x1": 0, "pc": 0},
               "(a + 1) mod 2^32; pc advance wraps mod 2^32")


def _shift_imm_cases() -> Iterator[Case]:
    for op, base in SHIFT_IMM.items():
        f, prov = ALU_REF[base]
        for sh in SHAMTS:
            for a in (0x80000001, 0x7FFFFFFF):
                yield Case(f"{op.value}/a{a:#x}/sh{sh}", make(op, rd=7, rs1=8, shamt=sh),
                           state({8: a}), {"x7": f(a, sh), "pc": 0x1004}, prov)
        yield Case(f"{op.value}/x0-dest", make(op, rd=0, rs1=8, shamt=3),
                   state({8: 0xF0}), {"pc": 0x1004}, "writes to x0 are discarded")


def _upper_cases() -> Iterator[Case]:
    for imm in (0, 1, 0x12345, 0x80000, 0xFFFFF):
        yield Case(f"lui/{imm:#x}", make(Op.LUI, rd=3, imm20=imm), state(),
                   {"x3": imm * 4096 % M, "pc": 0x1004}, "imm20 * 2^12")
        for pc in (0x1000, 0xFFFFF000):
            yield Case(f"auipc/{imm:#x}/pc{pc:#x}", make(Op.AUIPC, rd=3, imm20=imm),
                       state(pc=pc), {"x3": (pc + imm * 4096) % M, "pc": (pc + 4) % M},
                       "(pc + imm20 * 2^12) mod 2^32")
    yield Case("lui/x0-dest", make(Op.LUI, rd=0, imm20=0xABCDE), state(),
               {"pc": 0x1004}, "writes to x0 are discarded")
    yield Case("auipc/x0-dest", make(Op.AUIPC, rd=0, imm20=1), state(),
               {"pc": 0x1004}, "writes to x0 are discarded")


def _jal_cases() -> Iterator[Case]:
    rows = [
        (0x1000, 8, 1),
        (0x1000, 0x1FFFFC, 1),     # -4
        (0x1000, 0, 1),            # jump to self
        (0x1000, 0xFFFFE, 5),      # largest forward offset
        (0x0, 0x100000, 5),        # most negative offset, wraps below zero
        (0xFFFFFFFC, 8, 1),        # wraps above 2^32
        (0x1000, 0x10, 0),         # link discarded
    ]
    for pc, imm, rd in rows:
        exp = {"pc": (pc + _sx(21, imm)) % M}
        if rd:
            exp[f"x{rd}"] = (pc + 4) % M
        yield Case(f"jal/pc{pc:#x}/imm{imm:#x}/rd{rd}", make(Op.JAL, rd=rd, imm21=imm),
                   state(pc=pc), exp, "pc + sext21(imm); rd = pc + 4")


def _jalr_cases() -> Iterator[Case]:
    rows = [
        # (pc, rd, rs1, rs1 value, off)
        (0x1000, 1, 5, 0x2003, 4),       # worked example: pc' = 0x2006, x1 = 0x1004
        (0x1000, 1, 5, 0x2000, 0x801),   # negative offset, odd sum cleared
        (0x1000, 0, 5, 0x3000, 0),       # link into x0
        (0x1000, 5, 5, 0x4001, 0),       # rd == rs1: target uses the old value
        (0xFFFFFFFC, 1, 0, 0, 0xFFF),    # x0 base, -1 -> 0xFFFFFFFE; link wraps to 0
        (0x1000, 2, 3, 0xFFFFFFFF, 3),   # sum wraps past 2^32
        (0x1000, 1, 0, 0, 0x7FF),        # max positive offset from x0
    ]
    for pc, rd, rs1, v, off in rows:
        regs = {rs1: v} if rs1 else {}
        target = ((v + _sx(12, off)) % M) // 2 * 2
        exp = {"pc": target}
        if rd:
            exp[f"x{rd}"] = (pc + 4) % M
        yield Case(f"jalr/pc{pc:#x}/rd{rd}/rs1{rs1}/off{off:#x}",
                   make(Op.JALR, rd=rd, rs1=rs1, imm12=off), state(regs, pc=pc), exp,
                   "(x[rs1] + sext12(off)) mod 2^32 with bit 0 cleared; rd = pc + 4")


BRANCH_REF = {
    Op.BEQ: lambda x, y: x == y,
    Op.BNE: lambda x, y: x != y,
    Op.BLT: lambda x, y: _s(x) < _s(y),
    Op.BGE: lambda x, y: _s(x) >= _s(y),
    Op.BLTU: lambda x, y: x < y,
    Op.BGEU: lambda x, y: x >= y,
}


def _branch_cases() -> Iterator[Case]:
    operand_rows = [(5, 5), (5, 6), (0xFFFFFFFF, 0), (0, 0xFFFFFFFF),
                    (0x80000000, 0x7FFFFFFF)]
    for op, cond in BRANCH_REF.items():
        for n, (a, b) in enumerate(operand_rows):
            imm = 0x10 if n % 2 == 0 else 0x1FF0  # +16 / -16
            pc = 0x100
            taken = cond(a, b)
            exp = {"pc": (pc + _sx(13, imm)) % M if taken else pc + 4}
            yield Case(f"{op.value}/{a:#x}-{b:#x}/{'taken' if taken else 'fallthrough'}",
                       make(op, rs1=1, rs2=2, imm13=imm), state({1: a, 2: b}, pc=pc), exp,
                       "compare on words; taken: pc + sext13(imm), else pc + 4")
        taken = cond(0, 0)
        yield Case(f"{op.value}/x0-x0", make(op, rs1=0, rs2=0, imm13=0x1000),
                   state(pc=0x800), {"pc": (0x800 - 4096) % M if taken else 0x804},
                   "x0 vs x0; most negative offset wraps below zero")


def _load_cases() -> Iterator[Case]:
    mem = {}
    mem.update(_le(0x200, 0x80FF7F01, 4))
    mem.update(_le(0xFFFFFFFE, 0x8899AABB, 4))
    spec = {Op.LB: (1, True), Op.LH: (2, True), Op.LW: (4, False),
            Op.LBU: (1, False), Op.LHU: (2, False)}
    for op, (width, signed) in spec.items():
        for base, off in ((0x200, 0), (0x200, 1), (0x200, 3), (0x201, 0xFFF),
                          (0xFFFFFFF0, 0xE), (0x0, 0x7FF)):
            addr = (base + _sx(12, off)) % M
            raw = sum(mem.get((addr + j) % M, 0) * 256 ** j for j in range(width))
            val = _sx(8 * width, raw) % M if signed else raw
            yield Case(f"{op.value}/base{base:#x}/off{off:#x}",
                       make(op, rd=9, rs1=10, imm12=off), state({10: base}, mem=mem),
                       {"x9": val, "pc": 0x1004},
                       "byte-wise little-endian sum; sext/zext by width; unmapped bytes 0")
        yield Case(f"{op.value}/x0-dest", make(op, rd=0, rs1=10, imm12=0),
                   state({10: 0x200}, mem=mem), {"pc": 0x1004},
                   "writes to x0 are discarded")


def _store_cases() -> Iterator[Case]:
    widths = {Op.SB: 1, Op.SH: 2, Op.SW: 4}
    for op, width in widths.items():
        for base, off, v in ((0x300, 0, 0x12345678), (0x300, 1, 0xCAFEBABE),
                             (0x301, 0xFFF, 0xFFFFFFFF), (0xFFFFFFFE, 0, 0xA1B2C3D4),
                             (0x0, 0x800, 0x80)):
            addr = (base + _sx(12, off)) % M
            exp = {"pc": 0x1004}
            for j in range(width):
                exp[f"mem[{hex((addr + j) % M)}]"] = v // 256 ** j % 256
            yield Case(f"{op.value}/base{base:#x}/off{off:#x}",
                       make(op, rs1=11, rs2=12, imm12=off),
                       state({11: base, 12: v}, mem={0x2FF: 0xEE, 0x304: 0xDD}), exp,
                       "low 8*width bits of x[rs2], little-endian, at folded addresses")
        exp = {"pc": 0x1004}
        for j in range(width):
            exp[f"mem[{hex(0x400 + j)}]"] = 0
        yield Case(f"{op.value}/x0-source", make(op, rs1=11, rs2=0, imm12=0),
                   state({11: 0x400}, mem=_le(0x400, 0xFFFFFFFF, 4)), exp,
                   "x0 reads 0, so zero bytes are stored")


def _fence_cases() -> Iterator[Case]:
    for fm, pred, succ, rd, rs1 in ((0, 0xF, 0xF, 0, 0), (8, 3, 3, 0, 0), (0, 1, 2, 5, 6),
                                    (0xF, 0xF, 0xF, 31, 31), (0, 0, 0, 0, 0)):
        yield Case(f"fence/{fm}-{pred}-{succ}-{rd}-{rs1}",
                   make(Op.FENCE, fm=fm, pred=pred, succ=succ, rd=rd, rs1=rs1),
                   state({5: 1, 6: 2, 31: 3}), {"pc": 0x1004}, "no observable effect")
    for rd, rs1, imm in ((0, 0, 0), (1, 2, 0xFFF), (31, 31, 0x800), (5, 0, 1), (0, 7, 0x7FF)):
        yield Case(f"fence.i/{rd}-{rs1}-{imm:#x}", make(Op.FENCE_I, rd=rd, rs1=rs1, imm12=imm),
                   state({1: 1, 2: 2, 7: 7}), {"pc": 0x1004}, "no observable effect")
    yield Case("fence/pc-wrap", make(Op.FENCE, fm=0, pred=0xF, succ=0xF, rd=0, rs1=0),
               state(pc=0xFFFFFFFC), {"pc": 0}, "pc advance wraps mod 2^32")


def _system_cases() -> Iterator[Case]:
    prior = (HostEvent(EventKind.EBREAK, 0x10),)
    for op, kind in ((Op.ECALL, EventKind.ECALL), (Op.EBREAK, EventKind.EBREAK)):
        for pc, trace in ((0x1000, ()), (0, ()), (0xFFFFFFFC, ()), (0x1000, prior),
                          (0x2002, prior)):
            yield Case(f"{op.value}/pc{pc:#x}/trace{len(trace)}", make(op),
                       state({10: 93}, pc=pc, trace=trace),
                       {"pc": pc, "halt": True, "trace": trace + (HostEvent(kind, pc),)},
                       "halt, append (kind, pc) event, pc not advanced")
        yield Case(f"{op.value}/already-halted", make(op), state(pc=0x40, halt=True),
                   {"pc": 0x40, "halt": True, "trace": ()}, "halted state is a fixed point")


def _csr_cases() -> Iterator[Case]:
    csr = 0x305
    for op in (Op.CSRRW, Op.CSRRS, Op.CSRRC):
        for old, mask, rd, rs1 in ((None, 0x42, 1, 2), (0xF0F0F0F0, 0xFF00FF00, 1, 2),
                                   (0x12345678, 0xFFFFFFFF, 3, 2), (0xABCD, 0x1, 0, 2),
                                   (0xABCD, 0x5555, 4, 0), (0x00FF, 0xF000, 2, 2)):
            o = old or 0
            src = 0 if rs1 == 0 else mask
            writes = op is Op.CSRRW or rs1 != 0
            new = {Op.CSRRW: src, Op.CSRRS: o | src, Op.CSRRC: o & (M - 1 - src)}[op]
            exp = {"pc": 0x1004}
            if rd:
                exp[f"x{rd}"] = o
            if writes:
                exp[f"csr[{hex(csr)}]"] = new
            csrs = {} if old is None else {csr: old}
            yield Case(f"{op.value}/old{o:#x}/mask{src:#x}/rd{rd}/rs1{rs1}",
                       make(op, rd=rd, rs1=rs1, csr=csr),
                       state({rs1: mask} if rs1 else {}, csrs=csrs | {0x300: 7}), exp,
                       "old = csr; rd = old; W: src, S: old | src, C: old & ~src; "
                       "S/C with rs1 = x0 do not write")
    for op in (Op.CSRRWI, Op.CSRRSI, Op.CSRRCI):
        for old, zimm, rd in ((None, 0x1F, 1), (0xFFFFFFFF, 0x0A, 1), (0x10, 0x10, 5),
                              (0x7, 0, 6), (0x3, 0x1, 0)):
            o = old or 0
            writes = op is Op.CSRRWI or zimm != 0
            new = {Op.CSRRWI: zimm, Op.CSRRSI: o | zimm, Op.CSRRCI: o & (M - 1 - zimm)}[op]
            exp = {"pc": 0x1004}
            if rd:
                exp[f"x{rd}"] = o
            if writes:
                exp[f"csr[{hex(0xC00)}]"] = new
            csrs = {} if old is None else {0xC00: old}
            yield Case(f"{op.value}/old{o:#x}/zimm{zimm}/rd{rd}",
                       make(op, rd=rd, zimm=zimm, csr=0xC00), state(csrs=csrs), exp,
                       "zero-extended 5-bit immediate as source; zimm = 0 suppresses S/C writes")


def _halted_cases() -> Iterator[Case]:
    for op in (Op.ADD, Op.SW, Op.JALR, Op.CSRRW, Op.BEQ):
        fields = {"ADD": dict(rd=1, rs1=2, rs2=3), "SW": dict(rs1=2, rs2=3, imm12=0),
                  "JALR": dict(rd=1, rs1=2, imm12=4), "CSRRW": dict(rd=1, rs1=2, csr=1),
                  "BEQ": dict(rs1=0, rs2=0, imm13=8)}[op.name]
        yield Case(f"{op.value}/halted", make(op, **fields),
                   state({2: 0x100, 3: 5}, halt=True), {"pc": 0x1000, "halt": True},
                   "halted state is a fixed point of step")


def instruction_cases() -> list[Case]:
    out: list[Case] = []
    for gen in (_alu_cases, _imm_alu_cases, _shift_imm_cases, _upper_cases, _jal_cases,
                _jalr_cases, _branch_cases, _load_cases, _store_cases, _fence_cases,
                _system_cases, _csr_cases, _halted_cases):
        out.extend(gen())
    return out


def _words(*instrs: Instr) -> bytes:
    return b"".join(encode(i).to_bytes(4, "little") for i in instrs)


def program_cases() -> list[ProgramCase]:
    ecall = make(Op.ECALL)
    nop = make(Op.ADDI, rd=0, rs1=0, imm12=0)
    # sum 1..10 into x10, then ecall
    sum_loop = (
        make(Op.ADDI, rd=1, rs1=0, imm12=10),
        make(Op.ADDI, rd=10, rs1=0, imm12=0),
        make(Op.ADD, rd=10, rs1=10, rs2=1),
        make(Op.ADDI, rd=1, rs1=1, imm12=0xFFF),
        make(Op.BNE, rs1=1, rs2=0, imm13=0x1FF8),
        ecall,
    )
    # store/load round trip plus a call/return through jal/jalr
    mem_call = (
        make(Op.LUI, rd=2, imm20=0x1),                  # x2 = 0x1000
        make(Op.ADDI, rd=3, rs1=0, imm12=0xF85),        # x3 = -123
        make(Op.JAL, rd=1, imm21=12),                   # call +12
        make(Op.LW, rd=4, rs1=2, imm12=0),
        make(Op.EBREAK),
        make(Op.SW, rs1=2, rs2=3, imm12=0),             # callee
        make(Op.JALR, rd=0, rs1=1, imm12=0),            # return
    )
    csr_prog = (
        make(Op.ADDI, rd=5, rs1=0, imm12=0x2A),
        make(Op.CSRRW, rd=0, rs1=5, csr=0x340),
        make(Op.CSRRSI, rd=6, zimm=1, csr=0x340),
        make(Op.CSRRC, rd=7, rs1=0, csr=0x340),
        ecall,
    )
    return [
        ProgramCase("program/ecall", ProgramImage(bytes([0x73, 0, 0, 0])), 10,
                    ExitReason.HALTED, 1, "fetch 0x00000073 decodes to ECALL",
                    events=((EventKind.ECALL, 0),), instrs=(Op.ECALL,)),
        ProgramCase("program/nop-then-ecall", ProgramImage(_words(nop, nop, ecall)), 10,
                    ExitReason.HALTED, 3, "NOP is a pc-only change",
                    events=((EventKind.ECALL, 8),), instrs=(Op.ADDI, Op.ECALL)),
        ProgramCase("program/jal-self-loop", ProgramImage(_words(make(Op.JAL, rd=0, imm21=0))),
                    100, ExitReason.FUEL_EXHAUSTED, 100, "JAL with imm 0 targets itself",
                    instrs=(Op.JAL,)),
        ProgramCase("program/empty", ProgramImage(b""), 10, ExitReason.HALTED, 1,
                    "word 0 fetched from unmapped memory is illegal",
                    events=((EventKind.ILLEGAL_INSTRUCTION, 0),)),
        ProgramCase("program/sum-loop", ProgramImage(_words(*sum_loop), base=0x100, entry=0x100),
                    200, ExitReason.HALTED, 2 + 3 * 10 + 1, "sum 1..10 = 55",
                    regs={10: 55, 1: 0}, events=((EventKind.ECALL, 0x114),),
                    instrs=(Op.ADDI, Op.ADD, Op.BNE, Op.ECALL)),
        ProgramCase("program/call-store-load", ProgramImage(_words(*mem_call)), 20,
                    ExitReason.HALTED, 7, "stored -123 reloads as 0xffffff85",
                    regs={4: 0xFFFFFF85, 1: 12, 2: 0x1000},
                    events=((EventKind.EBREAK, 16),),
                    instrs=(Op.LUI, Op.ADDI, Op.JAL, Op.SW, Op.JALR, Op.LW, Op.EBREAK)),
        ProgramCase("program/csr-sequence", ProgramImage(_words(*csr_prog)), 10,
                    ExitReason.HALTED, 5, "0x2a written, read back, bit 0 set",
                    regs={5: 0x2A, 6: 0x2A, 7: 0x2B}, events=((EventKind.ECALL, 16),),
                    instrs=(Op.ADDI, Op.CSRRW, Op.CSRRSI, Op.CSRRC, Op.ECALL)),
        ProgramCase("program/illegal-after-code", ProgramImage(_words(nop) + b"\xff\xff\xff\xff"),
                    10, ExitReason.HALTED, 2, "all-ones word is illegal",
                    events=((EventKind.ILLEGAL_INSTRUCTION, 4),), instrs=(Op.ADDI,)),
    ]


def directed_corpus() -> list[CorpusEntry]:
    return [*instruction_cases(), *program_cases()]


# -- execution -------------------------------------------------------------

@dataclass(frozen=True)
class CaseResult:
    name: str
    passed: bool
    problems: tuple = ()


def _observe(post: MachineState, comp: str):
    if comp == "pc":
        return post.pc
    if comp == "halt":
        return post.halt
    if comp == "trace":
        return post.trace
    if comp.startswith("x"):
        return post.regs[int(comp[1:])]
    addr = int(comp[comp.index("[") + 1:-1], 16)
    return (post.mem if comp.startswith("mem") else post.csrs).get(addr, 0)


def run_case(case: CorpusEntry) -> CaseResult:
    problems = []
    if isinstance(case, Case):
        post = step(case.pre, case.instr)
        for comp, want in case.expect.items():
            got = _observe(post, comp)
            if got != want:
                problems.append(f"{comp}: expected {want!r}, got {got!r}")
        problems.extend(f"spec {v.component}: expected {v.expected}, got {v.observed}"
                        for v in check_all(case.pre, case.instr, post).violations)
    else:
        rep = run_program(case.image, case.fuel, check_specs=True)
        if rep.exit_reason is not case.exit_reason:
            problems.append(f"exit: expected {case.exit_reason.value}, got {rep.exit_reason.value}")
        if rep.steps != case.steps:
            problems.append(f"steps: expected {case.steps}, got {rep.steps}")
        for r, want in case.regs.items():
            if rep.final.regs[r] != want:
                problems.append(f"x{r}: expected {want:#x}, got {rep.final.regs[r]:#x}")
        events = tuple((ev.kind, ev.pc) for ev in rep.final.trace)
        if events != case.events:
            problems.append(f"trace: expected {case.events}, got {events}")
        problems.extend(f"step {v.step} spec {v.component}: expected {v.expected}, got {v.observed}"
                        for v in rep.violations)
    return CaseResult(case.name, not problems, tuple(problems))


def ops_covered(case: CorpusEntry) -> tuple:
    if isinstance(case, Case):
        return (case.instr.op,)
    return case.instrs


def coverage(cases: list[CorpusEntry]) -> dict[Op, int]:
    counts = {op: 0 for op in Op}
    for c in cases:
        for op in set(ops_covered(c)):
            counts[op] += 1
    return counts
