"""RV32I instruction roster, decoder and encoder.

Instructions are small frozen dataclasses grouped by operand shape; the
``op`` field names the concrete instruction. Immediates are kept as raw
unsigned bit patterns of their encoded width and only sign-extended at
execution time.

The roster is the 40 base instructions plus FENCE.I and the six Zicsr
instructions, 47 in total. Decoding is strict: reserved bit patterns in
shifts and the environment calls decode to :class:`Illegal`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields
from typing import Union


class Op(enum.Enum):
    LUI = "lui"
    AUIPC = "auipc"
    JAL = "jal"
    JALR = "jalr"
    BEQ = "beq"
    BNE = "bne"
    BLT = "blt"
    BGE = "bge"
    BLTU = "bltu"
    BGEU = "bgeu"
    LB = "lb"
    LH = "lh"
    LW = "lw"
    LBU = "lbu"
    LHU = "lhu"
    SB = "sb"
    SH = "sh"
    SW = "sw"
    ADDI = "addi"
    SLTI = "slti"
    SLTIU = "sltiu"
    XORI = "xori"
    ORI = "ori"
    ANDI = "andi"
    SLLI = "slli"
    SRLI = "srli"
    SRAI = "srai"
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
    FENCE = "fence"
    FENCE_I = "fence.i"
    ECALL = "ecall"
    EBREAK = "ebreak"
    CSRRW = "csrrw"
    CSRRS = "csrrs"
    CSRRC = "csrrc"
    CSRRWI = "csrrwi"
    CSRRSI = "csrrsi"
    CSRRCI = "csrrci"


ALL_OPS = tuple(Op)


# -- instruction shapes ----------------------------------------------------

@dataclass(frozen=True)
class UType:
    op: Op
    rd: int
    imm20: int


@dataclass(frozen=True)
class JType:
    op: Op
    rd: int
    imm21: int


@dataclass(frozen=True)
class IType:
    """JALR, loads, register-immediate ALU ops and FENCE.I."""
    op: Op
    rd: int
    rs1: int
    imm12: int


@dataclass(frozen=True)
class ShiftImm:
    op: Op
    rd: int
    rs1: int
    shamt: int


@dataclass(frozen=True)
class BType:
    op: Op
    rs1: int
    rs2: int
    imm13: int


@dataclass(frozen=True)
class SType:
    op: Op
    rs1: int
    rs2: int
    imm12: int


@dataclass(frozen=True)
class RType:
    op: Op
    rd: int
    rs1: int
    rs2: int


@dataclass(frozen=True)
class Fence:
    op: Op
    fm: int
    pred: int
    succ: int
    rd: int
    rs1: int


@dataclass(frozen=True)
class System:
    op: Op


@dataclass(frozen=True)
class CsrReg:
    op: Op
    rd: int
    rs1: int
    csr: int


@dataclass(frozen=True)
class CsrImm:
    op: Op
    rd: int
    zimm: int
    csr: int


@dataclass(frozen=True)
class Illegal:
    word: int


Instr = Union[UType, JType, IType, ShiftImm, BType, SType, RType, Fence,
              System, CsrReg, CsrImm]
DecodeResult = Union[Instr, Illegal]

SHAPE_OF: dict[Op, type] = {
    Op.LUI: UType, Op.AUIPC: UType,
    Op.JAL: JType,
    Op.JALR: IType, Op.FENCE_I: IType,
    Op.FENCE: Fence,
    Op.ECALL: System, Op.EBREAK: System,
}
for _op in (Op.BEQ, Op.BNE, Op.BLT, Op.BGE, Op.BLTU, Op.BGEU):
    SHAPE_OF[_op] = BType
for _op in (Op.LB, Op.LH, Op.LW, Op.LBU, Op.LHU,
            Op.ADDI, Op.SLTI, Op.SLTIU, Op.XORI, Op.ORI, Op.ANDI):
    SHAPE_OF[_op] = IType
for _op in (Op.SB, Op.SH, Op.SW):
    SHAPE_OF[_op] = SType
for _op in (Op.SLLI, Op.SRLI, Op.SRAI):
    SHAPE_OF[_op] = ShiftImm
for _op in (Op.ADD, Op.SUB, Op.SLL, Op.SLT, Op.SLTU, Op.XOR, Op.SRL,
            Op.SRA, Op.OR, Op.AND):
    SHAPE_OF[_op] = RType
for _op in (Op.CSRRW, Op.CSRRS, Op.CSRRC):
    SHAPE_OF[_op] = CsrReg
for _op in (Op.CSRRWI, Op.CSRRSI, Op.CSRRCI):
    SHAPE_OF[_op] = CsrImm

# bit width of every operand field, used for validation and random generation
FIELD_BITS = {
    "rd": 5, "rs1": 5, "rs2": 5, "shamt": 5, "zimm": 5,
    "imm12": 12, "imm13": 13, "imm20": 20, "imm21": 21, "csr": 12,
    "fm": 4, "pred": 4, "succ": 4,
}
# fields whose bit 0 is forced to zero by the encoding
EVEN_FIELDS = ("imm13", "imm21")


def operand_fields(op: Op) -> tuple[str, ...]:
    return tuple(f.name for f in fields(SHAPE_OF[op]) if f.name != "op")


def make(op: Op, **operands) -> Instr:
    """Build the instruction of the right shape for ``op``."""
    return SHAPE_OF[op](op, **operands)


def validate(i: Instr) -> list[str]:
    """Return the names of operand fields that break their range invariant."""
    bad = []
    if SHAPE_OF.get(getattr(i, "op", None)) is not type(i):
        return ["op"]
    for name in operand_fields(i.op):
        v = getattr(i, name)
        if type(v) is not int or not 0 <= v < (1 << FIELD_BITS[name]):
            bad.append(name)
        elif name in EVEN_FIELDS and v & 1:
            bad.append(name)
    return bad


# -- classification --------------------------------------------------------

CSR_OPS = frozenset({Op.CSRRW, Op.CSRRS, Op.CSRRC, Op.CSRRWI, Op.CSRRSI, Op.CSRRCI})
STORE_OPS = frozenset({Op.SB, Op.SH, Op.SW})
LOAD_OPS = frozenset({Op.LB, Op.LH, Op.LW, Op.LBU, Op.LHU})
BRANCH_OPS = frozenset({Op.BEQ, Op.BNE, Op.BLT, Op.BGE, Op.BLTU, Op.BGEU})


def is_csr(i: DecodeResult) -> bool:
    return getattr(i, "op", None) in CSR_OPS


def is_memory_write(i: DecodeResult) -> bool:
    return getattr(i, "op", None) in STORE_OPS


# -- encoding tables -------------------------------------------------------

OPC_LUI = 0b0110111
OPC_AUIPC = 0b0010111
OPC_JAL = 0b1101111
OPC_JALR = 0b1100111
OPC_BRANCH = 0b1100011
OPC_LOAD = 0b0000011
OPC_STORE = 0b0100011
OPC_OP_IMM = 0b0010011
OPC_OP = 0b0110011
OPC_MISC_MEM = 0b0001111
OPC_SYSTEM = 0b1110011

_BRANCH_F3 = {Op.BEQ: 0, Op.BNE: 1, Op.BLT: 4, Op.BGE: 5, Op.BLTU: 6, Op.BGEU: 7}
_LOAD_F3 = {Op.LB: 0, Op.LH: 1, Op.LW: 2, Op.LBU: 4, Op.LHU: 5}
_STORE_F3 = {Op.SB: 0, Op.SH: 1, Op.SW: 2}
_OPIMM_F3 = {Op.ADDI: 0, Op.SLTI: 2, Op.SLTIU: 3, Op.XORI: 4, Op.ORI: 6, Op.ANDI: 7}
_SHIFT_F3_F7 = {Op.SLLI: (1, 0x00), Op.SRLI: (5, 0x00), Op.SRAI: (5, 0x20)}
_OP_F3_F7 = {
    Op.ADD: (0, 0x00), Op.SUB: (0, 0x20), Op.SLL: (1, 0x00), Op.SLT: (2, 0x00),
    Op.SLTU: (3, 0x00), Op.XOR: (4, 0x00), Op.SRL: (5, 0x00), Op.SRA: (5, 0x20),
    Op.OR: (6, 0x00), Op.AND: (7, 0x00),
}
_CSR_F3 = {Op.CSRRW: 1, Op.CSRRS: 2, Op.CSRRC: 3,
           Op.CSRRWI: 5, Op.CSRRSI: 6, Op.CSRRCI: 7}

ECALL_WORD = 0x00000073
EBREAK_WORD = 0x00100073

_BRANCH_BY_F3 = {v: k for k, v in _BRANCH_F3.items()}
_LOAD_BY_F3 = {v: k for k, v in _LOAD_F3.items()}
_STORE_BY_F3 = {v: k for k, v in _STORE_F3.items()}
_OPIMM_BY_F3 = {v: k for k, v in _OPIMM_F3.items()}
_SHIFT_BY_F3_F7 = {v: k for k, v in _SHIFT_F3_F7.items()}
_OP_BY_F3_F7 = {v: k for k, v in _OP_F3_F7.items()}
_CSR_BY_F3 = {v: k for k, v in _CSR_F3.items()}


# -- decoder ---------------------------------------------------------------

def decode(w: int) -> DecodeResult:
    """Decode one 32-bit word. Never raises for ``0 <= w < 2**32``."""
    opc = w & 0x7F
    rd = (w >> 7) & 0x1F
    f3 = (w >> 12) & 0x7
    rs1 = (w >> 15) & 0x1F
    rs2 = (w >> 20) & 0x1F
    f7 = w >> 25

    if opc == OPC_OP_IMM:
        op = _OPIMM_BY_F3.get(f3)
        if op is not None:
            return IType(op, rd, rs1, w >> 20)
        op = _SHIFT_BY_F3_F7.get((f3, f7))
        if op is not None:
            return ShiftImm(op, rd, rs1, rs2)
    elif opc == OPC_OP:
        op = _OP_BY_F3_F7.get((f3, f7))
        if op is not None:
            return RType(op, rd, rs1, rs2)
    elif opc == OPC_LOAD:
        op = _LOAD_BY_F3.get(f3)
        if op is not None:
            return IType(op, rd, rs1, w >> 20)
    elif opc == OPC_STORE:
        op = _STORE_BY_F3.get(f3)
        if op is not None:
            return SType(op, rs1, rs2, (f7 << 5) | rd)
    elif opc == OPC_BRANCH:
        op = _BRANCH_BY_F3.get(f3)
        if op is not None:
            imm13 = (((w >> 31) & 1) << 12
                     | ((w >> 7) & 1) << 11
                     | ((w >> 25) & 0x3F) << 5
                     | ((w >> 8) & 0xF) << 1)
            return BType(op, rs1, rs2, imm13)
    elif opc == OPC_LUI:
        return UType(Op.LUI, rd, w >> 12)
    elif opc == OPC_AUIPC:
        return UType(Op.AUIPC, rd, w >> 12)
    elif opc == OPC_JAL:
        imm21 = (((w >> 31) & 1) << 20
                 | ((w >> 12) & 0xFF) << 12
                 | ((w >> 20) & 1) << 11
                 | ((w >> 21) & 0x3FF) << 1)
        return JType(Op.JAL, rd, imm21)
    elif opc == OPC_JALR:
        if f3 == 0:
            return IType(Op.JALR, rd, rs1, w >> 20)
    elif opc == OPC_MISC_MEM:
        if f3 == 0:
            return Fence(Op.FENCE, w >> 28, (w >> 24) & 0xF, (w >> 20) & 0xF, rd, rs1)
        if f3 == 1:
            return IType(Op.FENCE_I, rd, rs1, w >> 20)
    elif opc == OPC_SYSTEM:
        if f3 == 0:
            if w == ECALL_WORD:
                return System(Op.ECALL)
            if w == EBREAK_WORD:
                return System(Op.EBREAK)
        else:
            op = _CSR_BY_F3.get(f3)
            if op is not None:
                if f3 & 4:
                    return CsrImm(op, rd, rs1, w >> 20)
                return CsrReg(op, rd, rs1, w >> 20)
    return Illegal(w)


# -- encoder ---------------------------------------------------------------

def _r(f7: int, rs2: int, rs1: int, f3: int, rd: int, opc: int) -> int:
    return f7 << 25 | rs2 << 20 | rs1 << 15 | f3 << 12 | rd << 7 | opc


def _i(imm12: int, rs1: int, f3: int, rd: int, opc: int) -> int:
    return imm12 << 20 | rs1 << 15 | f3 << 12 | rd << 7 | opc


def encode(i: Instr) -> int:
    """Canonical 32-bit encoding of ``i``; raises ValueError on bad fields."""
    bad = validate(i)
    if bad:
        raise ValueError(f"cannot encode {i!r}: bad field(s) {', '.join(bad)}")
    op = i.op
    if op in _OP_F3_F7:
        f3, f7 = _OP_F3_F7[op]
        return _r(f7, i.rs2, i.rs1, f3, i.rd, OPC_OP)
    if op in _OPIMM_F3:
        return _i(i.imm12, i.rs1, _OPIMM_F3[op], i.rd, OPC_OP_IMM)
    if op in _SHIFT_F3_F7:
        f3, f7 = _SHIFT_F3_F7[op]
        return _r(f7, i.shamt, i.rs1, f3, i.rd, OPC_OP_IMM)
    if op in _LOAD_F3:
        return _i(i.imm12, i.rs1, _LOAD_F3[op], i.rd, OPC_LOAD)
    if op in _STORE_F3:
        return _r(i.imm12 >> 5, i.rs2, i.rs1, _STORE_F3[op], i.imm12 & 0x1F, OPC_STORE)
    if op in _BRANCH_F3:
        imm = i.imm13
        hi = ((imm >> 12) & 1) << 6 | (imm >> 5) & 0x3F
        lo = ((imm >> 1) & 0xF) << 1 | (imm >> 11) & 1
        return _r(hi, i.rs2, i.rs1, _BRANCH_F3[op], lo, OPC_BRANCH)
    if op is Op.LUI:
        return i.imm20 << 12 | i.rd << 7 | OPC_LUI
    if op is Op.AUIPC:
        return i.imm20 << 12 | i.rd << 7 | OPC_AUIPC
    if op is Op.JAL:
        imm = i.imm21
        body = (((imm >> 20) & 1) << 19 | ((imm >> 1) & 0x3FF) << 9
                | ((imm >> 11) & 1) << 8 | (imm >> 12) & 0xFF)
        return body << 12 | i.rd << 7 | OPC_JAL
    if op is Op.JALR:
        return _i(i.imm12, i.rs1, 0, i.rd, OPC_JALR)
    if op is Op.FENCE:
        imm12 = i.fm << 8 | i.pred << 4 | i.succ
        return _i(imm12, i.rs1, 0, i.rd, OPC_MISC_MEM)
    if op is Op.FENCE_I:
        return _i(i.imm12, i.rs1, 1, i.rd, OPC_MISC_MEM)
    if op is Op.ECALL:
        return ECALL_WORD
    if op is Op.EBREAK:
        return EBREAK_WORD
    if op in _CSR_F3:
        src = i.zimm if isinstance(i, CsrImm) else i.rs1
        return _i(i.csr, src, _CSR_F3[op], i.rd, OPC_SYSTEM)
    raise ValueError(f"unknown instruction {i!r}")  # pragma: no cover


def disassemble(i: DecodeResult) -> str:
    if isinstance(i, Illegal):
        return f"illegal 0x{i.word:08x}"
    args = ", ".join(f"{name}={getattr(i, name)}" for name in operand_fields(i.op))
    return f"{i.op.value} {args}".rstrip()
