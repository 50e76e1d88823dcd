import random
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from rv32i.harness.generators import random_instr
from rv32i.isa import (ALL_OPS, CsrImm, CsrReg, IType, Illegal, Op, ShiftImm,
                       System, decode, disassemble, encode, is_csr,
                       is_memory_write, make, operand_fields, validate)

VECTORS = Path(__file__).with_name("data") / "asm_vectors.txt"

# (mask, match) per instruction, transcribed from the base opcode map.
MASK_MATCH = {
    "lui": (0x7F, 0x37), "auipc": (0x7F, 0x17), "jal": (0x7F, 0x6F),
    "jalr": (0x707F, 0x67),
    "beq": (0x707F, 0x63), "bne": (0x707F, 0x1063), "blt": (0x707F, 0x4063),
    "bge": (0x707F, 0x5063), "bltu": (0x707F, 0x6063), "bgeu": (0x707F, 0x7063),
    "lb": (0x707F, 0x03), "lh": (0x707F, 0x1003), "lw": (0x707F, 0x2003),
    "lbu": (0x707F, 0x4003), "lhu": (0x707F, 0x5003),
    "sb": (0x707F, 0x23), "sh": (0x707F, 0x1023), "sw": (0x707F, 0x2023),
    "addi": (0x707F, 0x13), "slti": (0x707F, 0x2013), "sltiu": (0x707F, 0x3013),
    "xori": (0x707F, 0x4013), "ori": (0x707F, 0x6013), "andi": (0x707F, 0x7013),
    "slli": (0xFE00707F, 0x1013), "srli": (0xFE00707F, 0x5013),
    "srai": (0xFE00707F, 0x40005013),
    "add": (0xFE00707F, 0x33), "sub": (0xFE00707F, 0x40000033),
    "sll": (0xFE00707F, 0x1033), "slt": (0xFE00707F, 0x2033),
    "sltu": (0xFE00707F, 0x3033), "xor": (0xFE00707F, 0x4033),
    "srl": (0xFE00707F, 0x5033), "sra": (0xFE00707F, 0x40005033),
    "or": (0xFE00707F, 0x6033), "and": (0xFE00707F, 0x7033),
    "fence": (0x707F, 0x0F), "fence.i": (0x707F, 0x100F),
    "ecall": (0xFFFFFFFF, 0x73), "ebreak": (0xFFFFFFFF, 0x100073),
    "csrrw": (0x707F, 0x1073), "csrrs": (0x707F, 0x2073), "csrrc": (0x707F, 0x3073),
    "csrrwi": (0x707F, 0x5073), "csrrsi": (0x707F, 0x6073), "csrrci": (0x707F, 0x7073),
}


def table_lookup(w: int) -> list[str]:
    return [name for name, (mask, match) in MASK_MATCH.items() if w & mask == match]


def load_vectors():
    rows = []
    for line in VECTORS.read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        word, name, *kv = line.split()
        rows.append((int(word, 16), Op(name), {k: int(v) for k, v in (p.split("=") for p in kv)}))
    return rows


def test_roster_has_47_instructions():
    assert len(ALL_OPS) == 47
    assert {op.value for op in ALL_OPS} == set(MASK_MATCH)


def test_vectors_cover_every_instruction():
    assert {op for _, op, _ in load_vectors()} == set(ALL_OPS)


def test_assembler_vectors_decode_and_encode():
    for word, op, fields in load_vectors():
        instr = make(op, **fields)
        assert decode(word) == instr, f"{word:#010x}"
        assert encode(instr) == word, disassemble(instr)


def test_decode_examples():
    assert decode(0x004280E7) == make(Op.JALR, rd=1, rs1=5, imm12=4)
    assert decode(0x00000013) == make(Op.ADDI, rd=0, rs1=0, imm12=0)
    assert decode(0x00000073) == System(Op.ECALL)
    assert decode(0xFFFFFFFF) == Illegal(0xFFFFFFFF)
    assert table_lookup(0xFFFFFFFF) == []


def test_encode_examples():
    assert encode(make(Op.JALR, rd=1, rs1=5, imm12=4)) == 0x004280E7
    assert encode(make(Op.ADDI, rd=0, rs1=0, imm12=0)) == 0x00000013


def test_zero_word_is_illegal():
    assert decode(0) == Illegal(0)


@pytest.mark.parametrize("word", [
    0x02001013,  # slli with funct7 bit 25 set (RV64 shamt[5])
    0x20005013,  # srli with a non-canonical funct7
    0x02000033,  # add with funct7 = 0000001 (M extension mul)
    0x00100033 | (0x10 << 25),
    0x00200073,  # uret-style SYSTEM word
    0x30200073,  # mret
    0x00000873,  # ecall with rd != 0
    0x00004073,  # SYSTEM funct3 = 100
    0x00003067,  # jalr with funct3 != 0
    0x00007003,  # load funct3 = 111
    0x00003023,  # sd (RV64)
    0x0000200F,  # MISC-MEM funct3 = 010
    0x00002063,  # branch funct3 = 010
])
def test_reserved_patterns_are_illegal(word):
    assert isinstance(decode(word), Illegal)
    assert table_lookup(word) == []


def test_decode_agrees_with_mask_match_table():
    rng = random.Random(7)
    opcodes = [0x03, 0x0F, 0x13, 0x17, 0x23, 0x33, 0x37, 0x63, 0x67, 0x6F, 0x73]
    for n in range(50_000):
        w = rng.getrandbits(32)
        if n % 2:
            w = (w & ~0x7F) | rng.choice(opcodes)
        names = table_lookup(w)
        assert len(names) <= 1
        d = decode(w)
        if names:
            assert d.op.value == names[0], hex(w)
        else:
            assert d == Illegal(w), hex(w)


@pytest.mark.parametrize("op", ALL_OPS, ids=lambda o: o.value)
def test_round_trip_per_variant(op):
    rng = random.Random(op.value)
    for _ in range(300):
        i = random_instr(rng, op)
        assert validate(i) == []
        w = encode(i)
        assert 0 <= w < 2 ** 32
        assert decode(w) == i


@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_decode_is_total_and_canonical(w):
    d = decode(w)
    if isinstance(d, Illegal):
        assert d.word == w
        return
    assert validate(d) == []
    w2 = encode(d)
    assert decode(w2) == d
    assert encode(decode(w2)) == w2


def test_boundary_words_decode():
    words = [0, 0xFFFFFFFF, 0x80000000, 0x7FFFFFFF]
    words += [1 << b for b in range(32)] + [0xFFFFFFFF ^ (1 << b) for b in range(32)]
    for w in words:
        decode(w)


def test_validate_reports_bad_fields():
    assert validate(make(Op.ADD, rd=32, rs1=0, rs2=0)) == ["rd"]
    assert validate(make(Op.BEQ, rs1=0, rs2=0, imm13=3)) == ["imm13"]
    assert validate(make(Op.JAL, rd=0, imm21=1 << 21)) == ["imm21"]
    assert validate(IType(Op.ADD, 0, 0, 0)) == ["op"]
    with pytest.raises(ValueError):
        encode(make(Op.CSRRW, rd=0, rs1=0, csr=4096))


def test_shapes():
    assert operand_fields(Op.JALR) == ("rd", "rs1", "imm12")
    assert operand_fields(Op.SRAI) == ("rd", "rs1", "shamt")
    assert operand_fields(Op.FENCE) == ("fm", "pred", "succ", "rd", "rs1")
    assert isinstance(make(Op.CSRRSI, rd=1, zimm=2, csr=3), CsrImm)
    assert isinstance(make(Op.CSRRS, rd=1, rs1=2, csr=3), CsrReg)
    assert isinstance(make(Op.SLLI, rd=1, rs1=2, shamt=3), ShiftImm)


def test_classification_predicates():
    rng = random.Random(3)
    csr = {"csrrw", "csrrs", "csrrc", "csrrwi", "csrrsi", "csrrci"}
    stores = {"sb", "sh", "sw"}
    for op in ALL_OPS:
        i = random_instr(rng, op)
        assert is_csr(i) == (op.value in csr)
        assert is_memory_write(i) == (op.value in stores)
    assert not is_memory_write(make(Op.LW, rd=1, rs1=2, imm12=0))
    assert not is_csr(System(Op.ECALL))
    assert not is_csr(Illegal(0)) and not is_memory_write(Illegal(0))


def test_disassemble():
    assert disassemble(decode(0x004280E7)) == "jalr rd=1, rs1=5, imm12=4"
    assert disassemble(decode(0x73)) == "ecall"
    assert disassemble(Illegal(0xFFFFFFFF)) == "illegal 0xffffffff"
