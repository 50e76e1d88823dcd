import random
from dataclasses import replace

import pytest
from hypothesis import given, strategies as st
from pyrsistent import pmap

from rv32i.bitops import low_bits
from rv32i.execute import (AluOp, alu, exec_alu, exec_auipc, exec_branch,
                           exec_csr, exec_fence, exec_jal, exec_jalr,
                           exec_lui, exec_load, exec_store, exec_system,
                           pc_advance4, run, step, step_decoded,
                           trace_run)
from rv32i.harness.generators import random_instr, random_state
from rv32i.isa import ALL_OPS, Illegal, Op, encode, is_csr, is_memory_write, make
from rv32i.machine import EventKind, HostEvent, MachineState, fresh_state

M = 2 ** 32


def st_with(regs=None, pc=0x1000, **kw):
    r = [0] * 32
    for k, v in (regs or {}).items():
        r[k] = v
    return MachineState(regs=tuple(r), pc=pc, **kw)


def only_changed(a: MachineState, b: MachineState) -> set:
    diff = {f for f in ("pc", "mem", "csrs", "halt", "mode", "trace") if getattr(a, f) != getattr(b, f)}
    diff |= {f"x{i}" for i in range(32) if a.regs[i] != b.regs[i]}
    return diff


# -- JALR ------------------------------------------------------------------

def test_exec_jalr_worked_example():
    s = st_with({5: 0x2003}, pc=0x1000)
    t = exec_jalr(s, 1, 5, 4)
    # (0x2003 + 4) mod 2^32 = 0x2007, bit 0 cleared
    assert t.pc == 0x2006
    assert t.regs[1] == 0x1004
    assert only_changed(s, t) == {"pc", "x1"}


def test_exec_jalr_rd_zero_discards_link():
    s = st_with({5: 0x3000})
    t = exec_jalr(s, 0, 5, 0)
    assert t.regs == s.regs and t.pc == 0x3000


@given(st.integers(0, M - 1), st.integers(0, 31), st.integers(0, 31),
       st.integers(0, 4095), st.integers(0, M - 1))
def test_exec_jalr_clauses(pc, rd, rs1, off, v):
    s = st_with({rs1: v} if rs1 else {}, pc=pc)
    t = exec_jalr(s, rd, rs1, off)
    assert t.pc % 2 == 0
    signed_off = off - 4096 if off >= 2048 else off
    assert t.pc == ((s.regs[rs1] + signed_off) % M) - ((s.regs[rs1] + signed_off) % M) % 2
    if rd:
        assert t.regs[rd] == (pc + 4) % M
    assert len(t.regs) == 32 and t.regs[0] == 0


# -- pc advance / ALU --------------------------------------------------------

def test_pc_advance4():
    assert pc_advance4(st_with(pc=0)).pc == 4
    s = st_with({3: 3}, pc=0xFFFFFFFC)
    t = pc_advance4(s)
    assert t.pc == (0xFFFFFFFC + 4) % M == 0
    assert only_changed(s, t) == {"pc"}


@pytest.mark.parametrize("op, a, b, want", [
    (AluOp.ADD, 0xFFFFFFFF, 1, (0xFFFFFFFF + 1) % M),
    (AluOp.SRA, 0x80000000, 31, 0xFFFFFFFF),        # floor(-2^31 / 2^31) = -1
    (AluOp.SLTU, 1, 0xFFFFFFFF, 1),
    (AluOp.SLT, 0xFFFFFFFF, 0, 1),
    (AluOp.SUB, 0, 1, 0xFFFFFFFF),
    (AluOp.SLL, 1, 33, 2),                          # shift amount taken mod 32
    (AluOp.SRL, 0x80000000, 31, 1),
    (AluOp.SRA, 0x7FFFFFFF, 30, 1),
    (AluOp.XOR, 0xF0F0F0F0, -1, 0x0F0F0F0F),         # sign-extended immediate operand
    (AluOp.AND, 0xFFFFFFFF, -2048, 0xFFFFF800),
])
def test_alu_examples(op, a, b, want):
    assert alu(op, a, b) == want


@given(st.sampled_from(list(AluOp)), st.integers(0, M - 1), st.integers(-2048, M - 1))
def test_alu_against_arbitrary_precision(op, a, b):
    sa = a - M if a >= 2 ** 31 else a
    bw = b % M
    sb = bw - M if bw >= 2 ** 31 else bw
    sh = b % 32
    ref = {
        AluOp.ADD: a + b, AluOp.SUB: a - b, AluOp.SLL: a * 2 ** sh,
        AluOp.SLT: int(sa < sb), AluOp.SLTU: int(a < bw),
        AluOp.XOR: a ^ bw, AluOp.OR: a | bw, AluOp.AND: a & bw,
        AluOp.SRL: a // 2 ** sh, AluOp.SRA: sa // 2 ** sh,
    }[op]
    assert alu(op, a, b) == ref % M


def test_exec_alu_leaves_pc():
    s = st_with()
    t = exec_alu(s, AluOp.ADD, 3, 1, 2)
    assert t.regs[3] == 3 and t.pc == s.pc
    assert exec_alu(s, AluOp.ADD, 0, 1, 2) == s


# -- upper immediates / jumps / branches -----------------------------------

def test_lui_auipc():
    s = st_with(pc=0x1000)
    assert exec_lui(s, 3, 0x12345).regs[3] == 0x12345 * 2 ** 12
    assert exec_lui(s, 0, 0x12345).regs == s.regs
    assert exec_auipc(s, 3, 1).regs[3] == (0x1000 + 2 ** 12) % M
    assert exec_auipc(st_with(pc=0xFFFFF000), 3, 1).regs[3] == 0


def test_jal():
    s = st_with(pc=0x1000)
    t = exec_jal(s, 1, 8)
    assert (t.pc, t.regs[1]) == (0x1008, 0x1004)
    minus4 = (-4) % 2 ** 21
    assert exec_jal(s, 1, minus4).pc == 0xFFC
    t0 = exec_jal(s, 0, 8)
    assert t0.pc == 0x1008 and t0.regs == s.regs


def test_branches():
    s = st_with({1: 5, 2: 5}, pc=0x100)
    assert exec_branch(s, Op.BEQ, 1, 2, 0x10).pc == 0x110
    s2 = st_with({1: 5, 2: 6}, pc=0x100)
    assert exec_branch(s2, Op.BEQ, 1, 2, 0x10).pc == 0x104
    neg = st_with({1: 0xFFFFFFFF, 2: 0}, pc=0x100)
    assert exec_branch(neg, Op.BLT, 1, 2, 0x10).pc == 0x110   # -1 < 0
    assert exec_branch(neg, Op.BLTU, 1, 2, 0x10).pc == 0x104  # 2^32-1 >= 0
    assert exec_branch(neg, Op.BGE, 1, 2, 0x10).pc == 0x104
    assert exec_branch(neg, Op.BGEU, 1, 2, 0x10).pc == 0x110
    assert exec_branch(s2, Op.BNE, 1, 2, 0x1FF0).pc == 0xF0
    with pytest.raises(ValueError):
        exec_branch(s, Op.ADD, 1, 2, 0)


# -- memory ----------------------------------------------------------------

def test_loads_sign_and_zero_extend():
    s = st_with({2: 0x500}, mem=pmap({0x500: 0x80, 0x501: 0xFF}))
    assert exec_load(s, Op.LB, 1, 2, 0).regs[1] == (0x80 - 256) % M == 0xFFFFFF80
    assert exec_load(s, Op.LBU, 1, 2, 0).regs[1] == 0x80
    assert exec_load(s, Op.LH, 1, 2, 0).regs[1] == 0xFFFFFF80
    assert exec_load(s, Op.LHU, 1, 2, 0).regs[1] == 0xFF80
    assert exec_load(s, Op.LW, 1, 2, 0).regs[1] == 0xFF80
    assert exec_load(s, Op.LW, 0, 2, 0) == s


def test_store_then_load_round_trips():
    s = st_with({2: 0x600, 3: 0xDEADBEEF})
    t = exec_store(s, Op.SW, 2, 3, 0x10)
    assert t.regs == s.regs
    u = exec_load(t, Op.LW, 4, 2, 0x10)
    assert u.regs[4] == 0xDEADBEEF
    assert exec_load(exec_store(s, Op.SB, 2, 3, 0), Op.LBU, 4, 2, 0).regs[4] == 0xEF


def test_misaligned_and_wrapping_access():
    s = st_with({2: 0xFFFFFFFF, 3: 0x11223344})
    t = exec_store(s, Op.SW, 2, 3, 0)
    assert dict(t.mem) == {0xFFFFFFFF: 0x44, 0: 0x33, 1: 0x22, 2: 0x11}
    assert exec_load(t, Op.LW, 5, 2, 0).regs[5] == 0x11223344


# -- system / fence / CSR --------------------------------------------------

def test_ecall_halts_and_logs():
    s = st_with({10: 1}, pc=0x44)
    t = exec_system(s, Op.ECALL)
    assert t.halt is True and t.pc == 0x44
    assert t.trace == (HostEvent(EventKind.ECALL, 0x44),)
    assert only_changed(s, t) == {"halt", "trace"}
    assert exec_system(s, Op.EBREAK).trace[-1].kind is EventKind.EBREAK


def test_fence_is_identity():
    s = st_with({1: 2})
    assert exec_fence(s, 0, 0xF, 0xF, 0, 0) is s
    for i in (make(Op.FENCE, fm=8, pred=3, succ=3, rd=0, rs1=0),
              make(Op.FENCE_I, rd=1, rs1=2, imm12=3)):
        t = step(s, i)
        assert only_changed(s, t) == {"pc"} and t.pc == s.pc + 4


def test_csr_semantics():
    s = st_with({2: 0x42})
    t = exec_csr(s, Op.CSRRW, 1, 0x42, 0x305)
    assert t.regs[1] == 0 and t.csrs[0x305] == 0x42
    s2 = replace(s, csrs=pmap({0x305: 0xF0}))
    t2 = step(s2, make(Op.CSRRS, rd=3, rs1=0, csr=0x305))
    assert t2.csrs == s2.csrs and t2.regs[3] == 0xF0
    s3 = st_with({4: 0xFFFFFFFF}, csrs=pmap({0x305: 0x1234}))
    t3 = step(s3, make(Op.CSRRC, rd=0, rs1=4, csr=0x305))
    assert t3.csrs[0x305] == 0
    t4 = step(s3, make(Op.CSRRSI, rd=1, zimm=0, csr=0x305))
    assert t4.csrs == s3.csrs and t4.regs[1] == 0x1234
    t5 = step(s3, make(Op.CSRRWI, rd=0, zimm=0, csr=0x305))
    assert t5.csrs[0x305] == 0


def test_csr_rd_equals_rs1_uses_old_register_value():
    s = st_with({2: 0x0F}, csrs=pmap({0x340: 0xF0}))
    t = step(s, make(Op.CSRRS, rd=2, rs1=2, csr=0x340))
    assert t.regs[2] == 0xF0 and t.csrs[0x340] == 0xFF


# -- step / run ------------------------------------------------------------

def test_step_on_halted_state_is_identity():
    rng = random.Random(1)
    s = replace(random_state(rng), halt=True)
    for op in ALL_OPS:
        assert step(s, random_instr(rng, op)) is s


def test_nop_only_advances_pc():
    s = st_with({1: 5})
    t = step(s, make(Op.ADDI, rd=0, rs1=0, imm12=0))
    assert only_changed(s, t) == {"pc"} and t.pc == 0x1004


def test_step_jalr_matches_exec_jalr():
    s = st_with({5: 0x2003}, pc=0x1000)
    i = make(Op.JALR, rd=1, rs1=5, imm12=4)
    assert step(s, i) == exec_jalr(s, 1, 5, 4)


def test_step_rejects_non_instructions():
    with pytest.raises(TypeError):
        step(st_with(), object())


def test_step_decoded_illegal_halts_once():
    s = fresh_state(pc=8)
    post = step_decoded(s, Illegal(0))
    assert post.halt and post.pc == 8
    assert post.trace == (HostEvent(EventKind.ILLEGAL_INSTRUCTION, 8),)
    assert step_decoded(post, Illegal(0)) is post
    i = make(Op.ADDI, rd=1, rs1=0, imm12=3)
    assert step_decoded(s, i) == step(s, i)


def test_run_examples():
    s = fresh_state()
    assert run(s, 0) is s
    ecall = fresh_state(mem={0: 0x73, 1: 0, 2: 0, 3: 0})
    t = run(ecall, 10)
    assert t.halt and t.trace == (HostEvent(EventKind.ECALL, 0),)
    empty = run(fresh_state(), 10)
    assert empty.halt and empty.trace == (HostEvent(EventKind.ILLEGAL_INSTRUCTION, 0),)
    assert len(list(trace_run(fresh_state(), 10))) == 1
    with pytest.raises(ValueError):
        run(s, -1)


def test_run_respects_fuel():
    word = encode(make(Op.JAL, rd=0, imm21=0))
    s = fresh_state(mem={j: (word >> (8 * j)) & 0xFF for j in range(4)})
    assert len(list(trace_run(s, 100))) == 100
    t = run(s, 100)
    assert not t.halt and t.pc == 0


@given(st.randoms(use_true_random=False), st.sampled_from(ALL_OPS))
def test_step_global_properties(r, op):
    i = random_instr(r, op)
    s = random_state(r, instr=i)
    t = step(s, i)
    assert len(t.regs) == 32 and t.regs[0] == 0
    assert 0 <= t.pc < M
    assert t.invariant_violations() == []
    if not is_csr(i) and not s.halt:
        assert t.csrs == s.csrs
    if not is_memory_write(i):
        assert t.mem == s.mem
    assert step(s, i) == t
