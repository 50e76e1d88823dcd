"""Single-component perturbations of a post-state.

Used to show the frame and global checks are not vacuous: every mutant
produced here touches exactly one component outside the footprint and
must be reported under that component's name.
"""

from __future__ import annotations

import random
from dataclasses import replace
from typing import Iterator

from ..machine import EventKind, HostEvent, MachineState
from ..speccheck import FrameFootprint


def mutants_outside(pre: MachineState, post: MachineState, fp: FrameFootprint,
                    rng: random.Random) -> Iterator[tuple[str, MachineState]]:
    """Yield ``(component name, mutated post)`` pairs."""
    regs = post.regs
    for r in range(len(regs)):
        if r in fp.writable_regs:
            continue
        flipped = regs[r] ^ (1 << rng.randrange(32))
        yield f"x{r}", replace(post, regs=regs[:r] + (flipped,) + regs[r + 1:])
    yield "regs.length", replace(post, regs=regs + (0,))
    if not fp.may_change_pc:
        yield "pc", replace(post, pc=(post.pc + 4) & 0xFFFFFFFF)
    writable = fp.writable_mem or frozenset()
    for _ in range(3):
        a = rng.getrandbits(32)
        if a not in writable:
            yield f"mem[{hex(a)}]", replace(post, mem=post.mem.set(a, (post.mem.get(a, 0) + 1) % 256))
    for a in writable:
        for b in ((a - 1) & 0xFFFFFFFF, (a + 1) & 0xFFFFFFFF):
            if b not in writable:
                yield f"mem[{hex(b)}]", replace(post, mem=post.mem.set(b, (post.mem.get(b, 0) + 1) % 256))
    csr_ok = fp.may_change_csrs or frozenset()
    a = rng.getrandbits(12)
    if a not in csr_ok:
        yield f"csr[{hex(a)}]", replace(post, csrs=post.csrs.set(a, post.csrs.get(a, 0) ^ 1))
    if not fp.may_change_halt:
        yield "halt", replace(post, halt=not post.halt)
    yield "mode", replace(post, mode="User")
    extra = (HostEvent(EventKind.EBREAK, 0),)
    if fp.may_append_trace:
        # only events already present before the step are protected
        if pre.trace:
            yield "trace", replace(post, trace=extra + post.trace[1:])
    else:
        yield "trace", replace(post, trace=post.trace + extra)
