"""Pure-functional RV32I interpreter with executable frame and postcondition checks."""

from .execute import run, step
from .isa import Illegal, Op, decode, encode
from .machine import MachineState, fresh_state

__all__ = ["Illegal", "MachineState", "Op", "decode", "encode", "fresh_state", "run", "step"]
__version__ = "0.1.0"
