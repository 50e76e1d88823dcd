"""Word-level arithmetic over unbounded Python integers.

Every helper is total: inputs may be any ``int`` (negative or wider than
32 bits) and results are folded into range at the boundary.
"""

XLEN = 32
WORD_MOD = 1 << XLEN
WORD_MASK = WORD_MOD - 1


def low_bits(k: int, z: int) -> int:
    """Return ``z mod 2**k`` (always non-negative)."""
    if k < 1:
        raise ValueError(f"bit width must be positive, got {k}")
    # Python's & on negative ints behaves like infinite two's complement,
    # which is exactly the mathematical modulo for powers of two.
    return z & ((1 << k) - 1)


def low_xlen(z: int) -> int:
    return z & WORD_MASK


def sext_from(k: int, z: int) -> int:
    """Interpret the low ``k`` bits of ``z`` as a two's-complement value."""
    m = low_bits(k, z)
    if m >> (k - 1):
        return m - (1 << k)
    return m


def addr_mod(z: int) -> int:
    return z & WORD_MASK


def jalr_target(z: int) -> int:
    """Fold ``z`` to a word and clear bit 0."""
    return z & (WORD_MASK - 1)


def to_signed32(w: int) -> int:
    return sext_from(32, w)


def is_word(v) -> bool:
    return type(v) is int and 0 <= v < WORD_MOD
