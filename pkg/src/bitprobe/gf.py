"""Binary field arithmetic and the seeded polynomial hash family.

Field elements of GF(2^b) are plain ints in [0, 2^b).  Bit i of an element
is the coefficient of x^i (LSB-first).  Addition is XOR.  Multiplication is
a carry-less product reduced modulo a fixed irreducible polynomial; the
degree-b term is implicit, so ``reduction_poly`` stores only the low part.

Supported widths and their reduction polynomials (all irreducible over
GF(2), verified independently):

    b = 3    x^3 + x + 1                      mask 0x03
    b = 8    x^8 + x^4 + x^3 + x + 1          mask 0x1B
    b = 16   x^16 + x^5 + x^3 + x + 1         mask 0x2B
    b = 32   x^32 + x^7 + x^3 + x^2 + 1       mask 0x8D
    b = 64   x^64 + x^4 + x^3 + x + 1         mask 0x1B

A hash function of the family is a polynomial over one of these fields,
held as a :class:`PolySeed` (coefficient of x^j at position j).  Seeds are
drawn from a deterministic bit stream so that encoding runs are
reproducible, or from a plain counter when a test wants to enumerate the
whole seed space.
"""

from dataclasses import dataclass

import numpy as np

_REDUCTION_POLYS = {3: 0x03, 8: 0x1B, 16: 0x2B, 32: 0x8D, 64: 0x1B}


@dataclass(frozen=True)
class FieldSpec:
    """A supported GF(2^b): element width plus the reduction polynomial mask."""

    width_bits: int
    reduction_poly: int

    def __post_init__(self):
        expected = _REDUCTION_POLYS.get(self.width_bits)
        if expected is None:
            raise ValueError(
                f"unsupported field width {self.width_bits}; "
                f"supported: {sorted(_REDUCTION_POLYS)}"
            )
        if self.reduction_poly != expected:
            raise ValueError(
                f"width {self.width_bits} uses the fixed reduction polynomial "
                f"{expected:#x}, got {self.reduction_poly:#x}"
            )

    @property
    def order(self) -> int:
        return 1 << self.width_bits


GF2_3 = FieldSpec(3, 0x03)
GF2_8 = FieldSpec(8, 0x1B)
GF2_16 = FieldSpec(16, 0x2B)
GF2_32 = FieldSpec(32, 0x8D)
GF2_64 = FieldSpec(64, 0x1B)

FIELDS_BY_WIDTH = {f.width_bits: f for f in (GF2_3, GF2_8, GF2_16, GF2_32, GF2_64)}


def field_for_width(width_bits: int) -> FieldSpec:
    try:
        return FIELDS_BY_WIDTH[width_bits]
    except KeyError:
        raise ValueError(f"unsupported field width {width_bits}") from None


def _check_element(v: int, field: FieldSpec, name: str) -> None:
    if not 0 <= v < field.order:
        raise ValueError(f"{name}={v} does not fit in {field.width_bits} bits")


def field_mul(a: int, b: int, field: FieldSpec = GF2_64) -> int:
    """Multiply two GF(2^b) elements.

    Carry-less product over the set bits of ``b``, then reduction by the
    field polynomial from the top degree down.
    """
    _check_element(a, field, "a")
    _check_element(b, field, "b")
    prod = 0
    while b:
        low = b & -b
        prod ^= a << (low.bit_length() - 1)
        b ^= low
    w = field.width_bits
    full = field.reduction_poly | (1 << w)
    for bit in range(prod.bit_length() - 1, w - 1, -1):
        if (prod >> bit) & 1:
            prod ^= full << (bit - w)
    return prod


@dataclass(frozen=True)
class PolySeed:
    """Coefficients of a hash polynomial; the scheme's cached word.

    ``coeffs[j]`` is the coefficient of x^j.  The length of the tuple is
    the independence order of the family (degree + 1).
    """

    coeffs: tuple
    field: FieldSpec

    def __post_init__(self):
        if len(self.coeffs) < 1:
            raise ValueError("seed needs at least one coefficient")
        for c in self.coeffs:
            _check_element(c, self.field, "coefficient")

    @property
    def indep_k(self) -> int:
        return len(self.coeffs)


def poly_eval(seed: PolySeed, x: int) -> int:
    """Evaluate the seed polynomial at a single field element (Horner)."""
    _check_element(x, seed.field, "x")
    coeffs = seed.coeffs
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = field_mul(acc, x, seed.field) ^ c
    return acc


# ---------------------------------------------------------------------------
# Bulk evaluation over numpy uint64 arrays.
#
# Carry-less 32x32->64 multiply via the 4-way bit-split trick: operands are
# masked into four interleaved quarters so that plain integer products never
# carry into a used bit position of their residue class.
# ---------------------------------------------------------------------------

_U64 = np.uint64
_QMASK = [_U64(0x11111111 * (1 << i)) for i in range(4)]
_QMASK64 = [_U64(0x1111111111111111 * (1 << i)) for i in range(4)]
_LOW32 = _U64(0xFFFFFFFF)
_S32 = _U64(32)


def _clmul32_block(x, y):
    x0 = x & _QMASK[0]
    x1 = x & _QMASK[1]
    x2 = x & _QMASK[2]
    x3 = x & _QMASK[3]
    y0 = y & _QMASK[0]
    y1 = y & _QMASK[1]
    y2 = y & _QMASK[2]
    y3 = y & _QMASK[3]
    z0 = (x0 * y0) ^ (x1 * y3) ^ (x2 * y2) ^ (x3 * y1)
    z1 = (x0 * y1) ^ (x1 * y0) ^ (x2 * y3) ^ (x3 * y2)
    z2 = (x0 * y2) ^ (x1 * y1) ^ (x2 * y0) ^ (x3 * y3)
    z3 = (x0 * y3) ^ (x1 * y2) ^ (x2 * y1) ^ (x3 * y0)
    return (z0 & _QMASK64[0]) | (z1 & _QMASK64[1]) | (z2 & _QMASK64[2]) | (z3 & _QMASK64[3])


def _poly_bit_positions(field: FieldSpec):
    return tuple(i for i in range(field.width_bits) if (field.reduction_poly >> i) & 1)


def _mul_block_small(a, b, field: FieldSpec):
    # width <= 32: the whole product fits in a uint64; fold the top twice.
    w = field.width_bits
    bits = _poly_bit_positions(field)
    wmask = _U64((1 << w) - 1)
    prod = _clmul32_block(a, b)
    for _ in range(2):
        hi = prod >> _U64(w)
        prod &= wmask
        for beta in bits:
            prod ^= hi << _U64(beta)
    return prod


def _mul_block_64(a, b, field: FieldSpec):
    # Karatsuba over 32-bit halves, then fold the high word modulo the
    # field polynomial (two folds suffice: the low part has degree <= 4).
    bits = _poly_bit_positions(field)
    a0 = a & _LOW32
    a1 = a >> _S32
    b0 = b & _LOW32
    b1 = b >> _S32
    z0 = _clmul32_block(a0, b0)
    z2 = _clmul32_block(a1, b1)
    z1 = _clmul32_block(a0 ^ a1, b0 ^ b1) ^ z0 ^ z2
    lo = z0 ^ (z1 << _S32)
    hi = z2 ^ (z1 >> _S32)
    acc = lo
    over = np.zeros_like(hi)
    for beta in bits:
        acc ^= hi << _U64(beta)
        if beta:
            over ^= hi >> _U64(64 - beta)
    for beta in bits:
        acc ^= over << _U64(beta)
    return acc


def poly_eval_block(seed: PolySeed, xs) -> np.ndarray:
    """Evaluate the seed polynomial at every point of a uint64 array."""
    xs = np.ascontiguousarray(xs, dtype=np.uint64)
    mul = _mul_block_64 if seed.field.width_bits == 64 else _mul_block_small
    acc = np.full(xs.shape, _U64(seed.coeffs[-1]), dtype=np.uint64)
    for c in reversed(seed.coeffs[:-1]):
        acc = mul(acc, xs, seed.field)
        acc ^= _U64(c)
    return acc


# ---------------------------------------------------------------------------
# Seed drawing.
# ---------------------------------------------------------------------------


def default_indep_k(universe_bits: int) -> int:
    """Default independence order: (log2 m)^2 for a 2^u universe."""
    return universe_bits * universe_bits


def seed_from_index(index: int, indep_k: int, field: FieldSpec) -> PolySeed:
    """Map an integer in [0, 2^(b*k)) to a seed; bijective on that range.

    Coefficient j takes bits [j*b, (j+1)*b) of the index, so counting
    through indices enumerates the whole seed space without repetition.
    """
    if indep_k < 1:
        raise ValueError("indep_k must be >= 1")
    w = field.width_bits
    if not 0 <= index < 1 << (w * indep_k):
        raise ValueError("seed index out of range")
    mask = (1 << w) - 1
    coeffs = tuple((index >> (j * w)) & mask for j in range(indep_k))
    return PolySeed(coeffs, field)


def draw_seed(rng, indep_k: int, field: FieldSpec = GF2_64) -> PolySeed:
    """Draw the next seed from ``rng`` (anything with ``getrandbits``)."""
    if indep_k < 1:
        raise ValueError("indep_k must be >= 1")
    raw = rng.getrandbits(field.width_bits * indep_k)
    return seed_from_index(raw, indep_k, field)


class CounterRng:
    """Counter standing in for an rng, for exhaustive seed enumeration.

    ``getrandbits(n)`` returns successive integers 0, 1, 2, ... so that
    ``draw_seed`` walks the full seed space in index order.  Raises once
    the counter no longer fits in n bits (the space is exhausted).
    """

    def __init__(self, start: int = 0):
        self._next = start

    def getrandbits(self, n: int) -> int:
        value = self._next
        if value >= 1 << n:
            raise ValueError(f"seed space of {n} bits exhausted")
        self._next = value + 1
        return value
