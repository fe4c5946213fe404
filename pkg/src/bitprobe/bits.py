"""Packed bit vector, LSB-first within bytes.

Bit w lives in byte w >> 3 at position w & 7.  This is the layout the
scheme files use on disk, so ``to_bytes``/``from_bytes`` are exact.
"""

import numpy as np


class Bitmap:
    def __init__(self, nbits: int, buf: bytearray | None = None):
        if nbits < 0:
            raise ValueError("nbits must be non-negative")
        nbytes = (nbits + 7) >> 3
        if buf is None:
            buf = bytearray(nbytes)
        elif len(buf) != nbytes:
            raise ValueError(f"buffer length {len(buf)} != {nbytes} for {nbits} bits")
        self.nbits = nbits
        self._buf = bytearray(buf)

    @classmethod
    def from_bytes(cls, nbits: int, data: bytes) -> "Bitmap":
        return cls(nbits, bytearray(data))

    @classmethod
    def from_bool_array(cls, arr) -> "Bitmap":
        arr = np.asarray(arr, dtype=bool)
        bm = cls(len(arr))
        bm._buf = bytearray(np.packbits(arr, bitorder="little").tobytes())
        return bm

    @classmethod
    def from_indices(cls, nbits: int, indices) -> "Bitmap":
        flags = np.zeros(nbits, dtype=bool)
        idx = np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices,
                         dtype=np.int64)
        if idx.size:
            if idx.min() < 0 or idx.max() >= nbits:
                raise ValueError("bit index out of range")
            flags[idx] = True
        return cls.from_bool_array(flags)

    def _check(self, i: int) -> None:
        if not 0 <= i < self.nbits:
            raise IndexError(f"bit {i} out of range [0, {self.nbits})")

    def get(self, i: int) -> int:
        self._check(i)
        return (self._buf[i >> 3] >> (i & 7)) & 1

    def set(self, i: int, value: int = 1) -> None:
        self._check(i)
        if value:
            self._buf[i >> 3] |= 1 << (i & 7)
        else:
            self._buf[i >> 3] &= ~(1 << (i & 7)) & 0xFF

    def popcount(self) -> int:
        return int(np.unpackbits(np.frombuffer(bytes(self._buf), dtype=np.uint8),
                                 bitorder="little")[: self.nbits].sum())

    def as_bool_array(self) -> np.ndarray:
        return np.unpackbits(np.frombuffer(bytes(self._buf), dtype=np.uint8),
                             bitorder="little")[: self.nbits].astype(bool)

    def to_bytes(self) -> bytes:
        return bytes(self._buf)

    def __len__(self) -> int:
        return self.nbits

    def __eq__(self, other) -> bool:
        if not isinstance(other, Bitmap):
            return NotImplemented
        return self.nbits == other.nbits and self._buf == other._buf

    def __repr__(self) -> str:
        return f"Bitmap(nbits={self.nbits}, popcount={self.popcount()})"
