"""Portable container for enumeratively coded byte strings.

Layout (all integers big-endian)::

    offset  size  field
    0       4     magic b"ENUM"
    4       1     version (1)
    5       1     n, number of alphabet symbols (1..255)
    6       2     reserved, zero
    8       4     T, sequence length (u32)
    12      4     payload bit length, ceil(log2 K) (u32)
    16      4n    counts, one u32 per symbol, in alphabet order
    16+4n   n     alphabet, one byte value per symbol, strictly increasing
    17+5n   ...   rank as a minimal big-endian integer, ceil(bits / 8) bytes

The fixed 16-byte preamble is followed by the per-symbol tables, so a
file is self-describing and decodes without side information.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

from .combinatorics import TypeVector, multinomial_count, rank_sequence, unrank_sequence
from .errors import CompositionMismatch, CorruptHeader

MAGIC = b"ENUM"
VERSION = 1
_PREAMBLE = struct.Struct(">4sBBHII")


def payload_bits(t: TypeVector) -> int:
    """ceil(log2 K), computed exactly: K - 1 needs this many bits."""
    return (multinomial_count(t) - 1).bit_length()


@dataclass(frozen=True)
class Encoded:
    counts: tuple[int, ...]
    alphabet: bytes
    rank: int
    bits: int

    def to_bytes(self) -> bytes:
        n = len(self.counts)
        head = _PREAMBLE.pack(MAGIC, VERSION, n, 0, sum(self.counts), self.bits)
        tables = struct.pack(f">{n}I", *self.counts) + self.alphabet
        return head + tables + self.rank.to_bytes((self.bits + 7) // 8, "big")


def encode(data: bytes, counts=None, alphabet: bytes | None = None) -> Encoded:
    """Rank ``data`` among all byte strings of the same composition.

    ``alphabet`` defaults to the distinct byte values of ``data``; ``counts``
    defaults to the observed counts. A declared composition that does not
    match the data raises :class:`CompositionMismatch`.
    """
    data = bytes(data)
    alphabet = bytes(sorted(set(data))) if alphabet is None else bytes(alphabet)
    if not alphabet:
        raise CompositionMismatch("cannot encode an empty sequence without an alphabet")
    if list(alphabet) != sorted(set(alphabet)):
        raise CompositionMismatch("alphabet bytes must be distinct and increasing")
    if len(alphabet) > 255:
        raise CompositionMismatch("at most 255 distinct symbols fit the header")
    symbols = list(alphabet)
    if counts is None:
        t = TypeVector.of(data, symbols)
    else:
        t = TypeVector(tuple(counts))
        if t.n != len(symbols):
            raise CompositionMismatch(
                f"{t.n} counts declared for an alphabet of {len(symbols)} symbols"
            )
    if t.T >= 2**32:
        raise CompositionMismatch("sequence too long for a u32 length field")
    rank = rank_sequence(data, t, symbols)
    return Encoded(t.counts, alphabet, rank, payload_bits(t))


def encode_bytes(data: bytes, counts=None, alphabet: bytes | None = None) -> bytes:
    return encode(data, counts, alphabet).to_bytes()


def parse(blob: bytes) -> Encoded:
    if len(blob) < _PREAMBLE.size:
        raise CorruptHeader("file shorter than the 16-byte preamble")
    magic, version, n, reserved, T, bits = _PREAMBLE.unpack_from(blob)
    if magic != MAGIC:
        raise CorruptHeader(f"bad magic {magic!r}")
    if version != VERSION:
        raise CorruptHeader(f"unsupported version {version}")
    if n == 0 or reserved != 0:
        raise CorruptHeader("malformed preamble")
    off = _PREAMBLE.size
    end_tables = off + 5 * n
    if len(blob) < end_tables:
        raise CorruptHeader("truncated count/alphabet tables")
    counts = struct.unpack_from(f">{n}I", blob, off)
    alphabet = blob[off + 4 * n : end_tables]
    if sum(counts) != T:
        raise CorruptHeader("counts do not sum to T")
    if list(alphabet) != sorted(set(alphabet)):
        raise CorruptHeader("alphabet bytes must be distinct and increasing")
    t = TypeVector(counts)
    if bits != payload_bits(t):
        raise CorruptHeader(f"payload length {bits} disagrees with counts")
    payload = blob[end_tables:]
    if len(payload) != (bits + 7) // 8:
        raise CorruptHeader(f"payload is {len(payload)} bytes, expected {(bits + 7) // 8}")
    return Encoded(tuple(counts), bytes(alphabet), int.from_bytes(payload, "big"), bits)


def decode_bytes(blob: bytes) -> bytes:
    enc = parse(blob)
    t = TypeVector(enc.counts)
    if enc.rank >= multinomial_count(t):
        raise CorruptHeader("rank exceeds the number of sequences of this type")
    return bytes(unrank_sequence(enc.rank, t, list(enc.alphabet)))
