"""Fixed-length bitstring chromosomes and their decoding to [0, 1].

A chromosome is three concatenated segments of ``l`` bits: type, alpha, beta.
Each segment reads as a base-two integer with the rightmost bit as the least
significant, and is normalized by 2**l - 1.

Populations are carried around as ``(N, 3*l)`` uint8 arrays; ``Chromosome``
is the immutable single-individual view used at API boundaries.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

TYPE, ALPHA, BETA = 0, 1, 2


class InitPolicy(str, Enum):
    BINARY_ORIGIN = "binary_origin"
    UNIFORM_RANDOM = "uniform_random"


@dataclass(frozen=True, eq=False)
class Chromosome:
    bits: np.ndarray
    l: int

    def __post_init__(self):
        bits = np.array(self.bits, dtype=np.uint8).ravel()
        if self.l < 1:
            raise ValueError(f"segment length must be positive, got {self.l}")
        if bits.size != 3 * self.l:
            raise ValueError(f"chromosome needs {3 * self.l} bits, got {bits.size}")
        if np.any(bits > 1):
            raise ValueError("chromosome bits must be 0 or 1")
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, text: str) -> "Chromosome":
        text = text.strip()
        if len(text) % 3 or set(text) - {"0", "1"}:
            raise ValueError(f"not a chromosome string: {text!r}")
        return cls(np.frombuffer(text.encode(), dtype=np.uint8) - ord("0"), len(text) // 3)

    def to_string(self) -> str:
        return "".join("1" if bit else "0" for bit in self.bits)

    def segment(self, which: int) -> np.ndarray:
        return self.bits[which * self.l:(which + 1) * self.l]

    def __eq__(self, other):
        if not isinstance(other, Chromosome):
            return NotImplemented
        return self.l == other.l and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.l, self.bits.tobytes()))

    def __repr__(self):
        return f"Chromosome({self.to_string()!r})"


@dataclass(frozen=True)
class DecodedGenome:
    x: float
    alpha_gene: float
    beta_gene: float


def _weights(l: int) -> np.ndarray:
    # rightmost bit carries weight 2**0
    return (1 << np.arange(l - 1, -1, -1, dtype=np.int64))


def decode_segment(segment, l: int | None = None) -> int:
    seg = np.asarray(segment, dtype=np.int64).ravel()
    if l is not None and seg.size != l:
        raise ValueError(f"segment must have length {l}, got {seg.size}")
    if seg.size < 1:
        raise ValueError("segment must be non-empty")
    if np.any((seg != 0) & (seg != 1)):
        raise ValueError("segment bits must be 0 or 1")
    return int(seg @ _weights(seg.size))


def encode_segment(m: int, l: int) -> np.ndarray:
    if not 0 <= m <= 2**l - 1:
        raise ValueError(f"{m} does not fit in {l} bits")
    return ((m >> np.arange(l - 1, -1, -1)) & 1).astype(np.uint8)


def normalize(m: int, l: int) -> float:
    top = 2**l - 1
    if not 0 <= m <= top:
        raise ValueError(f"decoded value {m} outside [0, {top}]")
    return m / top


def decode(chromosome: Chromosome) -> DecodedGenome:
    l = chromosome.l
    x, a, b = (normalize(decode_segment(chromosome.segment(k), l), l) for k in (TYPE, ALPHA, BETA))
    return DecodedGenome(x, a, b)


def decode_population(bits: np.ndarray, l: int) -> np.ndarray:
    """Decode an ``(N, 3*l)`` bit array to an ``(N, 3)`` array of (x, alpha, beta)."""
    n = bits.shape[0]
    ints = bits.reshape(n, 3, l).astype(np.int64) @ _weights(l)
    return ints / float(2**l - 1)


def fresh_type_segment(l: int, rng) -> np.ndarray:
    return rng.integers(0, 2, size=l).astype(np.uint8)


def fresh_type_segments(n: int, l: int, rng) -> np.ndarray:
    return rng.integers(0, 2, size=(n, l)).astype(np.uint8)


def initial_population(n: int, l: int, init_policy, rng) -> np.ndarray:
    """Bits for the first generation, shape ``(n, 3*l)``.

    ``binary_origin`` zeroes both interpreter segments, which makes every
    individual's Beta shapes degenerate, hence binary.
    """
    if n < 2 or n % 2:
        raise ValueError(f"population size N must be even and >= 2, got N={n}")
    policy = InitPolicy(init_policy)
    bits = np.zeros((n, 3 * l), dtype=np.uint8)
    bits[:, :l] = fresh_type_segments(n, l, rng)
    if policy is InitPolicy.UNIFORM_RANDOM:
        bits[:, l:] = rng.integers(0, 2, size=(n, 2 * l))
    return bits


def as_chromosomes(bits: np.ndarray, l: int) -> list[Chromosome]:
    return [Chromosome(row, l) for row in bits]
