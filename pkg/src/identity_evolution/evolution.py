"""Genetic operators: binary tournaments, single-point crossover, bit-flip mutation.

All operators act on ``(N, 3*l)`` uint8 bit arrays (or single rows for the
pair-level functions) and only ever touch the alpha and beta segments.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .genome import Chromosome


@dataclass(frozen=True)
class EvolutionParams:
    p_cross: float
    p_mut: float
    l: int

    def __post_init__(self):
        for name in ("p_cross", "p_mut"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.l < 1:
            raise ValueError(f"segment length must be positive, got {self.l}")


def tournament_reproduce(bits: np.ndarray, fitness, rng) -> np.ndarray:
    """N binary tournaments with replacement; ties go to a fair coin."""
    bits = np.asarray(bits)
    fitness = np.asarray(fitness, dtype=np.float64)
    n = bits.shape[0]
    if n == 0:
        raise ValueError("cannot reproduce an empty population")
    if fitness.shape != (n,):
        raise ValueError(f"fitness has shape {fitness.shape}, expected ({n},)")
    contestants = rng.integers(0, n, size=(n, 2))
    coin = rng.random(n) < 0.5
    first, second = contestants[:, 0], contestants[:, 1]
    f1, f2 = fitness[first], fitness[second]
    winners = np.where(f1 > f2, first, np.where(f2 > f1, second, np.where(coin, first, second)))
    return bits[winners].copy()


def _swap_tails(row1: np.ndarray, row2: np.ndarray, l: int, cut: int):
    # same cut in alpha and beta; the type segment stays put
    for start in (l, 2 * l):
        lo, hi = start + cut, start + l
        tail = row1[lo:hi].copy()
        row1[lo:hi] = row2[lo:hi]
        row2[lo:hi] = tail


def _draw_cut(l: int, rng) -> int:
    return int(rng.integers(1, l))


def crossover_pair(c1, c2, params: EvolutionParams, rng, cut: int | None = None):
    """Cross two chromosomes with probability ``p_cross``.

    ``cut`` forces the cut position (bits kept from the left of each segment)
    when crossover happens; otherwise it is uniform on [1, l-1].
    """
    wrap = isinstance(c1, Chromosome)
    r1 = np.array(c1.bits if wrap else c1, dtype=np.uint8)
    r2 = np.array(c2.bits if isinstance(c2, Chromosome) else c2, dtype=np.uint8)
    l = params.l
    if r1.size != 3 * l or r2.size != 3 * l:
        raise ValueError("crossover needs two chromosomes of length 3*l")
    if rng.random() < params.p_cross and l > 1:
        if cut is None:
            cut = _draw_cut(l, rng)
        if not 1 <= cut <= l - 1:
            raise ValueError(f"cut must lie in [1, {l - 1}], got {cut}")
        _swap_tails(r1, r2, l, cut)
    if wrap:
        return Chromosome(r1, l), Chromosome(r2, l)
    return r1, r2


def crossover_population(bits: np.ndarray, params: EvolutionParams, rng) -> np.ndarray:
    """Pair all chromosomes at random without replacement and cross each pair.

    Offspring keep the positions of their parents.
    """
    n = bits.shape[0]
    if n % 2:
        raise ValueError(f"crossover needs an even population, got N={n}")
    out = np.array(bits, dtype=np.uint8, copy=True)
    order = rng.permutation(n)
    crossing = rng.random(n // 2) < params.p_cross
    l = params.l
    if l < 2:
        return out
    for k in np.flatnonzero(crossing):
        i, j = order[2 * k], order[2 * k + 1]
        _swap_tails(out[i], out[j], l, _draw_cut(l, rng))
    return out


def mutate(chromosome, params: EvolutionParams, rng):
    wrap = isinstance(chromosome, Chromosome)
    row = np.array(chromosome.bits if wrap else chromosome, dtype=np.uint8)
    out = mutate_population(row[None, :], params, rng)[0]
    return Chromosome(out, params.l) if wrap else out


def mutate_population(bits: np.ndarray, params: EvolutionParams, rng) -> np.ndarray:
    out = np.array(bits, dtype=np.uint8, copy=True)
    l = params.l
    flips = rng.random((out.shape[0], 2 * l)) < params.p_mut
    out[:, l:] ^= flips.astype(np.uint8)
    return out
