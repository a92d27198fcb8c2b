"""Preferences, pairwise matching and matching-probability fitness.

Binary identities accept only the opposite binary identity. A nonbinary
identity ``o`` accepts any identity value within ``[o - b, o + b]`` (binary
individuals count as values 0 and 1), but since binaries never accept a
nonbinary, nonbinary-binary pairs are never mutual.

Pairing is a uniformly random greedy maximal matching: individuals are
visited in a random order and each still-unmatched one takes a uniformly
random unmatched compatible partner, if any.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numba as nb
import numpy as np

from .interpreter import IdentityClass, Tag

_ZERO, _ONE, _NB = int(Tag.ZERO), int(Tag.ONE), int(Tag.NONBINARY)


class FitnessMode(str, Enum):
    ANALYTIC_BINARY = "analytic_binary"
    MONTE_CARLO = "monte_carlo"


class ModeMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Population:
    tags: np.ndarray
    values: np.ndarray

    @classmethod
    def from_classes(cls, classes) -> "Population":
        classes = list(classes)
        tags = np.array([int(c.tag) for c in classes], dtype=np.int8)
        values = np.array([c.value for c in classes], dtype=np.float64)
        return cls(tags, values)

    @classmethod
    def binary(cls, n_zero: int, n_one: int) -> "Population":
        return cls.from_classes([IdentityClass.zero()] * n_zero + [IdentityClass.one()] * n_one)

    def __len__(self):
        return len(self.tags)

    @property
    def members(self) -> list[tuple[int, IdentityClass]]:
        return [(i, IdentityClass(Tag(int(t)), float(v))) for i, (t, v) in enumerate(zip(self.tags, self.values))]


@dataclass(frozen=True)
class MatchingResult:
    pairs: frozenset
    unmatched: frozenset

    @classmethod
    def from_partners(cls, partner: np.ndarray) -> "MatchingResult":
        pairs = frozenset((int(i), int(j)) for i, j in enumerate(partner) if j > i)
        unmatched = frozenset(int(i) for i in np.flatnonzero(partner < 0))
        return cls(pairs, unmatched)


def prefers(src: IdentityClass, dst: IdentityClass, b: float) -> bool:
    if b < 0:
        raise ValueError(f"bin size must be non-negative, got {b}")
    if src.tag == Tag.ZERO:
        return dst.tag == Tag.ONE
    if src.tag == Tag.ONE:
        return dst.tag == Tag.ZERO
    return abs(dst.value - src.value) <= b


def mutual(i: IdentityClass, j: IdentityClass, b: float) -> bool:
    return prefers(i, j, b) and prefers(j, i, b)


@nb.njit(cache=True, nogil=True)
def _compatibility(tags, values, b):
    n = tags.shape[0]
    compat = np.zeros((n, n), dtype=np.bool_)
    for i in range(n):
        for j in range(i + 1, n):
            ti = tags[i]
            tj = tags[j]
            if ti == _NB and tj == _NB:
                ok = abs(values[i] - values[j]) <= b
            elif ti == _NB or tj == _NB:
                ok = False
            else:
                ok = ti != tj
            compat[i, j] = ok
            compat[j, i] = ok
    return compat


@nb.njit(cache=True, nogil=True)
def _greedy(compat, order, draws, partner):
    n = order.shape[0]
    partner[:] = -1
    candidates = np.empty(n, dtype=np.int64)
    for k in range(n):
        i = order[k]
        if partner[i] >= 0:
            continue
        count = 0
        for j in range(n):
            if partner[j] < 0 and compat[i, j]:
                candidates[count] = j
                count += 1
        if count:
            pick = min(int(draws[k] * count), count - 1)
            j = candidates[pick]
            partner[i] = j
            partner[j] = i


@nb.njit(cache=True, nogil=True)
def _monte_carlo(compat, orders, draws):
    rounds, n = orders.shape
    matched = np.zeros(n, dtype=np.int64)
    first = np.empty(n, dtype=np.int64)
    partner = np.empty(n, dtype=np.int64)
    for r in range(rounds):
        _greedy(compat, orders[r], draws[r], partner)
        if r == 0:
            first[:] = partner
        for i in range(n):
            if partner[i] >= 0:
                matched[i] += 1
    return matched, first


def _random_orders(n: int, rounds: int, rng):
    orders = rng.permuted(np.tile(np.arange(n), (rounds, 1)), axis=1)
    draws = rng.random((rounds, n))
    return orders, draws


def compatibility_matrix(pop: Population, b: float) -> np.ndarray:
    if b < 0:
        raise ValueError(f"bin size must be non-negative, got {b}")
    return _compatibility(np.asarray(pop.tags, dtype=np.int8), np.asarray(pop.values, dtype=np.float64), float(b))


def realize_matching(pop: Population, b: float, rng) -> MatchingResult:
    compat = compatibility_matrix(pop, b)
    orders, draws = _random_orders(len(pop), 1, rng)
    partner = np.empty(len(pop), dtype=np.int64)
    _greedy(compat, orders[0], draws[0], partner)
    return MatchingResult.from_partners(partner)


def monte_carlo_matching(pop: Population, b: float, rounds: int, rng):
    """Run ``rounds`` independent matchings.

    Returns the per-individual match frequency and the partner array of the
    first round (``-1`` for unmatched).
    """
    if rounds < 1:
        raise ValueError(f"Monte Carlo fitness needs at least one round, got R={rounds}")
    compat = compatibility_matrix(pop, b)
    orders, draws = _random_orders(len(pop), rounds, rng)
    matched, first = _monte_carlo(compat, orders, draws)
    return matched / rounds, first


def fitness_binary_counts(n_own: int, n_partner: int) -> float:
    """Matching probability of a binary individual from class counts."""
    if n_own < 1:
        raise ValueError("own class count must include the individual itself")
    if n_partner <= 0:
        return 0.0
    if n_own <= n_partner:
        return 1.0
    return n_partner / n_own


def analytic_binary_fitness(pop: Population) -> np.ndarray:
    tags = np.asarray(pop.tags)
    if np.any(tags == _NB):
        raise ModeMismatch("analytic_binary fitness is defined only for populations without nonbinary identities")
    n_zero = int(np.sum(tags == _ZERO))
    n_one = len(tags) - n_zero
    fit = np.zeros(len(tags))
    if n_zero:
        fit[tags == _ZERO] = fitness_binary_counts(n_zero, n_one)
    if n_one:
        fit[tags == _ONE] = fitness_binary_counts(n_one, n_zero)
    return fit


def estimate_fitness(pop: Population, b: float, mode="monte_carlo", rounds: int = 32, rng=None) -> np.ndarray:
    mode = FitnessMode(mode)
    if mode is FitnessMode.ANALYTIC_BINARY:
        return analytic_binary_fitness(pop)
    if rng is None:
        raise ValueError("monte_carlo fitness needs an rng")
    return monte_carlo_matching(pop, b, rounds, rng)[0]
