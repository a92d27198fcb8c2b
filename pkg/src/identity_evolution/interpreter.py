"""Translation of a decoded genome into an identity on [0, 1].

The interpreter genes are used directly as the two Beta shapes. A gene below
``S_MIN`` is a degenerate shape and is replaced by its limiting distribution:
both degenerate gives the Bernoulli(1/2) quantile, a lone degenerate first
shape collapses the identity to 0, a lone degenerate second shape to 1.

Two classification rules are available. ``support`` reads the gender set off
the genes: any degenerate shape confines the identity to {0, 1} (binary),
otherwise its support is (0, 1) (nonbinary) whatever value was drawn.
``threshold`` classifies the drawn value, calling it binary within
``eps_class`` of an endpoint.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum

import numba as nb
import numpy as np

from .beta_numerics import S_MIN, NumericalFailure, betaincinv_kernel
from .genome import DecodedGenome

DEFAULT_EPS_CLASS = 1e-3


class ClassRule(str, Enum):
    SUPPORT = "support"
    THRESHOLD = "threshold"


class Tag(IntEnum):
    ZERO = 0
    ONE = 1
    NONBINARY = 2


@dataclass(frozen=True)
class Identity:
    xi: float

    def __post_init__(self):
        if not 0.0 <= self.xi <= 1.0:
            raise ValueError(f"identity must lie in [0, 1], got {self.xi}")


@dataclass(frozen=True)
class IdentityClass:
    tag: Tag
    value: float

    @classmethod
    def zero(cls):
        return cls(Tag.ZERO, 0.0)

    @classmethod
    def one(cls):
        return cls(Tag.ONE, 1.0)

    @classmethod
    def nonbinary(cls, xi: float):
        return cls(Tag.NONBINARY, float(xi))


def shape_from_gene(g: float) -> tuple[float, bool]:
    """Beta shape for a normalized gene, and whether it is degenerate."""
    if not 0.0 <= g <= 1.0:
        raise ValueError(f"gene must lie in [0, 1], got {g}")
    return float(g), g < S_MIN


@nb.njit(cache=True)
def _translate(x, alpha_gene, beta_gene):
    deg_a = alpha_gene < S_MIN
    deg_b = beta_gene < S_MIN
    if deg_a and deg_b:
        return 0.0 if x <= 0.5 else 1.0
    if deg_a:
        return 0.0
    if deg_b:
        return 1.0
    return betaincinv_kernel(x, alpha_gene, beta_gene)


@nb.njit(cache=True)
def _translate_many(genes):
    out = np.empty(genes.shape[0])
    for i in range(genes.shape[0]):
        out[i] = _translate(genes[i, 0], genes[i, 1], genes[i, 2])
    return out


def translate_identity(genome: DecodedGenome) -> Identity:
    xi = _translate(float(genome.x), float(genome.alpha_gene), float(genome.beta_gene))
    if np.isnan(xi):
        raise NumericalFailure(genome.x, genome.alpha_gene, genome.beta_gene)
    return Identity(xi)


def translate_population(genes: np.ndarray) -> np.ndarray:
    """Identities for an ``(N, 3)`` array of decoded (x, alpha, beta) rows."""
    xi = _translate_many(np.ascontiguousarray(genes, dtype=np.float64))
    bad = np.flatnonzero(np.isnan(xi))
    if bad.size:
        x, a, b = genes[bad[0]]
        raise NumericalFailure(x, a, b)
    return xi


def classify(identity: Identity, eps_class: float = DEFAULT_EPS_CLASS) -> IdentityClass:
    if not 0.0 < eps_class < 0.5:
        raise ValueError(f"eps_class must lie in (0, 0.5), got {eps_class}")
    if identity.xi <= eps_class:
        return IdentityClass.zero()
    if identity.xi >= 1.0 - eps_class:
        return IdentityClass.one()
    return IdentityClass.nonbinary(identity.xi)


def classify_population(xi: np.ndarray, eps_class: float = DEFAULT_EPS_CLASS):
    """Vectorized ``classify``: returns (tags, values) arrays.

    Values carry 0 for ZERO, 1 for ONE and the identity for NONBINARY, which is
    what the preference rules compare against.
    """
    if not 0.0 < eps_class < 0.5:
        raise ValueError(f"eps_class must lie in (0, 0.5), got {eps_class}")
    xi = np.asarray(xi, dtype=np.float64)
    tags = np.full(xi.shape, Tag.NONBINARY, dtype=np.int8)
    tags[xi <= eps_class] = Tag.ZERO
    tags[xi >= 1.0 - eps_class] = Tag.ONE
    values = np.where(tags == Tag.ZERO, 0.0, np.where(tags == Tag.ONE, 1.0, xi))
    return tags, values


def is_binary_genome(genome: DecodedGenome) -> bool:
    """True when the genes confine the identity to {0, 1}."""
    return genome.alpha_gene < S_MIN or genome.beta_gene < S_MIN


def classify_by_support(genome: DecodedGenome, identity: Identity) -> IdentityClass:
    if is_binary_genome(genome):
        return IdentityClass.zero() if identity.xi == 0.0 else IdentityClass.one()
    return IdentityClass.nonbinary(identity.xi)


def classify_population_by_support(genes: np.ndarray, xi: np.ndarray):
    """Vectorized ``classify_by_support`` over ``(N, 3)`` decoded genes."""
    genes = np.asarray(genes, dtype=np.float64)
    xi = np.asarray(xi, dtype=np.float64)
    binary = (genes[:, 1] < S_MIN) | (genes[:, 2] < S_MIN)
    tags = np.full(xi.shape, Tag.NONBINARY, dtype=np.int8)
    tags[binary & (xi == 0.0)] = Tag.ZERO
    tags[binary & (xi != 0.0)] = Tag.ONE
    values = np.where(tags == Tag.ZERO, 0.0, np.where(tags == Tag.ONE, 1.0, xi))
    return tags, values
