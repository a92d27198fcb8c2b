"""Generation loop, replication runner and median aggregation.

One generation: decode -> translate -> classify -> match/fitness -> record
metrics -> tournament -> crossover -> mutation -> fresh type segments. Metrics
always describe the population before the genetic operators run.

Each replication owns a ``numpy.random.Generator`` seeded from
``SeedSequence(master_seed, spawn_key=(replication_index,))``. SeedSequence
hashes its entropy and spawn key through a fixed avalanche mixer, so a
replication's stream depends only on that pair, never on thread count or
scheduling order.
"""
from __future__ import annotations

import csv
import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import evolution, genome, interpreter, matching
from .beta_numerics import NumericalFailure
from .interpreter import Tag

RAW_COLUMNS = ("replication", "gen", "prop_zero", "prop_one", "prop_nonbinary",
               "match_prob", "unmatched", "mean_fitness")
MEDIAN_COLUMNS = RAW_COLUMNS[1:]
METRIC_COLUMNS = RAW_COLUMNS[2:]


class SimulationError(RuntimeError):
    def __init__(self, message, gen=None, replication=None):
        where = ", ".join(f"{k}={v}" for k, v in (("replication", replication), ("gen", gen)) if v is not None)
        super().__init__(f"{message} ({where})" if where else message)
        self.gen = gen
        self.replication = replication


@dataclass(frozen=True)
class SimConfig:
    N: int = 100
    l: int = 10
    periods: int = 600
    replications: int = 30
    p_mut: float = 0.001
    p_cross: float = 0.001
    b: float = 0.1
    eps_class: float = interpreter.DEFAULT_EPS_CLASS
    classification: str = interpreter.ClassRule.SUPPORT.value
    R: int = 32
    init_policy: str = genome.InitPolicy.BINARY_ORIGIN.value
    master_seed: int = 20240601
    mode: str = matching.FitnessMode.MONTE_CARLO.value

    def __post_init__(self):
        if self.N < 2 or self.N % 2:
            raise ValueError(f"N must be even and >= 2, got N={self.N}")
        if self.l < 1:
            raise ValueError(f"l must be positive, got l={self.l}")
        if self.periods < 0:
            raise ValueError(f"periods must be >= 0, got periods={self.periods}")
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got replications={self.replications}")
        for name in ("p_mut", "p_cross"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {name}={p}")
        if self.b < 0:
            raise ValueError(f"b must be >= 0, got b={self.b}")
        if not 0.0 < self.eps_class < 0.5:
            raise ValueError(f"eps_class must lie in (0, 0.5), got eps_class={self.eps_class}")
        if self.R < 1:
            raise ValueError(f"R must be >= 1, got R={self.R}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError(f"master_seed must be an unsigned 64-bit integer, got master_seed={self.master_seed}")
        genome.InitPolicy(self.init_policy)
        interpreter.ClassRule(self.classification)
        matching.FitnessMode(self.mode)

    @property
    def evolution_params(self) -> evolution.EvolutionParams:
        return evolution.EvolutionParams(p_cross=self.p_cross, p_mut=self.p_mut, l=self.l)

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class GenerationMetrics:
    gen: int
    prop_zero: float
    prop_one: float
    prop_nonbinary: float
    match_prob: float
    unmatched: int
    mean_fitness: float


@dataclass
class GenerationState:
    """Everything computed for one generation before the genetic operators."""

    genes: np.ndarray
    xi: np.ndarray
    tags: np.ndarray
    fitness: np.ndarray
    partner: np.ndarray


def replication_rng(master_seed: int, replication_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(replication_index,)))


def evaluate_generation(bits: np.ndarray, config: SimConfig, rng) -> GenerationState:
    genes = genome.decode_population(bits, config.l)
    xi = interpreter.translate_population(genes)
    if interpreter.ClassRule(config.classification) is interpreter.ClassRule.SUPPORT:
        tags, values = interpreter.classify_population_by_support(genes, xi)
    else:
        tags, values = interpreter.classify_population(xi, config.eps_class)
    pop = matching.Population(tags, values)
    if matching.FitnessMode(config.mode) is matching.FitnessMode.ANALYTIC_BINARY:
        fitness = matching.analytic_binary_fitness(pop)
        _, partner = matching.monte_carlo_matching(pop, config.b, 1, rng)
    else:
        fitness, partner = matching.monte_carlo_matching(pop, config.b, config.R, rng)
    return GenerationState(genes, xi, tags, fitness, partner)


def metrics_of(state: GenerationState, gen: int) -> GenerationMetrics:
    n = len(state.tags)
    n_zero = int(np.sum(state.tags == Tag.ZERO))
    n_one = int(np.sum(state.tags == Tag.ONE))
    mean_fit = float(np.mean(state.fitness))
    return GenerationMetrics(
        gen=gen,
        prop_zero=n_zero / n,
        prop_one=n_one / n,
        prop_nonbinary=(n - n_zero - n_one) / n,
        # fitness is the estimated matching probability, so the two coincide
        match_prob=mean_fit,
        unmatched=int(np.sum(state.partner < 0)),
        mean_fitness=mean_fit,
    )


def evolve(bits: np.ndarray, fitness: np.ndarray, config: SimConfig, rng) -> np.ndarray:
    params = config.evolution_params
    nxt = evolution.tournament_reproduce(bits, fitness, rng)
    nxt = evolution.crossover_population(nxt, params, rng)
    nxt = evolution.mutate_population(nxt, params, rng)
    nxt[:, :config.l] = genome.fresh_type_segments(nxt.shape[0], config.l, rng)
    return nxt


def run_generation(bits: np.ndarray, config: SimConfig, rng, gen: int = 0):
    if bits.shape != (config.N, 3 * config.l):
        raise ValueError(f"expected bits of shape {(config.N, 3 * config.l)}, got {bits.shape}")
    try:
        state = evaluate_generation(bits, config, rng)
    except (NumericalFailure, matching.ModeMismatch) as exc:
        raise SimulationError(str(exc), gen=gen) from exc
    return evolve(bits, state.fitness, config, rng), metrics_of(state, gen)


def run_simulation(config: SimConfig, replication_index: int = 0) -> list[GenerationMetrics]:
    rng = replication_rng(config.master_seed, replication_index)
    bits = genome.initial_population(config.N, config.l, config.init_policy, rng)
    series = []
    try:
        for gen in range(config.periods):
            bits, metrics = run_generation(bits, config, rng, gen)
            series.append(metrics)
    except SimulationError as exc:
        raise SimulationError(str(exc.args[0]), gen=exc.gen, replication=replication_index) from exc
    return series


@dataclass
class ReplicationResults:
    raw: dict[int, list[GenerationMetrics]]
    median: list[dict] = field(default_factory=list)


def median_series(raw: dict[int, list[GenerationMetrics]]) -> list[dict]:
    if not raw:
        return []
    keys = sorted(raw)
    periods = len(raw[keys[0]])
    if any(len(raw[k]) != periods for k in keys):
        raise ValueError("replications have different lengths")
    out = []
    for gen in range(periods):
        row = {"gen": gen}
        for col in METRIC_COLUMNS:
            row[col] = float(np.median([getattr(raw[k][gen], col) for k in keys]))
        out.append(row)
    return out


def run_replications(config: SimConfig, threads: int = 1) -> ReplicationResults:
    indices = range(config.replications)
    if threads <= 1:
        series = [run_simulation(config, i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            series = list(pool.map(lambda i: run_simulation(config, i), indices))
    raw = dict(zip(indices, series))
    return ReplicationResults(raw=raw, median=median_series(raw))


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_raw_csv(path, raw: dict[int, list[GenerationMetrics]]):
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RAW_COLUMNS)
        for rep in sorted(raw):
            for m in raw[rep]:
                writer.writerow([str(rep)] + [_fmt(getattr(m, c)) for c in RAW_COLUMNS[1:]])


def write_median_csv(path, median: list[dict]):
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MEDIAN_COLUMNS)
        for row in median:
            writer.writerow([str(int(row["gen"]))] + [_fmt(row[c]) for c in METRIC_COLUMNS])
