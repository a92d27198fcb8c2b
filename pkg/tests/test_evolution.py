import numpy as np
import pytest
from scipy import stats

from identity_evolution.evolution import (
    EvolutionParams,
    crossover_pair,
    crossover_population,
    mutate,
    mutate_population,
    tournament_reproduce,
)
from identity_evolution.genome import Chromosome

L = 10


def chromo(type_bits, alpha, beta):
    return Chromosome.from_string(type_bits + alpha + beta)


def test_params_validated():
    with pytest.raises(ValueError):
        EvolutionParams(p_cross=1.5, p_mut=0.0, l=10)
    with pytest.raises(ValueError):
        EvolutionParams(p_cross=0.5, p_mut=-0.1, l=10)
    with pytest.raises(ValueError):
        EvolutionParams(p_cross=0.5, p_mut=0.1, l=0)


def test_crossover_worked_example(rng):
    c1 = chromo("1" * L, "0100100001", "0000011111")
    c2 = chromo("0" * L, "0111101110", "1111100000")
    o1, o2 = crossover_pair(c1, c2, EvolutionParams(1.0, 0.0, L), rng, cut=6)
    assert o1.to_string() == "1" * L + "0100101110" + "0000010000"
    assert o2.to_string() == "0" * L + "0111100001" + "1111101111"


def test_crossover_disabled(rng):
    c1 = chromo("1" * L, "0100100001", "0000011111")
    c2 = chromo("0" * L, "0111101110", "1111100000")
    assert crossover_pair(c1, c2, EvolutionParams(0.0, 0.0, L), rng) == (c1, c2)


def test_crossover_identical_parents(rng):
    c = chromo("0110011001", "0100100001", "0000011111")
    for cut in range(1, L):
        assert crossover_pair(c, c, EvolutionParams(1.0, 0.0, L), rng, cut=cut) == (c, c)


def test_crossover_rejects_bad_cut(rng):
    c = Chromosome(np.zeros(3 * L), L)
    with pytest.raises(ValueError):
        crossover_pair(c, c, EvolutionParams(1.0, 0.0, L), rng, cut=L)


def test_crossover_conserves_bits_and_type(rng):
    params = EvolutionParams(1.0, 0.0, L)
    for _ in range(200):
        a, b = rng.integers(0, 2, (2, 3 * L)).astype(np.uint8)
        x, y = crossover_pair(a, b, params, rng)
        assert np.array_equal(x[:L], a[:L]) and np.array_equal(y[:L], b[:L])
        for seg in (slice(L, 2 * L), slice(2 * L, 3 * L)):
            assert np.array_equal(np.sort(np.r_[a[seg], b[seg]]), np.sort(np.r_[x[seg], y[seg]]))
            assert np.array_equal(x[seg] + y[seg], a[seg] + b[seg])
        # one shared cut: alpha and beta swap tails of the same length
        diff_a = np.flatnonzero(x[L:2 * L] != a[L:2 * L])
        diff_b = np.flatnonzero(x[2 * L:] != a[2 * L:])
        if diff_a.size and diff_b.size:
            assert max(diff_a.min(), diff_b.min()) >= 1


def test_cut_is_uniform_on_interior(rng):
    a = np.zeros(3 * L, dtype=np.uint8)
    b = np.ones(3 * L, dtype=np.uint8)
    a[L:] = 0
    counts = np.zeros(L, dtype=int)
    for _ in range(9000):
        x, _ = crossover_pair(a, b, EvolutionParams(1.0, 0.0, L), rng)
        counts[L - int(x[L:2 * L].sum())] += 1
    assert counts[0] == 0
    assert stats.chisquare(counts[1:]).pvalue > 1e-3


def test_crossover_population(rng):
    bits = rng.integers(0, 2, (20, 3 * L)).astype(np.uint8)
    assert np.array_equal(crossover_population(bits, EvolutionParams(0.0, 0.0, L), rng), bits)
    out = crossover_population(bits, EvolutionParams(1.0, 0.0, L), rng)
    assert np.array_equal(out[:, :L], bits[:, :L])
    assert np.array_equal(out.sum(axis=0), bits.sum(axis=0))
    two = rng.integers(0, 2, (2, 3 * L)).astype(np.uint8)
    out2 = crossover_population(two, EvolutionParams(1.0, 0.0, L), rng)
    assert np.array_equal(out2.sum(axis=0), two.sum(axis=0))
    with pytest.raises(ValueError, match="N=3"):
        crossover_population(bits[:3], EvolutionParams(1.0, 0.0, L), rng)


def test_mutation_extremes(rng):
    c = chromo("0110011001", "0100100001", "0000011111")
    assert mutate(c, EvolutionParams(0.0, 0.0, L), rng) == c
    flipped = mutate(c, EvolutionParams(0.0, 1.0, L), rng)
    assert flipped.to_string() == "0110011001" + "1011011110" + "1111100000"


def test_mutation_rate(rng):
    bits = np.zeros((50_000, 3 * L), dtype=np.uint8)
    out = mutate_population(bits, EvolutionParams(0.0, 0.001, L), rng)
    assert not out[:, :L].any()
    rate = out[:, L:].mean()
    assert 0.0007 <= rate <= 0.0013


def test_mutation_flips_are_independent(rng):
    # 2x2 contingency of flips at two positions across many draws
    out = mutate_population(np.zeros((40_000, 3 * L), dtype=np.uint8), EvolutionParams(0.0, 0.3, L), rng)
    for i, j in [(L, L + 1), (L, 2 * L), (2 * L + 3, 3 * L - 1)]:
        table = np.array([[np.sum((out[:, i] == u) & (out[:, j] == v)) for v in (0, 1)] for u in (0, 1)])
        assert stats.chi2_contingency(table).pvalue > 1e-3


def test_tournament_strict_winner(rng):
    bits = np.array([[1] * 3, [0] * 3], dtype=np.uint8)
    fitness = np.array([1.0, 0.0])

    class Both:
        def integers(self, low, high, size):
            return np.tile([0, 1], (size[0], 1))

        def random(self, n):
            return np.zeros(n)

    assert np.all(tournament_reproduce(bits, fitness, Both()) == 1)


def test_tournament_tie_is_fair(rng):
    bits = np.arange(2, dtype=np.uint8)[:, None]
    first = 0
    trials = 0

    class Pair:
        def __init__(self, g):
            self.g = g

        def integers(self, low, high, size):
            return np.tile([0, 1], (size[0], 1))

        def random(self, n):
            return self.g.random(n)

    for _ in range(5000):
        out = tournament_reproduce(bits, np.array([0.5, 0.5]), Pair(rng))
        first += int(np.sum(out == 0))
        trials += 2
    assert stats.binomtest(first, trials, 0.5).pvalue > 1e-3


def test_tournament_identical_population(rng):
    bits = np.tile(np.array([1, 0, 1, 1], dtype=np.uint8), (6, 1))
    assert np.array_equal(tournament_reproduce(bits, rng.random(6), rng), bits)
    with pytest.raises(ValueError):
        tournament_reproduce(bits[:0], np.array([]), rng)


def test_selection_raises_mean_fitness():
    # one-sided sign test over seeds at significance 1e-2
    ups = 0
    for seed in range(30):
        rng = np.random.default_rng(seed)
        bits = np.arange(100, dtype=np.uint8)[:, None]
        fitness = rng.random(100)
        out = tournament_reproduce(bits, fitness, rng)
        ups += fitness[out[:, 0]].mean() >= fitness.mean()
    assert stats.binomtest(ups, 30, 0.5, alternative="greater").pvalue < 1e-2
