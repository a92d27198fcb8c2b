"""Evolutionary simulation of binary and nonbinary identity formation.

Bitstring genomes decode to a type and two Beta-shape genes; the inverse Beta
CDF turns the type into an identity on [0, 1]; individuals match pairwise and
their matching probability drives a genetic algorithm. ``game_analysis``
checks the equilibrium structure of the underlying 2x2 coordination game.
"""
from .harness import GenerationMetrics, SimConfig, run_replications, run_simulation

__all__ = ["GenerationMetrics", "SimConfig", "run_replications", "run_simulation"]
