"""The 2x2 identity coordination game and checks of its equilibrium claims.

Actions are ``binary`` and ``nonbinary``. Coordinating on binary pays 0.5 to
each player, coordinating on nonbinary pays ``phi``, miscoordination pays 0.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class Action(str, Enum):
    BINARY = "binary"
    NONBINARY = "nonbinary"

    def other(self) -> "Action":
        return Action.NONBINARY if self is Action.BINARY else Action.BINARY


ACTIONS = (Action.BINARY, Action.NONBINARY)
BB = (Action.BINARY, Action.BINARY)
NN = (Action.NONBINARY, Action.NONBINARY)


@dataclass(frozen=True)
class StageGame:
    phi: float
    payoff: dict

    def row_payoff(self, row: Action, col: Action) -> float:
        return self.payoff[(row, col)][0]

    def col_payoff(self, row: Action, col: Action) -> float:
        return self.payoff[(row, col)][1]

    def player_payoff(self, player: int, own: Action, opponent: Action) -> float:
        """Payoff to ``player`` (0 = row, 1 = column) from its own and the opponent's action."""
        if player == 0:
            return self.row_payoff(own, opponent)
        return self.col_payoff(opponent, own)


@dataclass(frozen=True)
class MixedStrategy:
    p_binary: float

    def __post_init__(self):
        if not 0.0 <= self.p_binary <= 1.0:
            raise ValueError(f"probability must lie in [0, 1], got {self.p_binary}")

    @property
    def p_nonbinary(self) -> float:
        return 1.0 - self.p_binary

    def prob(self, action: Action) -> float:
        return self.p_binary if action is Action.BINARY else self.p_nonbinary


def build_game(phi: float) -> StageGame:
    if not 0.0 <= phi <= 1.0:
        raise ValueError(f"phi must lie in [0, 1], got {phi}")
    phi = float(phi)
    payoff = {
        (Action.BINARY, Action.BINARY): (0.5, 0.5),
        (Action.BINARY, Action.NONBINARY): (0.0, 0.0),
        (Action.NONBINARY, Action.BINARY): (0.0, 0.0),
        (Action.NONBINARY, Action.NONBINARY): (phi, phi),
    }
    return StageGame(phi, payoff)


def _as_profile(profile) -> tuple[Action, Action]:
    return Action(profile[0]), Action(profile[1])


def is_pure_nash(game: StageGame, profile) -> bool:
    profile = _as_profile(profile)
    for player in (0, 1):
        own, opp = profile[player], profile[1 - player]
        if game.player_payoff(player, own.other(), opp) > game.player_payoff(player, own, opp):
            return False
    return True


def pure_nash(game: StageGame) -> set[tuple[Action, Action]]:
    return {p for p in itertools.product(ACTIONS, ACTIONS) if is_pure_nash(game, p)}


def payoff_dominates(game: StageGame, p, q) -> bool:
    p, q = _as_profile(p), _as_profile(q)
    gp, gq = game.payoff[p], game.payoff[q]
    return all(a >= b for a, b in zip(gp, gq)) and any(a > b for a, b in zip(gp, gq))


def is_weakly_dominated(game: StageGame, player: int, action: Action) -> bool:
    action = Action(action)
    alt = action.other()
    diffs = [game.player_payoff(player, alt, t) - game.player_payoff(player, action, t) for t in ACTIONS]
    return all(d >= 0 for d in diffs) and any(d > 0 for d in diffs)


def _require_nash(game, profile):
    if not is_pure_nash(game, profile):
        raise ValueError(f"{profile} is not a pure Nash equilibrium at phi={game.phi}")


def is_thpe(game: StageGame, profile) -> bool:
    """Two-player THPE test: no player's equilibrium action is weakly dominated."""
    profile = _as_profile(profile)
    _require_nash(game, profile)
    return not any(is_weakly_dominated(game, i, profile[i]) for i in (0, 1))


def expected_payoff(game: StageGame, player: int, own: Action, opponent: MixedStrategy) -> float:
    return sum(opponent.prob(t) * game.player_payoff(player, own, t) for t in ACTIONS)


def tremble(action: Action, k: int) -> MixedStrategy:
    """Fully mixed strategy putting 1/(k+3) on the action other than ``action``."""
    eps = 1.0 / (k + 3)
    return MixedStrategy(1.0 - eps if Action(action) is Action.BINARY else eps)


def _best_response_to_tremble(game: StageGame, profile, k: int) -> bool:
    for player in (0, 1):
        own = profile[player]
        opp = tremble(profile[1 - player], k)
        if expected_payoff(game, player, own.other(), opp) > expected_payoff(game, player, own, opp):
            return False
    return True


def thpe_tremble_check(game: StageGame, profile, k_max: int = 1000) -> bool:
    """Tremble-sequence THPE test along trembles 1/(k+3), k = 1..k_max.

    Any tail of a converging tremble sequence is again such a sequence, so the
    profile passes when it is a best response for every k from some K on.
    Large early trembles (e.g. k=1 at small phi) are therefore forgiven.
    """
    profile = _as_profile(profile)
    _require_nash(game, profile)
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    ok = [_best_response_to_tremble(game, profile, k) for k in range(1, k_max + 1)]
    if not ok[-1]:
        return False
    # the best-response region must be a tail, not a scattered set
    first = ok.index(True)
    return all(ok[first:])


def verify_spe_sequence(seq, phi: float) -> bool:
    """One-stage deviation check for a prescribed path of stage profiles.

    With each period's prescription independent of history, a single-period
    deviation only changes that period's payoff, so the path is subgame
    perfect exactly when every profile on it is a stage Nash equilibrium.
    """
    seq = list(seq)
    if not seq:
        raise ValueError("profile sequence must be non-empty")
    game = build_game(phi)
    return all(is_pure_nash(game, p) for p in seq)


def compute_phi(b: float, samples: int, rng) -> float:
    return compute_phi_with_error(b, samples, rng)[0]


def compute_phi_with_error(b: float, samples: int, rng, chunk: int = 1_000_000):
    """Monte Carlo estimate of P(|U - V| <= b) for independent uniforms, with its standard error."""
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"bin size must lie in [0, 1], got {b}")
    if samples < 1:
        raise ValueError(f"need at least one sample, got {samples}")
    hits = 0
    left = samples
    while left:
        n = min(left, chunk)
        u = rng.random(n)
        v = rng.random(n)
        hits += int(np.count_nonzero(np.abs(u - v) <= b))
        left -= n
    est = hits / samples
    return est, math.sqrt(est * (1.0 - est) / samples)


def phi_closed_form(b: float) -> float:
    return 2.0 * b - b * b


def analysis_summary(phi: float, k_max: int = 1000, spe_samples=None) -> dict:
    """Structured record of every equilibrium check at one ``phi``."""
    game = build_game(phi)
    equilibria = sorted(pure_nash(game))
    if spe_samples is None:
        spe_samples = {
            "constant binary": [BB] * 4,
            "alternating": [BB, NN] * 2,
            "constant nonbinary": [NN] * 4,
            "with miscoordination": [BB, (Action.BINARY, Action.NONBINARY), NN],
        }
    return {
        "phi": game.phi,
        "payoff": {f"{r.value},{c.value}": list(v) for (r, c), v in game.payoff.items()},
        "pure_nash": [[a.value for a in p] for p in equilibria],
        "payoff_dominant": [
            [a.value for a in p] for p in equilibria
            if all(payoff_dominates(game, p, q) for q in equilibria if q != p)
        ],
        "thpe": {
            f"{p[0].value},{p[1].value}": {
                "weak_dominance": is_thpe(game, p),
                "tremble": thpe_tremble_check(game, p, k_max),
            }
            for p in equilibria
        },
        "spe": {name: verify_spe_sequence(seq, phi) for name, seq in spe_samples.items()},
    }


def format_report(summary: dict) -> str:
    phi = summary["phi"]
    lines = [f"Stage game at phi = {phi!r}", "", f"{'':>10} | {'binary':^12} | {'nonbinary':^12}"]
    for r in ACTIONS:
        cells = [summary["payoff"][f"{r.value},{c.value}"] for c in ACTIONS]
        lines.append(f"{r.value:>10} | " + " | ".join(f"({a:g}, {b:g})".center(12) for a, b in cells))
    lines.append("")
    lines.append("Pure Nash equilibria: " + ", ".join(f"({a},{b})" for a, b in summary["pure_nash"]))
    if summary["payoff_dominant"]:
        lines.append("Payoff dominant: " + ", ".join(f"({a},{b})" for a, b in summary["payoff_dominant"]))
    lines.append("Trembling-hand perfection:")
    for prof, verdict in summary["thpe"].items():
        wd, tr = verdict["weak_dominance"], verdict["tremble"]
        label = "THPE" if wd and tr else ("not THPE" if not (wd or tr) else "DISAGREE")
        lines.append(f"  ({prof}): {label}  [weak dominance: {wd}, tremble sequence: {tr}]")
    lines.append("Subgame perfection of sample paths (one-stage deviation):")
    for name, ok in summary["spe"].items():
        lines.append(f"  {name}: {'SPE' if ok else 'not SPE'}")
    return "\n".join(lines)
