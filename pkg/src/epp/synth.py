"""Ground-truth synthetic tournaments.

All randomness comes from numpy's Philox4x64-10 counter-based generator seeded
with a 64-bit integer. Uniforms are 53-bit doubles; binomial draws are sums of
Bernoulli trials on those uniforms so the stream consumption is easy to reproduce
elsewhere. Gaussian noise uses numpy's ``standard_normal``.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .core import PairCounts, PlayerId, ScoreRecord, ScoreTable, TournamentId
from .fitter import win_probability

DEFAULT_SEED = 2020


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def evenly_spaced_beta(n: int, low: float = -2.0, high: float = 2.0) -> np.ndarray:
    beta = np.linspace(low, high, n)
    return beta - beta.mean()


def synth_players(n: int, n_algorithms: int = 1) -> list[PlayerId]:
    """Player ids in index order; labels are zero-padded so sorting keeps that order."""
    width = max(2, len(str(n - 1)))
    if n_algorithms <= 1:
        return [PlayerId("synth", f"p{k:0{width}d}") for k in range(n)]
    per = -(-n // n_algorithms)
    return [
        PlayerId(f"alg{k // per:02d}", f"h{k % per:0{width}d}") for k in range(n)
    ]


@dataclass(frozen=True)
class SynthConfig:
    true_beta: tuple[float, ...]
    n_comparisons_per_pair: int = 100
    seed: int = DEFAULT_SEED
    tournament: TournamentId = "synth"

    def __post_init__(self):
        object.__setattr__(self, "true_beta", tuple(float(b) for b in self.true_beta))
        if abs(sum(self.true_beta)) >= 1e-12:
            raise ValueError("true_beta must sum to zero")
        if self.n_comparisons_per_pair < 1:
            raise ValueError("n_comparisons_per_pair must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def players(self) -> list[PlayerId]:
        return synth_players(len(self.true_beta))


def generate_pair_counts(config: SynthConfig) -> list[PairCounts]:
    """Binomial outcomes for every unordered pair, in (i, j) index order."""
    rng = make_rng(config.seed)
    beta = config.true_beta
    players = config.players
    n = config.n_comparisons_per_pair
    out = []
    for i in range(len(beta)):
        for j in range(i + 1, len(beta)):
            p = win_probability(beta[i], beta[j])
            wins = int((rng.random(n) < p).sum())
            out.append(
                PairCounts(config.tournament, players[i], players[j], float(wins), float(n - wins), 0, n)
            )
    return out


def generate_score_table(
    config: SynthConfig,
    n_splits: int = 20,
    noise_scale: float = 1.0,
    players: Sequence[PlayerId] | None = None,
    rng: np.random.Generator | None = None,
) -> ScoreTable:
    """Scores ``true_beta[player] + noise_scale * N(0, 1)`` for every split."""
    if n_splits < 1:
        raise ValueError("n_splits must be >= 1")
    if not noise_scale > 0:
        raise ValueError("noise_scale must be positive")
    rng = make_rng(config.seed) if rng is None else rng
    players = config.players if players is None else list(players)
    noise = rng.standard_normal((len(players), n_splits))
    records = [
        ScoreRecord(config.tournament, p, s, float(config.true_beta[k] + noise_scale * noise[k, s]))
        for k, p in enumerate(players)
        for s in range(n_splits)
    ]
    return ScoreTable(tuple(records))


def simulate_benchmark(
    n_players: int,
    n_tournaments: int = 1,
    n_algorithms: int = 1,
    n_splits: int = 20,
    noise_scale: float = 1.0,
    spread: float = 2.0,
    seed: int = DEFAULT_SEED,
) -> ScoreTable:
    """Several synthetic data sets sharing one player roster.

    Each tournament's true ratings are the evenly spaced base ratings plus a
    per-tournament Gaussian perturbation of scale ``spread / 4``, re-centered.
    """
    rng = make_rng(seed)
    players = synth_players(n_players, n_algorithms)
    base = evenly_spaced_beta(n_players, -spread, spread)
    width = max(2, len(str(n_tournaments - 1)))
    records: list[ScoreRecord] = []
    for t in range(n_tournaments):
        beta = base + (spread / 4) * rng.standard_normal(n_players)
        beta -= beta.mean()
        beta[-1] = -beta[:-1].sum()
        cfg = SynthConfig(tuple(beta), 1, seed, tournament=f"ds{t:0{width}d}")
        records.extend(generate_score_table(cfg, n_splits, noise_scale, players, rng).records)
    return ScoreTable(tuple(records))
