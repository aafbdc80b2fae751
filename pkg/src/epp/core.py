"""Domain types: players, tournaments, score records and pair counts."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InvalidPair


@dataclass(frozen=True, order=True)
class PlayerId:
    """One algorithm run with one hyperparameter setting."""

    algorithm: str
    hyperparam_set: str

    def __post_init__(self):
        if not self.algorithm or not self.hyperparam_set:
            raise ValueError("player labels must be non-empty")

    def __str__(self) -> str:
        return f"{self.algorithm}:{self.hyperparam_set}"

    @classmethod
    def parse(cls, text: str) -> PlayerId:
        """Parse ``algorithm:hyperparam_set`` (split on the first colon)."""
        algorithm, sep, hp = text.partition(":")
        if not sep:
            raise ValueError(f"expected 'algorithm:hyperparam_set', got {text!r}")
        return cls(algorithm, hp)


# A tournament is one data set; its name is the identifier.
TournamentId = str


class Orientation(enum.Enum):
    HIGHER_BETTER = "higher"
    LOWER_BETTER = "lower"


class MatchOutcome(enum.Enum):
    WIN_I = "win_i"
    WIN_J = "win_j"
    TIE = "tie"


@dataclass(frozen=True)
class ScoreRecord:
    tournament: TournamentId
    player: PlayerId
    split: int
    score: float

    def __post_init__(self):
        if not self.tournament:
            raise ValueError("tournament name must be non-empty")
        if self.split < 0:
            raise ValueError(f"split index must be >= 0, got {self.split}")
        if not math.isfinite(self.score):
            raise ValueError(f"score must be finite, got {self.score}")

    @property
    def key(self) -> tuple[TournamentId, PlayerId, int]:
        return (self.tournament, self.player, self.split)


@dataclass(frozen=True)
class ScoreTable:
    """Long-format score records plus the orientation they were ingested with."""

    records: tuple[ScoreRecord, ...]
    orientation: Orientation = Orientation.HIGHER_BETTER

    def __post_init__(self):
        if not isinstance(self.records, tuple):
            object.__setattr__(self, "records", tuple(self.records))

    def __len__(self) -> int:
        return len(self.records)

    @property
    def tournaments(self) -> list[TournamentId]:
        return sorted({r.tournament for r in self.records})

    def players(self, tournament: TournamentId | None = None) -> list[PlayerId]:
        return sorted(
            {r.player for r in self.records if tournament is None or r.tournament == tournament}
        )

    def by_tournament(self) -> dict[TournamentId, dict[PlayerId, dict[int, float]]]:
        """Nested ``tournament -> player -> split -> score`` view, keys sorted."""
        nested: dict[TournamentId, dict[PlayerId, dict[int, float]]] = {}
        for r in self.records:
            nested.setdefault(r.tournament, {}).setdefault(r.player, {})[r.split] = r.score
        return {
            t: {p: dict(sorted(nested[t][p].items())) for p in sorted(nested[t])}
            for t in sorted(nested)
        }


@dataclass(frozen=True)
class PairCounts:
    """Aggregated outcomes for one unordered pair inside one tournament.

    ``wins_i`` and ``wins_j`` already include any tie credit granted by the
    tie policy; ``ties`` is the raw number of tied comparisons and
    ``n_comparisons`` the raw number of comparisons made.
    """

    tournament: TournamentId
    i: PlayerId
    j: PlayerId
    wins_i: float
    wins_j: float
    ties: int = 0
    n_comparisons: int = 0

    def __post_init__(self):
        if self.i == self.j:
            raise InvalidPair(f"self-pair {self.i}")
        if self.j < self.i:
            raise InvalidPair(f"pair ({self.i}, {self.j}) is not in canonical order")
        if self.wins_i < 0 or self.wins_j < 0:
            raise ValueError("win counts must be non-negative")

    @property
    def total(self) -> float:
        return self.wins_i + self.wins_j

    def wins_of(self, player: PlayerId) -> float:
        """Wins of ``player`` against the other member of the pair."""
        if player == self.i:
            return self.wins_i
        if player == self.j:
            return self.wins_j
        raise KeyError(player)

    def oriented(self, a: PlayerId, b: PlayerId) -> tuple[float, float]:
        """``(wins of a, wins of b)`` regardless of stored order."""
        if (a, b) == (self.i, self.j):
            return self.wins_i, self.wins_j
        if (a, b) == (self.j, self.i):
            return self.wins_j, self.wins_i
        raise KeyError((a, b))


def canonical_pair(i: PlayerId, j: PlayerId) -> tuple[PlayerId, PlayerId]:
    """Return ``(i, j)`` in lexicographic order; reject self-pairs."""
    if i == j:
        raise InvalidPair(f"self-pair {i}")
    return (i, j) if i < j else (j, i)
