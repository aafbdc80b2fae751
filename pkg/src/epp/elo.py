"""Classic sequential Elo, kept as a baseline next to EPP."""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .core import MatchOutcome, PlayerId, ScoreTable
from .errors import DomainError, InvalidPair, ParseError

_ACTUAL = {MatchOutcome.WIN_I: 1.0, MatchOutcome.WIN_J: 0.0, MatchOutcome.TIE: 0.5}


@dataclass(frozen=True)
class EloConfig:
    initial_rating: float = 1500.0
    k_factor: float = 32.0
    scale: float = 400.0
    base: float = 10.0

    def __post_init__(self):
        if not self.k_factor > 0:
            raise ValueError("k_factor must be positive")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if not self.base > 1:
            raise ValueError("base must be greater than 1")


@dataclass
class EloTable:
    ratings: dict[PlayerId, float] = field(default_factory=dict)
    matches_played: dict[PlayerId, int] = field(default_factory=dict)

    def standings(self) -> list[tuple[PlayerId, float, int]]:
        """Players by rating descending, ties broken by player order."""
        return sorted(
            ((p, r, self.matches_played[p]) for p, r in self.ratings.items()),
            key=lambda row: (-row[1], row[0]),
        )

    def to_csv(self) -> str:
        buf = io.StringIO(newline="")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["player", "rating", "matches_played"])
        for p, r, m in self.standings():
            w.writerow([str(p), repr(r), m])
        return buf.getvalue()


def _check(*xs: float) -> None:
    if not all(math.isfinite(x) for x in xs):
        raise DomainError("ratings must be finite")


def expected_score(r1: float, r2: float, config: EloConfig = EloConfig()) -> float:
    """Expected score of the first player: 1 / (1 + base**((r2 - r1) / scale))."""
    _check(r1, r2)
    return _backend.kernels.expected_score(r1, r2, config.scale, config.base)


def update(
    r1: float, r2: float, outcome: MatchOutcome, config: EloConfig = EloConfig()
) -> tuple[float, float]:
    """Ratings after one match. The update is zero-sum: both sides move by the same amount."""
    _check(r1, r2)
    delta = config.k_factor * (_ACTUAL[outcome] - expected_score(r1, r2, config))
    return r1 + delta, r2 - delta


def run_sequential(
    matches: Iterable[tuple[PlayerId, PlayerId, MatchOutcome]],
    config: EloConfig = EloConfig(),
    initial: dict[PlayerId, float] | None = None,
) -> EloTable:
    """Replay matches in order. Results depend on the order; nothing is shuffled.

    Players start at ``initial[player]`` if given, else ``config.initial_rating``.
    """
    index: dict[PlayerId, int] = {}
    ii, jj, actual = [], [], []
    for a, b, outcome in matches:
        if a == b:
            raise InvalidPair(f"self-match for {a}")
        for p in (a, b):
            if p not in index:
                index[p] = len(index)
        ii.append(index[a])
        jj.append(index[b])
        actual.append(_ACTUAL[outcome])
    order = list(index)
    start = [config.initial_rating if initial is None else initial.get(p, config.initial_rating) for p in order]
    _check(*start)
    ratings = np.array(start, dtype=np.float64)
    played = np.zeros(len(order), dtype=np.int64)
    _backend.kernels.elo_sequential(
        ratings,
        played,
        np.array(ii, dtype=np.int64),
        np.array(jj, dtype=np.int64),
        np.array(actual, dtype=np.float64),
        float(config.k_factor),
        float(config.scale),
        float(config.base),
    )
    return EloTable(
        {p: float(r) for p, r in zip(order, ratings)},
        {p: int(m) for p, m in zip(order, played)},
    )


def matches_from_scores(table: ScoreTable) -> list[tuple[PlayerId, PlayerId, MatchOutcome]]:
    """Same-split duels as an ordered match list: by tournament, split, then player pair."""
    out = []
    for _, by_player in table.by_tournament().items():
        splits = sorted({s for ps in by_player.values() for s in ps})
        players = list(by_player)
        for s in splits:
            present = [(p, by_player[p][s]) for p in players if s in by_player[p]]
            for x in range(len(present)):
                for y in range(x + 1, len(present)):
                    (a, sa), (b, sb) = present[x], present[y]
                    outcome = (
                        MatchOutcome.WIN_I if sa > sb
                        else MatchOutcome.WIN_J if sa < sb
                        else MatchOutcome.TIE
                    )
                    out.append((a, b, outcome))
    return out


def parse_match_list(text: str) -> list[tuple[PlayerId, PlayerId, MatchOutcome]]:
    """Read ``player_i,player_j,outcome`` rows; outcome is win_i, win_j or tie."""
    reader = csv.reader(io.StringIO(text, newline=""))
    header = next(reader, None)
    if header != ["player_i", "player_j", "outcome"]:
        raise ParseError("expected header 'player_i,player_j,outcome'", 1)
    out = []
    for row in reader:
        if not row:
            continue
        try:
            a, b, o = row
            out.append((PlayerId.parse(a), PlayerId.parse(b), MatchOutcome(o)))
        except ValueError as exc:
            raise ParseError(str(exc), reader.line_num) from None
    return out


def format_match_list(matches: Sequence[tuple[PlayerId, PlayerId, MatchOutcome]]) -> str:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["player_i", "player_j", "outcome"])
    for a, b, o in matches:
        w.writerow([str(a), str(b), o.value])
    return buf.getvalue()
