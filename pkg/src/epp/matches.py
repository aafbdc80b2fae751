"""Turning per-split scores into pairwise win counts."""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass

import numpy as np

from . import _backend
from .core import PairCounts, ScoreTable, TournamentId


class Scheme(enum.Enum):
    CROSS_SPLIT = "cross"
    SAME_SPLIT = "same"


class TiePolicy(enum.Enum):
    IGNORE = "ignore"
    HALF_WIN = "half"


@dataclass(frozen=True)
class MatchConfig:
    scheme: Scheme = Scheme.CROSS_SPLIT
    tie_policy: TiePolicy = TiePolicy.HALF_WIN


@dataclass(frozen=True)
class Census:
    n_records: int
    players_per_tournament: dict[TournamentId, int]
    pairs: dict[TournamentId, int]
    comparisons: dict[TournamentId, int]

    @property
    def comparisons_total(self) -> int:
        return sum(self.comparisons.values())


def _raw_counts(players_scores, scheme: Scheme):
    """Raw (wins_i, wins_j, ties, n_comparisons) arrays for pairs i < j."""
    if scheme is Scheme.CROSS_SPLIT:
        segs = [np.sort(np.fromiter(s.values(), dtype=np.float64)) for s in players_scores]
        offsets = np.zeros(len(segs) + 1, dtype=np.int64)
        offsets[1:] = np.cumsum([len(s) for s in segs])
        scores = np.concatenate(segs) if segs else np.zeros(0)
        wi, wj, ties = _backend.kernels.cross_split_counts(scores, offsets)
        sizes = np.diff(offsets)
        iu, ju = np.triu_indices(len(segs), k=1)
        return wi, wj, ties, sizes[iu] * sizes[ju]
    all_splits = sorted({s for ps in players_scores for s in ps})
    col = {s: c for c, s in enumerate(all_splits)}
    mat = np.full((len(players_scores), len(all_splits)), np.nan)
    for r, ps in enumerate(players_scores):
        for s, v in ps.items():
            mat[r, col[s]] = v
    return _backend.kernels.same_split_counts(mat)


def generate_matches(
    table: ScoreTable, config: MatchConfig = MatchConfig()
) -> dict[TournamentId, list[PairCounts]]:
    """Aggregate pairwise outcomes per tournament.

    Pairs are listed in canonical player order; pairs left with no decisive
    or credited comparisons are omitted. The table is expected to be
    oriented (higher is better) and validated.
    """
    out: dict[TournamentId, list[PairCounts]] = {}
    for tournament, by_player in table.by_tournament().items():
        players = list(by_player)
        wi, wj, ties, n_cmp = _raw_counts(list(by_player.values()), config.scheme)
        iu, ju = np.triu_indices(len(players), k=1)
        pairs = []
        for a, b, w1, w2, t, n in zip(iu, ju, wi, wj, ties, n_cmp):
            w1, w2, t = float(w1), float(w2), int(t)
            if config.tie_policy is TiePolicy.HALF_WIN:
                w1 += 0.5 * t
                w2 += 0.5 * t
            if w1 + w2 <= 0:
                continue
            pairs.append(PairCounts(tournament, players[a], players[b], w1, w2, t, int(n)))
        out[tournament] = pairs
    return out


def comparison_census(table: ScoreTable, config: MatchConfig = MatchConfig()) -> Census:
    """Counts of players, pairs and raw comparisons before tie handling."""
    players, pairs, comparisons = {}, {}, {}
    for tournament, by_player in table.by_tournament().items():
        n = len(by_player)
        players[tournament] = n
        pairs[tournament] = n * (n - 1) // 2
        if config.scheme is Scheme.CROSS_SPLIT:
            sizes = np.array([len(s) for s in by_player.values()], dtype=np.int64)
            comparisons[tournament] = int((sizes.sum() ** 2 - (sizes**2).sum()) // 2)
        else:
            split_sets = [set(s) for s in by_player.values()]
            comparisons[tournament] = sum(
                len(split_sets[a] & split_sets[b])
                for a in range(n)
                for b in range(a + 1, n)
            )
    return Census(len(table.records), players, pairs, comparisons)


def pair_counts_csv(matches: dict[TournamentId, list[PairCounts]]) -> str:
    """Audit dump: ``tournament,player_i,player_j,wins_i,wins_j,n_comparisons``."""
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["tournament", "player_i", "player_j", "wins_i", "wins_j", "n_comparisons"])
    for t in sorted(matches):
        for pc in matches[t]:
            w.writerow([t, str(pc.i), str(pc.j), repr(pc.wins_i), repr(pc.wins_j), pc.n_comparisons])
    return buf.getvalue()
