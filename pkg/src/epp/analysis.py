"""Derived outputs of fitted ratings: probabilities, leaderboards, tests, embeddings."""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .core import PlayerId, TournamentId
from .errors import IncompleteMatrix, NotConverged, ShapeError
from .fitter import EppResult, win_probability


@dataclass(frozen=True)
class ProbabilityMatrix:
    players: tuple[PlayerId, ...]
    P: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO(newline="")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["player"] + [str(p) for p in self.players])
        for p, row in zip(self.players, self.P):
            w.writerow([str(p)] + [repr(float(x)) for x in row])
        return buf.getvalue()


@dataclass(frozen=True)
class Comparison:
    i: PlayerId
    j: PlayerId
    delta: float
    prob: float
    z: float | None
    p_value: float
    degenerate: bool = False

    def to_json_dict(self) -> dict:
        return {
            "i": str(self.i),
            "j": str(self.j),
            "delta": self.delta,
            "prob": self.prob,
            "z": self.z,
            "p_value": self.p_value,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class LeaderboardRow:
    rank: int
    player: PlayerId
    beta: float
    stderr: float


@dataclass(frozen=True)
class TunabilitySummary:
    tournament: TournamentId
    algorithm: str
    n_settings: int
    min: float
    q1: float
    median: float
    q3: float
    max: float

    @property
    def range(self) -> float:
        return self.max - self.min


@dataclass(frozen=True)
class EppMatrix:
    row_labels: tuple[TournamentId, ...]
    col_labels: tuple[PlayerId, ...]
    values: np.ndarray
    mask: np.ndarray  # True where the player was not rated in the tournament

    def complete_columns(self) -> EppMatrix:
        """Keep only players rated in every tournament."""
        keep = ~self.mask.any(axis=0)
        return EppMatrix(
            self.row_labels,
            tuple(p for p, k in zip(self.col_labels, keep) if k),
            self.values[:, keep],
            self.mask[:, keep],
        )

    def to_csv(self) -> str:
        buf = io.StringIO(newline="")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["tournament"] + [str(p) for p in self.col_labels])
        for t, row, m in zip(self.row_labels, self.values, self.mask):
            w.writerow([t] + ["" if miss else repr(float(x)) for x, miss in zip(row, m)])
        return buf.getvalue()


@dataclass(frozen=True)
class EmbeddingResult:
    row_labels: tuple[TournamentId, ...]
    col_labels: tuple[PlayerId, ...]
    matrix: np.ndarray
    scores: np.ndarray
    loadings: np.ndarray
    explained_variance: np.ndarray
    total_variance: float

    def to_json_dict(self) -> dict:
        return {
            "row_labels": list(self.row_labels),
            "col_labels": [str(p) for p in self.col_labels],
            "scores": self.scores.tolist(),
            "loadings": self.loadings.tolist(),
            "explained_variance": self.explained_variance.tolist(),
        }


def _require_converged(result: EppResult, force: bool) -> None:
    if not result.converged and not force:
        raise NotConverged(
            f"fit for tournament {result.tournament!r} did not converge; pass force=True to use it anyway"
        )


def probability_matrix(result: EppResult, force: bool = False) -> ProbabilityMatrix:
    _require_converged(result, force)
    beta = [float(b) for b in result.beta]
    n = len(beta)
    P = np.empty((n, n))
    for a in range(n):
        P[a, a] = 0.5
        for b in range(a + 1, n):
            P[a, b] = win_probability(beta[a], beta[b])
            P[b, a] = win_probability(beta[b], beta[a])
    return ProbabilityMatrix(result.players, P)


def leaderboard(result: EppResult, force: bool = False) -> list[LeaderboardRow]:
    """Players by rating; equal ratings share the smaller rank and sort by player id."""
    _require_converged(result, force)
    order = sorted(range(len(result.players)), key=lambda k: (-result.beta[k], result.players[k]))
    rows = []
    for pos, k in enumerate(order):
        if rows and result.beta[k] == rows[-1].beta:
            rank = rows[-1].rank
        else:
            rank = pos + 1
        rows.append(LeaderboardRow(rank, result.players[k], float(result.beta[k]), float(result.stderr[k])))
    return rows


def leaderboard_csv(rows: Sequence[LeaderboardRow]) -> str:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rank", "algorithm", "hyperparam_set", "beta", "stderr"])
    for r in rows:
        w.writerow([r.rank, r.player.algorithm, r.player.hyperparam_set, repr(r.beta), repr(r.stderr)])
    return buf.getvalue()


def two_sided_p(z: float) -> float:
    """P(|Z| >= |z|) for a standard normal Z."""
    return math.erfc(abs(z) / math.sqrt(2.0))


def compare(result: EppResult, i: PlayerId, j: PlayerId) -> Comparison:
    """Wald z-test of the rating difference ``beta_i - beta_j``."""
    a, b = result.index(i), result.index(j)
    delta = float(result.beta[a] - result.beta[b])
    prob = win_probability(float(result.beta[a]), float(result.beta[b]))
    cov = result.covariance
    var = float(cov[a, a] + cov[b, b] - 2.0 * cov[a, b])
    if a == b or not var > 0 or not math.isfinite(var):
        return Comparison(i, j, delta, prob, None, 1.0, degenerate=True)
    z = delta / math.sqrt(var)
    return Comparison(i, j, delta, prob, z, two_sided_p(z))


def tunability(
    results: Iterable[EppResult],
    grouping: Callable[[PlayerId], str] = lambda p: p.algorithm,
) -> list[TunabilitySummary]:
    """Spread of ratings across each algorithm's settings, per tournament.

    Quartiles interpolate linearly between order statistics.
    """
    out = []
    for res in sorted(results, key=lambda r: r.tournament):
        groups: dict[str, list[float]] = {}
        for p, b in zip(res.players, res.beta):
            groups.setdefault(grouping(p), []).append(float(b))
        for alg in sorted(groups):
            v = np.asarray(groups[alg])
            q = np.percentile(v, [0, 25, 50, 75, 100], method="linear")
            out.append(TunabilitySummary(res.tournament, alg, len(v), *(float(x) for x in q)))
    return out


def tunability_csv(rows: Sequence[TunabilitySummary]) -> str:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["tournament", "algorithm", "n_settings", "min", "q1", "median", "q3", "max", "range"])
    for r in rows:
        w.writerow([r.tournament, r.algorithm, r.n_settings] + [repr(x) for x in (r.min, r.q1, r.median, r.q3, r.max, r.range)])
    return buf.getvalue()


def epp_matrix(results: Iterable[EppResult]) -> EppMatrix:
    """Tournaments x players matrix of ratings; absent players are masked."""
    results = sorted(results, key=lambda r: r.tournament)
    if not results:
        raise ShapeError("need at least one result")
    cols = sorted({p for r in results for p in r.players})
    col = {p: c for c, p in enumerate(cols)}
    values = np.zeros((len(results), len(cols)))
    mask = np.ones((len(results), len(cols)), dtype=bool)
    for row, r in enumerate(results):
        for p, b in zip(r.players, r.beta):
            values[row, col[p]] = b
            mask[row, col[p]] = False
    return EppMatrix(tuple(r.tournament for r in results), tuple(cols), values, mask)


def pca_embed(matrix: EppMatrix, k: int | None = None) -> EmbeddingResult:
    """PCA of the column-centered matrix via SVD.

    Each loading column is sign-fixed so its largest-magnitude entry is positive.
    """
    if matrix.mask.any():
        raise IncompleteMatrix(
            f"{int(matrix.mask.sum())} masked cell(s); filter to complete columns first"
        )
    x = np.asarray(matrix.values, dtype=np.float64)
    rows, cols = x.shape
    if k is None:
        k = min(rows, cols)
    if rows < 2:
        raise ShapeError("need at least two tournaments to estimate variance")
    if not 1 <= k <= min(rows, cols):
        raise ShapeError(f"k={k} outside [1, {min(rows, cols)}]")
    centered = x - x.mean(axis=0)
    u, s, vt = np.linalg.svd(centered, full_matrices=False)
    u, s, v = u[:, :k], s[:k], vt[:k].T
    pivot = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[pivot, np.arange(k)])
    signs[signs == 0] = 1.0
    v = v * signs
    u = u * signs
    return EmbeddingResult(
        row_labels=matrix.row_labels,
        col_labels=matrix.col_labels,
        matrix=x,
        scores=u * s,
        loadings=v,
        explained_variance=s**2 / (rows - 1),
        total_variance=float((centered**2).sum() / (rows - 1)),
    )
