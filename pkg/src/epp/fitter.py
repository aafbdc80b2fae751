"""Maximum-likelihood EPP ratings from pairwise win counts.

The model is the pairwise logit: P(i beats j) = invlogit(beta_i - beta_j).
Ratings are identified up to one additive constant per tournament, fixed
either by a mean-zero constraint or by pinning a reference player at 0.
Fitting is Newton-Raphson with step halving in an (n-1)-dimensional
reduced parameterization ``beta = M @ theta``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import _backend
from .core import PairCounts, PlayerId, TournamentId
from .errors import (
    DisconnectedGraph,
    DomainError,
    ShapeError,
    TooFewPlayers,
    UnknownPlayer,
)

SEPARATION_THRESHOLD = 30.0
MAX_HALVINGS = 30


@dataclass(frozen=True)
class MeanZero:
    def __str__(self) -> str:
        return "mean-zero"


@dataclass(frozen=True)
class Reference:
    player: PlayerId

    def __str__(self) -> str:
        return f"reference={self.player}"


Constraint = MeanZero | Reference


def parse_constraint(text: str) -> Constraint:
    """Parse ``mean-zero`` or ``reference=<algorithm>:<hyperparam_set>``."""
    if text == "mean-zero":
        return MeanZero()
    if text.startswith("reference="):
        return Reference(PlayerId.parse(text[len("reference="):]))
    raise ValueError(f"unknown constraint {text!r}")


@dataclass(frozen=True)
class FitConfig:
    constraint: Constraint = MeanZero()
    ridge: float = 0.0
    tol: float = 1e-8
    max_iter: int = 100

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not self.ridge >= 0:
            raise ValueError("ridge must be non-negative")
        if self.max_iter < 1:
            raise ValueError("max_iter must be a positive integer")


@dataclass(frozen=True)
class DesignRow:
    """One replicated +1/-1 design row: i scored ``successes`` times over j."""

    i: int
    j: int
    successes: float
    failures: float

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("design row needs two distinct players")
        if self.successes < 0 or self.failures < 0 or self.successes + self.failures <= 0:
            raise ValueError("design row needs non-negative counts with a positive total")


@dataclass
class EppResult:
    tournament: TournamentId
    players: tuple[PlayerId, ...]
    beta: np.ndarray
    stderr: np.ndarray
    covariance: np.ndarray
    loglik: float
    converged: bool
    iterations: int
    separated_players: list[PlayerId] = field(default_factory=list)
    constraint: Constraint = MeanZero()
    ridge: float = 0.0
    trace: list[float] = field(default_factory=list)

    @property
    def warnings(self) -> list[str]:
        out = []
        if self.separated_players:
            out.append("separated")
        if not self.converged:
            out.append("not_converged")
        return out

    def index(self, player: PlayerId) -> int:
        try:
            return self.players.index(player)
        except ValueError:
            raise UnknownPlayer(f"{player} not rated in tournament {self.tournament}") from None

    def rating(self, player: PlayerId) -> float:
        return float(self.beta[self.index(player)])

    def to_json_dict(self) -> dict:
        return {
            "tournament": self.tournament,
            "players": [[p.algorithm, p.hyperparam_set] for p in self.players],
            "beta": _finite_list(self.beta),
            "stderr": _finite_list(self.stderr),
            "covariance": [_finite_list(row) for row in self.covariance],
            "loglik": _finite(self.loglik),
            "converged": self.converged,
            "iterations": self.iterations,
            "separated_players": [[p.algorithm, p.hyperparam_set] for p in self.separated_players],
            "warnings": self.warnings,
            "constraint": str(self.constraint),
            "ridge": self.ridge,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> EppResult:
        def arr(x):
            return np.array([np.nan if v is None else v for v in x], dtype=np.float64)

        return cls(
            tournament=d["tournament"],
            players=tuple(PlayerId(a, h) for a, h in d["players"]),
            beta=arr(d["beta"]),
            stderr=arr(d["stderr"]),
            covariance=np.array([arr(r) for r in d["covariance"]]).reshape(
                len(d["beta"]), len(d["beta"])
            ),
            loglik=np.nan if d["loglik"] is None else d["loglik"],
            converged=d["converged"],
            iterations=d["iterations"],
            separated_players=[PlayerId(a, h) for a, h in d["separated_players"]],
            constraint=parse_constraint(d.get("constraint", "mean-zero")),
            ridge=d.get("ridge", 0.0),
        )


def _finite(x: float) -> float | None:
    x = float(x)
    return x if math.isfinite(x) else None


def _finite_list(xs) -> list:
    return [_finite(x) for x in xs]


class _Design:
    """Design rows as parallel arrays."""

    def __init__(self, rows: Sequence[DesignRow]):
        self.ii = np.array([r.i for r in rows], dtype=np.int64)
        self.jj = np.array([r.j for r in rows], dtype=np.int64)
        self.succ = np.array([r.successes for r in rows], dtype=np.float64)
        self.fail = np.array([r.failures for r in rows], dtype=np.float64)

    def check(self, n: int) -> None:
        if len(self.ii) and (
            min(self.ii.min(), self.jj.min()) < 0 or max(self.ii.max(), self.jj.max()) >= n
        ):
            raise ShapeError(f"design row index out of range for {n} players")


def _evaluate(beta, design: _Design, ridge: float):
    beta = np.asarray(beta, dtype=np.float64)
    if beta.ndim != 1:
        raise ShapeError("beta must be a vector")
    design.check(beta.shape[0])
    ll, g, h = _backend.kernels.bt_derivatives(beta, design.ii, design.jj, design.succ, design.fail)
    if ridge:
        ll -= 0.5 * ridge * float(beta @ beta)
        g = g - ridge * beta
        h = h - ridge * np.eye(beta.shape[0])
    return ll, g, h


def _as_design(rows) -> _Design:
    return rows if isinstance(rows, _Design) else _Design(list(rows))


def log_likelihood(beta, rows: Sequence[DesignRow], ridge: float = 0.0) -> float:
    """Binomial log-likelihood of the design rows minus ``ridge/2 * |beta|^2``."""
    return _evaluate(beta, _as_design(rows), ridge)[0]


def gradient(beta, rows: Sequence[DesignRow], ridge: float = 0.0) -> np.ndarray:
    return _evaluate(beta, _as_design(rows), ridge)[1]


def hessian(beta, rows: Sequence[DesignRow], ridge: float = 0.0) -> np.ndarray:
    return _evaluate(beta, _as_design(rows), ridge)[2]


def win_probability(beta_i: float, beta_j: float) -> float:
    """invlogit(beta_i - beta_j), evaluated without overflow."""
    if not (math.isfinite(beta_i) and math.isfinite(beta_j)):
        raise DomainError("ratings must be finite")
    d = beta_i - beta_j
    if d >= 0:
        return 1.0 / (1.0 + math.exp(-d))
    e = math.exp(d)
    return e / (1.0 + e)


def _noise_floor(ll: float) -> float:
    """Log-likelihood differences below this are rounding noise."""
    return 64.0 * np.finfo(float).eps * max(1.0, abs(ll))


def _basis(n: int, constraint: Constraint, players: Sequence[PlayerId]) -> np.ndarray:
    """Map from the reduced (n-1)-vector theta to beta."""
    if isinstance(constraint, Reference):
        if constraint.player not in players:
            raise UnknownPlayer(f"reference player {constraint.player} not in tournament")
        ref = list(players).index(constraint.player)
        return np.delete(np.eye(n), ref, axis=1)
    # drop the last coordinate; it is minus the sum of the others
    m = np.zeros((n, n - 1))
    m[: n - 1] = np.eye(n - 1)
    m[n - 1] = -1.0
    return m


def _constrained_grad_norm(g: np.ndarray, constraint: Constraint, players) -> float:
    if isinstance(constraint, Reference):
        g = g.copy()
        g[list(players).index(constraint.player)] = 0.0
    else:
        g = g - g.mean()
    return float(np.linalg.norm(g))


def _graph(n: int, design: _Design, directed_weights: bool):
    if directed_weights:
        # edge a -> b when a beat b at least once
        src = np.concatenate([design.ii[design.succ > 0], design.jj[design.fail > 0]])
        dst = np.concatenate([design.jj[design.succ > 0], design.ii[design.fail > 0]])
    else:
        src, dst = design.ii, design.jj
    return coo_matrix((np.ones(len(src)), (src, dst)), shape=(n, n)).tocsr()


def _components(labels: np.ndarray, players) -> list[list[PlayerId]]:
    comps: dict[int, list[PlayerId]] = {}
    for p, lab in zip(players, labels):
        comps.setdefault(int(lab), []).append(p)
    return sorted(comps.values())


def _structurally_separated(n: int, design: _Design, players) -> list[PlayerId]:
    """Players in source or sink strong components of the win graph.

    The unpenalized MLE exists iff the win graph is strongly connected; when it
    is not, the top and bottom components drift to +/- infinity.
    """
    g = _graph(n, design, directed_weights=True)
    n_comp, labels = connected_components(g, directed=True, connection="strong")
    if n_comp == 1:
        return []
    g = g.tocoo()
    cross = labels[g.row] != labels[g.col]
    has_out = set(labels[g.row[cross]].tolist())
    has_in = set(labels[g.col[cross]].tolist())
    flagged = {c for c in range(n_comp) if c not in has_out or c not in has_in}
    return [p for p, lab in zip(players, labels) if lab in flagged]


def fit_epp(
    counts: Sequence[PairCounts],
    config: FitConfig = FitConfig(),
    players: Sequence[PlayerId] | None = None,
) -> EppResult:
    """Fit EPP ratings for one tournament.

    Args:
        counts: pair counts of a single tournament.
        config: constraint, ridge penalty and stopping rule.
        players: full player list; defaults to every player named in ``counts``.
            Players without any comparisons make the graph disconnected.

    Raises:
        TooFewPlayers: fewer than two players.
        DisconnectedGraph: ratings of different components are not comparable.
        UnknownPlayer: the reference player is not in the tournament.
    """
    counts = [c for c in counts if c.total > 0]
    tournaments = {c.tournament for c in counts}
    if len(tournaments) > 1:
        raise ValueError(f"counts span several tournaments: {sorted(tournaments)}")
    tournament = next(iter(tournaments)) if tournaments else ""
    if players is None:
        players = sorted({p for c in counts for p in (c.i, c.j)})
    players = tuple(players)
    n = len(players)
    if n < 2:
        raise TooFewPlayers(f"need at least 2 players, got {n}")
    index = {p: k for k, p in enumerate(players)}
    for c in counts:
        if c.i not in index or c.j not in index:
            raise UnknownPlayer(f"pair ({c.i}, {c.j}) names a player outside the player list")
    design = _Design([DesignRow(index[c.i], index[c.j], c.wins_i, c.wins_j) for c in counts])

    n_comp, labels = connected_components(_graph(n, design, False), directed=False)
    if n_comp > 1:
        raise DisconnectedGraph(_components(labels, players))

    basis = _basis(n, config.constraint, players)
    theta = np.zeros(n - 1)
    beta = basis @ theta
    ll, g, h = _evaluate(beta, design, config.ridge)
    gnorm = _constrained_grad_norm(g, config.constraint, players)
    trace = [ll]
    converged = False
    iterations = 0
    polished = False
    while True:
        if gnorm < config.tol:
            converged = True
            if polished:
                break
        if iterations >= config.max_iter:
            break
        try:
            step = np.linalg.solve(-(basis.T @ h @ basis), basis.T @ g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(-(basis.T @ h @ basis), basis.T @ g, rcond=None)[0]
        floor = _noise_floor(ll)
        t = 1.0
        for _ in range(MAX_HALVINGS + 1):
            candidate = theta + t * step
            new = _evaluate(basis @ candidate, design, config.ridge)
            if new[0] >= ll - floor:
                break
            t *= 0.5
        else:
            break  # no ascent left at machine precision
        new_gnorm = _constrained_grad_norm(new[1], config.constraint, players)
        if converged:
            # one extra Newton step past the tolerance, kept only if it helps
            polished = True
            if new_gnorm >= gnorm:
                break
        theta = candidate
        beta = basis @ theta
        ll, g, h = new
        gnorm = new_gnorm
        trace.append(ll)
        iterations += 1

    if isinstance(config.constraint, MeanZero):
        beta = beta - beta.mean()
    info_red = -(basis.T @ h @ basis)
    try:
        cov_red = np.linalg.inv(info_red)
        if not np.all(np.isfinite(cov_red)):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        cov_red = np.linalg.pinv(info_red)
    cov = basis @ cov_red @ basis.T
    cov = 0.5 * (cov + cov.T)
    stderr = np.sqrt(np.clip(np.diag(cov), 0.0, None))

    separated = set(_structurally_separated(n, design, players)) if config.ridge == 0 else set()
    separated |= {p for p, b in zip(players, beta) if abs(b) > SEPARATION_THRESHOLD}
    return EppResult(
        tournament=tournament,
        players=players,
        beta=beta,
        stderr=stderr,
        covariance=cov,
        loglik=float(ll),
        converged=converged,
        iterations=iterations,
        separated_players=sorted(separated),
        constraint=config.constraint,
        ridge=config.ridge,
        trace=trace,
    )


def fit_all(
    matches: dict[TournamentId, list[PairCounts]],
    config: FitConfig = FitConfig(),
    players: dict[TournamentId, Sequence[PlayerId]] | None = None,
) -> dict[TournamentId, EppResult]:
    """Fit every tournament independently, in sorted tournament order."""
    out = {}
    for t in sorted(matches):
        result = fit_epp(matches[t], config, None if players is None else players[t])
        result.tournament = t
        out[t] = result
    return out
