"""EPP: Elo-based predictive power ratings for benchmarking predictive models.

Per-split performance scores are turned into pairwise wins and fitted with a
pairwise logit model, so that the difference of two ratings is the log-odds
that one model outperforms the other.
"""

from ._backend import available as available_backends, current as backend, set_backend
from .analysis import (
    compare,
    epp_matrix,
    leaderboard,
    pca_embed,
    probability_matrix,
    tunability,
)
from .core import (
    MatchOutcome,
    Orientation,
    PairCounts,
    PlayerId,
    ScoreRecord,
    ScoreTable,
    canonical_pair,
)
from .elo import EloConfig, EloTable, expected_score, run_sequential, update
from .fitter import (
    DesignRow,
    EppResult,
    FitConfig,
    MeanZero,
    Reference,
    fit_all,
    fit_epp,
    gradient,
    hessian,
    log_likelihood,
    win_probability,
)
from .ingest import orient_scores, parse_score_table, serialize_score_table, validate
from .matches import MatchConfig, Scheme, TiePolicy, comparison_census, generate_matches

__version__ = "0.1.0"
