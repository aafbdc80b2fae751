"""Exit criteria for the package, one test per criterion.

Run ``pytest tests/test_acceptance.py`` (or ``python tests/test_acceptance.py``);
the terminal summary lists one PASS/FAIL line per criterion.
"""

import json
import math
import sys

import numpy as np
import pytest

from epp import (
    FitConfig,
    MatchConfig,
    PairCounts,
    PlayerId,
    Reference,
    Scheme,
    TiePolicy,
    compare,
    comparison_census,
    epp_matrix,
    expected_score,
    fit_all,
    fit_epp,
    generate_matches,
    gradient,
    hessian,
    leaderboard,
    log_likelihood,
    parse_score_table,
    pca_embed,
    probability_matrix,
    run_sequential,
)
from epp.cli import main as cli_main
from epp.core import MatchOutcome
from epp.fitter import DesignRow
from epp.synth import SynthConfig, evenly_spaced_beta, generate_pair_counts, make_rng, simulate_benchmark

A1, A2 = PlayerId("AutoML_1", "default"), PlayerId("AutoML_2", "default")


def logit(p):
    return math.log(p / (1 - p))


def test_01_table4_oracle(criterion, table4_csv):
    with criterion(1, "fold-stability table: wins (3,1), delta = ln 3, P = 0.75", max_seconds=1.0):
        table = parse_score_table(table4_csv.encode())
        by = table.by_tournament()["table4"]
        mean1, mean2 = np.mean(list(by[A1].values())), np.mean(list(by[A2].values()))
        assert mean1 == pytest.approx(0.8) and mean2 == pytest.approx(0.81) and mean2 > mean1

        (pc,) = generate_matches(table, MatchConfig(Scheme.SAME_SPLIT, TiePolicy.IGNORE))["table4"]
        assert (pc.i, pc.j, pc.wins_i, pc.wins_j) == (A1, A2, 3, 1)
        r = fit_epp([pc])
        delta = r.rating(A1) - r.rating(A2)
        assert abs(delta - logit(3 / 4)) < 1e-8
        assert compare(r, A1, A2).prob == 0.75
        assert probability_matrix(r).P[0, 1] == 0.75
        # averages favour AutoML_2, EPP favours AutoML_1
        assert leaderboard(r)[0].player == A1


def test_02_two_player_sweep(criterion):
    with criterion(2, "two-player closed form for all n <= 50", max_seconds=5.0):
        a, b = PlayerId("m", "a"), PlayerId("m", "b")
        worst = 0.0
        for n in range(2, 51):
            for w in range(1, n):
                r = fit_epp([PairCounts("t", a, b, float(w), float(n - w))])
                worst = max(worst, abs(r.beta[0] - r.beta[1] - logit(w / n)))
        assert worst < 1e-8, worst


def test_03_gradient_hessian(criterion):
    with criterion(3, "analytic gradient vs central differences; Hessian symmetry"):
        cfg = SynthConfig(tuple(evenly_spaced_beta(6)), 50, seed=31)
        counts = generate_pair_counts(cfg)
        index = {p: k for k, p in enumerate(cfg.players)}
        rows = [DesignRow(index[c.i], index[c.j], c.wins_i, c.wins_j) for c in counts]
        rng = make_rng(3)
        step = 1e-5
        worst_rel, worst_asym = 0.0, 0.0
        for _ in range(10):
            beta = rng.normal(size=6)
            g = gradient(beta, rows)
            fd = np.array([
                (log_likelihood(beta + step * e, rows) - log_likelihood(beta - step * e, rows)) / (2 * step)
                for e in np.eye(6)
            ])
            # relative to max(|fd|, 1) so that near-zero components do not blow up the ratio
            worst_rel = max(worst_rel, float(np.max(np.abs(g - fd) / np.maximum(np.abs(fd), 1.0))))
            h = hessian(beta, rows)
            worst_asym = max(worst_asym, float(np.max(np.abs(h - h.T))))
        assert worst_rel < 1e-6, worst_rel
        assert worst_asym < 1e-10, worst_asym


def test_04_recovery(criterion):
    with criterion(4, "recovery of 10 evenly spaced ratings from 200 comparisons per pair", max_seconds=10.0):
        true = evenly_spaced_beta(10, -2.0, 2.0)
        cfg = SynthConfig(tuple(true), 200)
        r = fit_epp(generate_pair_counts(cfg))
        assert r.players == tuple(cfg.players)
        err = np.abs(r.beta - true)
        assert err.max() < 0.15, err.max()
        assert err.max() < 3 * r.stderr.max()
        P = probability_matrix(r).P
        P_true = 1.0 / (1.0 + np.exp(-(true[:, None] - true[None, :])))
        assert np.abs(P - P_true).max() < 0.05


def test_05_constraint_invariance(criterion):
    with criterion(5, "mean-zero vs reference constraint: same differences and order"):
        counts = generate_pair_counts(SynthConfig(tuple(evenly_spaced_beta(8, -1.5, 1.5)), 60, seed=55))
        mz = fit_epp(counts)
        for ref in (mz.players[0], mz.players[5]):
            rf = fit_epp(counts, FitConfig(Reference(ref)))
            assert rf.rating(ref) == 0.0
            d_mz = mz.beta[:, None] - mz.beta[None, :]
            d_rf = rf.beta[:, None] - rf.beta[None, :]
            assert np.abs(d_mz - d_rf).max() < 1e-8
            assert [x.player for x in leaderboard(mz)] == [x.player for x in leaderboard(rf)]
            assert np.abs(probability_matrix(mz).P - probability_matrix(rf).P).max() < 1e-10


def test_06_probability_laws(criterion):
    with criterion(6, "probability matrix laws over 100 random fitted results"):
        rng = make_rng(6)
        for k in range(100):
            n = int(rng.integers(2, 9))
            beta = rng.normal(scale=1.5, size=n)
            beta -= beta.mean()
            beta[-1] = -beta[:-1].sum()
            r = fit_epp(generate_pair_counts(SynthConfig(tuple(beta), int(rng.integers(5, 40)), seed=k)))
            P = probability_matrix(r, force=True).P
            assert np.abs(P + P.T - 1.0).max() <= 1e-12
            assert np.all(np.diag(P) == 0.5)


def test_07_elo(criterion):
    with criterion(7, "Elo: 200-point gap gives 0.75975; rating sum conserved over 1e6 updates"):
        assert abs(expected_score(1700.0, 1500.0) - 0.75975) <= 1e-5
        rng = np.random.default_rng(7)
        players = [PlayerId("p", f"{k:02d}") for k in range(20)]
        n = 10**6
        a = rng.integers(0, 20, n)
        b = (a + rng.integers(1, 20, n)) % 20
        outcomes = list(MatchOutcome)
        games = [(players[x], players[y], outcomes[z]) for x, y, z in zip(a.tolist(), b.tolist(), rng.integers(0, 3, n).tolist())]
        table = run_sequential(games)
        assert sum(table.matches_played.values()) == 2 * n
        drift = abs(sum(table.ratings.values()) - 1500.0 * 20)
        assert drift < 1e-9, drift


@pytest.fixture(scope="module")
def benchmark_table():
    return simulate_benchmark(n_players=44, n_tournaments=11, n_algorithms=4, n_splits=20, seed=8)


@pytest.fixture(scope="module")
def benchmark_results(benchmark_table):
    return fit_all(generate_matches(benchmark_table))


def test_08_census(criterion, benchmark_table, benchmark_results):
    with criterion(8, "census: 9680 records, 946 pairs and 378400 comparisons per data set, 484 ratings"):
        algorithms = {r.player.algorithm for r in benchmark_table.records}
        settings = {r.player for r in benchmark_table.records}
        assert len(algorithms) == 4 and len(settings) == 44
        census = comparison_census(benchmark_table)
        assert census.n_records == 9680
        assert len(census.pairs) == 11
        assert set(census.players_per_tournament.values()) == {44}
        assert set(census.pairs.values()) == {946}
        assert set(census.comparisons.values()) == {378_400}
        m = epp_matrix(benchmark_results.values())
        assert m.values.size == 484 and not m.mask.any()


def test_09_pca(criterion, benchmark_results):
    with criterion(9, "PCA: reconstruction, variance bookkeeping, deterministic signs"):
        m = epp_matrix(benchmark_results.values())
        e = pca_embed(m)
        centered = m.values - m.values.mean(axis=0)
        assert np.abs(e.scores @ e.loadings.T - centered).max() < 1e-8
        assert np.all(np.diff(e.explained_variance) <= 0)
        assert abs(e.explained_variance.sum() - e.total_variance) < 1e-10
        assert abs(e.total_variance - np.var(m.values, axis=0, ddof=1).sum()) < 1e-10
        assert np.abs(e.loadings.T @ e.loadings - np.eye(e.loadings.shape[1])).max() < 1e-10
        for _ in range(3):
            again = pca_embed(epp_matrix(benchmark_results.values()))
            np.testing.assert_array_equal(again.loadings, e.loadings)
            np.testing.assert_array_equal(again.scores, e.scores)
        pivots = np.argmax(np.abs(e.loadings), axis=0)
        assert np.all(e.loadings[pivots, np.arange(e.loadings.shape[1])] > 0)


def _pipeline(root):
    sim, rated, probs, emb = root / "sim", root / "rated", root / "probs", root / "embed"
    assert cli_main(["simulate", "--players", "8", "--tournaments", "4", "--algorithms", "2",
                     "--seed", "11", "--output", str(sim)]) == 0
    assert cli_main(["rate", str(sim / "scores.csv"), "--output", str(rated)]) == 0
    results = sorted(str(p) for p in rated.glob("*.epp.json"))
    assert cli_main(["probs", *results, "--output", str(probs)]) == 0
    assert cli_main(["embed", *results, "--output", str(emb)]) == 0
    return {p.relative_to(root): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_10_determinism(criterion, tmp_path):
    with criterion(10, "simulate | rate | probs | embed is byte-identical across runs"):
        first = _pipeline(tmp_path / "run1")
        second = _pipeline(tmp_path / "run2")
        assert len(first) >= 4 + 4 + 4 + 3
        assert first == second


def test_11_separation(criterion):
    with criterion(11, "separation: (4,0) terminates, flags players, emits finite JSON"):
        a, b = PlayerId("m", "a"), PlayerId("m", "b")
        cfg = FitConfig()
        r = fit_epp([PairCounts("t", a, b, 4.0, 0.0)], cfg)
        assert r.iterations <= cfg.max_iter
        assert a in r.separated_players
        assert "separated" in r.warnings
        text = json.dumps(r.to_json_dict(), allow_nan=False)
        assert all(v is None or math.isfinite(v) for v in json.loads(text)["beta"] + json.loads(text)["stderr"])


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
