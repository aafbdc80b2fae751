import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from epp.core import MatchOutcome, PlayerId
from epp.elo import (
    EloConfig,
    expected_score,
    format_match_list,
    matches_from_scores,
    parse_match_list,
    run_sequential,
    update,
)
from epp.errors import DomainError, InvalidPair, ParseError
from epp.ingest import parse_score_table

X, Y, Z = PlayerId("a", "x"), PlayerId("a", "y"), PlayerId("a", "z")
ratings = st.floats(-5000, 5000)


def test_expected_score_examples(backend):
    assert expected_score(1500, 1500) == 0.5
    assert expected_score(1700, 1500) == pytest.approx(1 / (1 + 10 ** -0.5), abs=1e-15)
    assert expected_score(1700, 1500) == pytest.approx(0.75975, abs=1e-5)


@given(ratings, ratings)
def test_expected_score_antisymmetric(r1, r2):
    assert expected_score(r1, r2) + expected_score(r2, r1) == pytest.approx(1.0, abs=1e-12)


@given(ratings, ratings, st.floats(0.1, 500))
def test_expected_score_increasing(r1, r2, gap):
    assert expected_score(r1 + gap, r2) >= expected_score(r1, r2)


def test_update_examples(backend):
    assert update(1500, 1500, MatchOutcome.WIN_I) == (1516, 1484)
    assert update(1500, 1500, MatchOutcome.WIN_J) == (1484, 1516)
    assert update(1500, 1500, MatchOutcome.TIE) == (1500, 1500)
    r1, r2 = update(1600, 1400, MatchOutcome.TIE, EloConfig(k_factor=10))
    e1 = 1 / (1 + 10 ** (-200 / 400))
    assert r1 == pytest.approx(1600 + 10 * (0.5 - e1))
    assert r2 == pytest.approx(1400 + 10 * (0.5 - (1 - e1)))


@given(ratings, ratings, st.sampled_from(list(MatchOutcome)))
def test_update_zero_sum(r1, r2, outcome):
    n1, n2 = update(r1, r2, outcome)
    assert n1 + n2 == pytest.approx(r1 + r2, abs=1e-9)


def test_domain_errors():
    with pytest.raises(DomainError):
        expected_score(math.nan, 1500)
    with pytest.raises(DomainError):
        update(1500, math.inf, MatchOutcome.TIE)
    with pytest.raises(ValueError):
        EloConfig(base=1.0)
    with pytest.raises(ValueError):
        EloConfig(k_factor=0)


def test_run_sequential_basic(backend):
    assert run_sequential([]).ratings == {}
    t = run_sequential([(X, Y, MatchOutcome.WIN_I)])
    assert t.ratings == {X: 1516, Y: 1484}
    assert t.matches_played == {X: 1, Y: 1}
    with pytest.raises(InvalidPair):
        run_sequential([(X, X, MatchOutcome.TIE)])


def manual(matches, cfg=EloConfig()):
    r = {}
    for a, b, o in matches:
        ra, rb = r.get(a, cfg.initial_rating), r.get(b, cfg.initial_rating)
        r[a], r[b] = update(ra, rb, o, cfg)
    return r


def test_order_sensitivity(backend):
    games = [(X, Y, MatchOutcome.WIN_I), (Y, Z, MatchOutcome.WIN_I), (X, Z, MatchOutcome.WIN_J)]
    forward = run_sequential(games).ratings
    backward = run_sequential(games[::-1]).ratings
    assert forward == pytest.approx(manual(games), abs=1e-12)
    assert backward == pytest.approx(manual(games[::-1]), abs=1e-12)
    assert abs(forward[X] - backward[X]) > 0.1


def test_translation_invariance(backend):
    rng = np.random.default_rng(0)
    players = [PlayerId("p", str(k)) for k in range(5)]
    games = []
    for _ in range(200):
        a, b = rng.choice(5, size=2, replace=False)
        games.append((players[a], players[b], list(MatchOutcome)[rng.integers(3)]))
    base = run_sequential(games)
    shifted = run_sequential(games, EloConfig(initial_rating=1500 + 321.5))
    for p in players:
        assert shifted.ratings[p] - base.ratings[p] == pytest.approx(321.5, abs=1e-9)


def test_backends_agree():
    from epp import _backend

    if "cython" not in _backend.available():
        pytest.skip("compiled kernels not built")
    rng = np.random.default_rng(1)
    players = [PlayerId("p", str(k)) for k in range(6)]
    games = [
        (players[a], players[b], list(MatchOutcome)[rng.integers(3)])
        for a, b in (rng.choice(6, size=2, replace=False) for _ in range(500))
    ]
    previous = _backend.current()
    try:
        out = {}
        for name in ("python", "cython"):
            _backend.set_backend(name)
            out[name] = run_sequential(games).ratings
    finally:
        _backend.set_backend(previous)
    assert out["python"] == out["cython"]


def test_match_list_round_trip_and_csv():
    games = [(X, Y, MatchOutcome.WIN_I), (Y, Z, MatchOutcome.TIE)]
    assert parse_match_list(format_match_list(games)) == games
    with pytest.raises(ParseError):
        parse_match_list("a,b,c\n")
    with pytest.raises(ParseError):
        parse_match_list("player_i,player_j,outcome\na:x,a:y,draw\n")
    text = run_sequential(games).to_csv().splitlines()
    assert text[0] == "player,rating,matches_played"
    assert text[1].startswith("a:x,1516")


def test_matches_from_scores(table4_csv, two_players):
    a, b = two_players
    games = matches_from_scores(parse_score_table(table4_csv))
    assert games == [(a, b, MatchOutcome.WIN_J)] + [(a, b, MatchOutcome.WIN_I)] * 3
