"""Command-line interface: ``epp {rate,probs,compare,elo,embed,simulate}``.

Exit codes: 0 success, 2 input/validation problems, 3 computation problems
(disconnected comparison graph, unknown player, incomplete matrix, ...).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path
from urllib.parse import quote

from . import analysis, elo, fitter, ingest, matches, synth
from .core import Orientation, PlayerId
from .errors import ComputationError, InputError, ValidationFailed

log = logging.getLogger("epp")

EXIT_OK, EXIT_INPUT, EXIT_COMPUTE = 0, 2, 3


def _write(path: Path | None, text: str) -> None:
    """Write atomically to ``path``, or to stdout when ``path`` is None."""
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _safe(name: str) -> str:
    return quote(name, safe="")


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _load_results(paths) -> list[fitter.EppResult]:
    out = []
    for p in paths:
        try:
            out.append(fitter.EppResult.from_json_dict(json.loads(_read_text(p))))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{p} is not an EPP result file: {exc}") from None
    return out


def _player(text: str) -> PlayerId:
    try:
        return PlayerId.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _constraint(text: str):
    try:
        return fitter.parse_constraint(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_rate(args) -> int:
    fmt = args.input_format or ("json" if args.input.endswith(".json") else "csv")
    table = ingest.parse_score_table(
        _read_text(args.input).encode("utf-8"), fmt, Orientation(args.orientation)
    )
    report = ingest.validate(table)
    for issue in report.warnings:
        log.warning("%s", issue.message)
    if not report.ok:
        raise ValidationFailed(report)
    table = ingest.orient_scores(table)

    mcfg = matches.MatchConfig(matches.Scheme(args.scheme), matches.TiePolicy(args.ties))
    census = matches.comparison_census(table, mcfg)
    counts = matches.generate_matches(table, mcfg)
    fcfg = fitter.FitConfig(args.constraint, args.ridge, args.tol, args.max_iter)
    roster = {t: list(ps) for t, ps in table.by_tournament().items()}
    results = fitter.fit_all(counts, fcfg, roster)

    census_doc = {
        "n_records": census.n_records,
        "scheme": mcfg.scheme.value,
        "ties": mcfg.tie_policy.value,
        "players_per_tournament": census.players_per_tournament,
        "pairs": census.pairs,
        "comparisons": census.comparisons,
        "comparisons_total": census.comparisons_total,
    }
    for r in results.values():
        if r.warnings:
            log.warning("tournament %s: %s", r.tournament, ", ".join(r.warnings))

    if args.output:
        out = Path(args.output)
        for t, r in results.items():
            _write(out / f"{_safe(t)}.epp.json", _dump(r.to_json_dict()))
            if args.format == "csv":
                board = analysis.leaderboard(r, force=True)
                _write(out / f"{_safe(t)}.leaderboard.csv", analysis.leaderboard_csv(board))
        _write(out / "census.json", _dump(census_doc))
        _write(out / "pairs.csv", matches.pair_counts_csv(counts))
        _write(out / "tunability.csv", analysis.tunability_csv(analysis.tunability(results.values())))
    if args.format == "json":
        if not args.output:
            _write(None, _dump({
                "census": census_doc,
                "results": [r.to_json_dict() for r in results.values()],
            }))
    else:
        for t, r in results.items():
            print(f"# tournament {t}" + (f" [{', '.join(r.warnings)}]" if r.warnings else ""))
            sys.stdout.write(analysis.leaderboard_csv(analysis.leaderboard(r, force=True)))
    return EXIT_OK


def cmd_probs(args) -> int:
    for r in _load_results(args.results):
        pm = analysis.probability_matrix(r, force=args.force)
        if args.format == "json":
            text = _dump({
                "tournament": r.tournament,
                "players": [str(p) for p in pm.players],
                "P": pm.P.tolist(),
            })
        else:
            text = pm.to_csv()
        ext = "json" if args.format == "json" else "csv"
        _write(Path(args.output) / f"{_safe(r.tournament)}.probs.{ext}" if args.output else None, text)
    return EXIT_OK


def cmd_compare(args) -> int:
    (r,) = _load_results([args.result])
    if args.pair:
        pairs = [tuple(args.pair)]
    else:
        pairs = [(a, b) for x, a in enumerate(r.players) for b in r.players[x + 1:]]
    comps = [analysis.compare(r, a, b) for a, b in pairs]
    if args.format == "json":
        text = _dump([c.to_json_dict() for c in comps])
    else:
        lines = ["i,j,delta,prob,z,p_value,degenerate"]
        for c in comps:
            z = "" if c.z is None else repr(c.z)
            lines.append(f"{c.i},{c.j},{c.delta!r},{c.prob!r},{z},{c.p_value!r},{str(c.degenerate).lower()}")
        text = "\n".join(lines) + "\n"
    _write(Path(args.output) / f"{_safe(r.tournament)}.compare.{args.format}" if args.output else None, text)
    return EXIT_OK


def cmd_elo(args) -> int:
    text = _read_text(args.input)
    if args.from_scores:
        table = ingest.orient_scores(
            ingest.parse_score_table(text, "csv", Orientation(args.orientation))
        )
        match_list = elo.matches_from_scores(table)
    else:
        match_list = elo.parse_match_list(text)
    cfg = elo.EloConfig(args.initial_rating, args.k_factor, args.scale, args.base)
    result = elo.run_sequential(match_list, cfg)
    if args.format == "json":
        out = _dump([
            {"player": str(p), "rating": r, "matches_played": m} for p, r, m in result.standings()
        ])
    else:
        out = result.to_csv()
    _write(Path(args.output) / f"elo.{args.format}" if args.output else None, out)
    return EXIT_OK


def cmd_embed(args) -> int:
    results = _load_results(args.results)
    mat = analysis.epp_matrix(results)
    if args.complete_only:
        mat = mat.complete_columns()
    emb = analysis.pca_embed(mat, args.k)
    doc = emb.to_json_dict()
    if args.output:
        out = Path(args.output)
        _write(out / "embedding.json", _dump(doc))
        _write(out / "epp_matrix.csv", mat.to_csv())
    else:
        _write(None, _dump(doc))
    return EXIT_OK


def cmd_simulate(args) -> int:
    table = synth.simulate_benchmark(
        n_players=args.players,
        n_tournaments=args.tournaments,
        n_algorithms=args.algorithms,
        n_splits=args.splits,
        noise_scale=args.noise,
        spread=args.spread,
        seed=args.seed,
    )
    text = ingest.serialize_score_table(table, args.format)
    _write(Path(args.output) / f"scores.{args.format}" if args.output else None, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="epp", description=__doc__, formatter_class=fmt)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("csv", "json"), default="csv"):
        p.add_argument("--format", choices=formats, default=default, help="output format")
        p.add_argument("--output", metavar="DIR", default=None, help="output directory (stdout if omitted)")

    p = sub.add_parser("rate", help="fit EPP ratings per tournament", formatter_class=fmt)
    p.add_argument("input", help="score table (CSV or JSON)")
    p.add_argument("--input-format", choices=["csv", "json"], default=None,
                   help="input format (default: from file extension)")
    p.add_argument("--orientation", choices=["higher", "lower"], default="higher",
                   help="whether higher or lower scores are better")
    p.add_argument("--scheme", choices=["cross", "same"], default="cross",
                   help="compare all split combinations or identical splits only")
    p.add_argument("--ties", choices=["ignore", "half"], default="half", help="tie policy")
    p.add_argument("--constraint", type=_constraint, default=fitter.MeanZero(),
                   metavar="{mean-zero,reference=<algo>:<hp>}", help="identifiability constraint")
    p.add_argument("--ridge", type=float, default=0.0, help="L2 penalty coefficient")
    p.add_argument("--tol", type=float, default=1e-8, help="gradient-norm tolerance")
    p.add_argument("--max-iter", type=int, default=100, help="Newton iteration cap")
    common(p)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("probs", help="win-probability matrices from fitted results", formatter_class=fmt)
    p.add_argument("results", nargs="+", help="result files written by 'rate'")
    p.add_argument("--force", action="store_true", help="accept unconverged fits")
    common(p)
    p.set_defaults(func=cmd_probs)

    p = sub.add_parser("compare", help="Wald tests of rating differences", formatter_class=fmt)
    p.add_argument("result", help="result file written by 'rate'")
    p.add_argument("--pair", nargs=2, type=_player, metavar=("I", "J"),
                   help="compare only this pair (default: every pair)")
    common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("elo", help="sequential Elo over a match list", formatter_class=fmt)
    p.add_argument("input", help="CSV 'player_i,player_j,outcome' (or a score table with --from-scores)")
    p.add_argument("--from-scores", action="store_true", help="derive same-split matches from a score table")
    p.add_argument("--orientation", choices=["higher", "lower"], default="higher",
                   help="score orientation for --from-scores")
    p.add_argument("--initial-rating", type=float, default=1500.0, help="rating of a new player")
    p.add_argument("--k-factor", type=float, default=32.0, help="update step size K")
    p.add_argument("--scale", type=float, default=400.0, help="rating points per factor of base in odds")
    p.add_argument("--base", type=float, default=10.0, help="odds base")
    common(p)
    p.set_defaults(func=cmd_elo)

    p = sub.add_parser("embed", help="PCA embedding of tournaments by EPP", formatter_class=fmt)
    p.add_argument("results", nargs="+", help="result files written by 'rate'")
    p.add_argument("--k", type=int, default=None, help="number of components (default: all)")
    p.add_argument("--complete-only", action="store_true",
                   help="drop players missing from any tournament instead of failing")
    common(p, formats=("json",), default="json")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("simulate", help="synthetic score table with known ratings", formatter_class=fmt)
    p.add_argument("--players", type=int, default=10, help="players per tournament")
    p.add_argument("--tournaments", type=int, default=1, help="number of data sets")
    p.add_argument("--algorithms", type=int, default=1, help="algorithms the players are spread over")
    p.add_argument("--splits", type=int, default=20, help="train/test splits per player")
    p.add_argument("--noise", type=float, default=1.0, help="score noise standard deviation")
    p.add_argument("--spread", type=float, default=2.0, help="true ratings span [-spread, spread]")
    p.add_argument("--seed", type=int, default=synth.DEFAULT_SEED, help="64-bit RNG seed")
    common(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="epp: %(levelname)s: %(message)s",
    )
    try:
        return args.func(args)
    except InputError as exc:
        print(f"epp: input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ComputationError as exc:
        print(f"epp: computation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except ValueError as exc:
        print(f"epp: invalid argument: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
