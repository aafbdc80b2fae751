"""Reading, writing, orienting and validating score tables.

The canonical CSV header is ``tournament,algorithm,hyperparam_set,split,score``.
JSON input is an array of objects carrying the same five keys.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import IO

from .core import Orientation, PlayerId, ScoreRecord, ScoreTable
from .errors import DuplicateKey, ParseError

COLUMNS = ("tournament", "algorithm", "hyperparam_set", "split", "score")


class Format(enum.Enum):
    CSV = "csv"
    JSON = "json"


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Issue:
    severity: Severity
    message: str
    locus: str = ""


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity is Severity.ERROR]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if i.severity is Severity.WARNING]

    @property
    def ok(self) -> bool:
        return not self.errors

    def add(self, severity: Severity, message: str, locus: str = "") -> None:
        self.issues.append(Issue(severity, message, locus))


def _to_record(row: dict, line: int) -> ScoreRecord:
    try:
        split, score = row["split"], row["score"]
        if isinstance(split, bool) or isinstance(score, bool):
            raise ValueError("split and score must be numbers")
        if isinstance(split, float):
            if not split.is_integer():
                raise ValueError(f"split must be an integer, got {split!r}")
            split = int(split)
        return ScoreRecord(
            tournament=str(row["tournament"]),
            player=PlayerId(str(row["algorithm"]), str(row["hyperparam_set"])),
            split=int(split),
            score=float(score),
        )
    except (ValueError, TypeError) as exc:
        raise ParseError(str(exc), line) from None


def _check_columns(columns, line: int) -> None:
    columns = list(columns)
    unknown = [c for c in columns if c not in COLUMNS]
    if unknown:
        raise ParseError(f"unknown column(s): {', '.join(unknown)}", line)
    missing = [c for c in COLUMNS if c not in columns]
    if missing:
        raise ParseError(f"missing column(s): {', '.join(missing)}", line)
    if len(set(columns)) != len(columns):
        raise ParseError("repeated column name", line)


def _rows_csv(text: str):
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("missing header", 1) from None
    _check_columns(header, 1)
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", line)
        yield line, dict(zip(header, row))


def _rows_json(text: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(data, list):
        raise ParseError("JSON score table must be an array of objects")
    for k, obj in enumerate(data, start=1):
        if not isinstance(obj, dict):
            raise ParseError("array element is not an object", k)
        _check_columns(obj.keys(), k)
        yield k, obj


def parse_score_table(
    source: bytes | str | IO,
    format: Format | str = Format.CSV,
    orientation: Orientation = Orientation.HIGHER_BETTER,
) -> ScoreTable:
    """Parse a score table from bytes, text or a file object.

    Raises:
        ParseError: on a malformed row (the message carries the line number,
            or the array position for JSON).
        DuplicateKey: if a (tournament, player, split) key repeats.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from None
    if source.startswith("﻿"):
        source = source[1:]
    fmt = Format(format)
    rows = _rows_csv(source) if fmt is Format.CSV else _rows_json(source)

    records = []
    seen: dict[tuple, int] = {}
    for line, row in rows:
        rec = _to_record(row, line)
        if rec.key in seen:
            raise DuplicateKey(
                f"duplicate key ({rec.tournament}, {rec.player}, {rec.split}), "
                f"first seen at line {seen[rec.key]}",
                line,
            )
        seen[rec.key] = line
        records.append(rec)
    return ScoreTable(tuple(records), orientation)


def serialize_score_table(table: ScoreTable, format: Format | str = Format.CSV) -> str:
    """Render a table in record order; floats use the shortest round-trip repr."""
    fmt = Format(format)
    if fmt is Format.JSON:
        rows = [
            {
                "tournament": r.tournament,
                "algorithm": r.player.algorithm,
                "hyperparam_set": r.player.hyperparam_set,
                "split": r.split,
                "score": r.score,
            }
            for r in table.records
        ]
        return json.dumps(rows, indent=1) + "\n"
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in table.records:
        writer.writerow(
            [r.tournament, r.player.algorithm, r.player.hyperparam_set, r.split, repr(r.score)]
        )
    return buf.getvalue()


def orient_scores(table: ScoreTable) -> ScoreTable:
    """Negate lower-is-better scores so that a larger score always wins."""
    if table.orientation is Orientation.HIGHER_BETTER:
        return table
    flipped = tuple(
        ScoreRecord(r.tournament, r.player, r.split, -r.score) for r in table.records
    )
    return ScoreTable(flipped, Orientation.HIGHER_BETTER)


def validate(table: ScoreTable) -> ValidationReport:
    report = ValidationReport()
    if not table.records:
        report.add(Severity.ERROR, "table has no records")
        return report

    keys = Counter(r.key for r in table.records)
    for (t, p, s), n in sorted(keys.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2])):
        if n > 1:
            report.add(Severity.ERROR, f"duplicate key ({t}, {p}, {s}) x{n}", f"{t}/{p}/{s}")
    for r in table.records:
        if not math.isfinite(r.score):
            report.add(Severity.ERROR, f"non-finite score {r.score}", f"{r.tournament}/{r.player}/{r.split}")

    splits: dict[str, dict[PlayerId, set[int]]] = defaultdict(lambda: defaultdict(set))
    for r in table.records:
        splits[r.tournament][r.player].add(r.split)

    all_tournaments = sorted(splits)
    presence: dict[PlayerId, set[str]] = defaultdict(set)
    for t in all_tournaments:
        players = splits[t]
        for p, ss in players.items():
            presence[p].add(t)
            if len(ss) < 1:
                report.add(Severity.ERROR, f"player {p} has no splits", f"{t}/{p}")
        if len(players) == 1:
            only = next(iter(players))
            report.add(Severity.WARNING, f"tournament {t} has a single player ({only})", t)
        counts = {len(ss) for ss in players.values()}
        if len(counts) > 1:
            report.add(
                Severity.WARNING,
                f"tournament {t} has unbalanced split counts ({min(counts)}..{max(counts)})",
                t,
            )
    if len(all_tournaments) > 1:
        for p in sorted(presence):
            missing = [t for t in all_tournaments if t not in presence[p]]
            if missing:
                report.add(
                    Severity.WARNING,
                    f"player {p} absent from tournament(s) {', '.join(missing)}",
                    str(p),
                )
    return report
