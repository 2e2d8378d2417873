"""Collision-report corpus ingestion and filtering.

Reports arrive as RFC-4180 CSV with a mandatory header row. Every input
row is accounted for: it either becomes an accepted CollisionReport or an
excluded entry carrying a reason, with reasons assigned by fixed
precedence (MalformedRow > DuplicateId > EmptyNarrative >
InconsistentFields).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import date, time
from enum import Enum
from pathlib import Path
from typing import Optional, Union

from . import errors

REQUIRED_COLUMNS = [
    "report_id", "date", "time", "manufacturer", "city", "state",
    "mode", "narrative", "damage", "injury",
]

DRIVING_MODES = {"autonomous", "conventional", "transitioning", "unknown"}
DAMAGE_LEVELS = {"none", "minor", "moderate", "major", "unknown"}
DAY_PARTS = {"dawn", "day", "dusk", "night", "unknown"}


class ExclusionReason(Enum):
    MALFORMED_ROW = "MalformedRow"
    DUPLICATE_ID = "DuplicateId"
    EMPTY_NARRATIVE = "EmptyNarrative"
    INCONSISTENT_FIELDS = "InconsistentFields"


@dataclass
class CollisionReport:
    report_id: str
    date: date
    time_of_day: str  # day-part enum token
    clock_time: Optional[time]
    manufacturer: str
    city: str
    state: str
    driving_mode: str
    narrative: str
    damage: str
    injury: Optional[bool]  # None = unknown
    extras: dict = field(default_factory=dict)


@dataclass
class CorpusValidationResult:
    accepted: list
    excluded: list  # (row_number, ExclusionReason) pairs, 1-based data rows


def day_part_for(t: Optional[time]) -> str:
    if t is None:
        return "unknown"
    if time(5, 0) <= t <= time(7, 59, 59):
        return "dawn"
    if time(8, 0) <= t <= time(17, 59, 59):
        return "day"
    if time(18, 0) <= t <= time(20, 59, 59):
        return "dusk"
    return "night"


def _parse_time(raw: str) -> tuple[Optional[time], str]:
    raw = raw.strip().lower()
    if not raw or raw == "unknown":
        return None, "unknown"
    if raw in DAY_PARTS:
        return None, raw
    try:
        parsed = time.fromisoformat(raw)
    except ValueError:
        return None, "unknown"
    return parsed, day_part_for(parsed)


def _parse_injury(raw: str) -> Optional[bool]:
    raw = raw.strip().lower()
    if raw in {"yes", "true", "1"}:
        return True
    if raw in {"no", "false", "0"}:
        return False
    return None


def _inconsistent(report: CollisionReport) -> bool:
    narrative = report.narrative.lower()
    if report.driving_mode == "autonomous" and "conventional mode" in narrative:
        return True
    if report.driving_mode == "conventional" and "autonomous mode" in narrative:
        return True
    if report.damage == "none" and report.injury is True:
        return True
    return False


def parse_reports(document: str) -> CorpusValidationResult:
    """Parse a CSV document into accepted reports and excluded rows."""
    reader = csv.reader(io.StringIO(document, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise errors.HeaderMismatch("document has no header row")
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        raise errors.HeaderMismatch(f"missing required columns: {', '.join(missing)}")
    index = {name: header.index(name) for name in REQUIRED_COLUMNS}
    extra_cols = [(i, name) for i, name in enumerate(header)
                  if name not in REQUIRED_COLUMNS]

    accepted: list[CollisionReport] = []
    excluded: list[tuple[int, ExclusionReason]] = []
    seen_ids: set[str] = set()

    for row_number, row in enumerate(reader, start=1):
        if len(row) != len(header):
            excluded.append((row_number, ExclusionReason.MALFORMED_ROW))
            continue
        report_id = row[index["report_id"]].strip()
        raw_date = row[index["date"]].strip()
        try:
            parsed_date = date.fromisoformat(raw_date)
        except ValueError:
            parsed_date = None
        if not report_id or parsed_date is None:
            excluded.append((row_number, ExclusionReason.MALFORMED_ROW))
            continue
        if report_id in seen_ids:
            excluded.append((row_number, ExclusionReason.DUPLICATE_ID))
            continue
        narrative = row[index["narrative"]].strip()
        if not narrative:
            seen_ids.add(report_id)
            excluded.append((row_number, ExclusionReason.EMPTY_NARRATIVE))
            continue
        clock_time, day_part = _parse_time(row[index["time"]])
        mode = row[index["mode"]].strip().lower()
        if mode not in DRIVING_MODES:
            mode = "unknown"
        damage = row[index["damage"]].strip().lower()
        if damage not in DAMAGE_LEVELS:
            damage = "unknown"
        report = CollisionReport(
            report_id=report_id,
            date=parsed_date,
            time_of_day=day_part,
            clock_time=clock_time,
            manufacturer=row[index["manufacturer"]].strip(),
            city=row[index["city"]].strip(),
            state=row[index["state"]].strip(),
            driving_mode=mode,
            narrative=narrative,
            damage=damage,
            injury=_parse_injury(row[index["injury"]]),
            extras={name: row[i] for i, name in extra_cols},
        )
        seen_ids.add(report_id)
        if _inconsistent(report):
            excluded.append((row_number, ExclusionReason.INCONSISTENT_FIELDS))
            continue
        accepted.append(report)
    return CorpusValidationResult(accepted=accepted, excluded=excluded)


def parse_reports_file(path: Union[str, Path]) -> CorpusValidationResult:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise errors.FileUnreadable(f"cannot read {path}: {exc}") from exc
    return parse_reports(text)


def serialize_reports(reports: list) -> str:
    """Write accepted reports back out as canonical CSV (ingest round trip)."""
    extra_names: list[str] = []
    for r in reports:
        for name in r.extras:
            if name not in extra_names:
                extra_names.append(name)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REQUIRED_COLUMNS + extra_names)
    for r in reports:
        if r.clock_time is not None:
            time_field = r.clock_time.strftime("%H:%M")
        elif r.time_of_day != "unknown":
            time_field = r.time_of_day
        else:
            time_field = ""
        injury = {True: "yes", False: "no", None: "unknown"}[r.injury]
        writer.writerow(
            [r.report_id, r.date.isoformat(), time_field, r.manufacturer,
             r.city, r.state, r.driving_mode, r.narrative, r.damage, injury]
            + [r.extras.get(name, "") for name in extra_names]
        )
    return buf.getvalue()


def filter_corpus(reports: list, date_from: Optional[date] = None,
                  date_to: Optional[date] = None, mode: Optional[str] = None,
                  manufacturer: Optional[str] = None) -> list:
    """Return reports passing every given filter, in their original order."""
    if date_from is not None and date_to is not None and date_from > date_to:
        raise errors.InvalidRange(f"date range {date_from}..{date_to} is inverted")
    out = []
    for r in reports:
        if date_from is not None and r.date < date_from:
            continue
        if date_to is not None and r.date > date_to:
            continue
        if mode is not None and r.driving_mode != mode:
            continue
        if manufacturer is not None and manufacturer.lower() not in r.manufacturer.lower():
            continue
        out.append(r)
    return out
