"""Annotation store, coverage analytics, and revision-driven reclassification.

The store is an append-only event log: every recorded annotation or
reclassification move is one event, and analytics are computed from the
latest event per (report, annotator). Replaying a persisted log
reconstructs the store exactly, which is the audit-trail contract.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

from . import errors, taxonomy as tx

UNCLASSIFIED = "Unclassified"

DIFFICULTY_LABELS = {1: "Easy", 2: "Moderate", 3: "Difficult", 4: "Indecisive"}


class IndecisiveGradeWarning(UserWarning):
    """Difficulty 4 recorded for an annotation that still names a primary."""


@dataclass(frozen=True)
class Annotation:
    report_id: str
    taxonomy_version: int
    tags: frozenset
    primary: str  # leaf id or UNCLASSIFIED
    difficulty: int
    annotator: str
    notes: str = ""


@dataclass(frozen=True)
class CoverageReport:
    total: int
    primary_counts: dict
    unclassified: int
    tag_counts: dict
    difficulty_histogram: dict
    success_rate: Fraction
    single_element: int
    multi_element: int


@dataclass(frozen=True)
class ReclassificationPlan:
    target_version: int
    moves: list  # (report_id, new_primary, new_tags, rationale)


@dataclass
class AnnotationStore:
    taxonomies: dict = field(default_factory=dict)  # version -> Taxonomy
    events: list = field(default_factory=list)
    gold_annotator: Optional[str] = None

    def register_taxonomy(self, t: tx.Taxonomy) -> None:
        self.taxonomies[t.version] = t

    def snapshot(self) -> "AnnotationStore":
        return AnnotationStore(
            taxonomies=dict(self.taxonomies),
            events=list(self.events),
            gold_annotator=self.gold_annotator,
        )


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _validate(store: AnnotationStore, a: Annotation) -> None:
    t = store.taxonomies.get(a.taxonomy_version)
    if t is None:
        raise errors.UnknownTaxonomyVersion(
            f"taxonomy version {a.taxonomy_version} is not registered"
        )
    known = set(tx.leaf_ids(t))
    unknown = set(a.tags) - known
    if unknown:
        raise errors.UnknownLeaf(f"unknown leaf ids: {', '.join(sorted(unknown))}")
    if a.difficulty not in DIFFICULTY_LABELS:
        raise errors.BadDifficulty(f"difficulty {a.difficulty} not in 1..4")
    if a.primary != UNCLASSIFIED:
        if a.primary not in known:
            raise errors.UnknownLeaf(f"unknown primary leaf id {a.primary!r}")
        if a.primary not in a.tags:
            raise errors.PrimaryNotInTags(
                f"primary {a.primary!r} is not among tags {sorted(a.tags)}"
            )
    if a.difficulty == 4 and a.primary != UNCLASSIFIED:
        warnings.warn(
            f"report {a.report_id}: difficulty 4 (Indecisive) with a named "
            f"primary element",
            IndecisiveGradeWarning,
            stacklevel=3,
        )


def record_annotation(store: AnnotationStore, a: Annotation,
                      timestamp: Optional[str] = None) -> AnnotationStore:
    """Append an annotation event; latest wins per (report, annotator)."""
    _validate(store, a)
    out = store.snapshot()
    out.events.append({"event_kind": "annotate", "annotation": a,
                       "timestamp": timestamp or _now()})
    return out


def _latest_by_annotator(store: AnnotationStore) -> dict:
    """report_id -> {annotator -> Annotation}, latest event winning."""
    latest: dict[str, dict[str, Annotation]] = {}
    for event in store.events:
        a = event["annotation"]
        latest.setdefault(a.report_id, {})[a.annotator] = a
    return latest


def current_annotations(store: AnnotationStore) -> dict:
    """report_id -> effective Annotation (gold annotator preferred)."""
    out = {}
    for report_id, per_annotator in _latest_by_annotator(store).items():
        if store.gold_annotator and store.gold_annotator in per_annotator:
            out[report_id] = per_annotator[store.gold_annotator]
        else:
            out[report_id] = per_annotator[min(per_annotator)]
    return out


def coverage(store: AnnotationStore, t: tx.Taxonomy) -> CoverageReport:
    """Compute the per-class and difficulty analytics over the store."""
    names = {leaf.id: leaf.name for leaf in tx.iter_leaves(t)}
    primary_counts = {name: 0 for name in names.values()}
    tag_counts = {name: 0 for name in names.values()}
    histogram = {grade: 0 for grade in DIFFICULTY_LABELS}
    unclassified = 0
    single = 0
    current = current_annotations(store)
    for a in current.values():
        if a.primary == UNCLASSIFIED:
            unclassified += 1
        else:
            primary_counts[names.get(a.primary, a.primary)] += 1
        for tag in a.tags:
            if tag in names:
                tag_counts[names[tag]] += 1
        histogram[a.difficulty] += 1
        if len(a.tags) == 1:
            single += 1
    total = len(current)
    rate = Fraction(total - unclassified, total) if total else Fraction(1)
    return CoverageReport(
        total=total,
        primary_counts=primary_counts,
        unclassified=unclassified,
        tag_counts=tag_counts,
        difficulty_histogram=histogram,
        success_rate=rate,
        single_element=single,
        multi_element=total - single,
    )


def success_counts(store: AnnotationStore) -> tuple[int, int]:
    """(classified, total) over the effective annotations, unreduced."""
    current = current_annotations(store)
    total = len(current)
    unclassified = sum(1 for a in current.values() if a.primary == UNCLASSIFIED)
    return total - unclassified, total


def success_rate(store: AnnotationStore) -> Fraction:
    classified, total = success_counts(store)
    if total == 0:
        return Fraction(1)
    return Fraction(classified, total)


def format_rate(rate: Fraction) -> str:
    return f"{float(rate) * 100:.1f}%"


def reclassify(store: AnnotationStore, plan: ReclassificationPlan,
               timestamp: Optional[str] = None) -> AnnotationStore:
    """Apply a reclassification plan atomically; any invalid move aborts."""
    t = store.taxonomies.get(plan.target_version)
    if t is None:
        raise errors.UnknownTaxonomyVersion(
            f"taxonomy version {plan.target_version} is not registered"
        )
    known = set(tx.leaf_ids(t))
    current = current_annotations(store)
    moves = []
    for report_id, new_primary, new_tags, rationale in plan.moves:
        if report_id not in current:
            raise errors.UnknownReport(f"no annotation for report {report_id!r}")
        bad = set(new_tags) - known
        if bad:
            raise errors.UnknownLeaf(f"unknown leaf ids: {', '.join(sorted(bad))}")
        if new_primary != UNCLASSIFIED and new_primary not in new_tags:
            raise errors.PrimaryNotInTags(
                f"primary {new_primary!r} is not among tags {sorted(new_tags)}"
            )
        moves.append((report_id, new_primary, frozenset(new_tags), rationale))
    out = store.snapshot()
    stamp = timestamp or _now()
    for report_id, new_primary, new_tags, rationale in moves:
        prior = current[report_id]
        updated = replace(prior, taxonomy_version=plan.target_version,
                          primary=new_primary, tags=new_tags,
                          notes=(prior.notes + " | " if prior.notes else "") + rationale)
        out.events.append({"event_kind": "reclassify", "annotation": updated,
                           "timestamp": stamp})
    return out


# ---------------------------------------------------------------------------
# log persistence (newline-delimited JSON, one event per line)

def event_to_json(event: dict) -> str:
    a = event["annotation"]
    record = {
        "report_id": a.report_id,
        "taxonomy_version": a.taxonomy_version,
        "tags": sorted(a.tags),
        "primary": a.primary,
        "difficulty": a.difficulty,
        "annotator": a.annotator,
        "notes": a.notes,
        "event_kind": event["event_kind"],
        "timestamp": event["timestamp"],
    }
    return json.dumps(record, sort_keys=True, ensure_ascii=False)


def dump_log(store: AnnotationStore) -> str:
    return "".join(event_to_json(e) + "\n" for e in store.events)


def parse_log_line(line: str, line_number: int) -> dict:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise errors.ParseError(str(exc), locus=f"line {line_number}") from exc
    try:
        a = Annotation(
            report_id=record["report_id"],
            taxonomy_version=record["taxonomy_version"],
            tags=frozenset(record["tags"]),
            primary=record["primary"],
            difficulty=record["difficulty"],
            annotator=record["annotator"],
            notes=record.get("notes", ""),
        )
    except KeyError as exc:
        raise errors.ParseError(f"missing field {exc}", locus=f"line {line_number}")
    return {"event_kind": record.get("event_kind", "annotate"),
            "annotation": a, "timestamp": record.get("timestamp", "")}


def load_log(document: str, taxonomies: dict,
             gold_annotator: Optional[str] = None) -> AnnotationStore:
    """Rebuild a store by replaying a persisted event log."""
    store = AnnotationStore(taxonomies=dict(taxonomies),
                            gold_annotator=gold_annotator)
    for line_number, line in enumerate(document.splitlines(), start=1):
        if not line.strip():
            continue
        store.events.append(parse_log_line(line, line_number))
    return store


def load_log_file(path: Union[str, Path], taxonomies: dict,
                  gold_annotator: Optional[str] = None) -> AnnotationStore:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise errors.FileUnreadable(f"cannot read {path}: {exc}") from exc
    return load_log(text, taxonomies, gold_annotator)
