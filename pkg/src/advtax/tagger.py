"""Lexicon-based suggestion of candidate element classes from narratives.

Purely assistive: a human annotator remains the authority. Matching is
deterministic, scores are exact rationals, and the bundled lexicon lives
in package data.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from . import errors, taxonomy as tx

TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class Lexicon:
    entries: dict  # leaf id -> list of (pattern, Fraction weight)
    lexicon_version: int = 1


@dataclass(frozen=True)
class Suggestion:
    leaf_id: str
    score: Fraction
    matched: tuple


@dataclass(frozen=True)
class LeafMetrics:
    true_positives: int
    false_positives: int
    false_negatives: int

    @property
    def recall(self) -> Fraction:
        denom = self.true_positives + self.false_negatives
        return Fraction(self.true_positives, denom) if denom else Fraction(0)

    @property
    def precision(self) -> Fraction:
        denom = self.true_positives + self.false_positives
        return Fraction(self.true_positives, denom) if denom else Fraction(0)


@dataclass(frozen=True)
class TaggerEvaluation:
    per_leaf: dict  # leaf id -> LeafMetrics
    micro_recall: Fraction
    micro_precision: Fraction


def tokenize(text: str) -> list[str]:
    return [t.lower() for t in TOKEN_RE.findall(text)]


def validate_lexicon(lexicon: Lexicon, t: tx.Taxonomy) -> None:
    known = set(tx.leaf_ids(t))
    for leaf_id, patterns in lexicon.entries.items():
        if leaf_id not in known:
            raise errors.UnknownLeaf(f"lexicon references unknown leaf {leaf_id!r}")
        for pattern, weight in patterns:
            if not pattern.strip():
                raise errors.ValidationError(f"empty pattern under leaf {leaf_id!r}")
            if weight <= 0:
                raise errors.ValidationError(
                    f"non-positive weight for pattern {pattern!r}"
                )


def suggest(narrative: str, lexicon: Lexicon, t: tx.Taxonomy) -> list[Suggestion]:
    """Score leaves by matched whole-word patterns and contiguous phrases.

    One suggestion per leaf with at least one match, ordered by score
    descending with ties broken by leaf id ascending.
    """
    validate_lexicon(lexicon, t)
    tokens = tokenize(narrative)
    token_set = set(tokens)
    joined = " ".join(tokens)
    suggestions = []
    for leaf_id in sorted(lexicon.entries):
        matched = []
        score = Fraction(0)
        for pattern, weight in lexicon.entries[leaf_id]:
            words = tokenize(pattern)
            if len(words) == 1:
                hit = words[0] in token_set
            else:
                hit = " ".join(words) in joined
            if hit:
                matched.append(pattern)
                score += weight
        if matched:
            suggestions.append(Suggestion(leaf_id, score, tuple(matched)))
    suggestions.sort(key=lambda s: (-s.score, s.leaf_id))
    return suggestions


def evaluate_tagger(reports: list, store, lexicon: Lexicon,
                    t: tx.Taxonomy) -> TaggerEvaluation:
    """Per-leaf recall/precision of top-k suggestions against gold tags.

    For each annotated report, k equals the size of the gold tag set and
    the top-k suggested leaves count as predictions.
    """
    from . import annotation as ann

    gold = ann.current_annotations(store)
    by_id = {r.report_id: r for r in reports}
    counts: dict[str, list[int]] = {}  # leaf -> [tp, fp, fn]
    for report_id, a in gold.items():
        report = by_id.get(report_id)
        if report is None or not a.tags:
            continue
        k = len(a.tags)
        predicted = {s.leaf_id for s in suggest(report.narrative, lexicon, t)[:k]}
        for leaf_id in predicted | set(a.tags):
            tp_fp_fn = counts.setdefault(leaf_id, [0, 0, 0])
            if leaf_id in predicted and leaf_id in a.tags:
                tp_fp_fn[0] += 1
            elif leaf_id in predicted:
                tp_fp_fn[1] += 1
            else:
                tp_fp_fn[2] += 1
    per_leaf = {leaf: LeafMetrics(*vals) for leaf, vals in sorted(counts.items())}
    tp = sum(m.true_positives for m in per_leaf.values())
    fp = sum(m.false_positives for m in per_leaf.values())
    fn = sum(m.false_negatives for m in per_leaf.values())
    return TaggerEvaluation(
        per_leaf=per_leaf,
        micro_recall=Fraction(tp, tp + fn) if tp + fn else Fraction(0),
        micro_precision=Fraction(tp, tp + fp) if tp + fp else Fraction(0),
    )


# ---------------------------------------------------------------------------
# lexicon files: JSON keyed by leaf id, weights as exact strings

def dump_lexicon(lexicon: Lexicon) -> str:
    doc = {
        "lexicon_version": lexicon.lexicon_version,
        "entries": {
            leaf_id: [[pattern, str(weight)] for pattern, weight in patterns]
            for leaf_id, patterns in sorted(lexicon.entries.items())
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def parse_lexicon(document: str) -> Lexicon:
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise errors.ParseError(str(exc), locus=f"line {exc.lineno}") from exc
    entries = {
        leaf_id: [(pattern, Fraction(weight)) for pattern, weight in patterns]
        for leaf_id, patterns in doc.get("entries", {}).items()
    }
    return Lexicon(entries=entries,
                   lexicon_version=doc.get("lexicon_version", 1))


def load_lexicon_file(path: Union[str, Path]) -> Lexicon:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise errors.FileUnreadable(f"cannot read {path}: {exc}") from exc
    return parse_lexicon(text)


def bundled_lexicon() -> Lexicon:
    """The lexicon shipped with the package, authored from leaf definitions."""
    text = resources.files("advtax.data").joinpath("lexicon.json").read_text("utf-8")
    return parse_lexicon(text)
