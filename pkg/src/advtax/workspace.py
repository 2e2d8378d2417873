"""Workspace: the on-disk bundle of taxonomy, corpus, annotations, lexicon.

The CLI and the HTTP server both operate on a Workspace and call the same
library operations, so their outputs are structurally identical.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import annotation as ann
from . import corpus, errors, tagger, taxonomy as tx

DATA_DIR_ENV = "ADVTAX_DATA_DIR"

TAXONOMY_FILE = "taxonomy.json"
ANNOTATION_LOG = "annotations.jsonl"
REPORTS_FILE = "reports.csv"
LEXICON_FILE = "lexicon.json"


@dataclass
class WorkspaceConfig:
    data_dir: Path
    taxonomy_file: Path
    annotation_log: Path
    lexicon_file: Path
    reports_file: Path
    listen_address: str = "127.0.0.1:8712"
    gold_annotator: str = "gold"

    @classmethod
    def for_dir(cls, data_dir, **overrides) -> "WorkspaceConfig":
        data_dir = Path(data_dir)
        cfg = cls(
            data_dir=data_dir,
            taxonomy_file=data_dir / TAXONOMY_FILE,
            annotation_log=data_dir / ANNOTATION_LOG,
            lexicon_file=data_dir / LEXICON_FILE,
            reports_file=data_dir / REPORTS_FILE,
        )
        for key, value in overrides.items():
            setattr(cfg, key, value)
        return cfg


def resolve_data_dir(explicit: Optional[str]) -> Path:
    if explicit:
        return Path(explicit)
    env = os.environ.get(DATA_DIR_ENV)
    if env:
        return Path(env)
    return Path.cwd()


@dataclass
class Workspace:
    config: WorkspaceConfig
    taxonomy: tx.Taxonomy
    store: ann.AnnotationStore
    reports: list = field(default_factory=list)
    lexicon: Optional[tagger.Lexicon] = None

    @classmethod
    def load(cls, config: WorkspaceConfig) -> "Workspace":
        if config.taxonomy_file.exists():
            taxonomy = tx.deserialize(
                config.taxonomy_file.read_text(encoding="utf-8"))
        else:
            taxonomy = tx.canonical_taxonomy()
        taxonomies = {taxonomy.version: taxonomy}
        # register earlier versions reachable from the revision log so old
        # annotations stay resolvable
        base = tx.canonical_taxonomy()
        if base.version not in taxonomies:
            taxonomies[base.version] = base
        if config.annotation_log.exists():
            store = ann.load_log_file(config.annotation_log, taxonomies,
                                      gold_annotator=config.gold_annotator)
        else:
            store = ann.AnnotationStore(taxonomies=taxonomies,
                                        gold_annotator=config.gold_annotator)
        reports = []
        if config.reports_file.exists():
            reports = corpus.parse_reports_file(config.reports_file).accepted
        if config.lexicon_file.exists():
            lexicon = tagger.load_lexicon_file(config.lexicon_file)
        else:
            lexicon = tagger.bundled_lexicon()
        return cls(config=config, taxonomy=taxonomy, store=store,
                   reports=reports, lexicon=lexicon)

    def report_by_id(self, report_id: str) -> corpus.CollisionReport:
        for r in self.reports:
            if r.report_id == report_id:
                return r
        raise errors.UnknownReport(f"no report with id {report_id!r}")

    def save_taxonomy(self) -> None:
        self.config.data_dir.mkdir(parents=True, exist_ok=True)
        self.config.taxonomy_file.write_text(tx.serialize(self.taxonomy),
                                             encoding="utf-8")

    def append_log_events(self, prior_len: int) -> None:
        """Persist events appended past `prior_len` to the annotation log."""
        self.config.data_dir.mkdir(parents=True, exist_ok=True)
        with self.config.annotation_log.open("a", encoding="utf-8") as fh:
            for event in self.store.events[prior_len:]:
                fh.write(ann.event_to_json(event) + "\n")

    def record(self, a: ann.Annotation) -> None:
        prior = len(self.store.events)
        self.store = ann.record_annotation(self.store, a)
        self.append_log_events(prior)

    def reclassify(self, plan: ann.ReclassificationPlan) -> None:
        prior = len(self.store.events)
        self.store = ann.reclassify(self.store, plan)
        self.append_log_events(prior)

    def amend(self, leaf_id: str, new_definition: str, rationale: str) -> None:
        self.taxonomy = tx.amend_definition(self.taxonomy, leaf_id,
                                            new_definition, rationale)
        self.store.register_taxonomy(self.taxonomy)
        self.save_taxonomy()
