import shutil
from pathlib import Path

import pytest

from advtax import annotation as ann
from advtax import corpus, tagger, taxonomy as tx
from advtax.workspace import Workspace, WorkspaceConfig

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def canonical():
    return tx.canonical_taxonomy()


@pytest.fixture(scope="session")
def eval_corpus():
    return corpus.parse_reports_file(FIXTURES / "evaluation_reports.csv")


@pytest.fixture
def gold_store(canonical):
    return ann.load_log_file(FIXTURES / "gold_annotations.jsonl",
                             {1: canonical}, gold_annotator="gold")


@pytest.fixture
def appendix(canonical):
    reports = corpus.parse_reports_file(FIXTURES / "appendix_reports.csv").accepted
    store = ann.load_log_file(FIXTURES / "appendix_gold.jsonl",
                              {1: canonical}, gold_annotator="gold")
    return reports, store


@pytest.fixture
def lexicon():
    return tagger.bundled_lexicon()


@pytest.fixture
def gold_workspace(tmp_path):
    """A workspace directory preloaded with the evaluation fixtures."""
    data_dir = tmp_path / "ws"
    data_dir.mkdir()
    shutil.copy(FIXTURES / "gold_annotations.jsonl", data_dir / "annotations.jsonl")
    accepted = corpus.parse_reports_file(FIXTURES / "evaluation_reports.csv").accepted
    (data_dir / "reports.csv").write_text(corpus.serialize_reports(accepted),
                                          encoding="utf-8")
    return data_dir


@pytest.fixture
def workspace(gold_workspace):
    return Workspace.load(WorkspaceConfig.for_dir(gold_workspace))
