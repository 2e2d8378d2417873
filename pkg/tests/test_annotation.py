from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from advtax import annotation as ann
from advtax import errors, taxonomy as tx
from advtax.annotation import UNCLASSIFIED, Annotation, ReclassificationPlan

GOLD_PRIMARY_COUNTS = {
    "Software Threats": 6,
    "Driver": 14,
    "Vulnerable Road Users": 10,
    "Animals": 1,
    "Traffic Infrastructure": 1,
    "Intrusions": 2,
    "Protrusions": 4,
    "Traffic Agents": 72,
    "Flying Objects": 2,
    "Suspended Objects": 2,
}


def make_store(canonical, gold_annotator="gold"):
    return ann.AnnotationStore(taxonomies={1: canonical},
                               gold_annotator=gold_annotator)


def make_annotation(**kw):
    base = dict(report_id="R1", taxonomy_version=1, tags=frozenset({"M"}),
                primary="M", difficulty=1, annotator="gold")
    base.update(kw)
    return Annotation(**base)


class TestRecord:
    def test_cruise_style_annotation_accepted(self, canonical):
        store = make_store(canonical)
        a = make_annotation(tags=frozenset({"G", "M", "B", "I", "E"}),
                            primary="M", difficulty=2)
        store = ann.record_annotation(store, a)
        assert ann.current_annotations(store)["R1"] == a

    def test_primary_not_in_tags(self, canonical):
        store = make_store(canonical)
        with pytest.raises(errors.PrimaryNotInTags):
            ann.record_annotation(store, make_annotation(
                tags=frozenset({"G"}), primary="H"))

    def test_bad_difficulty(self, canonical):
        store = make_store(canonical)
        with pytest.raises(errors.BadDifficulty):
            ann.record_annotation(store, make_annotation(difficulty=5))

    def test_unknown_leaf(self, canonical):
        store = make_store(canonical)
        with pytest.raises(errors.UnknownLeaf):
            ann.record_annotation(store, make_annotation(
                tags=frozenset({"ZZ"}), primary=UNCLASSIFIED))

    def test_unknown_taxonomy_version(self, canonical):
        store = make_store(canonical)
        with pytest.raises(errors.UnknownTaxonomyVersion):
            ann.record_annotation(store, make_annotation(taxonomy_version=9))

    def test_indecisive_with_primary_warns(self, canonical):
        store = make_store(canonical)
        with pytest.warns(ann.IndecisiveGradeWarning):
            ann.record_annotation(store, make_annotation(difficulty=4))

    def test_store_value_unchanged(self, canonical):
        store = make_store(canonical)
        ann.record_annotation(store, make_annotation())
        assert store.events == []


class TestCoverage:
    def test_gold_primary_counts(self, gold_store, canonical):
        cov = ann.coverage(gold_store, canonical)
        nonzero = {k: v for k, v in cov.primary_counts.items() if v}
        assert nonzero == GOLD_PRIMARY_COUNTS
        assert cov.unclassified == 2
        assert cov.total == 116

    def test_zero_count_leaves_present(self, gold_store, canonical):
        cov = ann.coverage(gold_store, canonical)
        for name in ("Vehicle Mechanics", "Consumables and Maintenance",
                     "Weather", "Surface Condition"):
            assert cov.primary_counts[name] == 0

    def test_gold_difficulty_histogram(self, gold_store, canonical):
        cov = ann.coverage(gold_store, canonical)
        assert cov.difficulty_histogram == {1: 95, 2: 18, 3: 1, 4: 2}

    def test_gold_single_multi_split(self, gold_store, canonical):
        cov = ann.coverage(gold_store, canonical)
        assert cov.single_element == 15
        assert cov.multi_element == 101

    def test_conservation(self, gold_store, canonical):
        cov = ann.coverage(gold_store, canonical)
        assert sum(cov.primary_counts.values()) + cov.unclassified == cov.total
        assert sum(cov.difficulty_histogram.values()) == cov.total

    def test_empty_store(self, canonical):
        cov = ann.coverage(make_store(canonical), canonical)
        assert cov.total == 0
        assert cov.success_rate == 1
        assert set(cov.primary_counts.values()) == {0}

    def test_idempotent_recording(self, canonical):
        store = make_store(canonical)
        a = make_annotation()
        once = ann.record_annotation(store, a)
        twice = ann.record_annotation(once, a)
        assert ann.coverage(once, canonical) == ann.coverage(twice, canonical)

    def test_order_independence(self, gold_store, canonical):
        reversed_store = gold_store.snapshot()
        reversed_store.events = list(reversed(reversed_store.events))
        assert ann.coverage(gold_store, canonical) == \
            ann.coverage(reversed_store, canonical)

    @settings(max_examples=30, deadline=None)
    @given(st.permutations(list(range(8))))
    def test_order_independence_property(self, order):
        canonical = tx.canonical_taxonomy()
        store = make_store(canonical)
        annotations = [
            make_annotation(report_id=f"R{i}", tags=frozenset({leaf}),
                            primary=leaf, difficulty=(i % 4) + 1 if leaf else 1)
            for i, leaf in enumerate("ABCDEFGH")
        ]
        with pytest.warns(ann.IndecisiveGradeWarning):
            for a in annotations:
                store = ann.record_annotation(store, a)
            permuted = make_store(canonical)
            for idx in order:
                permuted = ann.record_annotation(permuted, annotations[idx])
        assert ann.coverage(store, canonical) == ann.coverage(permuted, canonical)

    def test_gold_annotator_preferred(self, canonical):
        store = make_store(canonical, gold_annotator="gold")
        store = ann.record_annotation(store, make_annotation(annotator="alice",
                                                             primary="G",
                                                             tags=frozenset({"G"})))
        store = ann.record_annotation(store, make_annotation(annotator="gold"))
        cov = ann.coverage(store, canonical)
        assert cov.primary_counts["Traffic Agents"] == 1
        assert cov.primary_counts["Vulnerable Road Users"] == 0


class TestSuccessRate:
    def test_gold_rate(self, gold_store):
        assert ann.success_counts(gold_store) == (114, 116)
        assert ann.format_rate(ann.success_rate(gold_store)) == "98.3%"

    def test_all_classified(self, canonical):
        store = make_store(canonical)
        store = ann.record_annotation(store, make_annotation())
        assert ann.format_rate(ann.success_rate(store)) == "100.0%"

    def test_three_quarters(self, canonical):
        store = make_store(canonical)
        for i in range(3):
            store = ann.record_annotation(store, make_annotation(report_id=f"R{i}"))
        store = ann.record_annotation(store, make_annotation(
            report_id="R3", primary=UNCLASSIFIED, difficulty=4))
        assert ann.success_rate(store) == Fraction(3, 4)
        assert ann.format_rate(ann.success_rate(store)) == "75.0%"


class TestReclassify:
    def door_cases(self, store):
        return sorted(r for r, a in ann.current_annotations(store).items()
                      if a.primary == UNCLASSIFIED)

    def test_door_cases_to_traffic_agents(self, gold_store, canonical):
        v2 = tx.expand_traffic_agents(canonical)
        gold_store.register_taxonomy(v2)
        doors = self.door_cases(gold_store)
        assert len(doors) == 2
        plan = ReclassificationPlan(target_version=2, moves=[
            (r, "M", {"G", "M"}, "door-opening now a traffic-agent extension")
            for r in doors
        ])
        after = ann.reclassify(gold_store, plan)
        cov = ann.coverage(after, v2)
        assert cov.primary_counts["Traffic Agents"] == 74
        assert cov.unclassified == 0
        assert ann.format_rate(ann.success_rate(after)) == "100.0%"

    def test_empty_plan_identity(self, gold_store, canonical):
        after = ann.reclassify(gold_store,
                               ReclassificationPlan(target_version=1, moves=[]))
        assert ann.coverage(after, canonical) == ann.coverage(gold_store, canonical)

    def test_unknown_report_atomic(self, gold_store, canonical):
        before = ann.coverage(gold_store, canonical)
        plan = ReclassificationPlan(target_version=1, moves=[
            ("CA-2023-001", "M", {"M"}, "ok"),
            ("NO-SUCH", "M", {"M"}, "bad"),
        ])
        with pytest.raises(errors.UnknownReport):
            ann.reclassify(gold_store, plan)
        assert ann.coverage(gold_store, canonical) == before

    def test_monotone_success(self, gold_store, canonical):
        v2 = tx.expand_traffic_agents(canonical)
        gold_store.register_taxonomy(v2)
        before = ann.success_rate(gold_store)
        doors = self.door_cases(gold_store)
        plan = ReclassificationPlan(target_version=2, moves=[
            (doors[0], "M", {"G", "M"}, "first door case")])
        after = ann.reclassify(gold_store, plan)
        assert ann.success_rate(after) >= before

    def test_pre_revision_snapshot_unchanged(self, gold_store, canonical):
        v2 = tx.expand_traffic_agents(canonical)
        gold_store.register_taxonomy(v2)
        snapshot = gold_store.snapshot()
        doors = self.door_cases(gold_store)
        plan = ReclassificationPlan(target_version=2, moves=[
            (r, "M", {"G", "M"}, "door case") for r in doors])
        ann.reclassify(gold_store, plan)
        cov = ann.coverage(snapshot, canonical)
        assert cov.primary_counts["Traffic Agents"] == 72
        assert cov.unclassified == 2


class TestLog:
    def test_round_trip(self, gold_store, canonical):
        text = ann.dump_log(gold_store)
        back = ann.load_log(text, {1: canonical}, gold_annotator="gold")
        assert ann.dump_log(back) == text
        assert ann.coverage(back, canonical) == ann.coverage(gold_store, canonical)

    def test_bad_line(self, canonical):
        with pytest.raises(errors.ParseError):
            ann.load_log("not json\n", {1: canonical})

    def test_audit_trail_grows(self, gold_store, canonical):
        v2 = tx.expand_traffic_agents(canonical)
        gold_store.register_taxonomy(v2)
        doors = [r for r, a in ann.current_annotations(gold_store).items()
                 if a.primary == UNCLASSIFIED]
        plan = ReclassificationPlan(target_version=2, moves=[
            (r, "M", {"G", "M"}, "door case") for r in doors])
        after = ann.reclassify(gold_store, plan)
        assert len(after.events) == len(gold_store.events) + 2
        kinds = {e["event_kind"] for e in after.events}
        assert kinds == {"annotate", "reclassify"}
