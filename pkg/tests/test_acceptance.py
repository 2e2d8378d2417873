"""Acceptance gate.

Each test checks one release criterion at its stated tolerance and prints
a single PASS/FAIL line so the gate can be read off the -s output.
"""

import time
from fractions import Fraction

from advtax import annotation as ann
from advtax import generator, tagger, taxonomy as tx
from advtax.annotation import UNCLASSIFIED, ReclassificationPlan
from advtax.taxonomy import ViolationCode

EXPECTED_PRIMARY_COUNTS = {
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


def report(name, ok):
    print(f"{'PASS' if ok else 'FAIL'}: {name}")
    assert ok, name


def test_primary_count_table(gold_store, canonical):
    started = time.perf_counter()
    cov = ann.coverage(gold_store, canonical)
    elapsed = time.perf_counter() - started
    nonzero = {k: v for k, v in cov.primary_counts.items() if v}
    report("primary-count table (zero tolerance, < 1 s)",
           nonzero == EXPECTED_PRIMARY_COUNTS
           and cov.unclassified == 2
           and elapsed < 1.0)


def test_difficulty_histogram(gold_store, canonical):
    cov = ann.coverage(gold_store, canonical)
    report("difficulty histogram (zero tolerance)",
           cov.difficulty_histogram == {1: 95, 2: 18, 3: 1, 4: 2})


def test_success_rate(gold_store):
    report('success rate 114/116 rendered "98.3%"',
           ann.success_counts(gold_store) == (114, 116)
           and ann.format_rate(ann.success_rate(gold_store)) == "98.3%")


def test_single_multi_split(gold_store, canonical):
    cov = ann.coverage(gold_store, canonical)
    report("single/multi element split 15/101",
           cov.single_element == 15 and cov.multi_element == 101)


def test_revision_workflow(gold_store, canonical):
    snapshot = gold_store.snapshot()
    v2 = tx.expand_traffic_agents(canonical)
    gold_store.register_taxonomy(v2)
    doors = sorted(r for r, a in ann.current_annotations(gold_store).items()
                   if a.primary == UNCLASSIFIED)
    plan = ReclassificationPlan(target_version=2, moves=[
        (r, "M", {"G", "M"}, "door-opening now a traffic-agent extension")
        for r in doors
    ])
    after = ann.reclassify(gold_store, plan)
    cov = ann.coverage(after, v2)
    before = ann.coverage(snapshot, canonical)
    report("revision workflow (74 / 0 / 100%, pre-revision snapshot intact)",
           len(doors) == 2
           and cov.primary_counts["Traffic Agents"] == 74
           and cov.unclassified == 0
           and ann.format_rate(ann.success_rate(after)) == "100.0%"
           and before.primary_counts["Traffic Agents"] == 72
           and before.unclassified == 2)


def test_corpus_gate(eval_corpus):
    report("corpus gate 116 accepted + 1 excluded with reason",
           len(eval_corpus.accepted) == 116
           and len(eval_corpus.excluded) == 1
           and eval_corpus.excluded[0][1].value)


def test_taxonomy_structure_suite(canonical):
    import copy

    def mutated(mutate):
        t = copy.deepcopy(canonical)
        mutate(t)
        return {v.code for v in tx.validate_taxonomy(t)}

    ego = canonical.categories[0]

    def dup_id(t):
        t.categories[0].children[0].id = t.categories[0].children[1].id

    def dup_name(t):
        t.categories[0].children[0].name = t.categories[0].children[1].name

    def cycle(t):
        built = t.categories[2]
        road = next(c for c in built.children
                    if isinstance(c, tx.CategoryNode) and c.name == "Road")
        road.children.append(built)

    def orphan(t):
        t.categories[1].children.append(t.categories[0].children[0])

    def empty_definition(t):
        t.categories[0].children[0].definition = "   "

    def depth_overflow(t):
        built = t.categories[2]
        road = next(c for c in built.children
                    if isinstance(c, tx.CategoryNode) and c.name == "Road")
        road.children.append(tx.CategoryNode(
            id="Q", name="Too Deep", description="nested subcategory",
            children=[tx.ElementClass(id="Z9", name="Bottom",
                                      definition="a leaf too far down")]))

    ok = (
        tx.validate_taxonomy(canonical) == []
        and ViolationCode.DUPLICATE_LEAF_ID in mutated(dup_id)
        and ViolationCode.DUPLICATE_LEAF_NAME in mutated(dup_name)
        and ViolationCode.CYCLE in mutated(cycle)
        and ViolationCode.ORPHAN_NODE in mutated(orphan)
        and ViolationCode.EMPTY_DEFINITION in mutated(empty_definition)
        and ViolationCode.DEPTH_EXCEEDED in mutated(depth_overflow)
        and ego is canonical.categories[0]
    )
    report("taxonomy structure suite (valid canonical + 6 mutation codes)", ok)


def test_generator_determinism_and_fairness(gold_store, canonical):
    cov = ann.coverage(gold_store, canonical)
    one = [generator.export_spec(s)
           for s in generator.sample_for_coverage(cov, canonical, 20, seed=42)]
    two = [generator.export_spec(s)
           for s in generator.sample_for_coverage(cov, canonical, 20, seed=42)]
    deterministic = one == two

    draws = 100_000
    started = time.perf_counter()
    names = generator.sample_leaves(cov, canonical, draws, seed=2024)
    elapsed = time.perf_counter() - started
    weights = generator.coverage_weights(cov, canonical)
    counts = {name: 0 for name in weights}
    for name in names:
        counts[name] += 1
    worst = max(abs(counts[name] / draws - float(weights[name]))
                for name in weights)
    report(f"generator determinism + fairness "
           f"(max deviation {worst:.4f} <= 0.01, {elapsed:.2f} s < 10 s)",
           deterministic and worst <= 0.01 and elapsed < 10.0)


def test_appendix_decomposition(appendix, canonical):
    reports, store = appendix
    gold = ann.current_annotations(store)
    expected = {"CRUISE": ["B", "E", "G", "I", "M"],
                "TESLA": ["B", "D", "E", "I", "M"]}
    ok = True
    for key, leaf_ids in expected.items():
        r = next(r for r in reports if key in r.report_id)
        spec = generator.decompose_to_spec(r, gold[r.report_id], canonical)
        ok = ok and sorted(i.leaf_id for i in spec.instances) == leaf_ids
    report("appendix decomposition yields the 5 gold classes each", ok)


def test_tagger_floor(appendix, lexicon, canonical):
    reports, store = appendix
    gold = ann.current_annotations(store)
    ok = True
    for r in reports:
        a = gold[r.report_id]
        first = tagger.suggest(r.narrative, lexicon, canonical)
        second = tagger.suggest(r.narrative, lexicon, canonical)
        top = {s.leaf_id for s in first[:len(a.tags)]}
        ok = ok and first == second and len(top & set(a.tags)) >= 3
    result = tagger.evaluate_tagger(reports, store, lexicon, canonical)
    report("tagger floor (recall >= 3/5 per appendix narrative, deterministic)",
           ok and result.micro_recall >= Fraction(3, 5))
