#!/usr/bin/env python3
"""Deterministically regenerate the evaluation fixtures.

Writes fixtures/evaluation_reports.csv (117 rows, one designed to fail
field-consistency checks), fixtures/gold_annotations.jsonl (116 gold
annotations whose aggregates match the published evaluation tables),
and fixtures/appendix_reports.csv + fixtures/appendix_gold.jsonl for the
two worked example incidents.

Run from the repo root: python3 scripts/build_fixtures.py
"""

from __future__ import annotations

import csv
import json
import sys
from datetime import date, timedelta
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from advtax.rng import SplitMix64  # noqa: E402

FIXTURES = ROOT / "fixtures"

HEADER = ["report_id", "date", "time", "manufacturer", "city", "state",
          "mode", "narrative", "damage", "injury"]

MANUFACTURERS = ["Cruise LLC", "Waymo LLC", "Zoox Inc", "Nuro Inc",
                 "Apollo Autonomous"]
CITIES = [("San Francisco", "CA"), ("Mountain View", "CA"),
          ("Palo Alto", "CA"), ("Santa Monica", "CA"), ("San Jose", "CA")]
DAMAGES = ["minor", "minor", "moderate", "none", "major"]

# Narrative templates per primary class. Each mentions the driving mode so
# the consistency check has something to bite on, and carries vocabulary
# the bundled lexicon recognizes.
TEMPLATES = {
    "B": ("While operating in autonomous mode, the vehicle's autonomous "
          "system misjudged a merging gap and braked abruptly; a trailing "
          "car made contact with the rear bumper."),
    "D": ("The test driver, operating in conventional mode, was briefly "
          "distracted while adjusting the console and the car drifted, "
          "making contact with a parked car at low speed."),
    "G": ("While proceeding in autonomous mode through a signalized "
          "crossing, a pedestrian entered the roadway outside the "
          "crosswalk and the vehicle braked hard, resulting in minor "
          "contact."),
    "H": ("While operating in autonomous mode at dusk, a dog ran into the "
          "travel lane from behind parked cars and was clipped by the "
          "front fascia despite hard braking."),
    "I": ("While operating in autonomous mode, faded lane markings through "
          "a construction zone led the vehicle to straddle lanes and "
          "scrape a temporary barrier."),
    "J": ("While operating in autonomous mode, the vehicle struck a deep "
          "pothole concealed by shade, damaging the front-left wheel and "
          "triggering a pull-over."),
    "K": ("While operating in autonomous mode, debris from a landscaping "
          "truck lay across the lane; the vehicle could not fully avoid "
          "it and ran over the obstacle."),
    "M": ("While stopped in autonomous mode in heavy traffic, another car "
          "changed lanes abruptly and sideswiped the vehicle's left side "
          "panel."),
    "N": ("While operating in autonomous mode on an arterial road, a "
          "detached wheel from an oncoming truck bounced across the median "
          "and struck the hood."),
    "O": ("While creeping forward in autonomous mode at a garage exit, a "
          "parking gate arm lowered unexpectedly onto the roof of the "
          "vehicle."),
    "door": ("While passing a line of parked cars in autonomous mode, the "
             "door of a parked car swung open directly into the vehicle's "
             "path, leaving no time to stop before contact with the opened "
             "door."),
}

# Secondary-tag pools per primary class: plausible co-occurring elements.
SECONDARY = {
    "B": ["M", "I", "E"],
    "D": ["M", "I"],
    "G": ["M", "I", "E"],
    "H": ["E"],
    "I": ["M", "L"],
    "J": ["L", "E"],
    "K": ["M", "L"],
    "M": ["I", "E", "G", "L"],
    "N": ["M"],
    "O": ["I"],
}

# Primary class -> sample count from the published class-frequency table
# (keyed by class NAME via leaf id; the letter ids here are canonical).
PRIMARY_COUNTS = [
    ("B", 6), ("D", 14), ("G", 10), ("H", 1), ("I", 1),
    ("J", 2), ("K", 4), ("M", 72), ("N", 2), ("O", 2),
]
UNCLASSIFIED_COUNT = 2

# Difficulty targets: {1: 95, 2: 18, 3: 1, 4: 2}; the two grade-4 cases
# are the two unclassified door events. Single-element reports: 15.
SINGLE_ELEMENT_TARGET = 15


def build_evaluation_corpus():
    rng = SplitMix64(20230901)
    rows = []
    annotations = []

    plan = []  # (primary, is_door)
    for primary, count in PRIMARY_COUNTS:
        plan.extend((primary, False) for _ in range(count))
    plan.extend(("door", True) for _ in range(UNCLASSIFIED_COUNT))
    assert len(plan) == 116

    # deterministic shuffle so classes are interleaved across the corpus
    for i in range(len(plan) - 1, 0, -1):
        j = rng.next_below(i + 1)
        plan[i], plan[j] = plan[j], plan[i]

    # singles: first N non-door reports whose primary allows a lone tag
    single_budget = SINGLE_ELEMENT_TARGET
    # difficulty grade 3 goes to one multi-element M report; grade 2 to the
    # next 18 multi-element reports; everything else grade 1
    grade3_budget = 1
    grade2_budget = 18

    start = date(2023, 1, 3)
    for ordinal, (primary, is_door) in enumerate(plan, start=1):
        report_id = f"CA-2023-{ordinal:03d}"
        day = start + timedelta(days=(ordinal * 7) % 270)
        if day > date(2023, 9, 30):
            day = date(2023, 9, 30)
        hour = 6 + (rng.next_below(16))  # 06:00..21:00
        minute = rng.next_below(60)
        manufacturer = MANUFACTURERS[rng.next_below(len(MANUFACTURERS))]
        city, state = CITIES[rng.next_below(len(CITIES))]
        damage = DAMAGES[rng.next_below(len(DAMAGES))]
        injury = "no"
        if is_door:
            narrative = TEMPLATES["door"]
            mode = "autonomous"
            tags = ["G", "M"]
            primary_field = "Unclassified"
            difficulty = 4
        else:
            narrative = TEMPLATES[primary]
            mode = "conventional" if primary == "D" else "autonomous"
            if single_budget > 0 and primary in ("M", "B", "G", "J"):
                tags = [primary]
                single_budget -= 1
            else:
                pool = SECONDARY[primary]
                extra = pool[rng.next_below(len(pool))]
                tags = sorted({primary, extra})
            primary_field = primary
            if len(tags) > 1 and grade3_budget > 0 and primary == "M":
                difficulty = 3
                grade3_budget -= 1
            elif len(tags) > 1 and grade2_budget > 0:
                difficulty = 2
                grade2_budget -= 1
            else:
                difficulty = 1
        rows.append([report_id, day.isoformat(), f"{hour:02d}:{minute:02d}",
                     manufacturer, city, state, mode, narrative, damage,
                     injury])
        annotations.append({
            "report_id": report_id,
            "taxonomy_version": 1,
            "tags": tags,
            "primary": primary_field,
            "difficulty": difficulty,
            "annotator": "gold",
            "notes": "door-opening case" if is_door else "",
            "event_kind": "annotate",
            "timestamp": f"2023-10-{(ordinal % 28) + 1:02d}T12:00:00Z",
        })

    assert single_budget == 0, single_budget
    assert grade2_budget == 0, grade2_budget
    assert grade3_budget == 0

    # the 117th row: internally inconsistent (damage none, injury reported),
    # excluded at ingest and never annotated
    rows.append([
        "CA-2023-117", "2023-09-12", "14:30", "Cruise LLC", "San Francisco",
        "CA", "autonomous",
        "While operating in autonomous mode the vehicle was rear ended at a "
        "red light; the report notes an injured passenger.",
        "none", "yes",
    ])

    return rows, annotations


def check_aggregates(annotations):
    primary = {}
    difficulty = {1: 0, 2: 0, 3: 0, 4: 0}
    single = 0
    for a in annotations:
        primary[a["primary"]] = primary.get(a["primary"], 0) + 1
        difficulty[a["difficulty"]] += 1
        if len(a["tags"]) == 1:
            single += 1
    expected_primary = dict(PRIMARY_COUNTS)
    expected_primary["Unclassified"] = UNCLASSIFIED_COUNT
    assert primary == expected_primary, primary
    assert difficulty == {1: 95, 2: 18, 3: 1, 4: 2}, difficulty
    assert single == SINGLE_ELEMENT_TARGET, single
    assert len(annotations) == 116


APPENDIX_ROWS = [
    ["APPX-CRUISE-2023", "2023-10-02", "21:30", "Cruise LLC",
     "San Francisco", "CA", "autonomous",
     "At night, a jaywalking pedestrian crossed the intersection after the "
     "green light and was first struck by a sedan in the lane beside the "
     "test vehicle, which threw the pedestrian into the test vehicle's "
     "path. The autonomous system braked but made contact, then pulled "
     "toward the curb with the pedestrian trapped beneath the vehicle.",
     "moderate", "yes"],
    ["APPX-TESLA-2019", "2019-03-01", "06:10", "Tesla Inc",
     "Delray Beach", "FL", "autonomous",
     "At dawn, a car running a hands-free driver assistance feature "
     "approached a truck with a trailer turning across the highway from a "
     "side road; the truck did not halt at the stop sign. The driver was "
     "not paying attention and had no hands on the steering wheel, the "
     "autopilot did not brake, and the car passed under the trailer.",
     "major", "yes"],
]

APPENDIX_GOLD = [
    {"report_id": "APPX-CRUISE-2023", "taxonomy_version": 1,
     "tags": ["B", "E", "G", "I", "M"], "primary": "M", "difficulty": 2,
     "annotator": "gold", "notes": "pedestrian thrown into path by adjacent vehicle",
     "event_kind": "annotate", "timestamp": "2023-10-20T12:00:00Z"},
    {"report_id": "APPX-TESLA-2019", "taxonomy_version": 1,
     "tags": ["B", "D", "E", "I", "M"], "primary": "D", "difficulty": 2,
     "annotator": "gold", "notes": "inattentive driver with assistance engaged",
     "event_kind": "annotate", "timestamp": "2023-10-20T12:05:00Z"},
]


def main():
    FIXTURES.mkdir(exist_ok=True)
    rows, annotations = build_evaluation_corpus()
    check_aggregates(annotations)

    with (FIXTURES / "evaluation_reports.csv").open("w", newline="",
                                                    encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        writer.writerows(rows)

    with (FIXTURES / "gold_annotations.jsonl").open("w", encoding="utf-8") as fh:
        for a in annotations:
            fh.write(json.dumps(a, sort_keys=True) + "\n")

    with (FIXTURES / "appendix_reports.csv").open("w", newline="",
                                                  encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        writer.writerows(APPENDIX_ROWS)

    with (FIXTURES / "appendix_gold.jsonl").open("w", encoding="utf-8") as fh:
        for a in APPENDIX_GOLD:
            fh.write(json.dumps(a, sort_keys=True) + "\n")

    print(f"wrote {len(rows)} corpus rows, {len(annotations)} gold annotations")


if __name__ == "__main__":
    main()
