"""Scenario composition, decomposition, seeded variation, and coverage sampling.

Everything here is a pure function of its inputs plus a 64-bit seed;
repeated runs produce byte-identical exported documents.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import errors, rng, taxonomy as tx
from .annotation import CoverageReport

# Minimal per-leaf parameter vocabulary; free-form extras are always allowed.
PARAM_SCHEMAS = {
    "E": {"level": ["bright", "dim", "dark", "unknown"]},
    "L": {"state": ["dry", "wet", "icy", "snowy"],
          "material": ["asphalt", "concrete", "dirt"]},
    "M": {"kind": ["sedan", "truck", "bus", "emergency"], "behavior": None},
    "G": {"kind": ["pedestrian", "cyclist", "motorcyclist", "scooter"],
          "behavior": None},
}

LIGHT_LEVEL_BY_DAY_PART = {
    "day": "bright",
    "dawn": "dim",
    "dusk": "dim",
    "night": "dark",
    "unknown": "unknown",
}


@dataclass
class ElementInstance:
    leaf_id: str
    params: dict = field(default_factory=dict)
    role_note: str = ""


@dataclass
class VariationAxis:
    instance_index: int
    param_name: str
    values: Optional[list] = None  # enumerated domain
    start: Optional[float] = None  # or numeric range with step
    stop: Optional[float] = None
    step: Optional[float] = None

    def domain(self) -> list:
        if self.values is not None:
            if not self.values:
                raise errors.BadAxis("axis has an empty value domain")
            return list(self.values)
        if self.start is None or self.stop is None or self.step is None:
            raise errors.BadAxis("axis needs either values or start/stop/step")
        if self.step <= 0 or self.stop < self.start:
            raise errors.BadAxis("axis range is empty or inverted")
        out, v = [], self.start
        while v <= self.stop + 1e-9:
            out.append(round(v, 10))
            v += self.step
        return out


@dataclass
class ScenarioSpec:
    scenario_id: str
    taxonomy_version: int
    instances: list
    staging: list  # list of stages, each a list of instance indices
    seed: int = 0
    provenance: Optional[str] = None
    description: str = ""


def validate_spec(spec: ScenarioSpec, t: tx.Taxonomy) -> None:
    known = set(tx.leaf_ids(t))
    for inst in spec.instances:
        if inst.leaf_id not in known:
            raise errors.UnknownLeaf(f"unknown leaf id {inst.leaf_id!r}")
        for name, value in inst.params.items():
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                raise errors.ValidationError(
                    f"numeric param {name!r} must carry a unit "
                    f"(use {{'value': n, 'unit': u}})"
                )
    if not spec.staging or any(not stage for stage in spec.staging):
        raise errors.BadStaging("staging must contain non-empty stages")
    staged = [i for stage in spec.staging for i in stage]
    expected = list(range(len(spec.instances)))
    if sorted(staged) != expected or len(staged) != len(set(staged)):
        raise errors.BadStaging(
            f"staging {spec.staging} does not partition instances {expected}"
        )


def compose(t: tx.Taxonomy, elements: list, staging_plan: Optional[list] = None,
            scenario_id: Optional[str] = None, seed: int = 0,
            description: str = "") -> ScenarioSpec:
    """Build a scenario from (leaf_id, params) pairs and a staging plan.

    Any subset of leaves composes; the classes are independent by design.
    With no staging plan, all elements share one parallel stage.
    """
    instances = [ElementInstance(leaf_id=leaf_id, params=dict(params))
                 for leaf_id, params in elements]
    if staging_plan is None:
        staging_plan = [list(range(len(instances)))]
    spec = ScenarioSpec(
        scenario_id=scenario_id or "scenario-" + "-".join(
            inst.leaf_id for inst in instances),
        taxonomy_version=t.version,
        instances=instances,
        staging=[list(stage) for stage in staging_plan],
        seed=seed,
        description=description,
    )
    validate_spec(spec, t)
    return spec


def decompose_to_spec(report, a, t: tx.Taxonomy) -> ScenarioSpec:
    """Derive a scenario from an annotated collision report.

    One instance per tag, parameters seeded from report context, all
    instances in a single parallel stage.
    """
    if not a.tags:
        raise errors.EmptyTags(f"annotation for {report.report_id} has no tags")
    instances = []
    for leaf_id in sorted(a.tags):
        params: dict = {}
        role_note = ""
        if leaf_id == "E":
            params["level"] = LIGHT_LEVEL_BY_DAY_PART[report.time_of_day]
        if leaf_id == "B":
            role_note = f"driving mode: {report.driving_mode}"
        instances.append(ElementInstance(leaf_id=leaf_id, params=params,
                                         role_note=role_note))
    spec = ScenarioSpec(
        scenario_id=f"from-{report.report_id}",
        taxonomy_version=a.taxonomy_version,
        instances=instances,
        staging=[list(range(len(instances)))],
        seed=rng.seed_from_text(report.report_id),
        provenance=report.report_id,
        description=f"Derived from collision report {report.report_id} "
                    f"({report.manufacturer}, {report.date.isoformat()}).",
    )
    validate_spec(spec, t)
    return spec


def generate_variants(spec: ScenarioSpec, axes: list, count: int,
                      seed: int) -> list:
    """Produce `count` variants differing from `spec` only at the axes."""
    if count < 1:
        raise errors.BadAxis("count must be at least 1")
    for axis in axes:
        if not 0 <= axis.instance_index < len(spec.instances):
            raise errors.BadAxis(f"axis names absent instance {axis.instance_index}")
        inst = spec.instances[axis.instance_index]
        if axis.param_name not in inst.params:
            raise errors.BadAxis(
                f"instance {axis.instance_index} has no param {axis.param_name!r}"
            )
        axis.domain()  # raises BadAxis on an empty/invalid domain
    variants = []
    for ordinal in range(count):
        gen = rng.SplitMix64(rng.derive_seed(seed, ordinal))
        variant = copy.deepcopy(spec)
        variant.scenario_id = f"{spec.scenario_id}-var{seed}-{ordinal}"
        for axis in axes:
            domain = axis.domain()
            value = domain[gen.next_below(len(domain))]
            variant.instances[axis.instance_index].params[axis.param_name] = value
        variants.append(variant)
    return variants


def coverage_weights(cov: CoverageReport, t: tx.Taxonomy) -> dict:
    """Normalized inverse-count-plus-one weight per leaf name."""
    raw = {
        leaf.name: Fraction(1, cov.primary_counts.get(leaf.name, 0) + 1)
        for leaf in tx.iter_leaves(t)
    }
    total = sum(raw.values())
    return {name: w / total for name, w in raw.items()}


def sample_leaves(cov: CoverageReport, t: tx.Taxonomy, k: int, seed: int) -> list:
    """Draw k leaf names, underrepresented classes favored, seed-deterministic."""
    if k < 1:
        raise errors.ValidationError("k must be at least 1")
    leaves = [leaf.name for leaf in tx.iter_leaves(t)]
    weights = coverage_weights(cov, t)
    cumulative = []
    acc = Fraction(0)
    for name in leaves:
        acc += weights[name]
        cumulative.append(float(acc))
    cumulative[-1] = 1.0
    out = []
    for ordinal in range(k):
        gen = rng.SplitMix64(rng.derive_seed(seed, ordinal))
        u = gen.next_float()
        for name, edge in zip(leaves, cumulative):
            if u < edge:
                out.append(name)
                break
    return out


def sample_for_coverage(cov: CoverageReport, t: tx.Taxonomy, k: int,
                        seed: int) -> list:
    """k single-stage scenarios whose primary leaf is coverage-weighted."""
    specs = []
    for ordinal, name in enumerate(sample_leaves(cov, t, k, seed)):
        leaf = tx.lookup_leaf(t, name)
        specs.append(ScenarioSpec(
            scenario_id=f"sample-{seed}-{ordinal}",
            taxonomy_version=t.version,
            instances=[ElementInstance(leaf_id=leaf.id)],
            staging=[[0]],
            seed=rng.derive_seed(seed, ordinal),
            description=f"Coverage-driven sample targeting {name}.",
        ))
    return specs


# ---------------------------------------------------------------------------
# scenario documents

def export_spec(spec: ScenarioSpec) -> str:
    doc = {
        "scenario_id": spec.scenario_id,
        "taxonomy_version": spec.taxonomy_version,
        "instances": [
            {"leaf_id": i.leaf_id, "params": i.params, "role_note": i.role_note}
            for i in spec.instances
        ],
        "stages": [list(stage) for stage in spec.staging],
        "seed": spec.seed,
        "provenance": spec.provenance,
        "description": spec.description,
    }
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def import_spec(document: str, t: tx.Taxonomy) -> ScenarioSpec:
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise errors.ParseError(str(exc), locus=f"line {exc.lineno}") from exc
    for key in ("scenario_id", "taxonomy_version", "instances", "stages"):
        if key not in doc:
            raise errors.ParseError(f"document missing field {key!r}")
    spec = ScenarioSpec(
        scenario_id=doc["scenario_id"],
        taxonomy_version=doc["taxonomy_version"],
        instances=[
            ElementInstance(leaf_id=i["leaf_id"], params=dict(i.get("params", {})),
                            role_note=i.get("role_note", ""))
            for i in doc["instances"]
        ],
        staging=[list(stage) for stage in doc["stages"]],
        seed=doc.get("seed", 0),
        provenance=doc.get("provenance"),
        description=doc.get("description", ""),
    )
    try:
        validate_spec(spec, t)
    except errors.AdvtaxError as exc:
        if isinstance(exc, (errors.ParseError, errors.ValidationError)):
            raise
        raise errors.ValidationError(str(exc)) from exc
    return spec
