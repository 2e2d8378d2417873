"""Versioned taxonomy tree of adversarial element classes.

The canonical tree groups 15 leaf classes (ids A through O) under three
top-level categories: Ego, Natural Environment, and Built Environment.
All values are treated as immutable; revision operations return new
taxonomies and never mutate their input.
"""

from __future__ import annotations

import copy
import json
import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Iterator, Optional, Union

from . import errors

LEAF_ID_PATTERN = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_-]*$")


class ViolationCode(Enum):
    DUPLICATE_LEAF_ID = "DuplicateLeafId"
    DUPLICATE_LEAF_NAME = "DuplicateLeafName"
    CYCLE = "Cycle"
    ORPHAN_NODE = "OrphanNode"
    EMPTY_DEFINITION = "EmptyDefinition"
    DEPTH_EXCEEDED = "DepthExceeded"
    EMPTY_TREE = "EmptyTree"


_MESSAGES = {
    ViolationCode.DUPLICATE_LEAF_ID: "leaf id {detail!r} used more than once",
    ViolationCode.DUPLICATE_LEAF_NAME: "leaf name {detail!r} used more than once (case-insensitive)",
    ViolationCode.CYCLE: "node {detail!r} is its own ancestor",
    ViolationCode.ORPHAN_NODE: "node {detail!r} reachable from more than one parent",
    ViolationCode.EMPTY_DEFINITION: "leaf {detail!r} has an empty definition",
    ViolationCode.DEPTH_EXCEEDED: "node {detail!r} exceeds the maximum tree depth of 4",
    ViolationCode.EMPTY_TREE: "taxonomy contains no leaves",
}


@dataclass(frozen=True)
class Violation:
    code: ViolationCode
    path: str
    message: str

    @classmethod
    def at(cls, code: ViolationCode, path: str, detail: str) -> "Violation":
        return cls(code, path, _MESSAGES[code].format(detail=detail))


@dataclass
class ElementClass:
    id: str
    name: str
    definition: str
    category_path: tuple = ()
    example_refs: tuple = ()
    mitigation_refs: tuple = ()


@dataclass
class CategoryNode:
    id: str
    name: str
    description: str = ""
    children: list = field(default_factory=list)


@dataclass(frozen=True)
class RevisionEntry:
    sequence: int
    kind: str  # add-leaf | amend-definition | rename | move
    target_id: str
    before: str
    after: str
    rationale: str
    timestamp: str


@dataclass
class Taxonomy:
    version: int
    categories: list
    revisions: list = field(default_factory=list)


Node = Union[CategoryNode, ElementClass]


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def walk(t: Taxonomy) -> Iterator[tuple[str, Node]]:
    """Pre-order traversal yielding (path, node) pairs."""

    def visit(node: Node, prefix: str) -> Iterator[tuple[str, Node]]:
        path = f"{prefix}/{node.name}"
        yield path, node
        if isinstance(node, CategoryNode):
            for child in node.children:
                yield from visit(child, path)

    for cat in t.categories:
        yield from visit(cat, "")


def iter_leaves(t: Taxonomy) -> Iterator[ElementClass]:
    for _, node in walk(t):
        if isinstance(node, ElementClass):
            yield node


def leaf_ids(t: Taxonomy) -> list[str]:
    return [leaf.id for leaf in iter_leaves(t)]


def leaf_names(t: Taxonomy) -> list[str]:
    return [leaf.name for leaf in iter_leaves(t)]


def validate_taxonomy(t: Taxonomy) -> list[Violation]:
    """Check every structural invariant; an empty result means valid.

    Violations are reported in tree pre-order; multiple violations on one
    node are ordered by code declaration order.
    """
    violations: list[Violation] = []
    seen_ids: set[str] = set()
    seen_names: set[str] = set()
    seen_objects: dict[int, str] = {}
    has_leaf = False
    code_order = list(ViolationCode)

    def visit(node: Node, prefix: str, depth: int, stack: set[int]) -> None:
        nonlocal has_leaf
        path = f"{prefix}/{node.name}"
        local: list[Violation] = []
        key = id(node)
        if key in stack:
            local.append(Violation.at(ViolationCode.CYCLE, path, node.name))
            violations.extend(local)
            return
        if key in seen_objects:
            local.append(Violation.at(ViolationCode.ORPHAN_NODE, path, node.name))
            violations.extend(local)
            return
        seen_objects[key] = path
        # the implicit root is level 1, so leaves may sit at most at level 4
        if depth > 3 or (isinstance(node, CategoryNode) and depth > 2):
            local.append(Violation.at(ViolationCode.DEPTH_EXCEEDED, path, node.name))
        if isinstance(node, ElementClass):
            has_leaf = True
            if node.id in seen_ids:
                local.append(Violation.at(ViolationCode.DUPLICATE_LEAF_ID, path, node.id))
            seen_ids.add(node.id)
            lowered = node.name.lower()
            if lowered in seen_names:
                local.append(Violation.at(ViolationCode.DUPLICATE_LEAF_NAME, path, node.name))
            seen_names.add(lowered)
            if not node.definition.strip():
                local.append(Violation.at(ViolationCode.EMPTY_DEFINITION, path, node.id))
        local.sort(key=lambda v: code_order.index(v.code))
        violations.extend(local)
        if isinstance(node, CategoryNode):
            for child in node.children:
                visit(child, path, depth + 1, stack | {key})

    for cat in t.categories:
        visit(cat, "", 1, set())
    if not has_leaf:
        violations.append(Violation.at(ViolationCode.EMPTY_TREE, "/", ""))
    return violations


def lookup_leaf(t: Taxonomy, key: str) -> ElementClass:
    """Find a leaf by exact id, else by case-insensitive name."""
    for leaf in iter_leaves(t):
        if leaf.id == key:
            return leaf
    lowered = key.lower()
    for leaf in iter_leaves(t):
        if leaf.name.lower() == lowered:
            return leaf
    raise errors.NotFound(f"no leaf with id or name {key!r}")


def find_category(t: Taxonomy, path: list[str]) -> CategoryNode:
    nodes = t.categories
    node: Optional[CategoryNode] = None
    for name in path:
        node = next(
            (n for n in nodes if isinstance(n, CategoryNode) and n.name == name),
            None,
        )
        if node is None:
            raise errors.NotFound(f"no category at path {'/'.join(path)!r}")
        nodes = node.children
    if node is None:
        raise errors.NotFound("empty category path")
    return node


def _with_revision(t: Taxonomy, kind: str, target_id: str, before: str,
                   after: str, rationale: str, timestamp: Optional[str]) -> Taxonomy:
    entry = RevisionEntry(
        sequence=len(t.revisions) + 1,
        kind=kind,
        target_id=target_id,
        before=before,
        after=after,
        rationale=rationale,
        timestamp=timestamp or _now(),
    )
    t.version += 1
    t.revisions.append(entry)
    return t


def amend_definition(t: Taxonomy, leaf_id: str, new_definition: str,
                     rationale: str, timestamp: Optional[str] = None) -> Taxonomy:
    """Return a new taxonomy with the leaf's definition replaced."""
    if not new_definition.strip():
        raise errors.EmptyDefinition(f"new definition for {leaf_id!r} is empty")
    out = copy.deepcopy(t)
    for leaf in iter_leaves(out):
        if leaf.id == leaf_id:
            before = leaf.definition
            leaf.definition = new_definition
            return _with_revision(out, "amend-definition", leaf_id, before,
                                  new_definition, rationale, timestamp)
    raise errors.NotFound(f"no leaf with id {leaf_id!r}")


def add_leaf(t: Taxonomy, parent_path: list[str], leaf: ElementClass,
             rationale: str, timestamp: Optional[str] = None) -> Taxonomy:
    """Return a new taxonomy with `leaf` appended under `parent_path`."""
    if leaf.id in leaf_ids(t):
        raise errors.DuplicateLeafId(f"leaf id {leaf.id!r} already in use")
    if leaf.name.lower() in {n.lower() for n in leaf_names(t)}:
        raise errors.DuplicateLeafName(f"leaf name {leaf.name!r} already in use")
    if not LEAF_ID_PATTERN.match(leaf.id):
        raise errors.ValidationError(f"leaf id {leaf.id!r} is not a valid token")
    out = copy.deepcopy(t)
    parent = find_category(out, parent_path)
    new_leaf = replace(leaf, category_path=tuple(parent_path))
    parent.children.append(new_leaf)
    after = json.dumps(
        {"parent_path": list(parent_path), "leaf": _leaf_to_dict(new_leaf)},
        sort_keys=True,
    )
    return _with_revision(out, "add-leaf", leaf.id, "", after, rationale, timestamp)


def diff(t1: Taxonomy, t2: Taxonomy) -> list[RevisionEntry]:
    """Minimal ordered delta turning t1's tree into t2's tree.

    Covers leaf additions, definition amendments, renames, and moves;
    revisions in this package never delete leaves.
    """
    if t1.version > t2.version:
        raise errors.VersionOrder(
            f"cannot diff version {t1.version} against older version {t2.version}"
        )
    old = {leaf.id: leaf for leaf in iter_leaves(t1)}
    entries: list[RevisionEntry] = []
    seq = 1

    def emit(kind: str, target: str, before: str, after: str) -> None:
        nonlocal seq
        entries.append(RevisionEntry(seq, kind, target, before, after,
                                     "diff-derived", "1970-01-01T00:00:00Z"))
        seq += 1

    for leaf in iter_leaves(t2):
        prior = old.get(leaf.id)
        if prior is None:
            payload = json.dumps(
                {"parent_path": list(leaf.category_path), "leaf": _leaf_to_dict(leaf)},
                sort_keys=True,
            )
            emit("add-leaf", leaf.id, "", payload)
            continue
        if prior.category_path != leaf.category_path:
            emit("move", leaf.id, "/".join(prior.category_path),
                 "/".join(leaf.category_path))
        if prior.name != leaf.name:
            emit("rename", leaf.id, prior.name, leaf.name)
        if prior.definition != leaf.definition:
            emit("amend-definition", leaf.id, prior.definition, leaf.definition)
    return entries


def apply_diff(entries: list[RevisionEntry], t: Taxonomy) -> Taxonomy:
    """Apply a delta produced by diff(); inverse of diff up to tree equality."""
    out = copy.deepcopy(t)
    for entry in entries:
        if entry.kind == "add-leaf":
            payload = json.loads(entry.after)
            parent = find_category(out, payload["parent_path"])
            parent.children.append(_leaf_from_dict(payload["leaf"],
                                                   tuple(payload["parent_path"])))
        elif entry.kind == "amend-definition":
            for leaf in iter_leaves(out):
                if leaf.id == entry.target_id:
                    leaf.definition = entry.after
                    break
        elif entry.kind == "rename":
            for leaf in iter_leaves(out):
                if leaf.id == entry.target_id:
                    leaf.name = entry.after
                    break
        elif entry.kind == "move":
            _move_leaf(out, entry.target_id, entry.after.split("/") if entry.after else [])
        else:
            raise errors.ValidationError(f"unknown revision kind {entry.kind!r}")
    return out


def _move_leaf(t: Taxonomy, leaf_id: str, new_path: list[str]) -> None:
    found = None
    for _, node in walk(t):
        if isinstance(node, CategoryNode):
            for child in list(node.children):
                if isinstance(child, ElementClass) and child.id == leaf_id:
                    node.children.remove(child)
                    found = child
    if found is None:
        raise errors.NotFound(f"no leaf with id {leaf_id!r}")
    parent = find_category(t, new_path)
    found.category_path = tuple(new_path)
    parent.children.append(found)


def trees_equal(t1: Taxonomy, t2: Taxonomy) -> bool:
    """Structural equality of the category/leaf trees (ignores version/log)."""
    return _tree_repr(t1) == _tree_repr(t2)


def _tree_repr(t: Taxonomy):
    def node_repr(node: Node):
        if isinstance(node, ElementClass):
            return ("leaf", node.id, node.name, node.definition,
                    tuple(node.category_path))
        return ("cat", node.id, node.name,
                tuple(sorted((node_repr(c) for c in node.children))))
    return tuple(sorted(node_repr(c) for c in t.categories))


# ---------------------------------------------------------------------------
# serialization

def _leaf_to_dict(leaf: ElementClass) -> dict:
    return {
        "kind": "leaf",
        "id": leaf.id,
        "name": leaf.name,
        "definition": leaf.definition,
        "example_refs": list(leaf.example_refs),
        "mitigation_refs": list(leaf.mitigation_refs),
    }


def _leaf_from_dict(d: dict, category_path: tuple) -> ElementClass:
    return ElementClass(
        id=d["id"],
        name=d["name"],
        definition=d["definition"],
        category_path=category_path,
        example_refs=tuple(d.get("example_refs", ())),
        mitigation_refs=tuple(d.get("mitigation_refs", ())),
    )


def _node_to_dict(node: Node) -> dict:
    if isinstance(node, ElementClass):
        return _leaf_to_dict(node)
    return {
        "kind": "category",
        "id": node.id,
        "name": node.name,
        "description": node.description,
        "children": [_node_to_dict(c) for c in node.children],
    }


def _node_from_dict(d: dict, path: tuple) -> Node:
    kind = d.get("kind")
    if kind == "leaf":
        for key in ("id", "name", "definition"):
            if key not in d:
                raise errors.ParseError(f"leaf missing field {key!r}", locus="/".join(path))
        return _leaf_from_dict(d, path)
    if kind == "category":
        for key in ("id", "name"):
            if key not in d:
                raise errors.ParseError(f"category missing field {key!r}", locus="/".join(path))
        node = CategoryNode(id=d["id"], name=d["name"],
                            description=d.get("description", ""))
        node.children = [
            _node_from_dict(c, path + (d["name"],)) for c in d.get("children", [])
        ]
        return node
    raise errors.ParseError(f"unknown node kind {kind!r}", locus="/".join(path))


def serialize(t: Taxonomy) -> str:
    """Render a taxonomy as its canonical UTF-8 JSON document."""
    doc = {
        "version": t.version,
        "categories": [_node_to_dict(c) for c in t.categories],
        "revisions": [
            {
                "sequence": r.sequence,
                "kind": r.kind,
                "target_id": r.target_id,
                "before": r.before,
                "after": r.after,
                "rationale": r.rationale,
                "timestamp": r.timestamp,
            }
            for r in t.revisions
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def deserialize(document: str) -> Taxonomy:
    """Parse a taxonomy document, validating structure before returning."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise errors.ParseError(str(exc), locus=f"line {exc.lineno}") from exc
    if not isinstance(doc, dict) or "version" not in doc or "categories" not in doc:
        raise errors.ParseError("document missing version/categories fields")
    categories = [_node_from_dict(c, ()) for c in doc["categories"]]
    revisions = [
        RevisionEntry(
            sequence=r["sequence"],
            kind=r["kind"],
            target_id=r["target_id"],
            before=r.get("before", ""),
            after=r.get("after", ""),
            rationale=r["rationale"],
            timestamp=r["timestamp"],
        )
        for r in doc.get("revisions", [])
    ]
    t = Taxonomy(version=doc["version"], categories=categories, revisions=revisions)
    violations = validate_taxonomy(t)
    if violations:
        raise errors.ValidationError(
            "; ".join(f"{v.code.value} at {v.path}" for v in violations),
            violations=violations,
        )
    return t


# ---------------------------------------------------------------------------
# canonical content

def _leaf(id_: str, name: str, definition: str, path: tuple,
          mitigation_refs: tuple = (), example_refs: tuple = ()) -> ElementClass:
    return ElementClass(id=id_, name=name, definition=definition,
                        category_path=path, example_refs=example_refs,
                        mitigation_refs=mitigation_refs)


def canonical_taxonomy() -> Taxonomy:
    """Build version 1 of the bundled 15-leaf taxonomy."""
    ego = ("Ego",)
    nat = ("Natural Environment",)
    built = ("Built Environment",)
    road = built + ("Road",)
    aerial = built + ("Aerial",)
    return Taxonomy(
        version=1,
        categories=[
            CategoryNode(
                id="ego",
                name="Ego",
                description=(
                    "The subject vehicle itself and, at lower automation "
                    "levels, its driver; elements with direct influence over "
                    "vehicle control."
                ),
                children=[
                    _leaf(
                        "A", "Vehicle Mechanics",
                        "Failure or degradation of the vehicle's mechanical, "
                        "electrical, sensing, or computing hardware, including "
                        "safety devices, cameras, LiDAR, GPS units, and "
                        "electronic interconnects.",
                        ego, ("FMVSS", "NHTSA", "IIHS"),
                    ),
                    _leaf(
                        "B", "Software Threats",
                        "Faults in or attacks on vehicle software: crashes, "
                        "bugs, data leaks, and intrusion through connected "
                        "surfaces such as the CAN bus, mobile apps, or V2X "
                        "links.",
                        ego, ("ISO/SAE 21434",),
                    ),
                    _leaf(
                        "C", "Consumables and Maintenance",
                        "Deferred maintenance or depleted consumables such as "
                        "tires, fluids, lights, wipers, and glass that shorten "
                        "vehicle life or create hazards for road users.",
                        ego, ("FMVSS 116", "FMVSS 138"),
                    ),
                    _leaf(
                        "D", "Driver",
                        "Inattention, impairment, or error by the human "
                        "responsible for supervising or operating the vehicle, "
                        "including slow resumption of control at hand-off.",
                        ego, ("Euro NCAP", "IIHS"),
                    ),
                ],
            ),
            CategoryNode(
                id="natural",
                name="Natural Environment",
                description=(
                    "Environmental elements not significantly influenced by "
                    "the ego vehicle's activity, marked by their "
                    "unpredictability."
                ),
                children=[
                    _leaf(
                        "E", "Ambient Lighting",
                        "Insufficient or unfavorable environmental "
                        "illumination, such as night, dawn, dusk, or glare, "
                        "that degrades human or machine perception.",
                        nat, ("FMVSS 108",),
                    ),
                    _leaf(
                        "F", "Weather",
                        "Atmospheric conditions such as precipitation, fog, "
                        "wind, particulates, and temperature extremes that "
                        "impair sensing or safe operation.",
                        nat,
                    ),
                    _leaf(
                        "G", "Vulnerable Road Users",
                        "Individuals at elevated risk in traffic, including "
                        "pedestrians, cyclists, motorcyclists, and wheelchair "
                        "or scooter users, who may appear where not normally "
                        "expected.",
                        nat, ("IIHS", "Euro NCAP"),
                    ),
                    _leaf(
                        "H", "Animals",
                        "Wild or domestic animals, singly or in packs, on or "
                        "near the roadway, whose behavior is unpredictable and "
                        "may provoke collision or evasive maneuvers.",
                        nat,
                    ),
                ],
            ),
            CategoryNode(
                id="built",
                name="Built Environment",
                description=(
                    "Elements of the surroundings constructed or controlled "
                    "by humans, with expected behavior conditional on proper "
                    "function."
                ),
                children=[
                    _leaf(
                        "I", "Traffic Infrastructure",
                        "Signs, signals, markings, curbs, and other "
                        "traffic-control elements that may be missing, "
                        "inconsistent, damaged, or altered.",
                        built, ("MUTCD",),
                    ),
                    CategoryNode(
                        id="road",
                        name="Road",
                        description=(
                            "Elements the vehicle interacts with on the "
                            "pavement itself."
                        ),
                        children=[
                            _leaf(
                                "J", "Intrusions",
                                "Cavities below the expected road surface "
                                "height, such as potholes and eroded or "
                                "damaged sections of pavement.",
                                road,
                            ),
                            _leaf(
                                "K", "Protrusions",
                                "Features above the expected road surface "
                                "height, planned (speed bumps, curbs, rumble "
                                "strips) or unplanned (debris, extruded "
                                "pavement).",
                                road,
                            ),
                            _leaf(
                                "L", "Surface Condition",
                                "The material (asphalt, concrete, dirt), "
                                "quality, and state (dry, wet, icy, snowy) of "
                                "the traction surface.",
                                road,
                            ),
                            _leaf(
                                "M", "Traffic Agents",
                                "Other road vehicles and their behavior in "
                                "traffic, including noncompliant, confused, "
                                "and emergency vehicles.",
                                road,
                            ),
                        ],
                    ),
                    CategoryNode(
                        id="aerial",
                        name="Aerial",
                        description="Elements located above the road surface.",
                        children=[
                            _leaf(
                                "N", "Flying Objects",
                                "Airborne objects moving on a trajectory, from "
                                "debris and detached parts to drones and "
                                "aircraft, that may intersect the vehicle's "
                                "path.",
                                aerial,
                            ),
                            _leaf(
                                "O", "Suspended Objects",
                                "Stationary objects held above the ground, "
                                "such as parking gates, hanging cables, "
                                "overpasses, and truck tail lifts, requiring "
                                "clearance judgment.",
                                aerial,
                            ),
                        ],
                    ),
                ],
            ),
        ],
        revisions=[],
    )


TRAFFIC_AGENTS_EXPANSION = (
    " Includes parked or inactive traffic agents and extensions of a traffic "
    "agent such as open doors, trailers, and attachments."
)


def expand_traffic_agents(t: Taxonomy, timestamp: Optional[str] = None) -> Taxonomy:
    """Apply the standard widening of the Traffic Agents definition."""
    leaf = lookup_leaf(t, "Traffic Agents")
    return amend_definition(
        t, leaf.id, leaf.definition + TRAFFIC_AGENTS_EXPANSION,
        "cover parked vehicles and their extensions, e.g. opened doors",
        timestamp=timestamp,
    )
