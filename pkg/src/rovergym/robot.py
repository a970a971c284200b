"""Robot model: the parsed link/joint tree, structural validation, plugin
attachment (diff-drive controller, IMU, magnetic field, GPS, sonar, lidar),
and derivation of simulator geometry. Models serialize to .rmodel.json."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

from .core import RoverGymError
from .dynamics import RoverGeometry

PLUGIN_KINDS = ("diff_drive", "imu", "magnetic_field", "gps", "sonar", "lidar")

# The magnetic_field plugin is parsed and stored but has no simulator
# consumer; it exists so setup configurations carry over completely.
INERT_PLUGINS = ("magnetic_field",)


class PluginError(RoverGymError):
    pass


class UnknownJoint(PluginError):
    pass


class UnknownLink(PluginError):
    pass


class MissingParam(PluginError):
    def __init__(self, kind: str, param: str):
        super().__init__(f"plugin {kind!r} missing required param {param!r}")


class IncompatibleGeometry(PluginError):
    pass


class NoDriveAttachment(PluginError):
    pass


@dataclass(frozen=True)
class Geometry:
    kind: str                     # box | cylinder | sphere
    params: dict[str, float]

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}

    @staticmethod
    def from_dict(d: dict) -> "Geometry":
        d = dict(d)
        return Geometry(d.pop("kind"), d)


@dataclass(frozen=True)
class Link:
    name: str
    mass: float = 0.0
    inertia: tuple = (0.0,) * 6   # ixx, ixy, ixz, iyy, iyz, izz
    geometry: Optional[Geometry] = None
    collision: Optional[Geometry] = None
    color: tuple = (0.5, 0.5, 0.5, 1.0)


@dataclass(frozen=True)
class Joint:
    name: str
    kind: str                     # fixed | revolute | continuous
    parent: str
    child: str
    origin_xyz: tuple = (0.0, 0.0, 0.0)
    origin_rpy: tuple = (0.0, 0.0, 0.0)
    axis: tuple = (1.0, 0.0, 0.0)
    limits: Optional[tuple] = None  # (lower, upper), revolute only


@dataclass(frozen=True)
class PluginAttachment:
    kind: str
    params: dict[str, object]

    def target(self) -> str:
        """Attachment identity: re-attaching the same (kind, target) replaces."""
        p = self.params
        return str(p.get("link") or p.get("joint") or "")


@dataclass
class RobotModel:
    name: str
    links: list[Link]
    joints: list[Joint]
    plugins: list[PluginAttachment] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def link(self, name: str) -> Link:
        for ln in self.links:
            if ln.name == name:
                return ln
        raise UnknownLink(name)

    def joint(self, name: str) -> Joint:
        for jn in self.joints:
            if jn.name == name:
                return jn
        raise UnknownJoint(name)

    def root_links(self) -> list[str]:
        children = {j.child for j in self.joints}
        return [ln.name for ln in self.links if ln.name not in children]


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


def validate(model: RobotModel) -> list[Violation]:
    """Structural checks; an empty list means the model is a valid tree.

    Graph checks run in precedence order (references, cycles, then
    root/parent analysis): a broken layer suppresses the derived layers so
    one defect reports as one kind rather than a cascade. A single-rooted
    acyclic graph where every other link has exactly one parent is connected,
    so connectivity needs no separate check. Inertia and joint-field checks
    always run.
    """
    out: list[Violation] = []
    link_names = {ln.name for ln in model.links}

    broken_refs = False
    for j in model.joints:
        for ref in (j.parent, j.child):
            if ref not in link_names:
                out.append(Violation("UnknownLink",
                                     f"joint {j.name!r} references {ref!r}"))
                broken_refs = True

    if not broken_refs:
        cycles = _find_cycles(model)
        for cyc in cycles:
            out.append(Violation("CyclicTree", " -> ".join(cyc)))
        if not cycles:
            roots = model.root_links()
            if len(roots) > 1:
                out.append(Violation("MultipleRoots", ", ".join(sorted(roots))))
            parents: dict[str, list[str]] = {}
            for j in model.joints:
                parents.setdefault(j.child, []).append(j.name)
            for child, joint_names in sorted(parents.items()):
                if len(joint_names) > 1:
                    out.append(Violation(
                        "MultipleParents",
                        f"link {child!r} via joints {', '.join(sorted(joint_names))}"))

    for j in model.joints:
        norm = math.sqrt(sum(a * a for a in j.axis))
        if abs(norm - 1.0) > 1e-6:
            out.append(Violation("BadAxis",
                                 f"joint {j.name!r} axis norm {norm:.6f}"))
        if j.kind == "revolute":
            if j.limits is None or not j.limits[0] < j.limits[1]:
                out.append(Violation("BadJointLimits",
                                     f"joint {j.name!r} limits {j.limits}"))

    for ln in model.links:
        ixx, _, _, iyy, _, izz = ln.inertia
        if ln.mass > 0:
            if min(ixx, iyy, izz) <= 0:
                out.append(Violation("NonPositiveInertia",
                                     f"link {ln.name!r} diagonal {ixx, iyy, izz}"))
            elif (ixx > iyy + izz or iyy > ixx + izz or izz > ixx + iyy):
                out.append(Violation("InertiaTriangle",
                                     f"link {ln.name!r} violates ixx <= iyy + izz"))
    return out


def _find_cycles(model: RobotModel) -> list[list[str]]:
    edges: dict[str, list[str]] = {}
    for j in model.joints:
        edges.setdefault(j.parent, []).append(j.child)
    seen: set[str] = set()
    cycles: list[list[str]] = []
    cycle_sets: list[frozenset] = []

    def walk(node: str, stack: list[str]):
        if node in stack:
            cyc = stack[stack.index(node):] + [node]
            nodes = frozenset(cyc)
            if nodes not in cycle_sets:
                cycle_sets.append(nodes)
                cycles.append(cyc)
            return
        if node in seen:
            return
        seen.add(node)
        stack.append(node)
        for nxt in edges.get(node, ()):
            walk(nxt, stack)
        stack.pop()

    for ln in model.links:
        walk(ln.name, [])
    return cycles


# ---------------------------------------------------------------------------
# Plugin attachment and geometry derivation
# ---------------------------------------------------------------------------

REQUIRED_PARAMS = {
    "diff_drive": ("left_joint", "right_joint"),
    "imu": ("link",),
    "magnetic_field": ("link",),
    "gps": ("link",),
    "sonar": ("link",),
    "lidar": ("link",),
}


def attach_plugins(model: RobotModel, configs: list[dict]) -> RobotModel:
    """Append plugin attachments; idempotent per (kind, target) — re-attaching
    replaces the previous attachment. diff_drive derives track width from the
    two wheel-joint origins and wheel radius from the wheel link cylinder
    unless overridden in its config."""
    attachments = list(model.plugins)
    for config in configs:
        cfg = dict(config)
        kind = cfg.pop("kind", None)
        if kind not in PLUGIN_KINDS:
            raise PluginError(f"unknown plugin kind {kind!r}")
        for param in REQUIRED_PARAMS[kind]:
            if param not in cfg:
                raise MissingParam(kind, param)
        if kind == "diff_drive":
            cfg = _derive_diff_drive(model, cfg)
        else:
            model.link(str(cfg[REQUIRED_PARAMS[kind][0]]))  # raises UnknownLink
        new = PluginAttachment(kind, cfg)
        attachments = [a for a in attachments
                       if not (a.kind == new.kind and a.target() == new.target())]
        attachments.append(new)
    return replace_model(model, plugins=attachments)


def _derive_diff_drive(model: RobotModel, cfg: dict) -> dict:
    left = model.joint(str(cfg["left_joint"]))
    right = model.joint(str(cfg["right_joint"]))
    if "track_width" not in cfg:
        # lateral (y) separation of the wheel joint origins
        cfg["track_width"] = abs(left.origin_xyz[1] - right.origin_xyz[1])
    if "wheel_radius" not in cfg:
        radii = []
        for j in (left, right):
            wheel = model.link(j.child)
            geom = wheel.geometry or wheel.collision
            if geom is None or geom.kind != "cylinder":
                raise IncompatibleGeometry(
                    f"wheel link {j.child!r} is not a cylinder and no "
                    f"wheel_radius override was given")
            radii.append(geom.params["radius"])
        if abs(radii[0] - radii[1]) > 1e-9:
            raise IncompatibleGeometry(
                f"left/right wheel radii differ: {radii[0]} vs {radii[1]}")
        cfg["wheel_radius"] = radii[0]
    if "wheelbase" not in cfg:
        xs = [j.origin_xyz[0] for j in model.joints if j.kind == "continuous"]
        cfg["wheelbase"] = (max(xs) - min(xs)) if len(xs) >= 2 else 0.5
    return cfg


def derive_geometry(model: RobotModel) -> RoverGeometry:
    """Simulator geometry from a model with a diff_drive attachment."""
    drive = None
    for att in model.plugins:
        if att.kind == "diff_drive":
            drive = att
    if drive is None:
        raise NoDriveAttachment("model has no diff_drive attachment")
    mass = sum(ln.mass for ln in model.links)
    return RoverGeometry(
        track_width=float(drive.params["track_width"]),
        wheel_radius=float(drive.params["wheel_radius"]),
        wheelbase=float(drive.params.get("wheelbase", 0.5)),
        chassis_length=float(drive.params.get("chassis_length", 0.6)),
        mass=mass,
    )


def replace_model(model: RobotModel, **changes) -> RobotModel:
    return RobotModel(
        name=changes.get("name", model.name),
        links=changes.get("links", model.links),
        joints=changes.get("joints", model.joints),
        plugins=changes.get("plugins", model.plugins),
        warnings=changes.get("warnings", model.warnings),
    )


# ---------------------------------------------------------------------------
# Canonical .rmodel.json serialization
# ---------------------------------------------------------------------------

RMODEL_VERSION = 1


def to_rmodel_json(model: RobotModel) -> str:
    doc = {
        "format": "rmodel",
        "version": RMODEL_VERSION,
        "name": model.name,
        "links": [
            {
                "name": ln.name,
                "mass": ln.mass,
                "inertia": list(ln.inertia),
                "geometry": ln.geometry.to_dict() if ln.geometry else None,
                "collision": ln.collision.to_dict() if ln.collision else None,
                "color": list(ln.color),
            }
            for ln in model.links
        ],
        "joints": [
            {
                "name": j.name,
                "kind": j.kind,
                "parent": j.parent,
                "child": j.child,
                "origin_xyz": list(j.origin_xyz),
                "origin_rpy": list(j.origin_rpy),
                "axis": list(j.axis),
                "limits": list(j.limits) if j.limits else None,
            }
            for j in model.joints
        ],
        "plugins": [{"kind": a.kind, "params": a.params} for a in model.plugins],
    }
    return json.dumps(doc, indent=2) + "\n"


def from_rmodel_json(text: str) -> RobotModel:
    doc = json.loads(text)
    if doc.get("format") != "rmodel":
        raise RoverGymError("not an rmodel document")
    links = [
        Link(name=d["name"], mass=d["mass"], inertia=tuple(d["inertia"]),
             geometry=Geometry.from_dict(d["geometry"]) if d["geometry"] else None,
             collision=Geometry.from_dict(d["collision"]) if d["collision"] else None,
             color=tuple(d["color"]))
        for d in doc["links"]
    ]
    joints = [
        Joint(name=d["name"], kind=d["kind"], parent=d["parent"],
              child=d["child"], origin_xyz=tuple(d["origin_xyz"]),
              origin_rpy=tuple(d["origin_rpy"]), axis=tuple(d["axis"]),
              limits=tuple(d["limits"]) if d["limits"] else None)
        for d in doc["joints"]
    ]
    plugins = [PluginAttachment(d["kind"], d["params"]) for d in doc["plugins"]]
    return RobotModel(name=doc["name"], links=links, joints=joints,
                      plugins=plugins)
