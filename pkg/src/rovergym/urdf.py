"""URDF-subset parser and writer.

Supported elements: <robot>, <link> with <inertial> (mass, inertia, origin),
<visual>/<collision> with primitive <geometry> (box, cylinder, sphere) and
<material><color>, and <joint> (fixed, revolute, continuous) with <parent>,
<child>, <origin>, <axis>, <limit>. Unknown elements are skipped and
collected as warnings. Meshes and xacro macros are out of scope.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from xml.sax.saxutils import quoteattr

from .core import RoverGymError
from .robot import Geometry, Joint, Link, RobotModel


class UrdfError(RoverGymError):
    pass


class MalformedXml(UrdfError):
    def __init__(self, position: str, detail: str):
        super().__init__(f"malformed XML at {position}: {detail}")
        self.position = position


class MissingAttribute(UrdfError):
    def __init__(self, element: str, attr: str):
        super().__init__(f"<{element}> missing required attribute {attr!r}")
        self.element = element
        self.attr = attr


class BadNumber(UrdfError):
    def __init__(self, element: str, attr: str, value: str):
        super().__init__(f"<{element}> attribute {attr!r} is not a number: {value!r}")
        self.element = element
        self.attr = attr


class DuplicateName(UrdfError):
    def __init__(self, name: str):
        super().__init__(f"duplicate name {name!r}")
        self.name = name


JOINT_KINDS = ("fixed", "revolute", "continuous")


def _require(elem: ET.Element, attr: str) -> str:
    value = elem.get(attr)
    if value is None:
        raise MissingAttribute(elem.tag, attr)
    return value


def _number(elem: ET.Element, attr: str, default: float | None = None) -> float:
    raw = elem.get(attr)
    if raw is None:
        if default is None:
            raise MissingAttribute(elem.tag, attr)
        return default
    try:
        return float(raw)
    except ValueError:
        raise BadNumber(elem.tag, attr, raw) from None


def _vector(elem: ET.Element, attr: str, n: int, default=None) -> tuple:
    raw = elem.get(attr)
    if raw is None:
        if default is None:
            raise MissingAttribute(elem.tag, attr)
        return tuple(default)
    parts = raw.split()
    if len(parts) != n:
        raise BadNumber(elem.tag, attr, raw)
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise BadNumber(elem.tag, attr, raw) from None


def parse(text: str) -> RobotModel:
    """Parse a URDF document into a RobotModel; structural rules are checked
    separately by robot.validate()."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise MalformedXml(f"line {exc.position[0]}, col {exc.position[1]}",
                           str(exc)) from None
    if root.tag != "robot":
        raise MalformedXml("document root", f"expected <robot>, got <{root.tag}>")

    name = root.get("name", "robot")
    links: list[Link] = []
    joints: list[Joint] = []
    warnings: list[str] = []
    seen: set[str] = set()

    for child in root:
        if child.tag == "link":
            link = _parse_link(child, warnings)
            if link.name in seen:
                raise DuplicateName(link.name)
            seen.add(link.name)
            links.append(link)
        elif child.tag == "joint":
            joint = _parse_joint(child, warnings)
            if joint.name in seen:
                raise DuplicateName(joint.name)
            seen.add(joint.name)
            joints.append(joint)
        else:
            warnings.append(f"ignored unknown element <{child.tag}>")

    return RobotModel(name=name, links=links, joints=joints, plugins=[],
                      warnings=warnings)


def _parse_geometry(geom_elem: ET.Element, warnings: list[str]) -> Geometry | None:
    for shape in geom_elem:
        if shape.tag == "box":
            size = _vector(shape, "size", 3)
            return Geometry("box", {"length": size[0], "width": size[1],
                                    "height": size[2]})
        if shape.tag == "cylinder":
            return Geometry("cylinder", {"radius": _number(shape, "radius"),
                                         "length": _number(shape, "length")})
        if shape.tag == "sphere":
            return Geometry("sphere", {"radius": _number(shape, "radius")})
        warnings.append(f"ignored unknown geometry <{shape.tag}>")
    return None


def _parse_link(elem: ET.Element, warnings: list[str]) -> Link:
    name = _require(elem, "name")
    mass = 0.0
    inertia = (0.0,) * 6
    geometry = None
    collision = None
    color = (0.5, 0.5, 0.5, 1.0)
    for child in elem:
        if child.tag == "inertial":
            mass_elem = child.find("mass")
            if mass_elem is not None:
                mass = _number(mass_elem, "value")
            in_elem = child.find("inertia")
            if in_elem is not None:
                inertia = tuple(_number(in_elem, k, 0.0)
                                for k in ("ixx", "ixy", "ixz", "iyy", "iyz", "izz"))
        elif child.tag == "visual":
            geom_elem = child.find("geometry")
            if geom_elem is not None:
                geometry = _parse_geometry(geom_elem, warnings)
            mat = child.find("material")
            if mat is not None:
                color_elem = mat.find("color")
                if color_elem is not None:
                    color = _vector(color_elem, "rgba", 4)
        elif child.tag == "collision":
            geom_elem = child.find("geometry")
            if geom_elem is not None:
                collision = _parse_geometry(geom_elem, warnings)
        else:
            warnings.append(f"ignored unknown element <{child.tag}> in link {name!r}")
    return Link(name=name, mass=mass, inertia=inertia, geometry=geometry,
                collision=collision, color=color)


def _parse_joint(elem: ET.Element, warnings: list[str]) -> Joint:
    name = _require(elem, "name")
    kind = _require(elem, "type")
    if kind not in JOINT_KINDS:
        raise MalformedXml(f"joint {name!r}", f"unsupported joint type {kind!r}")
    parent = child_link = None
    origin_xyz = (0.0, 0.0, 0.0)
    origin_rpy = (0.0, 0.0, 0.0)
    axis = (1.0, 0.0, 0.0)
    limits = None
    for child in elem:
        if child.tag == "parent":
            parent = _require(child, "link")
        elif child.tag == "child":
            child_link = _require(child, "link")
        elif child.tag == "origin":
            origin_xyz = _vector(child, "xyz", 3, default=(0.0, 0.0, 0.0))
            origin_rpy = _vector(child, "rpy", 3, default=(0.0, 0.0, 0.0))
        elif child.tag == "axis":
            axis = _vector(child, "xyz", 3)
        elif child.tag == "limit":
            limits = (_number(child, "lower"), _number(child, "upper"))
        else:
            warnings.append(f"ignored unknown element <{child.tag}> in joint {name!r}")
    if parent is None:
        raise MissingAttribute(f"joint {name!r} <parent>", "link")
    if child_link is None:
        raise MissingAttribute(f"joint {name!r} <child>", "link")
    return Joint(name=name, kind=kind, parent=parent, child=child_link,
                 origin_xyz=origin_xyz, origin_rpy=origin_rpy, axis=axis,
                 limits=limits)


# ---------------------------------------------------------------------------
# Writer (inverse of parse for the supported subset)
# ---------------------------------------------------------------------------

def serialize(model: RobotModel) -> str:
    """Emit URDF XML for the supported subset; parse(serialize(m)) == m up to
    plugin attachments (plugins live in the .rmodel.json form, not URDF)."""
    out = [f"<robot name={quoteattr(model.name)}>"]
    for link in model.links:
        out.append(f"  <link name={quoteattr(link.name)}>")
        out.append("    <inertial>")
        out.append(f'      <mass value="{link.mass!r}"/>')
        ixx, ixy, ixz, iyy, iyz, izz = link.inertia
        out.append(f'      <inertia ixx="{ixx!r}" ixy="{ixy!r}" ixz="{ixz!r}" '
                   f'iyy="{iyy!r}" iyz="{iyz!r}" izz="{izz!r}"/>')
        out.append("    </inertial>")
        if link.geometry is not None:
            out.append("    <visual>")
            out.append("      <geometry>")
            out.append(f"        {_geometry_xml(link.geometry)}")
            out.append("      </geometry>")
            rgba = " ".join(repr(c) for c in link.color)
            out.append(f'      <material name="c"><color rgba="{rgba}"/></material>')
            out.append("    </visual>")
        if link.collision is not None:
            out.append("    <collision>")
            out.append("      <geometry>")
            out.append(f"        {_geometry_xml(link.collision)}")
            out.append("      </geometry>")
            out.append("    </collision>")
        out.append("  </link>")
    for joint in model.joints:
        out.append(f"  <joint name={quoteattr(joint.name)} type=\"{joint.kind}\">")
        out.append(f"    <parent link={quoteattr(joint.parent)}/>")
        out.append(f"    <child link={quoteattr(joint.child)}/>")
        xyz = " ".join(repr(v) for v in joint.origin_xyz)
        rpy = " ".join(repr(v) for v in joint.origin_rpy)
        out.append(f'    <origin xyz="{xyz}" rpy="{rpy}"/>')
        ax = " ".join(repr(v) for v in joint.axis)
        out.append(f'    <axis xyz="{ax}"/>')
        if joint.limits is not None:
            out.append(f'    <limit lower="{joint.limits[0]!r}" '
                       f'upper="{joint.limits[1]!r}"/>')
        out.append("  </joint>")
    out.append("</robot>")
    return "\n".join(out) + "\n"


def _geometry_xml(geom: Geometry) -> str:
    p = geom.params
    if geom.kind == "box":
        return (f'<box size="{p["length"]!r} {p["width"]!r} {p["height"]!r}"/>')
    if geom.kind == "cylinder":
        return f'<cylinder radius="{p["radius"]!r}" length="{p["length"]!r}"/>'
    return f'<sphere radius="{p["radius"]!r}"/>'
