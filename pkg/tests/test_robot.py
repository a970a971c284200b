"""Robot description: parsing, structural validation fixtures, plugin
attachment with derived geometry, and serialization round trips."""

from pathlib import Path

import pytest

from rovergym import robot, urdf

FIXTURES = Path(__file__).parent.parent / "src" / "rovergym" / "fixtures"


def load(name):
    return urdf.parse((FIXTURES / name).read_text())


class TestParse:
    def test_single_link_mass(self):
        model = urdf.parse("""
            <robot name="solo">
              <link name="base">
                <inertial><mass value="5.0"/>
                  <inertia ixx="0.1" iyy="0.1" izz="0.1"/></inertial>
              </link>
            </robot>""")
        assert len(model.links) == 1
        assert len(model.joints) == 0
        assert model.links[0].mass == 5.0

    def test_two_links_root_identified(self):
        model = urdf.parse("""
            <robot name="pair">
              <link name="base"/>
              <link name="arm"/>
              <joint name="j" type="revolute">
                <parent link="base"/><child link="arm"/>
                <axis xyz="0 0 1"/><limit lower="-1.0" upper="1.0"/>
              </joint>
            </robot>""")
        assert model.root_links() == ["base"]

    def test_reference_fixture_structure(self):
        model = load("lsd.urdf")
        assert len(model.links) == 7
        assert len(model.joints) == 6
        assert all(j.kind == "continuous" for j in model.joints)
        assert model.root_links() == ["chassis"]
        assert model.warnings == []

    def test_unknown_elements_warned_not_fatal(self):
        model = urdf.parse("""
            <robot name="x">
              <gazebo reference="base"/>
              <link name="base"><strange/></link>
            </robot>""")
        assert len(model.warnings) == 2
        assert len(model.links) == 1

    def test_malformed_xml(self):
        with pytest.raises(urdf.MalformedXml):
            urdf.parse("<robot name='x'><link name='a'></robot>")

    def test_missing_attribute(self):
        with pytest.raises(urdf.MissingAttribute):
            urdf.parse("<robot><link/></robot>")

    def test_bad_number(self):
        with pytest.raises(urdf.BadNumber):
            urdf.parse("""
                <robot name="x"><link name="a">
                  <inertial><mass value="heavy"/></inertial>
                </link></robot>""")

    def test_duplicate_name(self):
        with pytest.raises(urdf.DuplicateName):
            urdf.parse("""
                <robot name="x">
                  <link name="a"/><link name="a"/>
                </robot>""")

    def test_exponent_notation(self):
        model = urdf.parse("""
            <robot name="x"><link name="a">
              <inertial><mass value="1.5e-2"/></inertial>
            </link></robot>""")
        assert model.links[0].mass == 0.015


class TestValidate:
    def test_reference_fixture_clean(self):
        assert robot.validate(load("lsd.urdf")) == []

    @pytest.mark.parametrize("fixture,kind", [
        ("cycle.urdf", "CyclicTree"),
        ("multiple_roots.urdf", "MultipleRoots"),
        ("unknown_link.urdf", "UnknownLink"),
        ("multiple_parents.urdf", "MultipleParents"),
        ("bad_inertia.urdf", "NonPositiveInertia"),
        ("inertia_triangle.urdf", "InertiaTriangle"),
        ("bad_axis.urdf", "BadAxis"),
        ("bad_limits.urdf", "BadJointLimits"),
    ])
    def test_each_violation_kind_triggered_exactly(self, fixture, kind):
        violations = robot.validate(load(fixture))
        assert [v.kind for v in violations] == [kind]


class TestAttachPlugins:
    def test_diff_drive_derives_track_width(self):
        model = robot.attach_plugins(load("lsd.urdf"), [
            {"kind": "diff_drive", "left_joint": "axle_L2",
             "right_joint": "axle_R2"}])
        drive = model.plugins[0]
        assert drive.params["track_width"] == pytest.approx(0.40)
        assert drive.params["wheel_radius"] == pytest.approx(0.10)
        assert drive.params["wheelbase"] == pytest.approx(0.50)

    def test_imu_params_stored_verbatim(self):
        model = robot.attach_plugins(load("lsd.urdf"), [
            {"kind": "imu", "link": "chassis", "sigma_imu": 0.01}])
        assert model.plugins[0].params["sigma_imu"] == 0.01

    def test_unknown_joint(self):
        with pytest.raises(robot.UnknownJoint):
            robot.attach_plugins(load("lsd.urdf"), [
                {"kind": "diff_drive", "left_joint": "nope",
                 "right_joint": "axle_R2"}])

    def test_unknown_link(self):
        with pytest.raises(robot.UnknownLink):
            robot.attach_plugins(load("lsd.urdf"), [
                {"kind": "imu", "link": "ghost"}])

    def test_missing_param(self):
        with pytest.raises(robot.MissingParam):
            robot.attach_plugins(load("lsd.urdf"), [{"kind": "diff_drive",
                                                     "left_joint": "axle_L2"}])

    def test_incompatible_geometry_without_override(self):
        model = urdf.parse("""
            <robot name="boxwheels">
              <link name="base"/>
              <link name="wl"><visual><geometry><box size="1 1 1"/></geometry></visual></link>
              <link name="wr"><visual><geometry><box size="1 1 1"/></geometry></visual></link>
              <joint name="jl" type="continuous">
                <parent link="base"/><child link="wl"/>
                <origin xyz="0 0.2 0"/><axis xyz="0 1 0"/></joint>
              <joint name="jr" type="continuous">
                <parent link="base"/><child link="wr"/>
                <origin xyz="0 -0.2 0"/><axis xyz="0 1 0"/></joint>
            </robot>""")
        with pytest.raises(robot.IncompatibleGeometry):
            robot.attach_plugins(model, [{"kind": "diff_drive",
                                          "left_joint": "jl",
                                          "right_joint": "jr"}])
        patched = robot.attach_plugins(model, [
            {"kind": "diff_drive", "left_joint": "jl", "right_joint": "jr",
             "wheel_radius": 0.07}])
        assert patched.plugins[0].params["wheel_radius"] == 0.07

    def test_reattach_replaces_not_duplicates(self):
        model = robot.attach_plugins(load("lsd.urdf"), [
            {"kind": "imu", "link": "chassis", "sigma_imu": 0.01}])
        model = robot.attach_plugins(model, [
            {"kind": "imu", "link": "chassis", "sigma_imu": 0.05}])
        imus = [a for a in model.plugins if a.kind == "imu"]
        assert len(imus) == 1
        assert imus[0].params["sigma_imu"] == 0.05

    def test_magnetic_field_stored_inert(self):
        model = robot.attach_plugins(load("lsd.urdf"), [
            {"kind": "magnetic_field", "link": "chassis"}])
        assert model.plugins[0].kind == "magnetic_field"
        assert "magnetic_field" in robot.INERT_PLUGINS


class TestDeriveGeometry:
    def test_reference_fixture_geometry(self):
        model = robot.attach_plugins(load("lsd.urdf"), [
            {"kind": "diff_drive", "left_joint": "axle_L2",
             "right_joint": "axle_R2"}])
        geom = robot.derive_geometry(model)
        assert geom.track_width == pytest.approx(0.40)
        assert geom.wheel_radius == pytest.approx(0.10)
        assert geom.mass == pytest.approx(4.5 + 6 * 0.25)  # exact sum

    def test_requires_drive(self):
        with pytest.raises(robot.NoDriveAttachment):
            robot.derive_geometry(load("lsd.urdf"))


class TestRoundTrips:
    @pytest.mark.parametrize("fixture", ["lsd.urdf", "cycle.urdf",
                                         "multiple_roots.urdf"])
    def test_parse_serialize_parse_fixed_point(self, fixture):
        first = load(fixture)
        second = urdf.parse(urdf.serialize(first))
        assert second.name == first.name
        assert second.links == first.links
        assert second.joints == first.joints
        # and the fixed point holds from then on
        third = urdf.parse(urdf.serialize(second))
        assert third.links == second.links and third.joints == second.joints

    def test_rmodel_json_round_trip(self):
        model = robot.attach_plugins(load("lsd.urdf"), [
            {"kind": "diff_drive", "left_joint": "axle_L2",
             "right_joint": "axle_R2"},
            {"kind": "imu", "link": "chassis", "sigma_imu": 0.02}])
        back = robot.from_rmodel_json(robot.to_rmodel_json(model))
        assert back.name == model.name
        assert back.links == model.links
        assert back.joints == model.joints
        assert back.plugins == model.plugins
