#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cspace/kinematics.hpp"
#include "cspace/rng.hpp"

using namespace cspace;

namespace {

RobotChainSpec one_link_z() {
    RobotChainSpec r;
    LinkSpec l;
    l.joint_axis = {0, 0, 1};
    l.link_offset = {1, 0, 0};
    l.capsule_radius = 0.05;
    r.links = {l};
    return r;
}

}  // namespace

TEST_CASE("single link, identity rotation puts the control point at the midpoint") {
    const RobotChainSpec r = one_link_z();
    const double q[1] = {0.0};
    const ControlPointSet cps = forward_kinematics(r, q);
    REQUIRE(cps.links.size() == 1);
    CHECK(cps.links[0].control_point.x == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(cps.links[0].control_point.y == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(cps.links[0].control_point.z == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("single link, quarter turn about z") {
    const RobotChainSpec r = one_link_z();
    const double q[1] = {M_PI / 2.0};
    const ControlPointSet cps = forward_kinematics(r, q);
    CHECK(std::abs(cps.links[0].control_point.x - 0.0) < 1e-12);
    CHECK(std::abs(cps.links[0].control_point.y - 0.5) < 1e-12);
    CHECK(std::abs(cps.links[0].control_point.z - 0.0) < 1e-12);
}

TEST_CASE("default desk robot at rest matches the hand-stacked golden fixture") {
    // All offsets are (0,0,0.2) and all rotations are the identity at q = 0,
    // so joint j sits at z = 0.2*j and control point j at z = 0.1 + 0.2*j.
    const RobotChainSpec r = default_desk_robot();
    const std::vector<double> q(7, 0.0);
    const ControlPointSet cps = forward_kinematics(r, q);
    REQUIRE(cps.links.size() == 7);
    const double golden_z[7] = {0.1, 0.3, 0.5, 0.7, 0.9, 1.1, 1.3};
    for (std::size_t j = 0; j < 7; ++j) {
        CHECK(std::abs(cps.links[j].control_point.x) < 1e-15);
        CHECK(std::abs(cps.links[j].control_point.y) < 1e-15);
        CHECK(cps.links[j].control_point.z == doctest::Approx(golden_z[j]).epsilon(1e-12));
    }
}

TEST_CASE("dimension mismatch and invalid specs are rejected") {
    const RobotChainSpec r = one_link_z();
    const std::vector<double> q2(2, 0.0);
    CHECK_THROWS_AS((void)forward_kinematics(r, q2), input_error);

    RobotChainSpec bad = r;
    bad.links[0].joint_axis = {0, 0, 2};
    const double q[1] = {0.0};
    CHECK_THROWS_AS((void)forward_kinematics(bad, q), spec_error);

    bad = r;
    bad.links[0].capsule_radius = 0.0;
    CHECK_THROWS_AS((void)forward_kinematics(bad, q), spec_error);
}

TEST_CASE("rigid-body invariant: consecutive joint distances equal the offsets") {
    const RobotChainSpec r = default_desk_robot();
    for (int trial = 0; trial < 1000; ++trial) {
        Rng rng = substream(42, "rigid", static_cast<std::uint64_t>(trial));
        std::vector<double> q(7);
        for (double& a : q) a = rng.uniform(-M_PI, M_PI);
        const ControlPointSet cps = forward_kinematics(r, q);
        for (std::size_t j = 0; j < cps.links.size(); ++j) {
            const double len = (cps.links[j].seg_end - cps.links[j].seg_start).norm();
            CHECK(std::abs(len - 0.2) < 1e-9);
        }
    }
}

TEST_CASE("reachability: control points stay within the total link length") {
    const RobotChainSpec r = default_desk_robot();
    const double reach = 7 * 0.2;
    for (int trial = 0; trial < 200; ++trial) {
        Rng rng = substream(43, "reach", static_cast<std::uint64_t>(trial));
        std::vector<double> q(7);
        for (double& a : q) a = rng.uniform(-M_PI, M_PI);
        const ControlPointSet cps = forward_kinematics(r, q);
        for (const LinkPose& lp : cps.links)
            CHECK((lp.control_point - r.base_position).norm() <= reach + 1e-12);
    }
}

TEST_CASE("rotation about a link's own axis leaves on-axis downstream points fixed") {
    RobotChainSpec r;
    LinkSpec l;
    l.joint_axis = {0, 0, 1};
    l.link_offset = {0, 0, 0.2};  // collinear with the axis
    r.links = {l, l};
    for (double angle : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
        const std::vector<double> q = {angle, 0.0};
        const ControlPointSet cps = forward_kinematics(r, q);
        CHECK(std::abs(cps.links[0].seg_end.x) < 1e-15);
        CHECK(std::abs(cps.links[0].seg_end.y) < 1e-15);
        CHECK(cps.links[0].seg_end.z == doctest::Approx(0.2).epsilon(1e-15));
        CHECK(cps.links[1].seg_end.z == doctest::Approx(0.4).epsilon(1e-15));
    }
}

TEST_CASE("fk_features concatenates robots in declaration order") {
    RobotChainSpec a = one_link_z();
    RobotChainSpec b = one_link_z();
    b.base_position = {0, 0, 1};
    const std::vector<double> q = {0.0, 0.0};

    const std::vector<double> fab = fk_features({a, b}, q);
    const std::vector<double> fba = fk_features({b, a}, q);
    REQUIRE(fab.size() == 6);
    CHECK(fab[0] == 0.5);
    CHECK(fab[2] == 0.0);
    CHECK(fab[5] == 1.0);
    // Permuting the robot declaration order permutes the feature blocks.
    CHECK(fab[0] == fba[3]);
    CHECK(fab[1] == fba[4]);
    CHECK(fab[2] == fba[5]);
    CHECK(fab[3] == fba[0]);

    const std::vector<RobotChainSpec> two_desks{default_desk_robot(), default_desk_robot()};
    CHECK(feature_dim(two_desks) == 42);  // 3 * 14 links
}

TEST_CASE("fk is deterministic and the batch path matches the row path") {
    const std::vector<RobotChainSpec> robots{default_desk_robot(), default_desk_robot()};
    Mat configs(32, 14);
    Rng rng(7);
    for (double& v : configs.data) v = rng.uniform(-M_PI, M_PI);

    Mat batch;
    fk_feature_batch(robots, configs, batch);
    for (std::size_t i = 0; i < configs.rows; ++i) {
        const std::vector<double> row =
            fk_features(robots, std::span<const double>(configs.row(i), configs.cols));
        for (std::size_t j = 0; j < row.size(); ++j) CHECK(batch.at(i, j) == row[j]);
    }

    Mat again;
    fk_feature_batch(robots, configs, again);
    CHECK(batch.data == again.data);  // bit-identical
}
