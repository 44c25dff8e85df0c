#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cspace/common.hpp"
#include "cspace/mat.hpp"

namespace cspace {

// One revolute joint plus the rigid segment that follows it.
struct LinkSpec {
    Vec3 joint_axis{0, 0, 1};   // unit, in the parent frame
    Vec3 link_offset{0, 0, 0};  // translation to the next joint, in this link's frame
    double capsule_radius = 0.05;
    double limit_lo = -3.14159265358979323846;
    double limit_hi = 3.14159265358979323846;
};

struct RobotChainSpec {
    Vec3 base_position{0, 0, 0};
    Quat base_orientation = Quat::identity();
    std::vector<LinkSpec> links;

    std::size_t dof() const { return links.size(); }
    void validate() const;  // throws spec_error on broken invariants
};

struct JointConfiguration {
    std::vector<double> angles;
};

// World-space pose of one link: the segment between consecutive joints and
// its midpoint, which serves as the link's control point.
struct LinkPose {
    Vec3 seg_start;
    Vec3 seg_end;
    Vec3 control_point;
    double capsule_radius;
};

struct ControlPointSet {
    std::vector<LinkPose> links;
};

// Composition per link j: rotate about joint_axis by q[j] in the current
// frame, then translate by link_offset in the rotated frame.
ControlPointSet forward_kinematics(const RobotChainSpec& robot, std::span<const double> q);

// Concatenated control-point coordinates of every robot, robot order then
// link order; the shared d = 3 * (total links) feature representation.
std::vector<double> fk_features(const std::vector<RobotChainSpec>& robots,
                                std::span<const double> q);

std::size_t total_dof(const std::vector<RobotChainSpec>& robots);
std::size_t feature_dim(const std::vector<RobotChainSpec>& robots);

// Row-parallel fk_features over a configs matrix (n x J) -> (n x d).
void fk_feature_batch(const std::vector<RobotChainSpec>& robots, const Mat& configs, Mat& out);

// The default desk-scale arm: 7 revolute joints, axes alternating
// (z, y, z, y, z, y, z) in local frames, every offset (0, 0, 0.2) m,
// capsule radius 0.05 m.
RobotChainSpec default_desk_robot();

}  // namespace cspace
