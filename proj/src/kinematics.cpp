#include "cspace/kinematics.hpp"

#include <cmath>
#include <cstdint>
#include <string>

namespace cspace {

void RobotChainSpec::validate() const {
    if (links.empty()) throw spec_error("robot chain must have at least 1 link");
    if (std::abs(base_orientation.norm() - 1.0) > 1e-9)
        throw spec_error("base_orientation must be unit norm within 1e-9");
    for (std::size_t j = 0; j < links.size(); ++j) {
        const LinkSpec& l = links[j];
        if (std::abs(l.joint_axis.norm() - 1.0) > 1e-9)
            throw spec_error("joint_axis of link " + std::to_string(j) +
                             " must be unit norm within 1e-9");
        if (!(l.capsule_radius > 0.0))
            throw spec_error("capsule_radius of link " + std::to_string(j) +
                             " must be positive");
        if (!(l.limit_lo < l.limit_hi))
            throw spec_error("joint limits of link " + std::to_string(j) + " are empty");
    }
}

ControlPointSet forward_kinematics(const RobotChainSpec& robot, std::span<const double> q) {
    if (q.size() != robot.links.size())
        throw input_error("configuration has " + std::to_string(q.size()) +
                          " angles, robot has " + std::to_string(robot.links.size()) +
                          " joints");
    robot.validate();

    ControlPointSet out;
    out.links.reserve(robot.links.size());
    Vec3 pos = robot.base_position;
    Quat ori = robot.base_orientation;
    for (std::size_t j = 0; j < robot.links.size(); ++j) {
        const LinkSpec& link = robot.links[j];
        ori = ori * Quat::from_axis_angle(link.joint_axis, q[j]);
        const Vec3 start = pos;
        pos = pos + ori.rotate(link.link_offset);
        out.links.push_back({start, pos, 0.5 * (start + pos), link.capsule_radius});
    }
    return out;
}

std::size_t total_dof(const std::vector<RobotChainSpec>& robots) {
    std::size_t n = 0;
    for (const auto& r : robots) n += r.dof();
    return n;
}

std::size_t feature_dim(const std::vector<RobotChainSpec>& robots) {
    return 3 * total_dof(robots);
}

std::vector<double> fk_features(const std::vector<RobotChainSpec>& robots,
                                std::span<const double> q) {
    if (q.size() != total_dof(robots))
        throw input_error("configuration dimension " + std::to_string(q.size()) +
                          " does not match total DoF " + std::to_string(total_dof(robots)));
    std::vector<double> feat;
    feat.reserve(feature_dim(robots));
    std::size_t off = 0;
    for (const auto& robot : robots) {
        const ControlPointSet cps = forward_kinematics(robot, q.subspan(off, robot.dof()));
        off += robot.dof();
        for (const LinkPose& lp : cps.links) {
            feat.push_back(lp.control_point.x);
            feat.push_back(lp.control_point.y);
            feat.push_back(lp.control_point.z);
        }
    }
    return feat;
}

void fk_feature_batch(const std::vector<RobotChainSpec>& robots, const Mat& configs, Mat& out) {
    const std::size_t d = feature_dim(robots);
    if (configs.cols != total_dof(robots))
        throw input_error("configs matrix has " + std::to_string(configs.cols) +
                          " columns, total DoF is " + std::to_string(total_dof(robots)));
    out.resize(configs.rows, d);
    const std::int64_t n = static_cast<std::int64_t>(configs.rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        const std::vector<double> f =
            fk_features(robots, std::span<const double>(configs.row(ii), configs.cols));
        double* o = out.row(ii);
        for (std::size_t j = 0; j < d; ++j) o[j] = f[j];
    }
}

RobotChainSpec default_desk_robot() {
    RobotChainSpec r;
    r.links.reserve(7);
    for (int j = 0; j < 7; ++j) {
        LinkSpec l;
        l.joint_axis = (j % 2 == 0) ? Vec3{0, 0, 1} : Vec3{0, 1, 0};
        l.link_offset = {0, 0, 0.2};
        l.capsule_radius = 0.05;
        r.links.push_back(l);
    }
    return r;
}

}  // namespace cspace
