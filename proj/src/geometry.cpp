#include "cspace/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace cspace {

namespace {
constexpr int kMaxPlacementAttempts = 10000;
constexpr double kFarMinSpacing = 1.5;
constexpr double kCloseMaxSpacing = 0.8;
}  // namespace

void Obstacle::validate() const {
    if (kind == Kind::Sphere) {
        if (!(radius > 0.0)) throw spec_error("sphere radius must be strictly positive");
    } else {
        if (!(half_extents.x > 0.0 && half_extents.y > 0.0 && half_extents.z > 0.0))
            throw spec_error("box half_extents must be strictly positive");
        if (std::abs(orientation.norm() - 1.0) > 1e-9)
            throw spec_error("box orientation must be unit norm within 1e-9");
    }
}

double Obstacle::bounding_radius() const {
    return kind == Kind::Sphere ? radius : half_extents.norm();
}

void Environment::validate() const {
    if (robots.empty()) throw spec_error("environment must have at least 1 robot");
    for (const auto& r : robots) r.validate();
    for (const auto& o : obstacles) {
        o.validate();
        if (o.center.x < workspace_bounds.min.x || o.center.x > workspace_bounds.max.x ||
            o.center.y < workspace_bounds.min.y || o.center.y > workspace_bounds.max.y ||
            o.center.z < workspace_bounds.min.z || o.center.z > workspace_bounds.max.z)
            throw spec_error("obstacle center outside workspace_bounds");
    }
}

double point_segment_distance(const Vec3& p, const Segment& seg) {
    const Vec3 d = seg.b - seg.a;
    const double dd = d.norm2();
    double t = 0.0;
    if (dd > 0.0) t = std::clamp((p - seg.a).dot(d) / dd, 0.0, 1.0);
    return (p - (seg.a + t * d)).norm();
}

double point_obstacle_distance(const Vec3& p, const Obstacle& obstacle) {
    if (obstacle.kind == Obstacle::Kind::Sphere)
        return std::max(0.0, (p - obstacle.center).norm() - obstacle.radius);
    const Vec3 local = obstacle.orientation.conj().rotate(p - obstacle.center);
    const double dx = std::max(0.0, std::abs(local.x) - obstacle.half_extents.x);
    const double dy = std::max(0.0, std::abs(local.y) - obstacle.half_extents.y);
    const double dz = std::max(0.0, std::abs(local.z) - obstacle.half_extents.z);
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double segment_primitive_distance(const Segment& seg, const Obstacle& obstacle) {
    if (!(std::isfinite(seg.a.x) && std::isfinite(seg.a.y) && std::isfinite(seg.a.z) &&
          std::isfinite(seg.b.x) && std::isfinite(seg.b.y) && std::isfinite(seg.b.z)))
        throw input_error("segment endpoints must be finite");
    if (obstacle.kind == Obstacle::Kind::Sphere)
        return std::max(0.0, point_segment_distance(obstacle.center, seg) - obstacle.radius);

    // Distance from a point moving along the segment to the solid box is
    // convex in the segment parameter; ternary search to 1e-9 interval width.
    const Vec3 d = seg.b - seg.a;
    auto f = [&](double t) { return point_obstacle_distance(seg.a + t * d, obstacle); };
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-9) {
        const double third = (hi - lo) / 3.0;
        const double m1 = lo + third, m2 = hi - third;
        if (f(m1) <= f(m2))
            hi = m2;
        else
            lo = m1;
    }
    return f(0.5 * (lo + hi));
}

double segment_segment_distance(const Segment& s1, const Segment& s2) {
    // Closest points of two segments (Ericson, Real-Time Collision Detection 5.1.9).
    const Vec3 d1 = s1.b - s1.a;
    const Vec3 d2 = s2.b - s2.a;
    const Vec3 r = s1.a - s2.a;
    const double a = d1.norm2(), e = d2.norm2(), f = d2.dot(r);
    double s = 0.0, t = 0.0;
    constexpr double eps = 1e-30;
    if (a <= eps && e <= eps) {
        return r.norm();
    } else if (a <= eps) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e <= eps) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            if (denom > eps)
                s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return ((s1.a + s * d1) - (s2.a + t * d2)).norm();
}

namespace {
// Lexicographic segment comparison; capsule-capsule distance is computed in
// canonical argument order so it is exactly symmetric.
bool segment_less(const Segment& x, const Segment& y) {
    const double* px = &x.a.x;
    const double* py = &y.a.x;
    for (int i = 0; i < 6; ++i) {
        if (px[i] < py[i]) return true;
        if (px[i] > py[i]) return false;
    }
    return false;
}
}  // namespace

double capsule_capsule_distance(const Segment& s1, double r1, const Segment& s2, double r2) {
    const double d = segment_less(s2, s1) ? segment_segment_distance(s2, s1)
                                          : segment_segment_distance(s1, s2);
    return d - (r1 + r2);
}

namespace {

struct LinkPoses {
    std::vector<ControlPointSet> per_robot;
};

LinkPoses compute_poses(const Environment& env, std::span<const double> q) {
    if (q.size() != env.total_dof())
        throw input_error("configuration dimension " + std::to_string(q.size()) +
                          " does not match environment DoF " +
                          std::to_string(env.total_dof()));
    LinkPoses poses;
    poses.per_robot.reserve(env.robots.size());
    std::size_t off = 0;
    for (const auto& robot : env.robots) {
        poses.per_robot.push_back(forward_kinematics(robot, q.subspan(off, robot.dof())));
        off += robot.dof();
    }
    return poses;
}

// Surface distance of one capsule against one obstacle.
double capsule_obstacle_surface(const LinkPose& lp, const Obstacle& ob) {
    return segment_primitive_distance({lp.seg_start, lp.seg_end}, ob) - lp.capsule_radius;
}

}  // namespace

CollisionLabel check_collision(const Environment& env, std::span<const double> q) {
    const LinkPoses poses = compute_poses(env, q);

    // Link vs obstacle, with a bounding-sphere reject before the exact test.
    for (const auto& cps : poses.per_robot) {
        for (const LinkPose& lp : cps.links) {
            const Segment seg{lp.seg_start, lp.seg_end};
            for (const Obstacle& ob : env.obstacles) {
                const double reject =
                    point_segment_distance(ob.center, seg) - ob.bounding_radius();
                if (reject > lp.capsule_radius) continue;
                if (capsule_obstacle_surface(lp, ob) <= 0.0) return {+1};
            }
        }
    }

    // Links of different robots, all pairs.
    for (std::size_t r1 = 0; r1 < poses.per_robot.size(); ++r1) {
        for (std::size_t r2 = r1 + 1; r2 < poses.per_robot.size(); ++r2) {
            for (const LinkPose& l1 : poses.per_robot[r1].links) {
                for (const LinkPose& l2 : poses.per_robot[r2].links) {
                    if (capsule_capsule_distance({l1.seg_start, l1.seg_end}, l1.capsule_radius,
                                                 {l2.seg_start, l2.seg_end},
                                                 l2.capsule_radius) <= 0.0)
                        return {+1};
                }
            }
        }
    }

    // Non-adjacent links of the same robot; adjacent ones share a joint.
    for (const auto& cps : poses.per_robot) {
        const auto& links = cps.links;
        for (std::size_t i = 0; i + 2 < links.size(); ++i) {
            for (std::size_t j = i + 2; j < links.size(); ++j) {
                if (capsule_capsule_distance({links[i].seg_start, links[i].seg_end},
                                             links[i].capsule_radius,
                                             {links[j].seg_start, links[j].seg_end},
                                             links[j].capsule_radius) <= 0.0)
                    return {+1};
            }
        }
    }
    return {-1};
}

double collision_margin(const Environment& env, std::span<const double> q) {
    const LinkPoses poses = compute_poses(env, q);
    double margin = std::numeric_limits<double>::infinity();

    for (const auto& cps : poses.per_robot)
        for (const LinkPose& lp : cps.links)
            for (const Obstacle& ob : env.obstacles)
                margin = std::min(margin, capsule_obstacle_surface(lp, ob));

    for (std::size_t r1 = 0; r1 < poses.per_robot.size(); ++r1)
        for (std::size_t r2 = r1 + 1; r2 < poses.per_robot.size(); ++r2)
            for (const LinkPose& l1 : poses.per_robot[r1].links)
                for (const LinkPose& l2 : poses.per_robot[r2].links)
                    margin = std::min(
                        margin, capsule_capsule_distance({l1.seg_start, l1.seg_end},
                                                         l1.capsule_radius,
                                                         {l2.seg_start, l2.seg_end},
                                                         l2.capsule_radius));

    for (const auto& cps : poses.per_robot) {
        const auto& links = cps.links;
        for (std::size_t i = 0; i + 2 < links.size(); ++i)
            for (std::size_t j = i + 2; j < links.size(); ++j)
                margin = std::min(
                    margin, capsule_capsule_distance({links[i].seg_start, links[i].seg_end},
                                                     links[i].capsule_radius,
                                                     {links[j].seg_start, links[j].seg_end},
                                                     links[j].capsule_radius));
    }
    return margin;
}

void sample_configuration(const Environment& env, Rng& rng, std::span<double> out) {
    std::size_t k = 0;
    for (const auto& robot : env.robots)
        for (const auto& link : robot.links) out[k++] = rng.uniform(link.limit_lo, link.limit_hi);
}

double measure_collision_density(const Environment& env, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw input_error("density sample count must be >= 1");
    const std::size_t dof = env.total_dof();
    std::int64_t hits = 0;
    const std::int64_t nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) reduction(+ : hits)
    for (std::int64_t i = 0; i < nn; ++i) {
        Rng rng = substream(seed, "density", static_cast<std::uint64_t>(i));
        std::vector<double> q(dof);
        sample_configuration(env, rng, q);
        if (check_collision(env, q).value > 0) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(n);
}

Environment generate_environment(std::size_t n_robots, std::size_t n_obstacles,
                                 std::uint64_t seed, Placement placement) {
    if (n_robots < 1) throw input_error("n_robots must be >= 1");

    Environment env;
    env.seed = seed;

    const Aabb& wb = env.workspace_bounds;
    std::vector<Vec3> bases;
    Rng base_rng = substream(seed, "robot-base");
    for (std::size_t i = 0; i < n_robots; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
            const Vec3 cand{base_rng.uniform(wb.min.x, wb.max.x),
                            base_rng.uniform(wb.min.y, wb.max.y),
                            base_rng.uniform(wb.min.z, wb.max.z)};
            bool ok = true;
            for (const Vec3& prev : bases) {
                const double dist = (cand - prev).norm();
                if (placement == Placement::Far && dist < kFarMinSpacing) ok = false;
                if (placement == Placement::Close && dist > kCloseMaxSpacing) ok = false;
            }
            if (ok) {
                bases.push_back(cand);
                placed = true;
            }
        }
        if (!placed)
            throw generation_error(
                placement == Placement::Far
                    ? "robot base placement infeasible: minimum inter-base spacing 1.5 m"
                    : "robot base placement infeasible: maximum inter-base spacing 0.8 m");
    }
    for (const Vec3& base : bases) {
        RobotChainSpec r = default_desk_robot();
        r.base_position = base;
        env.robots.push_back(std::move(r));
    }

    for (std::size_t i = 0; i < n_obstacles; ++i) {
        Rng rng = substream(seed, "obstacle", i);
        Obstacle ob;
        ob.center = {rng.uniform(wb.min.x, wb.max.x), rng.uniform(wb.min.y, wb.max.y),
                     rng.uniform(wb.min.z, wb.max.z)};
        if (i % 2 == 0) {
            ob.kind = Obstacle::Kind::Box;
            ob.half_extents = {rng.uniform(0.05, 0.25), rng.uniform(0.05, 0.25),
                               rng.uniform(0.05, 0.25)};
            ob.orientation = random_quaternion(rng);
        } else {
            ob.kind = Obstacle::Kind::Sphere;
            ob.radius = rng.uniform(0.05, 0.25);
        }
        env.obstacles.push_back(ob);
    }

    env.validate();
    return env;
}

namespace {

nlohmann::ordered_json vec3_json(const Vec3& v) {
    return nlohmann::ordered_json::array({v.x, v.y, v.z});
}

nlohmann::ordered_json quat_json(const Quat& q) {
    return nlohmann::ordered_json::array({q.w, q.x, q.y, q.z});
}

Vec3 vec3_from(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) throw input_error("expected 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Quat quat_from(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 4) throw input_error("expected 4-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

}  // namespace

std::string environment_to_json(const Environment& env) {
    nlohmann::ordered_json j;
    j["seed"] = env.seed;
    j["workspace_bounds"] = {{"min", vec3_json(env.workspace_bounds.min)},
                             {"max", vec3_json(env.workspace_bounds.max)}};
    j["robots"] = nlohmann::ordered_json::array();
    for (const auto& r : env.robots) {
        nlohmann::ordered_json links = nlohmann::ordered_json::array();
        for (const auto& l : r.links)
            links.push_back({{"joint_axis", vec3_json(l.joint_axis)},
                             {"link_offset", vec3_json(l.link_offset)},
                             {"capsule_radius", l.capsule_radius}});
        j["robots"].push_back({{"base_position", vec3_json(r.base_position)},
                               {"base_orientation", quat_json(r.base_orientation)},
                               {"links", std::move(links)}});
    }
    j["obstacles"] = nlohmann::ordered_json::array();
    for (const auto& o : env.obstacles) {
        if (o.kind == Obstacle::Kind::Sphere)
            j["obstacles"].push_back(
                {{"kind", "sphere"}, {"center", vec3_json(o.center)}, {"radius", o.radius}});
        else
            j["obstacles"].push_back({{"kind", "box"},
                                      {"center", vec3_json(o.center)},
                                      {"half_extents", vec3_json(o.half_extents)},
                                      {"orientation", quat_json(o.orientation)}});
    }
    return j.dump(2) + "\n";
}

Environment environment_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw input_error(std::string("environment JSON parse error: ") + e.what());
    }
    Environment env;
    env.seed = j.at("seed").get<std::uint64_t>();
    env.workspace_bounds.min = vec3_from(j.at("workspace_bounds").at("min"));
    env.workspace_bounds.max = vec3_from(j.at("workspace_bounds").at("max"));
    for (const auto& rj : j.at("robots")) {
        RobotChainSpec r;
        r.base_position = vec3_from(rj.at("base_position"));
        r.base_orientation = quat_from(rj.at("base_orientation"));
        for (const auto& lj : rj.at("links")) {
            LinkSpec l;
            l.joint_axis = vec3_from(lj.at("joint_axis"));
            l.link_offset = vec3_from(lj.at("link_offset"));
            l.capsule_radius = lj.at("capsule_radius").get<double>();
            r.links.push_back(l);
        }
        env.robots.push_back(std::move(r));
    }
    for (const auto& oj : j.at("obstacles")) {
        Obstacle o;
        const std::string kind = oj.at("kind").get<std::string>();
        o.center = vec3_from(oj.at("center"));
        if (kind == "sphere") {
            o.kind = Obstacle::Kind::Sphere;
            o.radius = oj.at("radius").get<double>();
        } else if (kind == "box") {
            o.kind = Obstacle::Kind::Box;
            o.half_extents = vec3_from(oj.at("half_extents"));
            o.orientation = quat_from(oj.at("orientation"));
        } else {
            throw input_error("unknown obstacle kind: " + kind);
        }
        env.obstacles.push_back(o);
    }
    env.validate();
    return env;
}

void save_environment(const Environment& env, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw input_error("cannot open for writing: " + path);
    f << environment_to_json(env);
}

Environment load_environment(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw input_error("cannot open environment file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return environment_from_json(ss.str());
}

}  // namespace cspace
