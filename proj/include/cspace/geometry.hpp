#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cspace/common.hpp"
#include "cspace/kinematics.hpp"
#include "cspace/rng.hpp"

namespace cspace {

struct Obstacle {
    enum class Kind { Sphere, Box };
    Kind kind = Kind::Sphere;
    Vec3 center{0, 0, 0};
    double radius = 0.1;                    // sphere
    Vec3 half_extents{0.1, 0.1, 0.1};       // box
    Quat orientation = Quat::identity();    // box

    void validate() const;
    // Radius of the bounding sphere around center (used as a cheap reject).
    double bounding_radius() const;
};

struct Aabb {
    Vec3 min{-1.5, -1.5, -1.5};
    Vec3 max{1.5, 1.5, 1.5};
};

struct Environment {
    std::vector<RobotChainSpec> robots;
    std::vector<Obstacle> obstacles;
    std::uint64_t seed = 0;
    Aabb workspace_bounds;

    std::size_t total_dof() const { return cspace::total_dof(robots); }
    std::size_t feature_dim() const { return cspace::feature_dim(robots); }
    void validate() const;
};

// -1 free, +1 collision.
struct CollisionLabel {
    int value = -1;
};

enum class Placement { Far, Close };

// Deterministic per seed. Robot bases are uniformly placed with pairwise
// spacing >= 1.5 m (Far) or <= 0.8 m (Close); obstacle kinds alternate
// box/sphere starting with box. Throws generation_error naming the violated
// constraint after 10^4 rejected draws.
Environment generate_environment(std::size_t n_robots, std::size_t n_obstacles,
                                 std::uint64_t seed, Placement placement);

struct Segment {
    Vec3 a, b;
};

// Exact Euclidean distance from a segment to the obstacle surface, clamped
// at 0 (0 means touching or overlapping the solid primitive).
double segment_primitive_distance(const Segment& seg, const Obstacle& obstacle);

// Distance between capsule surfaces (may be negative when overlapping).
// Symmetric in its arguments.
double capsule_capsule_distance(const Segment& s1, double r1, const Segment& s2, double r2);

double point_segment_distance(const Vec3& p, const Segment& seg);
double segment_segment_distance(const Segment& s1, const Segment& s2);
double point_obstacle_distance(const Vec3& p, const Obstacle& obstacle);

// +1 iff any link capsule touches any obstacle, any link of another robot,
// or any non-adjacent link of the same robot. Adjacent links of one chain
// share a joint and are never tested. Contact counts as collision.
CollisionLabel check_collision(const Environment& env, std::span<const double> q);

// Signed clearance of the tightest pair: min over all tested pairs of
// (surface distance). <= 0 means collision. check_collision is
// sign(margin) with early exit; this variant never exits early.
double collision_margin(const Environment& env, std::span<const double> q);

// Fraction of n uniformly sampled configurations labeled +1.
double measure_collision_density(const Environment& env, std::size_t n, std::uint64_t seed);

// Environment JSON (schema documented in README).
std::string environment_to_json(const Environment& env);
Environment environment_from_json(const std::string& text);
void save_environment(const Environment& env, const std::string& path);
Environment load_environment(const std::string& path);

// Uniform configuration draw within joint limits; row ordering matches the
// robot declaration order.
void sample_configuration(const Environment& env, Rng& rng, std::span<double> out);

}  // namespace cspace
