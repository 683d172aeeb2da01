#pragma once

#include <vector>

#include <Eigen/Core>

#include "armtwin/geometry.hpp"
#include "armtwin/ik.hpp"
#include "armtwin/robot_model.hpp"

namespace armtwin {

struct Waypoint {
    double time = 0.0;
    JointVector q;
    JointVector qdot;
};

/// Joint-space cubic blend from `from` to `to` with zero end velocities:
///   q(t) = from + (3 s^2 - 2 s^3)(to - from),  s = t / duration
/// The waypoints are samples of that closed form; sample_trajectory evaluates
/// the closed form itself.
struct Trajectory {
    JointVector from;
    JointVector to;
    double duration = 0.0;
    double dt = 0.0;
    std::vector<Waypoint> waypoints;
};

/// Throws DimensionMismatch, NonPositiveDuration, std::invalid_argument (non-finite input).
Trajectory plan_joint_trajectory(const JointVector& from, const JointVector& to, double duration, double dt);

/// Same, additionally requiring both endpoints inside the model's joint limits.
Trajectory plan_joint_trajectory(const RobotModel& model, const JointVector& from, const JointVector& to,
                                 double duration, double dt);

/// Exact cubic position at t, clamped to [0, duration]. t >= duration returns `to` bit-exactly.
JointVector sample_trajectory(const Trajectory& traj, double t);

/// Exact cubic velocity at t (zero outside [0, duration]).
JointVector sample_velocity(const Trajectory& traj, double t);

/// Lists broken Trajectory invariants (empty when valid). Passing a model also
/// checks every waypoint against its joint limits.
std::vector<std::string> check_trajectory(const Trajectory& traj, const RobotModel* model = nullptr);

inline constexpr double kDefaultStandoff = 0.10;
inline constexpr double kDefaultMaxStep = 0.05;

struct TrackingState {
    Eigen::Vector3d target = Eigen::Vector3d::Zero();
    double standoff = kDefaultStandoff;
    bool enabled = false;
    JointVector last_command;
};

/// Point the end effector should reach: target pulled back by `standoff`
/// along the direction from the second-to-last joint's origin to the target.
/// Throws TargetAtBase when the target is within 1e-6 m of that origin.
Eigen::Vector3d standoff_point(const RobotModel& model, const Eigen::Vector3d& target, double standoff,
                               const JointVector& current);

/// One tracking tick: at most 5 DLS iterations from `current` toward the
/// standoff point. The move is scaled so no joint changes by more than
/// max_step and shortened until it reduces the distance to that point;
/// returns `current` when no shortened move helps.
/// Throws TargetAtBase (caller keeps `current`), std::invalid_argument.
JointVector track_target_step(const RobotModel& model, const TrackingState& state, const JointVector& current,
                              double max_step = kDefaultMaxStep);

}  // namespace armtwin
