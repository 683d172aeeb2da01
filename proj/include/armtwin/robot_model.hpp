#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "armtwin/geometry.hpp"

namespace armtwin {

/// Standard (distal) DH row. Joint i contributes
///   T(q) = Rz(q + theta_offset) * Tz(d) * Tx(a) * Rx(alpha)
/// Lengths in meters, angles in radians.
struct DHRow {
    double a = 0.0;
    double alpha = 0.0;
    double d = 0.0;
    double theta_offset = 0.0;

    bool operator==(const DHRow&) const = default;
};

struct JointLimit {
    double min = -kPi;
    double max = kPi;

    bool contains(double q) const { return q >= min && q <= max; }
    double clamp(double q) const { return q < min ? min : (q > max ? max : q); }

    bool operator==(const JointLimit&) const = default;
};

struct Joint {
    DHRow dh;
    JointLimit limit;

    bool operator==(const Joint&) const = default;
};

enum class SolverHint { planar2r, analytic6dof, numeric };

std::string_view to_string(SolverHint hint);

inline constexpr std::size_t kMaxJoints = 12;

// Axes 4, 5, 6 of an analytic6dof arm must meet within this distance (m).
inline constexpr double kWristIntersectionTol = 1e-9;

/// A named serial chain of revolute joints. Treated as immutable once built;
/// share it as std::shared_ptr<const RobotModel>.
struct RobotModel {
    std::string name;
    std::vector<Joint> joints;
    SolverHint solver_hint = SolverHint::numeric;
    /// End-effector frame relative to the last joint frame, kept as written
    /// (position + rpy) so it serializes back unchanged.
    Pose tool_offset;

    std::size_t dof() const { return joints.size(); }
    Transform tool_transform() const { return pose_to_transform(tool_offset); }

    bool within_limits(const JointVector& q) const;
    JointVector clamp(const JointVector& q) const;

    bool operator==(const RobotModel& other) const;
};

/// One invariant violation: the offending field and the rule it breaks.
struct Violation {
    std::string field;
    std::string rule;

    std::string to_string() const { return field + ": " + rule; }
};

/// Returns every violated invariant; empty iff the model is valid.
std::vector<Violation> validate_model(const RobotModel& model);

/// Parses a robot description document. Throws SyntaxError, SchemaError or
/// InvariantError.
RobotModel parse_robot_description(std::string_view text);

/// Reads and parses a robot file from disk. Throws std::runtime_error when
/// the file cannot be read, otherwise as parse_robot_description.
RobotModel load_robot_file(const std::string& path);

/// Serializes to the robot file schema; parse_robot_description inverts it exactly.
std::string serialize_robot_description(const RobotModel& model);

/// Embedded copies of the shipped robots/ files: planar2r, ur5, tracker4dof.
RobotModel builtin_preset(std::string_view name);
std::vector<std::string> builtin_preset_names();

/// Preset name or path to a robot file.
RobotModel resolve_robot(const std::string& preset_or_path);

}  // namespace armtwin
