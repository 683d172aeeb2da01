#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "armtwin/errors.hpp"
#include "armtwin/motion.hpp"
#include "armtwin/robot_model.hpp"

namespace armtwin::twin {

class BadPayload : public Error {
public:
    using Error::Error;
};

class IkFailure : public Error {
public:
    using Error::Error;
};

enum class Mode { idle, trajectory, tracking };
std::string_view to_string(Mode mode);

struct ControllerConfig {
    double rate_hz = 30.0;
    double max_step = kDefaultMaxStep;     // rad per tracking tick
    double pose_speed = 0.5;               // rad/s on the largest joint move
    double min_pose_duration = 0.5;        // s
};

/// Authoritative arm state. Mutated only through apply_command and tick.
struct ControllerState {
    std::shared_ptr<const RobotModel> model;
    ControllerConfig config;
    JointVector current;
    std::optional<Trajectory> trajectory;
    double trajectory_start = 0.0;
    TrackingState tracking;
    Mode mode = Mode::idle;
};

/// Starts idle at q = 0 clamped into the joint limits.
ControllerState make_controller(std::shared_ptr<const RobotModel> model, ControllerConfig config = {});

/// Executes one command-topic payload at time `now` (seconds).
///   /cmd/joint {"index", "position"}               slider: clamp, set, idle
///   /cmd/pose  {"x","psi","y","theta","z","phi"}    IK, select, plan, trajectory
///   /cmd/track {"x","y","z","standoff","enable"}    tracking on/off
///   /cmd/stop  {}                                    idle, trajectory cleared
/// Throws BadPayload or IkFailure; the state is untouched when it throws.
void apply_command(ControllerState& ctrl, std::string_view topic, const nlohmann::json& msg, double now);

/// Advances the active mode to time `now`.
void tick(ControllerState& ctrl, double now);

/// /joint_states payload: {"name": [...], "position": [...], "stamp": now}.
nlohmann::json joint_state_payload(const ControllerState& ctrl, double now);

std::vector<std::string> joint_names(const RobotModel& model);

}  // namespace armtwin::twin
