#include "armtwin/twin/controller.hpp"

#include <cmath>
#include <sstream>

#include "armtwin/geometry.hpp"
#include "armtwin/ik.hpp"
#include "armtwin/kinematics.hpp"
#include "armtwin/twin/protocol.hpp"

namespace armtwin::twin {

using nlohmann::json;

std::string_view to_string(Mode mode) {
    switch (mode) {
        case Mode::idle: return "idle";
        case Mode::trajectory: return "trajectory";
        case Mode::tracking: return "tracking";
    }
    return "idle";
}

std::vector<std::string> joint_names(const RobotModel& model) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < model.dof(); ++i) names.push_back("joint" + std::to_string(i + 1));
    return names;
}

ControllerState make_controller(std::shared_ptr<const RobotModel> model, ControllerConfig config) {
    if (!model) throw std::invalid_argument("controller needs a robot model");
    if (!(config.rate_hz > 0.0) || !(config.max_step > 0.0) || !(config.pose_speed > 0.0) ||
        !(config.min_pose_duration > 0.0)) {
        throw std::invalid_argument("controller configuration values must be positive");
    }
    ControllerState ctrl;
    ctrl.current = model->clamp(JointVector::Zero(static_cast<Eigen::Index>(model->dof())));
    ctrl.tracking.last_command = ctrl.current;
    ctrl.model = std::move(model);
    ctrl.config = config;
    return ctrl;
}

namespace {

const json& field(const json& msg, const char* key) {
    auto it = msg.find(key);
    if (it == msg.end()) throw BadPayload(std::string("missing field '") + key + "'");
    return *it;
}

double finite_number(const json& msg, const char* key) {
    const json& v = field(msg, key);
    if (!v.is_number()) throw BadPayload(std::string("field '") + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw BadPayload(std::string("field '") + key + "' must be finite");
    return d;
}

std::optional<double> optional_number(const json& msg, const char* key) {
    if (!msg.contains(key)) return std::nullopt;
    return finite_number(msg, key);
}

void require_object(const json& msg) {
    if (!msg.is_object()) throw BadPayload("command payload must be a JSON object");
}

void apply_pose(ControllerState& ctrl, const json& msg, double now) {
    PoseCommand cmd;
    cmd.x = finite_number(msg, "x");
    cmd.psi = finite_number(msg, "psi");
    cmd.y = finite_number(msg, "y");
    cmd.theta = finite_number(msg, "theta");
    cmd.z = finite_number(msg, "z");
    cmd.phi = finite_number(msg, "phi");
    const Transform target = pose_to_transform(pose_from_command(cmd));

    IkSolutionSet set;
    try {
        set = ik_solve(*ctrl.model, target, ctrl.current);
    } catch (const Unreachable& e) {
        std::ostringstream os;
        os << "pose unreachable: " << e.what() << " (residual " << e.deficit() << " m)";
        throw IkFailure(os.str());
    } catch (const NoConvergence& e) {
        std::ostringstream os;
        os << "pose unreachable: " << e.what() << " (residual " << e.residual() << ")";
        throw IkFailure(os.str());
    } catch (const Error& e) {
        throw IkFailure(std::string("pose unreachable: ") + e.what());
    }
    const JointVector goal = select_solution(set, ctrl.current);

    const double largest = (goal - ctrl.current).cwiseAbs().maxCoeff();
    const double duration = std::max(largest / ctrl.config.pose_speed, ctrl.config.min_pose_duration);
    const double dt = std::min(1.0 / ctrl.config.rate_hz, duration);
    Trajectory traj = plan_joint_trajectory(*ctrl.model, ctrl.current, goal, duration, dt);

    ctrl.trajectory = std::move(traj);
    ctrl.trajectory_start = now;
    ctrl.mode = Mode::trajectory;
}

void apply_joint(ControllerState& ctrl, const json& msg) {
    const json& index = field(msg, "index");
    if (!index.is_number_integer()) throw BadPayload("field 'index' must be an integer");
    const auto dof = static_cast<std::int64_t>(ctrl.model->dof());
    const std::int64_t i = index.is_number_unsigned() ? static_cast<std::int64_t>(std::min<std::uint64_t>(
                                                            index.get<std::uint64_t>(), static_cast<std::uint64_t>(dof)))
                                                      : index.get<std::int64_t>();
    if (i < 0 || i >= dof) {
        throw BadPayload("joint index " + index.dump() + " out of range [0, " + std::to_string(dof - 1) + "]");
    }
    const double position = finite_number(msg, "position");
    const auto& limit = ctrl.model->joints[static_cast<std::size_t>(i)].limit;
    ctrl.current[static_cast<Eigen::Index>(i)] = limit.clamp(position);
    ctrl.trajectory.reset();
    ctrl.mode = Mode::idle;
}

void apply_track(ControllerState& ctrl, const json& msg) {
    bool enable = true;
    if (auto it = msg.find("enable"); it != msg.end()) {
        if (!it->is_boolean()) throw BadPayload("field 'enable' must be a boolean");
        enable = it->get<bool>();
    }
    if (!enable) {
        ctrl.tracking.enabled = false;
        if (ctrl.mode == Mode::tracking) ctrl.mode = Mode::idle;
        return;
    }
    const Eigen::Vector3d target(finite_number(msg, "x"), finite_number(msg, "y"), finite_number(msg, "z"));
    const double standoff = optional_number(msg, "standoff").value_or(ctrl.tracking.standoff);
    if (standoff < 0.0) throw BadPayload("field 'standoff' must be >= 0");
    ctrl.tracking.target = target;
    ctrl.tracking.standoff = standoff;
    ctrl.tracking.enabled = true;
    ctrl.trajectory.reset();
    ctrl.mode = Mode::tracking;
}

}  // namespace

void apply_command(ControllerState& ctrl, std::string_view topic, const json& msg, double now) {
    require_object(msg);
    // Work on a copy so a throw leaves the caller's state untouched.
    ControllerState next = ctrl;
    if (topic == topics::cmd_joint) {
        apply_joint(next, msg);
    } else if (topic == topics::cmd_pose) {
        apply_pose(next, msg, now);
    } else if (topic == topics::cmd_track) {
        apply_track(next, msg);
    } else if (topic == topics::cmd_stop) {
        next.trajectory.reset();
        next.mode = Mode::idle;
    } else {
        throw BadPayload("'" + std::string(topic) + "' is not a command topic");
    }
    ctrl = std::move(next);
}

void tick(ControllerState& ctrl, double now) {
    switch (ctrl.mode) {
        case Mode::idle:
            return;
        case Mode::trajectory: {
            const double elapsed = now - ctrl.trajectory_start;
            ctrl.current = sample_trajectory(*ctrl.trajectory, elapsed);
            if (elapsed >= ctrl.trajectory->duration) {
                ctrl.trajectory.reset();
                ctrl.mode = Mode::idle;
            }
            return;
        }
        case Mode::tracking:
            try {
                ctrl.current = track_target_step(*ctrl.model, ctrl.tracking, ctrl.current, ctrl.config.max_step);
                ctrl.tracking.last_command = ctrl.current;
            } catch (const TargetAtBase&) {
                // Direction undefined this tick; hold position.
            }
            return;
    }
}

json joint_state_payload(const ControllerState& ctrl, double now) {
    json positions = json::array();
    for (Eigen::Index i = 0; i < ctrl.current.size(); ++i) positions.push_back(ctrl.current[i]);
    return {{"name", joint_names(*ctrl.model)}, {"position", std::move(positions)}, {"stamp", now}};
}

}  // namespace armtwin::twin
