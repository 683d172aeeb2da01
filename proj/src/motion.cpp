#include "armtwin/motion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "armtwin/errors.hpp"
#include "armtwin/kinematics.hpp"

namespace armtwin {

namespace {

double blend(double s) { return s * s * (3.0 - 2.0 * s); }
double blend_rate(double s) { return 6.0 * s * (1.0 - s); }

}  // namespace

Trajectory plan_joint_trajectory(const JointVector& from, const JointVector& to, double duration, double dt) {
    if (from.size() != to.size()) {
        throw DimensionMismatch("trajectory endpoints have " + std::to_string(from.size()) + " and " +
                                std::to_string(to.size()) + " joints");
    }
    if (!(duration > 0.0) || !(dt > 0.0) || !std::isfinite(duration) || !std::isfinite(dt)) {
        throw NonPositiveDuration("trajectory duration and dt must be positive and finite");
    }
    if (dt > duration) throw NonPositiveDuration("trajectory dt must not exceed the duration");
    if (!from.allFinite() || !to.allFinite()) throw std::invalid_argument("trajectory endpoints must be finite");

    Trajectory traj{from, to, duration, dt, {}};
    const auto steps = static_cast<std::size_t>(std::floor(duration / dt));
    traj.waypoints.reserve(steps + 2);
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        // Drop a sample that would land on (or within rounding of) the endpoint.
        if (k > 0 && duration - t <= 1e-9 * dt) break;
        traj.waypoints.push_back({t, sample_trajectory(traj, t), sample_velocity(traj, t)});
    }
    traj.waypoints.push_back({duration, to, JointVector::Zero(to.size())});
    return traj;
}

Trajectory plan_joint_trajectory(const RobotModel& model, const JointVector& from, const JointVector& to,
                                 double duration, double dt) {
    if (static_cast<std::size_t>(from.size()) != model.dof() || static_cast<std::size_t>(to.size()) != model.dof()) {
        throw DimensionMismatch("trajectory endpoints do not match model '" + model.name + "'");
    }
    if (!model.within_limits(from) || !model.within_limits(to)) {
        throw std::invalid_argument("trajectory endpoints must lie within joint limits");
    }
    return plan_joint_trajectory(from, to, duration, dt);
}

JointVector sample_trajectory(const Trajectory& traj, double t) {
    if (!(t > 0.0)) return traj.from;
    if (t >= traj.duration) return traj.to;
    return traj.from + blend(t / traj.duration) * (traj.to - traj.from);
}

JointVector sample_velocity(const Trajectory& traj, double t) {
    if (!(t > 0.0) || t >= traj.duration) return JointVector::Zero(traj.from.size());
    return (blend_rate(t / traj.duration) / traj.duration) * (traj.to - traj.from);
}

std::vector<std::string> check_trajectory(const Trajectory& traj, const RobotModel* model) {
    std::vector<std::string> out;
    const auto& w = traj.waypoints;
    if (w.empty()) {
        out.emplace_back("no waypoints");
        return out;
    }
    if (w.front().time != 0.0) out.emplace_back("first waypoint is not at t = 0");
    if (w.back().time != traj.duration) out.emplace_back("last waypoint is not at t = duration");
    const JointVector delta = (traj.to - traj.from).cwiseAbs();
    for (std::size_t k = 0; k + 1 < w.size(); ++k) {
        const double h = w[k + 1].time - w[k].time;
        if (!(h > 0.0)) {
            out.push_back("times not strictly increasing at waypoint " + std::to_string(k + 1));
            continue;
        }
        // Trapezoid rule is off by exactly |dq| (h/T)^3 for the cubic blend.
        const double r = h / traj.duration;
        const JointVector tol = (1e-6 + 1e-12) * JointVector::Ones(delta.size()) + delta * (r * r * r);
        const JointVector mismatch =
            ((w[k + 1].q - w[k].q) - 0.5 * h * (w[k].qdot + w[k + 1].qdot)).cwiseAbs();
        if ((mismatch.array() > tol.array()).any()) {
            std::ostringstream os;
            os << "segment " << k << " position change inconsistent with velocities (max mismatch "
               << mismatch.maxCoeff() << ")";
            out.push_back(os.str());
        }
    }
    if (model) {
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (!model->within_limits(w[k].q)) {
                out.push_back("waypoint " + std::to_string(k) + " outside joint limits");
            }
        }
    }
    return out;
}

Eigen::Vector3d standoff_point(const RobotModel& model, const Eigen::Vector3d& target, double standoff,
                               const JointVector& current) {
    const auto frames = chain_frames(model, current);
    // Joint n-1 rotates about the z axis of frame n-2.
    const std::size_t anchor_frame = model.dof() >= 2 ? model.dof() - 2 : 0;
    const Eigen::Vector3d origin = frames[anchor_frame].position;
    const Eigen::Vector3d dir = target - origin;
    const double dist = dir.norm();
    if (dist < 1e-6) {
        std::ostringstream os;
        os << "target is " << dist << " m from the approach origin; approach direction undefined";
        throw TargetAtBase(os.str());
    }
    return target - standoff * (dir / dist);
}

JointVector track_target_step(const RobotModel& model, const TrackingState& state, const JointVector& current,
                              double max_step) {
    if (!state.enabled) throw std::invalid_argument("tracking is not enabled");
    if (!(max_step > 0.0)) throw std::invalid_argument("max_step must be positive");
    if (!(state.standoff >= 0.0) || !state.target.allFinite()) {
        throw std::invalid_argument("tracking target must be finite with standoff >= 0");
    }
    const Eigen::Vector3d goal = standoff_point(model, state.target, state.standoff, current);

    DlsOptions opts;
    opts.max_iters = 5;
    JointVector refined;
    try {
        refined = ik_numeric_dls(model, IkTarget::position_only(goal), current, opts).solutions.front().q;
    } catch (const NoConvergence& e) {
        refined = e.best();
    }
    // Scale the whole move rather than clipping joints one by one, so the step
    // keeps the direction DLS chose. Halve it until it actually gets closer.
    JointVector delta = refined - current;
    const double largest = delta.cwiseAbs().maxCoeff();
    if (largest > max_step) delta *= max_step / largest;
    const double before = (forward_kinematics(model, current).position - goal).norm();
    for (int halving = 0; halving < 8; ++halving) {
        const JointVector next = model.clamp(current + delta);
        if ((forward_kinematics(model, next).position - goal).norm() < before) return next;
        delta *= 0.5;
    }
    return current;
}

}  // namespace armtwin
