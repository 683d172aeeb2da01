#include "armtwin/kinematics.hpp"

#include <cmath>
#include <string>

#include "armtwin/errors.hpp"

namespace armtwin {

Transform link_transform(const DHRow& row, double q) {
    const double theta = q + row.theta_offset;
    const double ct = std::cos(theta), st = std::sin(theta);
    const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
    Transform t;
    t.rotation << ct, -st * ca, st * sa,
                  st, ct * ca, -ct * sa,
                  0.0, sa, ca;
    t.position << row.a * ct, row.a * st, row.d;
    return t;
}

namespace {

void check_dimension(const RobotModel& model, const JointVector& q) {
    if (static_cast<std::size_t>(q.size()) != model.dof()) {
        throw DimensionMismatch("joint vector has " + std::to_string(q.size()) + " entries, model '" +
                                model.name + "' has " + std::to_string(model.dof()) + " joints");
    }
}

}  // namespace

Transform partial_chain(const RobotModel& model, const JointVector& q, std::size_t first,
                        std::size_t last) {
    check_dimension(model, q);
    Transform t;
    for (std::size_t i = first; i < last && i < model.dof(); ++i) {
        t = t * link_transform(model.joints[i].dh, q[static_cast<Eigen::Index>(i)]);
    }
    return t;
}

Transform forward_kinematics(const RobotModel& model, const JointVector& q) {
    return partial_chain(model, q, 0, model.dof()) * model.tool_transform();
}

std::vector<Transform> chain_frames(const RobotModel& model, const JointVector& q) {
    check_dimension(model, q);
    std::vector<Transform> frames;
    frames.reserve(model.dof() + 1);
    frames.emplace_back();
    for (std::size_t i = 0; i < model.dof(); ++i) {
        frames.push_back(frames.back() * link_transform(model.joints[i].dh, q[static_cast<Eigen::Index>(i)]));
    }
    return frames;
}

}  // namespace armtwin
