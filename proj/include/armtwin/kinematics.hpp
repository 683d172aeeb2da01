#pragma once

#include <vector>

#include "armtwin/geometry.hpp"
#include "armtwin/robot_model.hpp"

namespace armtwin {

/// Single standard-DH factor for joint angle q (theta_offset is added here).
Transform link_transform(const DHRow& row, double q);

/// Base-to-tool transform: product of all link transforms times the tool offset.
/// Throws DimensionMismatch when q.size() != model.dof().
Transform forward_kinematics(const RobotModel& model, const JointVector& q);

/// Frames 0..n of the chain (frame 0 is the base, frame n the last joint
/// frame, tool offset not applied). Joint i rotates about the z axis of frame i-1.
std::vector<Transform> chain_frames(const RobotModel& model, const JointVector& q);

/// Product of link transforms for joints [first, last) only, no tool offset.
Transform partial_chain(const RobotModel& model, const JointVector& q, std::size_t first,
                        std::size_t last);

}  // namespace armtwin
