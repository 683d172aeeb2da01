#pragma once

#include <vector>

#include <Eigen/Core>

#include "armtwin/ik.hpp"

namespace armtwin::detail {

// One elbow branch of a two-link planar sub-problem. theta2 is measured from
// link 1 to the DH x axis of link 2, i.e. with the link-2 angle offset removed.
struct PlanarBranch {
    double theta1;
    double theta2;
    BranchLabel::Elbow elbow;
    double residual;
};

// Link 2 points at angle theta2 + phi relative to link 1. Elbow "down" is the
// branch with positive sine of the inter-link angle.
std::vector<PlanarBranch> solve_planar(double l1, double l2, double phi, const Eigen::Vector2d& target);

}  // namespace armtwin::detail
