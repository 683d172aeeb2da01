#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "armtwin/geometry.hpp"
#include "armtwin/robot_model.hpp"

namespace armtwin {

/// Identifies which sign was taken for each +-sqrt in a closed-form derivation.
/// Ordinals order labels for deterministic tie-breaking.
struct BranchLabel {
    enum class Kind { planar, analytic6dof, numeric };
    enum class Shoulder { left, right };
    enum class Elbow { up, down };
    enum class Wrist { noflip, flip };

    Kind kind = Kind::numeric;
    Shoulder shoulder = Shoulder::left;
    Elbow elbow = Elbow::up;
    Wrist wrist = Wrist::noflip;

    static BranchLabel planar(Elbow e) { return {Kind::planar, Shoulder::left, e, Wrist::noflip}; }
    static BranchLabel analytic(Shoulder s, Elbow e, Wrist w) { return {Kind::analytic6dof, s, e, w}; }
    static BranchLabel numeric() { return {}; }

    int ordinal() const;
    std::string to_string() const;

    bool operator==(const BranchLabel&) const = default;
};

struct IkSolution {
    JointVector q;
    BranchLabel label;
};

struct IkSolutionSet {
    std::vector<IkSolution> solutions;
    std::optional<std::size_t> selected;
    /// Branches that solved but were discarded, one reason each.
    std::vector<std::string> dropped;
    /// DLS iterations used (numeric solver only).
    int iterations = 0;

    bool empty() const { return solutions.empty(); }
    std::size_t size() const { return solutions.size(); }
};

// Verification tolerances every returned solution satisfies.
inline constexpr double kPlanarTol = 1e-9;
inline constexpr double kSolutionPosTol = 1e-6;
inline constexpr double kSolutionRotTol = 1e-6;

/// Closed-form 2-link planar arm. Returns one solution per distinct elbow
/// branch (one at full extension/fold, two otherwise).
/// Throws Unreachable with the distance deficit when the target is outside
/// the annulus |l1 - l2| <= r <= l1 + l2.
IkSolutionSet ik_planar_2r(double l1, double l2, const Eigen::Vector2d& target);

/// Position-only IK for a planar2r model (x, y of the target; z ignored).
/// Applies theta offsets, the in-plane tool offset and joint limits.
IkSolutionSet ik_planar_model(const RobotModel& model, const Eigen::Vector2d& target);

/// Closed-form IK for a spherical-wrist 6-DOF arm: wrist center -> q1..q3,
/// residual wrist rotation -> q4..q6. Up to 8 solutions, each FK-verified.
/// Throws WrongSolverHint, SingularTarget, OutOfWorkspace, NonOrthonormal.
IkSolutionSet ik_analytic_6dof(const RobotModel& model, const Transform& target);

struct DlsOptions {
    double lambda = 0.05;
    int max_iters = 200;
    double tol_pos = 1e-6;
    double tol_rot = 1e-6;
};

/// Position target with optional orientation constraint.
struct IkTarget {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    std::optional<Eigen::Matrix3d> rotation;

    static IkTarget position_only(const Eigen::Vector3d& p) { return {p, std::nullopt}; }
    static IkTarget pose(const Transform& t) { return {t.position, t.rotation}; }
};

/// Damped least squares on a central-difference Jacobian. Steps are clamped
/// to joint limits and only accepted when they reduce the residual.
/// Throws NoConvergence (best iterate + residual history), DimensionMismatch,
/// std::invalid_argument for non-positive options or an out-of-limit seed.
IkSolutionSet ik_numeric_dls(const RobotModel& model, const IkTarget& target, const JointVector& seed,
                             const DlsOptions& opts = {});

/// Numeric Jacobian (6 x n: linear rows then angular rows) by central differences.
Eigen::MatrixXd numeric_jacobian(const RobotModel& model, const JointVector& q, double step = 1e-6);

/// Dispatches on the model's solver hint. planar2r uses x, y only; numeric
/// arms with fewer than six joints solve for position only, seeded at `seed`.
IkSolutionSet ik_solve(const RobotModel& model, const Transform& target, const JointVector& seed);

/// Position-only IK. Throws WrongSolverHint for analytic6dof models, which
/// need a full pose.
IkSolutionSet ik_solve_position(const RobotModel& model, const Eigen::Vector3d& target, const JointVector& seed);

/// Picks the solution with least sum |dq_i| from `current`; ties go to the
/// lower branch ordinal. Records the choice in set.selected.
/// Throws EmptySet.
const JointVector& select_solution(IkSolutionSet& set, const JointVector& current);

}  // namespace armtwin
