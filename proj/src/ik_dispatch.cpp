#include "armtwin/errors.hpp"
#include "armtwin/ik.hpp"

namespace armtwin {

IkSolutionSet ik_solve(const RobotModel& model, const Transform& target, const JointVector& seed) {
    switch (model.solver_hint) {
        case SolverHint::planar2r:
            return ik_planar_model(model, target.position.head<2>());
        case SolverHint::analytic6dof:
            return ik_analytic_6dof(model, target);
        case SolverHint::numeric:
            // Fewer than six joints cannot hold an arbitrary orientation.
            if (model.dof() < 6) return ik_numeric_dls(model, IkTarget::position_only(target.position), seed);
            return ik_numeric_dls(model, IkTarget::pose(target), seed);
    }
    throw WrongSolverHint("unsupported solver hint");
}

IkSolutionSet ik_solve_position(const RobotModel& model, const Eigen::Vector3d& target, const JointVector& seed) {
    switch (model.solver_hint) {
        case SolverHint::planar2r:
            return ik_planar_model(model, target.head<2>());
        case SolverHint::analytic6dof:
            throw WrongSolverHint("analytic6dof model '" + model.name + "' needs a full pose target");
        case SolverHint::numeric:
            return ik_numeric_dls(model, IkTarget::position_only(target), seed);
    }
    throw WrongSolverHint("unsupported solver hint");
}

}  // namespace armtwin
