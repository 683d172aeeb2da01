#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "armtwin/errors.hpp"
#include "armtwin/ik.hpp"
#include "armtwin/kinematics.hpp"

namespace armtwin {

Eigen::MatrixXd numeric_jacobian(const RobotModel& model, const JointVector& q, double step) {
    const auto n = q.size();
    Eigen::MatrixXd jac(6, n);
    JointVector qp = q, qm = q;
    for (Eigen::Index i = 0; i < n; ++i) {
        qp[i] = q[i] + step;
        qm[i] = q[i] - step;
        const Transform tp = forward_kinematics(model, qp);
        const Transform tm = forward_kinematics(model, qm);
        jac.block<3, 1>(0, i) = (tp.position - tm.position) / (2.0 * step);
        jac.block<3, 1>(3, i) = rotation_error(tm.rotation, tp.rotation) / (2.0 * step);
        qp[i] = qm[i] = q[i];
    }
    return jac;
}

namespace {

struct Residual {
    Eigen::VectorXd error;  // 3 (position) or 6 (position + rotation vector)
    double pos = 0.0;
    double rot = 0.0;
    double norm() const { return error.norm(); }
};

Residual residual(const RobotModel& model, const IkTarget& target, const JointVector& q) {
    const Transform t = forward_kinematics(model, q);
    Residual r;
    const Eigen::Vector3d dp = target.position - t.position;
    r.pos = dp.norm();
    if (target.rotation) {
        const Eigen::Vector3d dr = rotation_error(t.rotation, *target.rotation);
        r.rot = dr.norm();
        r.error.resize(6);
        r.error << dp, dr;
    } else {
        r.error = dp;
    }
    return r;
}

bool converged(const Residual& r, const IkTarget& target, const DlsOptions& opts) {
    return r.pos < opts.tol_pos && (!target.rotation || r.rot < opts.tol_rot);
}

// Joints sitting on a limit whose step would push further out are frozen,
// and the step is recomputed without them.
JointVector dls_step(const RobotModel& model, const Eigen::MatrixXd& jac, const Eigen::VectorXd& err,
                     const JointVector& q, double lambda) {
    const auto n = q.size();
    std::vector<bool> frozen(static_cast<std::size_t>(n), false);
    JointVector dq = JointVector::Zero(n);
    for (int pass = 0; pass <= n; ++pass) {
        Eigen::MatrixXd j = jac;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (frozen[static_cast<std::size_t>(i)]) j.col(i).setZero();
        }
        const Eigen::MatrixXd jjt =
            j * j.transpose() + lambda * lambda * Eigen::MatrixXd::Identity(j.rows(), j.rows());
        dq = j.transpose() * jjt.ldlt().solve(err);
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& lim = model.joints[static_cast<std::size_t>(i)].limit;
            const bool pushes_out = (q[i] <= lim.min && dq[i] < 0.0) || (q[i] >= lim.max && dq[i] > 0.0);
            if (pushes_out && !frozen[static_cast<std::size_t>(i)]) {
                frozen[static_cast<std::size_t>(i)] = true;
                changed = true;
            }
        }
        if (!changed) break;
    }
    return dq;
}

}  // namespace

IkSolutionSet ik_numeric_dls(const RobotModel& model, const IkTarget& target, const JointVector& seed,
                             const DlsOptions& opts) {
    if (static_cast<std::size_t>(seed.size()) != model.dof()) {
        throw DimensionMismatch("seed has " + std::to_string(seed.size()) + " entries, model '" + model.name +
                                "' has " + std::to_string(model.dof()) + " joints");
    }
    if (!(opts.lambda > 0.0) || opts.max_iters <= 0 || !(opts.tol_pos > 0.0) || !(opts.tol_rot > 0.0)) {
        throw std::invalid_argument("DLS options must be positive");
    }
    if (!seed.allFinite() || !model.within_limits(seed)) {
        throw std::invalid_argument("DLS seed must be finite and within joint limits");
    }
    if (!target.position.allFinite() || (target.rotation && !is_orthonormal(*target.rotation))) {
        throw std::invalid_argument("DLS target must be finite with an orthonormal rotation");
    }

    JointVector q = seed;
    Residual res = residual(model, target, q);
    std::vector<double> history{res.norm()};

    const auto done = [&](int iterations) {
        IkSolutionSet set;
        set.solutions.push_back({q, BranchLabel::numeric()});
        set.iterations = iterations;
        return set;
    };
    if (converged(res, target, opts)) return done(0);

    for (int iter = 1; iter <= opts.max_iters; ++iter) {
        Eigen::MatrixXd jac = numeric_jacobian(model, q);
        if (!target.rotation) jac.conservativeResize(3, Eigen::NoChange);
        const JointVector dq = dls_step(model, jac, res.error, q, opts.lambda);

        // Backtrack until the residual drops; a step is never accepted uphill.
        bool accepted = false;
        double scale = 1.0;
        for (int halving = 0; halving < 12; ++halving, scale *= 0.5) {
            const JointVector trial = model.clamp(q + scale * dq);
            const Residual tr = residual(model, target, trial);
            if (tr.norm() < res.norm()) {
                q = trial;
                res = tr;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        history.push_back(res.norm());
        if (converged(res, target, opts)) return done(iter);
    }

    std::ostringstream os;
    os << "damped least squares did not converge after " << history.size() - 1
       << " accepted steps; residual " << res.pos << " m";
    if (target.rotation) os << ", " << res.rot << " rad";
    throw NoConvergence(os.str(), q, std::move(history));
}

const JointVector& select_solution(IkSolutionSet& set, const JointVector& current) {
    if (set.solutions.empty()) throw EmptySet("cannot select from an empty solution set");
    const auto cost = [&](const IkSolution& s) {
        if (s.q.size() != current.size()) {
            throw DimensionMismatch("current joint vector does not match solution size");
        }
        return (s.q - current).cwiseAbs().sum();
    };
    // Strict weak order: cost (ties within 1e-12), branch ordinal, then q lexicographically.
    const auto better = [&](const IkSolution& a, double ca, const IkSolution& b, double cb) {
        if (std::abs(ca - cb) > 1e-12) return ca < cb;
        if (a.label.ordinal() != b.label.ordinal()) return a.label.ordinal() < b.label.ordinal();
        return std::lexicographical_compare(a.q.data(), a.q.data() + a.q.size(), b.q.data(),
                                            b.q.data() + b.q.size());
    };
    std::size_t best = 0;
    double best_cost = cost(set.solutions[0]);
    for (std::size_t i = 1; i < set.solutions.size(); ++i) {
        const double c = cost(set.solutions[i]);
        if (better(set.solutions[i], c, set.solutions[best], best_cost)) {
            best = i;
            best_cost = c;
        }
    }
    set.selected = best;
    return set.solutions[best].q;
}

}  // namespace armtwin
