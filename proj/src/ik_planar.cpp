#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "armtwin/errors.hpp"
#include "armtwin/ik.hpp"
#include "armtwin/kinematics.hpp"
#include "ik_internal.hpp"

namespace armtwin {

int BranchLabel::ordinal() const {
    switch (kind) {
        case Kind::planar: return static_cast<int>(elbow);
        case Kind::analytic6dof:
            return 4 * static_cast<int>(shoulder) + 2 * static_cast<int>(elbow) + static_cast<int>(wrist);
        case Kind::numeric: return 0;
    }
    return 0;
}

std::string BranchLabel::to_string() const {
    const char* elbow_s = elbow == Elbow::up ? "up" : "down";
    switch (kind) {
        case Kind::planar: return std::string("elbow-") + elbow_s;
        case Kind::analytic6dof:
            return std::string(shoulder == Shoulder::left ? "left" : "right") + "/" + elbow_s + "/" +
                   (wrist == Wrist::flip ? "flip" : "noflip");
        case Kind::numeric: return "numeric";
    }
    return "numeric";
}

namespace detail {

std::vector<PlanarBranch> solve_planar(double l1, double l2, double phi, const Eigen::Vector2d& target) {
    const double px = target.x(), py = target.y();
    const double r2 = px * px + py * py;
    const double r = std::sqrt(r2);
    const double outer = l1 + l2, inner = std::abs(l1 - l2);
    if (r > outer + 1e-12) {
        std::ostringstream os;
        os << "target at distance " << r << " m is beyond full extension " << outer << " m";
        throw Unreachable(os.str(), r - outer);
    }
    if (r < inner - 1e-12) {
        std::ostringstream os;
        os << "target at distance " << r << " m is inside the folded radius " << inner << " m";
        throw Unreachable(os.str(), inner - r);
    }

    // cos of the angle between link 1 and link 2 (elbow angle).
    double c2 = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
    c2 = std::clamp(c2, -1.0, 1.0);
    const double s2_mag = std::sqrt((1.0 - c2) * (1.0 + c2));
    const bool boundary = s2_mag < 1e-9;

    std::vector<PlanarBranch> out;
    for (const double sign : {-1.0, 1.0}) {
        if (boundary && sign < 0.0) continue;
        const double s2 = sign * s2_mag;
        const double beta = std::atan2(s2, c2);
        const double k1 = l1 + l2 * c2;
        const double k2 = l2 * s2;
        // cos(theta1) and |sin(theta1)|; the sign of the sine is not fixed by
        // the cosine alone, so both candidates are tried and checked by FK.
        const double c1 = px * k1 + py * k2;
        const double s1_mag = std::abs(py * k1 - px * k2);
        double best_err = std::numeric_limits<double>::infinity();
        double best_t1 = 0.0;
        for (const double s1_sign : {1.0, -1.0}) {
            const double t1 = std::atan2(s1_sign * s1_mag, c1);
            const double ex = l1 * std::cos(t1) + l2 * std::cos(t1 + beta) - px;
            const double ey = l1 * std::sin(t1) + l2 * std::sin(t1 + beta) - py;
            const double err = std::hypot(ex, ey);
            if (err < best_err) {
                best_err = err;
                best_t1 = t1;
            }
        }
        const auto elbow = (!boundary && s2 > 0.0) ? BranchLabel::Elbow::down : BranchLabel::Elbow::up;
        out.push_back({best_t1, beta - phi, elbow, best_err});
    }
    return out;
}

}  // namespace detail

IkSolutionSet ik_planar_2r(double l1, double l2, const Eigen::Vector2d& target) {
    if (!(l1 > 0.0) || !(l2 > 0.0) || !std::isfinite(l1) || !std::isfinite(l2)) {
        throw std::invalid_argument("planar link lengths must be positive and finite");
    }
    if (!target.allFinite()) throw std::invalid_argument("planar target must be finite");

    IkSolutionSet set;
    for (const auto& b : detail::solve_planar(l1, l2, 0.0, target)) {
        const double t1 = normalize_angle(b.theta1);
        const double t2 = normalize_angle(b.theta2);
        const Eigen::Vector2d reached(l1 * std::cos(t1) + l2 * std::cos(t1 + t2),
                                      l1 * std::sin(t1) + l2 * std::sin(t1 + t2));
        const double err = (reached - target).norm();
        if (err >= kPlanarTol) {
            std::ostringstream os;
            os << BranchLabel::planar(b.elbow).to_string() << ": FK residual " << err << " m";
            set.dropped.push_back(os.str());
            continue;
        }
        JointVector q(2);
        q << t1, t2;
        set.solutions.push_back({q, BranchLabel::planar(b.elbow)});
    }
    if (set.solutions.empty()) {
        throw Unreachable("no planar branch verifies against the target", 0.0);
    }
    return set;
}

IkSolutionSet ik_planar_model(const RobotModel& model, const Eigen::Vector2d& target) {
    if (model.solver_hint != SolverHint::planar2r) {
        throw WrongSolverHint("model '" + model.name + "' is not a planar2r arm");
    }
    const auto& j1 = model.joints[0].dh;
    const auto& j2 = model.joints[1].dh;
    // The tool point rides on link 2; fold its in-plane offset into that link.
    const Eigen::Vector3d tool = model.tool_transform().position;
    const double ex = j2.a + tool.x(), ey = tool.y();
    const double l2 = std::hypot(ex, ey);
    const double phi = std::atan2(ey, ex);
    if (!(j1.a > 0.0) || !(l2 > 0.0)) {
        throw std::invalid_argument("planar model needs positive link lengths");
    }

    IkSolutionSet set;
    for (const auto& b : detail::solve_planar(j1.a, l2, phi, target)) {
        JointVector q(2);
        q << normalize_angle(b.theta1 - j1.theta_offset), normalize_angle(b.theta2 - j2.theta_offset);
        const auto label = BranchLabel::planar(b.elbow);
        const Eigen::Vector3d p = forward_kinematics(model, q).position;
        const double err = (p.head<2>() - target).norm();
        if (err >= kPlanarTol * std::max(1.0, target.norm())) {
            std::ostringstream os;
            os << label.to_string() << ": FK residual " << err << " m";
            set.dropped.push_back(os.str());
            continue;
        }
        if (!model.within_limits(q)) {
            set.dropped.push_back(label.to_string() + ": outside joint limits");
            continue;
        }
        set.solutions.push_back({q, label});
    }
    if (set.solutions.empty()) {
        std::string why = "no planar branch is within joint limits";
        for (const auto& d : set.dropped) why += "; " + d;
        throw OutOfWorkspace(why, set.dropped);
    }
    return set;
}

}  // namespace armtwin
