// Closed-form IK for 6R arms with a spherical wrist.
//
// Pre-multiplying the target by the inverse of the first link transforms
// isolates one joint at a time. For the supported DH pattern that reduces to:
//
//   wrist center  w = p - d6 * z6                    (flange offset removed)
//   q1            from the horizontal projection of w, two shoulder branches
//   q2, q3        planar two-link problem in the shoulder plane, two elbow branches
//   q4, q5, q6    from R36 = (R03)^T R06, two wrist branches
//
// In the shoulder frame the wrist center sits at (x1, y1, d2 + d3) with
//   y1 = sin(alpha1) * (w_z - d1),   x1 = +-sqrt(w_x^2 + w_y^2 - (d2 + d3)^2)
// and the forearm is a link of length hypot(a3, d4) at angle atan2(-sin(alpha3) d4, a3)
// from the x axis of frame 3.

#include <algorithm>
#include <cmath>
#include <sstream>

#include "armtwin/errors.hpp"
#include "armtwin/ik.hpp"
#include "armtwin/kinematics.hpp"
#include "ik_internal.hpp"

namespace armtwin {

namespace {

Eigen::Matrix3d rot_x(double a) { return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitX()).toRotationMatrix(); }
Eigen::Matrix3d rot_z(double a) { return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitZ()).toRotationMatrix(); }

bool same_configuration(const JointVector& a, const JointVector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (std::abs(normalize_angle(a[i] - b[i])) > 1e-9) return false;
    }
    return true;
}

struct WristAngles {
    double t4, t5, t6;
    BranchLabel::Wrist wrist;
};

// Splits R36 = Rz(t4) Rx(alpha4) Rz(t5) Rx(alpha5) Rz(t6) with |alpha4| = |alpha5| = pi/2.
std::vector<WristAngles> solve_wrist(const Eigen::Matrix3d& r36, double alpha4, double alpha5) {
    const double sa4 = std::sin(alpha4) > 0.0 ? 1.0 : -1.0;
    const double sa5 = std::sin(alpha5) > 0.0 ? 1.0 : -1.0;
    const double c5 = -sa4 * sa5 * r36(2, 2);
    const double s5_mag = std::hypot(r36(0, 2), r36(1, 2));

    const auto finish = [&](double t4, double t5) {
        // Remaining factor must be Rz(t6).
        const Eigen::Matrix3d n = (rot_z(t4) * rot_x(alpha4) * rot_z(t5) * rot_x(alpha5)).transpose() * r36;
        return std::atan2(n(1, 0), n(0, 0));
    };

    std::vector<WristAngles> out;
    if (s5_mag < 1e-12) {
        // Axes 4 and 6 align: only t4 + t6 (or t4 - t6) is determined. Pin t4 = 0.
        const double t5 = std::atan2(0.0, c5);
        out.push_back({0.0, t5, finish(0.0, t5), BranchLabel::Wrist::noflip});
        return out;
    }
    for (const double sign : {1.0, -1.0}) {
        const double s5 = sign * s5_mag;
        const double t5 = std::atan2(s5, c5);
        const double t4 = std::atan2(sign * sa5 * r36(1, 2), sign * sa5 * r36(0, 2));
        out.push_back({t4, t5, finish(t4, t5), sign > 0.0 ? BranchLabel::Wrist::noflip : BranchLabel::Wrist::flip});
    }
    return out;
}

}  // namespace

IkSolutionSet ik_analytic_6dof(const RobotModel& model, const Transform& target) {
    if (model.solver_hint != SolverHint::analytic6dof || model.dof() != 6) {
        throw WrongSolverHint("model '" + model.name + "' is not an analytic6dof arm");
    }
    if (!is_orthonormal(target.rotation) || !target.position.allFinite()) {
        throw NonOrthonormal("target rotation is not orthonormal with determinant +1");
    }
    const auto& j = model.joints;
    const Transform flange = target * model.tool_transform().inverse();
    const Eigen::Vector3d wrist = flange.position - j[5].dh.d * flange.rotation.col(2);

    const double sa1 = std::sin(j[0].dh.alpha) > 0.0 ? 1.0 : -1.0;
    const double sa3 = std::sin(j[2].dh.alpha) > 0.0 ? 1.0 : -1.0;
    const double lateral = j[1].dh.d + j[2].dh.d;
    const double r = std::hypot(wrist.x(), wrist.y());
    if (std::abs(lateral) < 1e-12 && r < 1e-9) {
        std::ostringstream os;
        os << "wrist center (" << wrist.x() << ", " << wrist.y() << ", " << wrist.z()
           << ") lies on the joint-1 axis: q1 is undetermined";
        throw SingularTarget(os.str());
    }
    if (r < std::abs(lateral) - 1e-12) {
        std::ostringstream os;
        os << "wrist center is " << r << " m from the base axis, closer than the shoulder offset "
           << std::abs(lateral) << " m";
        throw OutOfWorkspace(os.str());
    }

    const double x1_mag = std::sqrt(std::max(0.0, (r - std::abs(lateral)) * (r + std::abs(lateral))));
    const double y1 = sa1 * (wrist.z() - j[0].dh.d);
    const double upper = j[1].dh.a;
    const double forearm = std::hypot(j[2].dh.a, j[3].dh.d);
    const double forearm_phi = std::atan2(-sa3 * j[3].dh.d, j[2].dh.a);
    const double wrist_heading = std::atan2(wrist.y(), wrist.x());

    IkSolutionSet set;
    std::vector<std::string> reasons;
    for (const double shoulder_sign : {1.0, -1.0}) {
        if (x1_mag < 1e-12 && shoulder_sign < 0.0) continue;
        const double x1 = shoulder_sign * x1_mag;
        const auto shoulder = shoulder_sign > 0.0 ? BranchLabel::Shoulder::left : BranchLabel::Shoulder::right;
        const double t1 = wrist_heading - std::atan2(-sa1 * lateral, x1);

        std::vector<detail::PlanarBranch> arm;
        try {
            arm = detail::solve_planar(upper, forearm, forearm_phi, {x1, y1});
        } catch (const Unreachable& e) {
            reasons.push_back(std::string(shoulder == BranchLabel::Shoulder::left ? "left" : "right") +
                              ": " + e.what());
            continue;
        }
        for (const auto& b : arm) {
            JointVector q(6);
            q[0] = normalize_angle(t1 - j[0].dh.theta_offset);
            q[1] = normalize_angle(b.theta1 - j[1].dh.theta_offset);
            q[2] = normalize_angle(b.theta2 - j[2].dh.theta_offset);
            q[3] = q[4] = q[5] = 0.0;
            const Eigen::Matrix3d r03 = partial_chain(model, q, 0, 3).rotation;
            const Eigen::Matrix3d r36 = r03.transpose() * flange.rotation;
            for (const auto& w : solve_wrist(r36, j[3].dh.alpha, j[4].dh.alpha)) {
                q[3] = normalize_angle(w.t4 - j[3].dh.theta_offset);
                q[4] = normalize_angle(w.t5 - j[4].dh.theta_offset);
                q[5] = normalize_angle(w.t6 - j[5].dh.theta_offset);
                const auto label = BranchLabel::analytic(shoulder, b.elbow, w.wrist);

                const Transform reached = forward_kinematics(model, q);
                const double pos_err = (reached.position - target.position).norm();
                const double rot_err = rotation_distance(reached.rotation, target.rotation);
                if (pos_err >= kSolutionPosTol || rot_err >= kSolutionRotTol) {
                    std::ostringstream os;
                    os << label.to_string() << ": FK verification failed (position " << pos_err
                       << " m, rotation " << rot_err << " rad)";
                    set.dropped.push_back(os.str());
                    continue;
                }
                if (!model.within_limits(q)) {
                    set.dropped.push_back(label.to_string() + ": outside joint limits");
                    continue;
                }
                const bool duplicate = std::any_of(set.solutions.begin(), set.solutions.end(),
                                                   [&](const IkSolution& s) { return same_configuration(s.q, q); });
                if (!duplicate) set.solutions.push_back({q, label});
            }
        }
    }
    if (set.solutions.empty()) {
        reasons.insert(reasons.end(), set.dropped.begin(), set.dropped.end());
        std::string why = "no analytic branch reaches the target";
        for (const auto& r_ : reasons) why += "; " + r_;
        throw OutOfWorkspace(why, reasons);
    }
    return set;
}

}  // namespace armtwin
