#include "armtwin/geometry.hpp"

#include <cmath>

#include "armtwin/errors.hpp"

namespace armtwin {

double normalize_angle(double a) {
    double r = std::remainder(a, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

Eigen::Matrix4d Transform::matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = position;
    return m;
}

Eigen::Matrix3d rpy_to_rotation(double psi, double theta, double phi) {
    return (Eigen::AngleAxisd(phi, Eigen::Vector3d::UnitZ()) *
            Eigen::AngleAxisd(theta, Eigen::Vector3d::UnitY()) *
            Eigen::AngleAxisd(psi, Eigen::Vector3d::UnitX()))
        .toRotationMatrix();
}

bool is_orthonormal(const Eigen::Matrix3d& r, double tol) {
    if (!r.allFinite()) return false;
    const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

Pose pose_from_command(const PoseCommand& cmd) {
    Pose p;
    p.position = {cmd.x, cmd.y, cmd.z};
    p.psi = normalize_angle(deg_to_rad(cmd.psi));
    p.theta = normalize_angle(deg_to_rad(cmd.theta));
    p.phi = normalize_angle(deg_to_rad(cmd.phi));
    return p;
}

Transform pose_to_transform(const Pose& p) {
    return {rpy_to_rotation(p.psi, p.theta, p.phi), p.position};
}

Pose transform_to_pose(const Transform& t) {
    const Eigen::Matrix3d& r = t.rotation;
    if (!is_orthonormal(r)) {
        throw NonOrthonormal("rotation is not orthonormal with determinant +1");
    }
    Pose p;
    p.position = t.position;
    p.theta = std::atan2(-r(2, 0), std::hypot(r(0, 0), r(1, 0)));
    if (std::abs(std::abs(p.theta) - kPi / 2.0) < kGimbalLockTol) {
        // Only phi - psi (or phi + psi) is observable; fold it all into phi.
        p.psi = 0.0;
        p.phi = std::atan2(-r(0, 1), r(1, 1));
    } else {
        p.psi = std::atan2(r(2, 1), r(2, 2));
        p.phi = std::atan2(r(1, 0), r(0, 0));
    }
    p.psi = normalize_angle(p.psi);
    p.theta = normalize_angle(p.theta);
    p.phi = normalize_angle(p.phi);
    return p;
}

double rotation_distance(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
    return rotation_error(a, b).norm();
}

Eigen::Vector3d rotation_error(const Eigen::Matrix3d& from, const Eigen::Matrix3d& to) {
    const Eigen::Matrix3d rel = to * from.transpose();
    // Skew part is accurate for small angles where AngleAxis loses digits.
    const Eigen::Vector3d skew(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1));
    const double s = 0.5 * skew.norm();
    const double c = 0.5 * (rel.trace() - 1.0);
    const double angle = std::atan2(s, c);
    if (s < 1e-9) {
        if (c > 0.0) return 0.5 * skew;
        const Eigen::AngleAxisd aa(rel);
        return aa.angle() * aa.axis();
    }
    return skew * (angle / (2.0 * s));
}

}  // namespace armtwin
