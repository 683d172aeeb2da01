#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace armtwin {

using JointVector = Eigen::VectorXd;

/// Wraps an angle to (-pi, pi].
double normalize_angle(double a);

/// Rigid transform: rotation r11..r33 plus position px, py, pz (meters).
struct Transform {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d position = Eigen::Vector3d::Zero();

    static Transform identity() { return {}; }

    Transform operator*(const Transform& rhs) const {
        return {rotation * rhs.rotation, rotation * rhs.position + position};
    }
    Eigen::Vector3d operator*(const Eigen::Vector3d& p) const { return rotation * p + position; }

    Transform inverse() const {
        Eigen::Matrix3d rt = rotation.transpose();
        return {rt, -(rt * position)};
    }

    Eigen::Matrix4d matrix() const;
};

/// Position plus roll-pitch-yaw: psi about X, theta about Y, phi about Z,
/// applied extrinsically in that order (R = Rz(phi) Ry(theta) Rx(psi)).
struct Pose {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    double psi = 0.0;
    double theta = 0.0;
    double phi = 0.0;
};

/// Operator-facing pose command. Field order X, Psi, Y, Theta, Z, Phi is the
/// order used on every text and wire boundary. Lengths in meters, angles in degrees.
struct PoseCommand {
    double x = 0.0;
    double psi = 0.0;
    double y = 0.0;
    double theta = 0.0;
    double z = 0.0;
    double phi = 0.0;
};

Eigen::Matrix3d rpy_to_rotation(double psi, double theta, double phi);

// Largest |(R^T R - I)_ij| and |det R - 1| tolerated before a rotation is
// rejected as non-orthonormal.
inline constexpr double kOrthonormalTol = 1e-9;

// |theta -+ pi/2| below this is treated as gimbal lock: psi is pinned to 0.
inline constexpr double kGimbalLockTol = 1e-7;

bool is_orthonormal(const Eigen::Matrix3d& r, double tol = kOrthonormalTol);

Pose pose_from_command(const PoseCommand& cmd);
Transform pose_to_transform(const Pose& p);

/// Throws NonOrthonormal when the rotation fails the orthonormality test.
Pose transform_to_pose(const Transform& t);

/// Geodesic angle (radians) between two rotations.
double rotation_distance(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

/// Rotation vector w such that exp([w]x) * from = to.
Eigen::Vector3d rotation_error(const Eigen::Matrix3d& from, const Eigen::Matrix3d& to);

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double deg_to_rad(double d) { return d * kPi / 180.0; }
inline constexpr double rad_to_deg(double r) { return r * 180.0 / kPi; }

}  // namespace armtwin
