#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace armtwin {

// Root of every error the library raises. Callers that only need a message
// catch this; callers that need the payload catch the concrete type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- robot description -------------------------------------------------

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class InvariantError : public Error {
public:
    InvariantError(const std::string& what, std::vector<std::string> violations)
        : Error(what), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

class UnknownPreset : public Error {
public:
    using Error::Error;
};

// ---- kinematics ---------------------------------------------------------

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NonOrthonormal : public Error {
public:
    using Error::Error;
};

// ---- inverse kinematics -------------------------------------------------

class Unreachable : public Error {
public:
    Unreachable(const std::string& what, double deficit) : Error(what), deficit_(deficit) {}
    /// Distance (m) by which the target lies outside the reachable annulus.
    double deficit() const { return deficit_; }

private:
    double deficit_;
};

class WrongSolverHint : public Error {
public:
    using Error::Error;
};

class SingularTarget : public Error {
public:
    using Error::Error;
};

class OutOfWorkspace : public Error {
public:
    OutOfWorkspace(const std::string& what, std::vector<std::string> reasons = {})
        : Error(what), reasons_(std::move(reasons)) {}
    const std::vector<std::string>& reasons() const { return reasons_; }

private:
    std::vector<std::string> reasons_;
};

class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, Eigen::VectorXd best, std::vector<double> residuals)
        : Error(what), best_(std::move(best)), residuals_(std::move(residuals)) {}
    /// Lowest-residual iterate reached.
    const Eigen::VectorXd& best() const { return best_; }
    /// Residual after every accepted step, starting with the seed's.
    const std::vector<double>& residuals() const { return residuals_; }
    double residual() const { return residuals_.empty() ? 0.0 : residuals_.back(); }

private:
    Eigen::VectorXd best_;
    std::vector<double> residuals_;
};

class EmptySet : public Error {
public:
    using Error::Error;
};

// ---- motion -------------------------------------------------------------

class NonPositiveDuration : public Error {
public:
    using Error::Error;
};

class TargetAtBase : public Error {
public:
    using Error::Error;
};

}  // namespace armtwin
