#include "armtwin/robot_model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "armtwin/errors.hpp"
#include "armtwin/kinematics.hpp"
#include "embedded_presets.hpp"

namespace armtwin {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(SolverHint hint) {
    switch (hint) {
        case SolverHint::planar2r: return "planar2r";
        case SolverHint::analytic6dof: return "analytic6dof";
        case SolverHint::numeric: return "numeric";
    }
    return "numeric";
}

bool RobotModel::within_limits(const JointVector& q) const {
    if (static_cast<std::size_t>(q.size()) != dof()) return false;
    for (std::size_t i = 0; i < dof(); ++i) {
        if (!joints[i].limit.contains(q[static_cast<Eigen::Index>(i)])) return false;
    }
    return true;
}

JointVector RobotModel::clamp(const JointVector& q) const {
    JointVector out = q;
    for (std::size_t i = 0; i < dof() && i < static_cast<std::size_t>(q.size()); ++i) {
        out[static_cast<Eigen::Index>(i)] = joints[i].limit.clamp(q[static_cast<Eigen::Index>(i)]);
    }
    return out;
}

bool RobotModel::operator==(const RobotModel& other) const {
    const auto pose_eq = [](const Pose& a, const Pose& b) {
        return a.position == b.position && a.psi == b.psi && a.theta == b.theta && a.phi == b.phi;
    };
    return name == other.name && joints == other.joints && solver_hint == other.solver_hint &&
           pose_eq(tool_offset, other.tool_offset);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
}

bool normalized(double angle) { return angle > -kPi && angle <= kPi; }

bool near(double v, double target, double tol = 1e-12) { return std::abs(v - target) <= tol; }

std::string joint_field(std::size_t i, const char* field) {
    return "joints[" + std::to_string(i) + "]." + field;
}

// Distance from point p to the line through o with unit direction u.
double point_line_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& o, const Eigen::Vector3d& u) {
    return (p - o).cross(u).norm();
}

// Axes of joints 4, 5, 6 are the z axes of frames 3, 4, 5. They must share
// one point; checked at a few generic configurations.
std::optional<std::string> spherical_wrist_failure(const RobotModel& model) {
    static const std::array<std::array<double, 6>, 3> probes = {{
        {0.3, -0.7, 1.1, 0.5, 0.9, -0.4},
        {-1.2, 0.4, -0.3, 2.1, -1.3, 0.8},
        {2.5, 1.7, 0.6, -2.2, 0.35, 1.9},
    }};
    double worst = 0.0;
    for (const auto& probe : probes) {
        JointVector q = Eigen::Map<const JointVector>(probe.data(), 6);
        const auto frames = chain_frames(model, q);
        const Eigen::Vector3d o3 = frames[3].position, u3 = frames[3].rotation.col(2);
        const Eigen::Vector3d o4 = frames[4].position, u4 = frames[4].rotation.col(2);
        const Eigen::Vector3d o5 = frames[5].position, u5 = frames[5].rotation.col(2);
        const Eigen::Vector3d n = u3.cross(u4);
        if (n.norm() < 1e-9) {
            return "axes 4 and 5 are parallel; no wrist center";
        }
        // Closest point on axis 4 to axis 5, then its distance to all three axes.
        const Eigen::Vector3d w = o3 - o4;
        const double b = u3.dot(u4), d = u3.dot(w), e = u4.dot(w);
        const double denom = 1.0 - b * b;
        const double s = (b * e - d) / denom;
        const Eigen::Vector3d center = o3 + s * u3;
        worst = std::max({worst, point_line_distance(center, o3, u3), point_line_distance(center, o4, u4),
                          point_line_distance(center, o5, u5)});
    }
    if (worst > kWristIntersectionTol) {
        std::ostringstream os;
        os << "axes 4, 5, 6 do not intersect at a point (miss distance " << worst << " m > "
           << kWristIntersectionTol << " m)";
        return os.str();
    }
    return std::nullopt;
}

}  // namespace

std::vector<Violation> validate_model(const RobotModel& model) {
    std::vector<Violation> out;
    if (!is_identifier(model.name)) {
        out.push_back({"name", "must be a non-empty identifier of [A-Za-z0-9_.-]"});
    }
    if (model.joints.empty()) {
        out.push_back({"joints", "must not be empty"});
    }
    if (model.joints.size() > kMaxJoints) {
        out.push_back({"joints", "at most " + std::to_string(kMaxJoints) + " joints"});
    }
    for (std::size_t i = 0; i < model.joints.size(); ++i) {
        const auto& j = model.joints[i];
        const auto& dh = j.dh;
        if (!std::isfinite(dh.a) || !std::isfinite(dh.alpha) || !std::isfinite(dh.d) ||
            !std::isfinite(dh.theta_offset)) {
            out.push_back({joint_field(i, "dh"), "all DH values must be finite"});
        }
        if (dh.a < 0.0) out.push_back({joint_field(i, "a"), "link length must be >= 0"});
        if (std::isfinite(dh.alpha) && !normalized(dh.alpha)) {
            out.push_back({joint_field(i, "alpha"), "must be normalized to (-pi, pi]"});
        }
        const auto& lim = j.limit;
        if (!std::isfinite(lim.min) || !std::isfinite(lim.max)) {
            out.push_back({joint_field(i, "limit"), "min and max must be finite"});
        } else {
            if (!(lim.min < lim.max)) {
                out.push_back({joint_field(i, "limit"), "min must be < max"});
            }
            if (lim.max - lim.min > 2.0 * kPi) {
                out.push_back({joint_field(i, "limit"), "span must not exceed 2*pi"});
            }
        }
    }
    const auto& t = model.tool_offset;
    if (!t.position.allFinite() || !std::isfinite(t.psi) || !std::isfinite(t.theta) || !std::isfinite(t.phi)) {
        out.push_back({"tool_offset", "all values must be finite"});
    } else if (!normalized(t.psi) || !normalized(t.theta) || !normalized(t.phi)) {
        out.push_back({"tool_offset.rpy", "angles must be normalized to (-pi, pi]"});
    }

    const bool dh_ok = std::none_of(out.begin(), out.end(), [](const Violation& v) {
        return v.field.rfind("joints", 0) == 0;
    });

    switch (model.solver_hint) {
        case SolverHint::planar2r:
            if (model.joints.size() != 2) {
                out.push_back({"solver", "planar2r requires exactly 2 joints"});
            }
            for (std::size_t i = 0; i < model.joints.size(); ++i) {
                const auto& dh = model.joints[i].dh;
                if (dh.alpha != 0.0 || dh.d != 0.0) {
                    out.push_back({joint_field(i, "dh"), "planar2r requires alpha = 0 and d = 0"});
                }
            }
            break;
        case SolverHint::analytic6dof: {
            if (model.joints.size() != 6) {
                out.push_back({"solver", "analytic6dof requires exactly 6 joints"});
                break;
            }
            const auto& j = model.joints;
            const auto quarter = [](double alpha) { return near(std::abs(alpha), kPi / 2.0); };
            if (!(j[0].dh.a == 0.0 && quarter(j[0].dh.alpha) && j[1].dh.alpha == 0.0 && quarter(j[2].dh.alpha) &&
                  j[3].dh.a == 0.0 && quarter(j[3].dh.alpha) && j[4].dh.a == 0.0 && j[4].dh.d == 0.0 &&
                  quarter(j[4].dh.alpha) && j[5].dh.a == 0.0 && j[5].dh.alpha == 0.0)) {
                out.push_back({"solver",
                               "analytic6dof solver needs a1=0, |alpha1|=pi/2, alpha2=0, |alpha3|=pi/2, "
                               "a4=0, |alpha4|=pi/2, a5=d5=0, |alpha5|=pi/2, a6=0, alpha6=0"});
            }
            if (dh_ok) {
                if (auto why = spherical_wrist_failure(model)) {
                    out.push_back({"spherical_wrist", *why});
                }
            }
            break;
        }
        case SolverHint::numeric:
            break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) throw SchemaError("unknown field '" + key + "' in " + where);
    }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError("missing field '" + key + "' in " + where);
    return *it;
}

double number(const json& obj, const std::string& key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number()) throw SchemaError("field '" + key + "' in " + where + " must be a number");
    return v.get<double>();
}

Eigen::Vector3d triple(const json& obj, const std::string& key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_array() || v.size() != 3 ||
        !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); })) {
        throw SchemaError("field '" + key + "' in " + where + " must be an array of 3 numbers");
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

SolverHint parse_hint(const std::string& s) {
    if (s == "planar2r") return SolverHint::planar2r;
    if (s == "analytic6dof") return SolverHint::analytic6dof;
    if (s == "numeric") return SolverHint::numeric;
    throw SchemaError("field 'solver' must be one of planar2r, analytic6dof, numeric (got '" + s + "')");
}

}  // namespace

RobotModel parse_robot_description(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw SyntaxError("malformed robot description: " + std::string(e.what()), line, col);
    }
    if (!doc.is_object()) throw SchemaError("robot description must be a JSON object");
    reject_unknown_keys(doc, {"name", "angles", "solver", "joints", "tool_offset"}, "robot description");

    RobotModel model;
    const json& name = require(doc, "name", "robot description");
    if (!name.is_string()) throw SchemaError("field 'name' must be a string");
    model.name = name.get<std::string>();

    const json& angles = require(doc, "angles", "robot description");
    if (!angles.is_string() || angles.get<std::string>() != "radians") {
        throw SchemaError("field 'angles' must be the unit tag \"radians\"");
    }

    const json& solver = require(doc, "solver", "robot description");
    if (!solver.is_string()) throw SchemaError("field 'solver' must be a string");
    model.solver_hint = parse_hint(solver.get<std::string>());

    const json& joints = require(doc, "joints", "robot description");
    if (!joints.is_array()) throw SchemaError("field 'joints' must be an array");
    if (joints.empty()) throw SchemaError("field 'joints' must list at least one joint");
    for (std::size_t i = 0; i < joints.size(); ++i) {
        const json& jj = joints[i];
        const std::string where = "joints[" + std::to_string(i) + "]";
        if (!jj.is_object()) throw SchemaError(where + " must be an object");
        reject_unknown_keys(jj, {"a", "alpha", "d", "theta_offset", "limit"}, where);
        Joint joint;
        joint.dh.a = number(jj, "a", where);
        joint.dh.alpha = number(jj, "alpha", where);
        joint.dh.d = number(jj, "d", where);
        joint.dh.theta_offset = number(jj, "theta_offset", where);
        const json& lim = require(jj, "limit", where);
        if (!lim.is_object()) throw SchemaError(where + ".limit must be an object");
        reject_unknown_keys(lim, {"min", "max"}, where + ".limit");
        joint.limit.min = number(lim, "min", where + ".limit");
        joint.limit.max = number(lim, "max", where + ".limit");
        model.joints.push_back(joint);
    }

    if (auto it = doc.find("tool_offset"); it != doc.end()) {
        if (!it->is_object()) throw SchemaError("field 'tool_offset' must be an object");
        reject_unknown_keys(*it, {"position", "rpy"}, "tool_offset");
        model.tool_offset.position = triple(*it, "position", "tool_offset");
        const Eigen::Vector3d rpy = triple(*it, "rpy", "tool_offset");
        model.tool_offset.psi = rpy[0];
        model.tool_offset.theta = rpy[1];
        model.tool_offset.phi = rpy[2];
    }

    if (auto violations = validate_model(model); !violations.empty()) {
        std::vector<std::string> lines;
        std::string msg = "robot '" + model.name + "' violates its invariants:";
        for (const auto& v : violations) {
            lines.push_back(v.to_string());
            msg += "\n  " + v.to_string();
        }
        throw InvariantError(msg, std::move(lines));
    }
    return model;
}

RobotModel load_robot_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open robot file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_robot_description(ss.str());
}

std::string serialize_robot_description(const RobotModel& model) {
    ordered_json doc;
    doc["name"] = model.name;
    doc["angles"] = "radians";
    doc["solver"] = std::string(to_string(model.solver_hint));
    doc["joints"] = ordered_json::array();
    for (const auto& j : model.joints) {
        ordered_json jj;
        jj["a"] = j.dh.a;
        jj["alpha"] = j.dh.alpha;
        jj["d"] = j.dh.d;
        jj["theta_offset"] = j.dh.theta_offset;
        jj["limit"] = {{"min", j.limit.min}, {"max", j.limit.max}};
        doc["joints"].push_back(jj);
    }
    const auto& t = model.tool_offset;
    if (!t.position.isZero(0.0) || t.psi != 0.0 || t.theta != 0.0 || t.phi != 0.0) {
        doc["tool_offset"] = {{"position", {t.position.x(), t.position.y(), t.position.z()}},
                              {"rpy", {t.psi, t.theta, t.phi}}};
    }
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

RobotModel builtin_preset(std::string_view name) {
    for (const auto& preset : embedded::presets) {
        if (preset.name == name) return parse_robot_description(preset.text);
    }
    throw UnknownPreset("unknown robot preset '" + std::string(name) + "'");
}

std::vector<std::string> builtin_preset_names() {
    std::vector<std::string> names;
    for (const auto& preset : embedded::presets) names.emplace_back(preset.name);
    return names;
}

RobotModel resolve_robot(const std::string& preset_or_path) {
    const auto names = builtin_preset_names();
    if (std::find(names.begin(), names.end(), preset_or_path) != names.end()) {
        return builtin_preset(preset_or_path);
    }
    if (!std::filesystem::exists(preset_or_path)) {
        throw Error("'" + preset_or_path + "' is neither a robot preset nor an existing robot file");
    }
    return load_robot_file(preset_or_path);
}

}  // namespace armtwin
