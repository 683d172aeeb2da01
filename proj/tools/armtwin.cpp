// armtwin: run the twin server, one-shot FK / IK, validate robot files and
// replay scripted command sequences against a running server.
//
// Exit codes: 0 ok, 1 no IK solution, 2 bad input or config, 3 bind failure,
// 4 connection lost during replay, 5 replay got an error status.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "armtwin/errors.hpp"
#include "armtwin/geometry.hpp"
#include "armtwin/ik.hpp"
#include "armtwin/kinematics.hpp"
#include "armtwin/robot_model.hpp"
#include "armtwin/twin/client.hpp"
#include "armtwin/twin/replay.hpp"
#include "armtwin/twin/server.hpp"

namespace {

using namespace armtwin;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitNoSolution = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitBind = 3;

// Splits "1,2,3" or "1 2 3" into numbers. Throws std::invalid_argument.
std::vector<double> parse_numbers(const std::string& text) {
    std::string normalized = text;
    for (char& c : normalized) {
        if (c == ',') c = ' ';
    }
    std::istringstream in(normalized);
    std::vector<double> out;
    std::string token;
    while (in >> token) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != token.size() || !std::isfinite(v)) {
            throw std::invalid_argument("'" + token + "' is not a finite number");
        }
        out.push_back(v);
    }
    return out;
}

JointVector to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const JointVector& q) { return {q.data(), q.data() + q.size()}; }

std::vector<double> to_degrees(const JointVector& q) {
    std::vector<double> out;
    for (Eigen::Index i = 0; i < q.size(); ++i) out.push_back(rad_to_deg(q[i]));
    return out;
}

std::string format_list(const std::vector<double>& v, int precision) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << "[";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << "]";
    return os.str();
}

JointVector parse_joints(const RobotModel& model, const std::string& text) {
    const auto values = parse_numbers(text);
    if (values.size() != model.dof()) {
        throw std::invalid_argument("expected " + std::to_string(model.dof()) + " joint values for '" + model.name +
                                    "', got " + std::to_string(values.size()));
    }
    return to_vector(values);
}

// ---- serve ----------------------------------------------------------------

struct ServeArgs {
    std::string robot = "planar2r";
    int port = 9090;
    double rate = 30.0;
    std::string bind = "0.0.0.0";
};

int cmd_serve(const ServeArgs& args) {
    RobotModel model;
    try {
        model = resolve_robot(args.robot);
    } catch (const std::exception& e) {
        std::cerr << "armtwin serve: cannot load robot '" << args.robot << "': " << e.what() << "\n";
        return kExitBadInput;
    }
    if (args.port < 0 || args.port > 65535) {
        std::cerr << "armtwin serve: port must be in [0, 65535]\n";
        return kExitBadInput;
    }
    if (!(args.rate > 0.0) || !std::isfinite(args.rate)) {
        std::cerr << "armtwin serve: rate must be a positive number of Hz\n";
        return kExitBadInput;
    }

    twin::TwinServer::Options opts;
    opts.bind_address = args.bind;
    opts.port = static_cast<unsigned short>(args.port);
    opts.rate_hz = args.rate;
    const std::string name = model.name;
    const auto solver = to_string(model.solver_hint);
    const auto dof = model.dof();
    try {
        twin::TwinServer server(std::move(model), opts);
        server.stop_on_signals();
        std::cout << "armtwin: robot '" << name << "' (" << solver << ", " << dof << " joints) listening on "
                  << server.address() << " at " << args.rate << " Hz" << std::endl;
        server.run();
    } catch (const twin::BindError& e) {
        std::cerr << "armtwin serve: " << e.what() << "\n";
        return kExitBind;
    } catch (const std::invalid_argument& e) {
        std::cerr << "armtwin serve: " << e.what() << "\n";
        return kExitBadInput;
    }
    std::cout << "armtwin: server stopped" << std::endl;
    return kExitOk;
}

// ---- fk -------------------------------------------------------------------

int cmd_fk(const std::string& robot, const std::string& joints, bool as_json) {
    RobotModel model;
    JointVector q;
    try {
        model = resolve_robot(robot);
        q = parse_joints(model, joints);
    } catch (const std::exception& e) {
        std::cerr << "armtwin fk: " << e.what() << "\n";
        return kExitBadInput;
    }
    const Transform t = forward_kinematics(model, q);
    const Pose pose = transform_to_pose(t);
    const Eigen::Matrix4d m = t.matrix();

    if (as_json) {
        ordered_json doc;
        doc["robot"] = model.name;
        doc["joints"] = {{"radians", to_std(q)}, {"degrees", to_degrees(q)}};
        doc["position"] = {pose.position.x(), pose.position.y(), pose.position.z()};
        doc["rpy"] = {{"radians", {{"psi", pose.psi}, {"theta", pose.theta}, {"phi", pose.phi}}},
                      {"degrees",
                       {{"psi", rad_to_deg(pose.psi)}, {"theta", rad_to_deg(pose.theta)}, {"phi", rad_to_deg(pose.phi)}}}};
        ordered_json rows = ordered_json::array();
        for (int r = 0; r < 4; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2), m(r, 3)});
        doc["transform"] = rows;
        std::cout << doc.dump(2) << "\n";
        return kExitOk;
    }

    std::cout << "robot: " << model.name << "\n";
    std::cout << "joints (rad): " << format_list(to_std(q), 9) << "\n";
    std::cout << "joints (deg): " << format_list(to_degrees(q), 6) << "\n";
    std::cout << std::fixed << std::setprecision(9);
    std::cout << "position (m): x=" << pose.position.x() << " y=" << pose.position.y() << " z=" << pose.position.z()
              << "\n";
    std::cout << "rpy (rad): psi=" << pose.psi << " theta=" << pose.theta << " phi=" << pose.phi << "\n";
    std::cout << std::setprecision(6) << "rpy (deg): psi=" << rad_to_deg(pose.psi)
              << " theta=" << rad_to_deg(pose.theta) << " phi=" << rad_to_deg(pose.phi) << "\n";
    std::cout << "transform:\n" << std::setprecision(9);
    for (int r = 0; r < 4; ++r) {
        std::cout << " ";
        for (int c = 0; c < 4; ++c) std::cout << " " << std::setw(13) << m(r, c);
        std::cout << "\n";
    }
    return kExitOk;
}

// ---- solve ----------------------------------------------------------------

struct SolveArgs {
    std::string robot;
    std::string target;
    std::string pose;
    std::string seed;
    bool json = false;
};

int report_failure(const std::string& kind, const std::string& message, const char* metric, double value,
                   bool as_json) {
    if (as_json) {
        ordered_json doc;
        doc["error"] = kind;
        doc["message"] = message;
        if (!std::isnan(value)) doc[metric] = value;
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cerr << "armtwin solve: " << kind << ": " << message;
        if (!std::isnan(value)) std::cerr << " (" << metric << " " << std::setprecision(9) << value << ")";
        std::cerr << "\n";
    }
    return kExitNoSolution;
}

int cmd_solve(const SolveArgs& args) {
    RobotModel model;
    JointVector seed;
    std::optional<Transform> pose_target;
    Eigen::Vector3d point = Eigen::Vector3d::Zero();
    ordered_json target_doc;
    try {
        model = resolve_robot(args.robot);
        seed = args.seed.empty() ? model.clamp(JointVector::Zero(static_cast<Eigen::Index>(model.dof())))
                                 : parse_joints(model, args.seed);
        if (!args.pose.empty()) {
            const auto v = parse_numbers(args.pose);
            if (v.size() != 6) throw std::invalid_argument("--pose needs six values: x psi y theta z phi");
            const PoseCommand cmd{v[0], v[1], v[2], v[3], v[4], v[5]};
            pose_target = pose_to_transform(pose_from_command(cmd));
            target_doc = {{"x", cmd.x}, {"psi", cmd.psi}, {"y", cmd.y}, {"theta", cmd.theta}, {"z", cmd.z},
                          {"phi", cmd.phi}};
        } else {
            const auto v = parse_numbers(args.target);
            if (v.size() != 2 && v.size() != 3) throw std::invalid_argument("--target needs x,y or x,y,z");
            point = Eigen::Vector3d(v[0], v[1], v.size() == 3 ? v[2] : 0.0);
            target_doc = {{"x", point.x()}, {"y", point.y()}, {"z", point.z()}};
        }
    } catch (const std::exception& e) {
        std::cerr << "armtwin solve: " << e.what() << "\n";
        return kExitBadInput;
    }

    IkSolutionSet set;
    try {
        set = pose_target ? ik_solve(model, *pose_target, seed) : ik_solve_position(model, point, seed);
        select_solution(set, seed);
    } catch (const Unreachable& e) {
        return report_failure("unreachable", e.what(), "deficit", e.deficit(), args.json);
    } catch (const NoConvergence& e) {
        return report_failure("no_convergence", e.what(), "residual", e.residual(), args.json);
    } catch (const WrongSolverHint& e) {
        std::cerr << "armtwin solve: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const NonOrthonormal& e) {
        std::cerr << "armtwin solve: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const Error& e) {
        return report_failure("no_solution", e.what(), "residual", std::nan(""), args.json);
    }

    // FK check of every branch against what was asked for.
    std::vector<double> pos_err;
    std::vector<double> rot_err;
    for (const auto& s : set.solutions) {
        const Transform fk = forward_kinematics(model, s.q);
        if (pose_target) {
            pos_err.push_back((fk.position - pose_target->position).norm());
            rot_err.push_back(rotation_distance(fk.rotation, pose_target->rotation));
        } else if (model.solver_hint == SolverHint::planar2r) {
            pos_err.push_back((fk.position.head<2>() - point.head<2>()).norm());
            rot_err.push_back(std::nan(""));
        } else {
            pos_err.push_back((fk.position - point).norm());
            rot_err.push_back(std::nan(""));
        }
    }

    if (args.json) {
        ordered_json doc;
        doc["robot"] = model.name;
        doc["solver"] = std::string(to_string(model.solver_hint));
        doc["target"] = target_doc;
        ordered_json list = ordered_json::array();
        for (std::size_t i = 0; i < set.solutions.size(); ++i) {
            const auto& s = set.solutions[i];
            ordered_json e;
            e["index"] = i;
            e["label"] = s.label.to_string();
            e["ordinal"] = s.label.ordinal();
            e["radians"] = to_std(s.q);
            e["degrees"] = to_degrees(s.q);
            e["position_error"] = pos_err[i];
            if (!std::isnan(rot_err[i])) e["rotation_error"] = rot_err[i];
            e["selected"] = set.selected == i;
            list.push_back(std::move(e));
        }
        doc["solutions"] = std::move(list);
        doc["selected"] = *set.selected;
        if (model.solver_hint == SolverHint::numeric) doc["iterations"] = set.iterations;
        std::cout << doc.dump(2) << "\n";
        return kExitOk;
    }

    std::cout << "robot: " << model.name << " (" << to_string(model.solver_hint) << ")\n";
    std::cout << "target: " << target_doc.dump() << "\n";
    std::cout << set.solutions.size() << " solution(s)\n";
    for (std::size_t i = 0; i < set.solutions.size(); ++i) {
        const auto& s = set.solutions[i];
        std::cout << (set.selected == i ? "* " : "  ") << "branch " << i << " [" << s.label.to_string() << "]\n";
        std::cout << "    rad: " << format_list(to_std(s.q), 9) << "\n";
        std::cout << "    deg: " << format_list(to_degrees(s.q), 6) << "\n";
        std::cout << "    fk position error: " << std::scientific << std::setprecision(2) << pos_err[i];
        if (!std::isnan(rot_err[i])) std::cout << " m, rotation error: " << rot_err[i] << " rad";
        else std::cout << " m";
        std::cout << std::defaultfloat << "\n";
    }
    std::cout << "selected: branch " << *set.selected << " (least total joint motion from seed)\n";
    return kExitOk;
}

// ---- validate ---------------------------------------------------------------

int cmd_validate(const std::string& path) {
    try {
        const RobotModel model = load_robot_file(path);
        std::cout << path << ": ok (" << model.name << ", " << to_string(model.solver_hint) << ", " << model.dof()
                  << " joints)\n";
        return kExitOk;
    } catch (const InvariantError& e) {
        std::cerr << path << ": invalid: " << e.what() << "\n";
        for (const auto& v : e.violations()) std::cerr << "  - " << v << "\n";
    } catch (const std::exception& e) {
        std::cerr << path << ": invalid: " << e.what() << "\n";
    }
    return kExitBadInput;
}

// ---- replay -----------------------------------------------------------------

int cmd_replay(const std::string& script_path, const std::string& server) {
    std::vector<twin::ReplayEntry> script;
    twin::ServerAddress address;
    try {
        std::ifstream in(script_path);
        if (!in) throw std::runtime_error("cannot read '" + script_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        script = twin::parse_replay_script(buf.str());
        address = twin::parse_server_address(server);
    } catch (const std::exception& e) {
        std::cerr << "armtwin replay: " << e.what() << "\n";
        return kExitBadInput;
    }
    const auto outcome = twin::run_replay(script, address, std::cout);
    return static_cast<int>(outcome);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"armtwin: robot arm kinematics and digital twin server"};
    app.require_subcommand(1);

    ServeArgs serve;
    auto* serve_cmd = app.add_subcommand("serve", "Run the twin WebSocket server");
    serve_cmd->add_option("--robot", serve.robot, "Preset name or robot file")->envname("ARMTWIN_ROBOT");
    serve_cmd->add_option("--port", serve.port, "TCP port (0 picks a free one)")->envname("ARMTWIN_PORT");
    serve_cmd->add_option("--rate", serve.rate, "Tick and broadcast rate in Hz");
    serve_cmd->add_option("--bind", serve.bind, "Bind address");

    SolveArgs solve;
    auto* solve_cmd = app.add_subcommand("solve", "Inverse kinematics for a target position or pose");
    solve_cmd->add_option("--robot", solve.robot, "Preset name or robot file")->required();
    auto* target_opt = solve_cmd->add_option("--target", solve.target, "Position x,y[,z] in meters");
    auto* pose_opt = solve_cmd->add_option("--pose", solve.pose, "\"x psi y theta z phi\" (meters, degrees)");
    target_opt->excludes(pose_opt);
    solve_cmd->add_option("--seed", solve.seed, "Joint values (rad) used as the numeric seed and selection reference");
    solve_cmd->add_flag("--json", solve.json, "Print one JSON document");

    std::string fk_robot;
    std::string fk_joints;
    bool fk_json = false;
    auto* fk_cmd = app.add_subcommand("fk", "Forward kinematics for joint values");
    fk_cmd->add_option("--robot", fk_robot, "Preset name or robot file")->required();
    fk_cmd->add_option("--joints", fk_joints, "Joint values in radians, comma separated")->required();
    fk_cmd->add_flag("--json", fk_json, "Print one JSON document");

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check a robot description file");
    validate_cmd->add_option("file", validate_path, "Robot file")->required();

    std::string replay_script;
    std::string replay_server = "127.0.0.1:9090";
    auto* replay_cmd = app.add_subcommand("replay", "Send a scripted command sequence to a running server");
    replay_cmd->add_option("script", replay_script, "Replay script (JSON)")->required();
    replay_cmd->add_option("--server", replay_server, "Server address, ws://host:port");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitBadInput;
    }

    if (*serve_cmd) return cmd_serve(serve);
    if (*solve_cmd) {
        if (solve.target.empty() == solve.pose.empty()) {
            std::cerr << "armtwin solve: give exactly one of --target or --pose\n";
            return kExitBadInput;
        }
        return cmd_solve(solve);
    }
    if (*fk_cmd) return cmd_fk(fk_robot, fk_joints, fk_json);
    if (*validate_cmd) return cmd_validate(validate_path);
    if (*replay_cmd) return cmd_replay(replay_script, replay_server);
    return kExitBadInput;
}
