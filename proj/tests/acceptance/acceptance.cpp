// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Run with criterion numbers as arguments to select a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "armtwin/errors.hpp"
#include "armtwin/ik.hpp"
#include "armtwin/kinematics.hpp"
#include "armtwin/motion.hpp"
#include "armtwin/twin/client.hpp"
#include "armtwin/twin/hub.hpp"
#include "armtwin/twin/replay.hpp"
#include "armtwin/twin/server.hpp"

using namespace armtwin;
using namespace armtwin::twin;
using Clock = std::chrono::steady_clock;
using nlohmann::json;

namespace {

struct Result {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

JointVector random_in_limits(const RobotModel& m, std::mt19937_64& rng, double margin = 0.0) {
    JointVector q(static_cast<Eigen::Index>(m.dof()));
    for (std::size_t i = 0; i < m.dof(); ++i) {
        std::uniform_real_distribution<double> d(m.joints[i].limit.min + margin, m.joints[i].limit.max - margin);
        q[static_cast<Eigen::Index>(i)] = d(rng);
    }
    return q;
}

// ---- 1 ---------------------------------------------------------------------

Result planar_ik() {
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::uniform_real_distribution<double> radius(1e-3, 2.0);
    const double l1 = 1.0, l2 = 1.0;

    std::vector<Eigen::Vector2d> targets;
    for (int i = 0; i < 9900; ++i) {
        const double a = angle(rng), r = radius(rng);
        targets.emplace_back(r * std::cos(a), r * std::sin(a));
    }
    for (int i = 0; i < 100; ++i) {  // full extension
        const double a = angle(rng);
        targets.emplace_back(2.0 * std::cos(a), 2.0 * std::sin(a));
    }

    double worst = 0.0;
    int wrong_count = 0, failures = 0, boundary = 0;
    const auto t0 = Clock::now();
    for (const auto& t : targets) {
        IkSolutionSet set;
        try {
            set = ik_planar_2r(l1, l2, t);
        } catch (const Error&) {
            ++failures;
            continue;
        }
        const double c2 = std::clamp((t.squaredNorm() - l1 * l1 - l2 * l2) / (2 * l1 * l2), -1.0, 1.0);
        const bool on_boundary = std::sqrt((1 - c2) * (1 + c2)) < 1e-9;
        boundary += on_boundary;
        if (set.size() != (on_boundary ? 1u : 2u)) ++wrong_count;
        for (const auto& s : set.solutions) {
            const Eigen::Vector2d p(l1 * std::cos(s.q[0]) + l2 * std::cos(s.q[0] + s.q[1]),
                                    l1 * std::sin(s.q[0]) + l2 * std::sin(s.q[0] + s.q[1]));
            worst = std::max(worst, (p - t).norm());
        }
    }
    const double elapsed = seconds_since(t0);
    Result r;
    r.pass = failures == 0 && wrong_count == 0 && worst < 1e-9 && elapsed < 1.0;
    r.detail = std::to_string(targets.size()) + " targets (" + std::to_string(boundary) +
               " boundary), max FK error " + fmt("%.2e", worst) + " m, wrong branch counts " +
               std::to_string(wrong_count) + ", unreachable " + std::to_string(failures) + ", " +
               fmt("%.3f", elapsed) + " s";
    return r;
}

// ---- 2 ---------------------------------------------------------------------

Result analytic_round_trip() {
    const RobotModel m = builtin_preset("ur5");
    std::mt19937_64 rng(2002);
    int recovered = 0, errors = 0;
    double worst_pos = 0, worst_rot = 0, worst_match = 0;
    const int n = 1000;
    const auto t0 = Clock::now();
    for (int i = 0; i < n; ++i) {
        const JointVector q = random_in_limits(m, rng);
        const Transform target = forward_kinematics(m, q);
        IkSolutionSet set;
        try {
            set = ik_analytic_6dof(m, target);
        } catch (const Error&) {
            ++errors;
            continue;
        }
        double best = 1e9;
        for (const auto& s : set.solutions) {
            const Transform fk = forward_kinematics(m, s.q);
            worst_pos = std::max(worst_pos, (fk.position - target.position).norm());
            worst_rot = std::max(worst_rot, rotation_distance(fk.rotation, target.rotation));
            double d = 0;
            for (Eigen::Index j = 0; j < q.size(); ++j) d = std::max(d, std::abs(normalize_angle(s.q[j] - q[j])));
            best = std::min(best, d);
        }
        worst_match = std::max(worst_match, best);
        recovered += best < 1e-9;
    }
    const double elapsed = seconds_since(t0);
    Result r;
    r.pass = recovered == n && worst_pos < 1e-6 && worst_rot < 1e-6 && elapsed < 5.0;
    r.detail = std::to_string(recovered) + "/" + std::to_string(n) + " recovered (worst joint match " +
               fmt("%.2e", worst_match) + " rad), branch FK error max " + fmt("%.2e", worst_pos) + " m / " +
               fmt("%.2e", worst_rot) + " rad, solver errors " + std::to_string(errors) + ", " +
               fmt("%.3f", elapsed) + " s";
    return r;
}

// ---- 3 ---------------------------------------------------------------------

Result numeric_convergence() {
    const RobotModel m = builtin_preset("tracker4dof");
    std::mt19937_64 rng(3003);
    std::normal_distribution<double> gauss(0, 1);
    std::uniform_real_distribution<double> unit(0, 1);
    const int n = 1000;
    int converged = 0, limit_violations = 0;
    int max_iters = 0;
    for (int i = 0; i < n; ++i) {
        const JointVector q = random_in_limits(m, rng);
        JointVector dir(4);
        for (int j = 0; j < 4; ++j) dir[j] = gauss(rng);
        const JointVector seed = m.clamp(q + dir.normalized() * 0.3 * unit(rng));
        const Eigen::Vector3d target = forward_kinematics(m, q).position;
        try {
            const auto set = ik_numeric_dls(m, IkTarget::position_only(target), seed);
            const JointVector& s = set.solutions.front().q;
            if (!m.within_limits(s)) ++limit_violations;
            if ((forward_kinematics(m, s).position - target).norm() < 1e-6 && set.iterations <= 200) ++converged;
            max_iters = std::max(max_iters, set.iterations);
        } catch (const NoConvergence& e) {
            if (!m.within_limits(e.best())) ++limit_violations;
        }
    }
    Result r;
    r.pass = converged >= n * 95 / 100 && limit_violations == 0;
    r.detail = std::to_string(converged) + "/" + std::to_string(n) + " converged (" +
               fmt("%.1f", 100.0 * converged / n) + "%, need 95%), max iterations " + std::to_string(max_iters) +
               ", limit violations " + std::to_string(limit_violations);
    return r;
}

// ---- 4 ---------------------------------------------------------------------

struct Observer {
    TwinClient client;
    std::optional<JointVector> latest;

    // Drains frames until the joint state has not changed for `quiet` seconds.
    std::optional<JointVector> wait_settled(double quiet, double timeout) {
        const auto t0 = Clock::now();
        auto last_change = Clock::now();
        std::optional<JointVector> prev;
        while (seconds_since(t0) < timeout) {
            const auto f = client.receive(std::chrono::milliseconds(200));
            if (!f) continue;
            const json j = json::parse(*f, nullptr, false);
            if (!j.is_object() || j.value("op", "") != "publish" || j.value("topic", "") != "/joint_states") continue;
            const auto pos = j["msg"]["position"].get<std::vector<double>>();
            JointVector q = Eigen::Map<const Eigen::VectorXd>(pos.data(), static_cast<Eigen::Index>(pos.size()));
            if (!prev || *prev != q) last_change = Clock::now();
            prev = q;
            if (std::chrono::duration<double>(Clock::now() - last_change).count() >= quiet) return prev;
        }
        return std::nullopt;
    }
};

Result pose_scenarios() {
    Result r;
    std::ostringstream detail;
    bool ok = true;

    // Part 1: the command mapping itself.
    const struct {
        PoseCommand cmd;
        Eigen::Vector3d position;
        Eigen::Matrix3d rotation;
    } rows[] = {
        {{3, 0, 4, 0, 5, 0}, {3, 4, 5}, Eigen::Matrix3d::Identity()},
        {{3, 0, -4, 0, 5, 90}, {3, -4, 5}, Eigen::AngleAxisd(kPi / 2, Eigen::Vector3d::UnitZ()).toRotationMatrix()},
        {{-3, 60, 4, 0, -2, 0}, {-3, 4, -2}, Eigen::AngleAxisd(kPi / 3, Eigen::Vector3d::UnitX()).toRotationMatrix()},
    };
    double worst_rot = 0;
    for (const auto& row : rows) {
        const Transform t = pose_to_transform(pose_from_command(row.cmd));
        ok = ok && t.position == row.position;  // bit-exact
        worst_rot = std::max(worst_rot, (t.rotation - row.rotation).cwiseAbs().maxCoeff());
    }
    // Exact up to the rounding of cos/sin of the converted angle (cos(pi/2) is 6.1e-17, not 0).
    ok = ok && worst_rot <= 4 * std::numeric_limits<double>::epsilon();
    detail << "mapping positions bit-exact " << (ok ? "yes" : "no") << ", rotation max deviation "
           << fmt("%.1e", worst_rot) << "; ";

    // Part 2: replay against a served model scaled so the rows are reachable.
    const std::string root = ARMTWIN_SOURCE_DIR;
    const RobotModel model = load_robot_file(root + "/tests/data/ur5_x10.robot");
    std::ifstream in(root + "/tests/data/pose_rows.replay.json");
    std::stringstream buf;
    buf << in.rdbuf();
    const auto script = parse_replay_script(buf.str());

    TwinServer::Options opts;
    opts.bind_address = "127.0.0.1";
    opts.port = 0;
    TwinServer server(model, opts);
    std::thread runner([&] { server.run(); });
    const ServerAddress addr{"127.0.0.1", server.port()};

    Observer obs;
    obs.client.connect(addr);
    obs.client.send(R"({"op":"subscribe","topic":"/joint_states"})");

    double worst_pos = 0, worst_ori = 0;
    int accepted = 0;
    for (std::size_t i = 0; i < script.size(); ++i) {
        std::ostringstream log;
        const auto outcome = run_replay({script[i]}, addr, log);
        if (outcome != ReplayOutcome::ok) {
            ok = false;
            detail << "row " << i << " replay status " << static_cast<int>(outcome) << " (" << log.str() << "); ";
            continue;
        }
        ++accepted;
        const auto q = obs.wait_settled(0.5, 40.0);
        if (!q) {
            ok = false;
            detail << "row " << i << " never settled; ";
            continue;
        }
        const auto& m = script[i].msg;
        const PoseCommand cmd{m["x"], m["psi"], m["y"], m["theta"], m["z"], m["phi"]};
        const Transform want = pose_to_transform(pose_from_command(cmd));
        const Transform got = forward_kinematics(model, *q);
        worst_pos = std::max(worst_pos, (got.position - want.position).norm());
        worst_ori = std::max(worst_ori, rotation_distance(got.rotation, want.rotation));
    }
    obs.client.close();
    server.stop();
    runner.join();

    ok = ok && accepted == 3 && worst_pos < 1e-4;
    detail << accepted << "/3 pose commands accepted over WebSocket, final FK error max " << fmt("%.2e", worst_pos)
           << " m (orientation " << fmt("%.2e", worst_ori) << " rad)";
    r.pass = ok;
    r.detail = detail.str();
    return r;
}

// ---- 5 ---------------------------------------------------------------------

Result trajectory_invariants() {
    const RobotModel m = builtin_preset("ur5");
    std::mt19937_64 rng(5005);
    std::uniform_real_distribution<double> dur(0.2, 5.0);
    int broken = 0, endpoint = 0, midpoint = 0, velocity = 0;
    double worst_mid = 0, worst_vel_ratio = 0;
    for (int i = 0; i < 1000; ++i) {
        const JointVector a = random_in_limits(m, rng);
        const JointVector b = random_in_limits(m, rng);
        const double T = dur(rng);
        const double dt = T / (5 + static_cast<double>(rng() % 200));
        const Trajectory t = plan_joint_trajectory(m, a, b, T, dt);
        if (!check_trajectory(t, &m).empty()) ++broken;
        if (sample_trajectory(t, T) != b || t.waypoints.back().q != b || t.waypoints.front().q != a ||
            t.waypoints.back().time != T) {
            ++endpoint;
        }
        const double mid = (sample_trajectory(t, T / 2) - (a + b) / 2).cwiseAbs().maxCoeff();
        worst_mid = std::max(worst_mid, mid);
        if (mid > 1e-12) ++midpoint;
        const JointVector bound = (b - a).cwiseAbs() * 1.5 / T;
        bool vel_ok = true;
        auto check_vel = [&](const JointVector& v) {
            const JointVector excess = v.cwiseAbs() - bound;
            if ((excess.array() > 1e-9).any()) vel_ok = false;
            for (Eigen::Index j = 0; j < v.size(); ++j) {
                if (bound[j] > 0) worst_vel_ratio = std::max(worst_vel_ratio, std::abs(v[j]) / bound[j]);
            }
        };
        for (const auto& w : t.waypoints) check_vel(w.qdot);
        for (int k = 0; k <= 100; ++k) check_vel(sample_velocity(t, T * k / 100.0));
        if (!vel_ok) ++velocity;
    }
    Result r;
    r.pass = broken + endpoint + midpoint + velocity == 0;
    r.detail = "1000 trajectories: C1/limit violations " + std::to_string(broken) + ", endpoint mismatches " +
               std::to_string(endpoint) + ", midpoint max deviation " + fmt("%.1e", worst_mid) +
               ", peak velocity / (1.5 dq/T) max " + fmt("%.12f", worst_vel_ratio) + " (violations " +
               std::to_string(velocity) + ")";
    return r;
}

// ---- 6 ---------------------------------------------------------------------

Result tracking_convergence() {
    auto model = std::make_shared<const RobotModel>(builtin_preset("tracker4dof"));
    std::mt19937_64 rng(6006);
    const int targets = 100;
    int converged = 0, step_violations = 0, limit_violations = 0, worst_ticks = 0;
    double worst_final = 0;
    for (int i = 0; i < targets; ++i) {
        // Target placed so that the standoff point is a configuration the arm can hold.
        const JointVector q_star = random_in_limits(*model, rng, 0.2);
        const Eigen::Vector3d ee = forward_kinematics(*model, q_star).position;
        const Eigen::Vector3d anchor = chain_frames(*model, q_star)[model->dof() - 2].position;
        const Eigen::Vector3d target = ee + kDefaultStandoff * (ee - anchor).normalized();

        ControllerState ctrl = make_controller(model);
        apply_command(ctrl, "/cmd/track", {{"x", target.x()}, {"y", target.y()}, {"z", target.z()}}, 0.0);
        int hit = -1;
        double dist = 0;
        for (int k = 1; k <= 200; ++k) {
            const JointVector before = ctrl.current;
            tick(ctrl, k / 30.0);
            if ((ctrl.current - before).cwiseAbs().maxCoeff() > ctrl.config.max_step + 1e-15) ++step_violations;
            if (!model->within_limits(ctrl.current)) ++limit_violations;
            dist = (forward_kinematics(*model, ctrl.current).position -
                    standoff_point(*model, target, kDefaultStandoff, ctrl.current))
                       .norm();
            if (hit < 0 && dist < 1e-3) hit = k;
        }
        if (hit > 0) {
            ++converged;
            worst_ticks = std::max(worst_ticks, hit);
        }
        worst_final = std::max(worst_final, dist);
    }
    Result r;
    r.pass = converged == targets && step_violations == 0 && limit_violations == 0;
    r.detail = std::to_string(converged) + "/" + std::to_string(targets) +
               " stationary targets within 1e-3 m of the standoff point by tick 200 (slowest at tick " +
               std::to_string(worst_ticks) + ", worst final distance " + fmt("%.2e", worst_final) +
               " m), max_step violations " + std::to_string(step_violations) + ", limit violations " +
               std::to_string(limit_violations);
    return r;
}

// ---- 7 ---------------------------------------------------------------------

std::string random_bytes(std::mt19937_64& rng) {
    std::string s(rng() % 200, '\0');
    for (auto& c : s) c = static_cast<char>(rng() % 256);
    return s;
}

json random_value(std::mt19937_64& rng, int depth = 0) {
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    switch (rng() % (depth > 1 ? 7 : 9)) {
        case 0: return nullptr;
        case 1: return rng() % 2 == 0;
        case 2: return static_cast<std::int64_t>(rng());
        case 3: return u(rng);
        case 4: return "s" + std::to_string(rng() % 100);
        case 5: return std::numeric_limits<double>::max();
        case 6: return -static_cast<std::int64_t>(rng() % 20);
        case 7: {
            json a = json::array();
            for (int i = 0; i < static_cast<int>(rng() % 4); ++i) a.push_back(random_value(rng, depth + 1));
            return a;
        }
        default: {
            json o = json::object();
            for (int i = 0; i < static_cast<int>(rng() % 4); ++i) o["k" + std::to_string(i)] = random_value(rng, depth + 1);
            return o;
        }
    }
}

json plausible_command(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-5, 5);
    switch (rng() % 4) {
        case 0: return {{"index", static_cast<int>(rng() % 7) - 1}, {"position", u(rng)}};
        case 1:
            return {{"x", u(rng) / 8}, {"psi", u(rng) * 36}, {"y", u(rng) / 8}, {"theta", u(rng) * 36},
                    {"z", u(rng) / 8}, {"phi", u(rng) * 36}};
        case 2: return {{"x", u(rng) / 6}, {"y", u(rng) / 6}, {"z", u(rng) / 6}, {"enable", rng() % 4 != 0}};
        default: return json::object();
    }
}

json random_frame(std::mt19937_64& rng) {
    static const std::vector<std::string> ops = {"advertise", "subscribe", "unsubscribe", "publish", "status",
                                                 "fly", "call_service", "", "PUBLISH"};
    static const std::vector<std::string> topic_names = {"/joint_states", "/cmd/joint", "/cmd/pose", "/cmd/track",
                                                         "/cmd/stop", "/cmd/fly", "", "joint_states"};
    json f = json::object();
    if (rng() % 10) f["op"] = ops[rng() % ops.size()];
    else f["op"] = random_value(rng);
    if (rng() % 10) f["topic"] = topic_names[rng() % topic_names.size()];
    else if (rng() % 2) f["topic"] = random_value(rng);
    if (rng() % 3) {
        json msg = rng() % 2 ? plausible_command(rng) : random_value(rng);
        if (msg.is_object() && !msg.empty() && rng() % 3 == 0) {
            // Type-confuse one field.
            auto it = msg.begin();
            std::advance(it, static_cast<long>(rng() % msg.size()));
            *it = random_value(rng);
        }
        f["msg"] = msg;
    }
    if (rng() % 10 < 7) f["id"] = rng() % 15 ? json("id" + std::to_string(rng())) : random_value(rng);
    return f;
}

Result protocol_fuzz() {
    TwinHub hub(std::make_shared<const RobotModel>(builtin_preset("tracker4dof")));
    const RobotModel& model = *hub.controller().model;
    hub.connect(1, "fuzzer", 0.0);
    std::mt19937_64 rng(7007);
    const int n = 100000;
    int crashes = 0, id_frames = 0, unanswered = 0, limit_violations = 0;
    double now = 0.0;
    for (int i = 0; i < n; ++i) {
        std::string raw;
        std::optional<json> id;
        switch (rng() % 5) {
            case 0: raw = random_bytes(rng); break;
            case 1: {  // truncated JSON
                const std::string full = random_frame(rng).dump();
                raw = full.substr(0, rng() % (full.size() + 1));
                break;
            }
            case 2: {  // byte-level mutation of a valid frame
                raw = random_frame(rng).dump();
                if (!raw.empty()) raw[rng() % raw.size()] = static_cast<char>(rng() % 256);
                break;
            }
            default: raw = random_frame(rng).dump(); break;
        }
        const json parsed = json::parse(raw, nullptr, false);
        if (!parsed.is_discarded() && parsed.is_object() && parsed.contains("id")) id = parsed["id"];

        std::vector<std::string> replies;
        try {
            replies = hub.handle_client_message(1, raw, now);
        } catch (...) {
            ++crashes;
        }
        if (id) {
            ++id_frames;
            bool answered = false;
            for (const auto& rep : replies) {
                const json j = json::parse(rep, nullptr, false);
                if (!j.is_discarded() && j.value("op", "") == "status" && j.contains("id") && j["id"] == *id) {
                    answered = true;
                }
            }
            if (!answered) ++unanswered;
        }
        if (i % 3 == 0) {
            now += 1.0 / 30.0;
            try {
                hub.tick(now);
            } catch (...) {
                ++crashes;
            }
        }
        if (!model.within_limits(hub.controller().current)) ++limit_violations;
    }
    Result r;
    r.pass = crashes == 0 && unanswered == 0 && limit_violations == 0;
    r.detail = std::to_string(n) + " fuzzed frames: crashes " + std::to_string(crashes) + ", id-carrying " +
               std::to_string(id_frames) + " (unanswered " + std::to_string(unanswered) + "), limit violations " +
               std::to_string(limit_violations);
    return r;
}

// ---- 8 ---------------------------------------------------------------------

Result broadcast_rate() {
    TwinServer::Options opts;
    opts.bind_address = "127.0.0.1";
    opts.port = 0;
    opts.rate_hz = 30.0;
    TwinServer server(builtin_preset("planar2r"), opts);
    std::thread runner([&] { server.run(); });
    const ServerAddress addr{"127.0.0.1", server.port()};

    struct Capture {
        TwinClient client;
        std::vector<double> arrival;
        std::map<double, std::string> by_stamp;
    };
    Capture caps[2];
    for (auto& c : caps) {
        c.client.connect(addr);
        c.client.send(R"({"op":"subscribe","topic":"/joint_states"})");
    }
    // Keep the arm moving so frames carry changing payloads.
    TwinClient driver;
    driver.connect(addr);
    driver.send(R"({"op":"publish","topic":"/cmd/pose","msg":{"x":0.2,"psi":0,"y":1.5,"theta":0,"z":0,"phi":0}})");

    const double capture_s = 10.0;
    std::vector<std::thread> readers;
    const auto t0 = Clock::now();
    for (auto& c : caps) {
        readers.emplace_back([&c, t0, capture_s] {
            while (seconds_since(t0) < capture_s) {
                const auto f = c.client.receive(std::chrono::milliseconds(100));
                if (!f) continue;
                const double at = seconds_since(t0);
                const json j = json::parse(*f, nullptr, false);
                if (j.is_discarded() || j.value("topic", "") != "/joint_states" || j.value("op", "") != "publish") {
                    continue;
                }
                c.arrival.push_back(at);
                c.by_stamp[j["msg"]["stamp"].get<double>()] = *f;
            }
        });
    }
    for (auto& t : readers) t.join();
    for (auto& c : caps) c.client.close();
    driver.close();
    server.stop();
    runner.join();

    bool ok = true;
    std::ostringstream detail;
    for (int k = 0; k < 2; ++k) {
        const auto& a = caps[k].arrival;
        if (a.size() < 2) {
            ok = false;
            detail << "subscriber " << k << " got " << a.size() << " frames; ";
            continue;
        }
        const double mean_ms = 1000.0 * (a.back() - a.front()) / static_cast<double>(a.size() - 1);
        ok = ok && std::abs(mean_ms - 1000.0 / 30.0) <= 0.2 * 1000.0 / 30.0;
        detail << "subscriber " << k << ": " << a.size() << " frames, mean gap " << fmt("%.2f", mean_ms) << " ms; ";
    }
    std::size_t common = 0, mismatched = 0;
    for (const auto& [stamp, frame] : caps[0].by_stamp) {
        auto it = caps[1].by_stamp.find(stamp);
        if (it == caps[1].by_stamp.end()) continue;
        ++common;
        if (it->second != frame) ++mismatched;
    }
    const std::size_t fewer = std::min(caps[0].by_stamp.size(), caps[1].by_stamp.size());
    ok = ok && mismatched == 0 && common + 2 >= fewer && common > 250;
    detail << common << " frames seen by both, byte mismatches " << mismatched;
    Result r;
    r.pass = ok;
    r.detail = detail.str();
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
        {"planar IK soundness and completeness", planar_ik},
        {"6-DOF analytic round-trip", analytic_round_trip},
        {"numeric IK convergence", numeric_convergence},
        {"pose command scenario replay", pose_scenarios},
        {"trajectory invariants", trajectory_invariants},
        {"tracking convergence", tracking_convergence},
        {"protocol robustness", protocol_fuzz},
        {"broadcast rate", broadcast_rate},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(number)) continue;
        Result r;
        try {
            r = criteria[i].second();
        } catch (const std::exception& e) {
            r = {false, std::string("threw: ") + e.what()};
        }
        failed += !r.pass;
        std::cout << (r.pass ? "PASS" : "FAIL") << "  criterion " << number << " (" << criteria[i].first
                  << "): " << r.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
