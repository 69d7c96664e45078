#include "obmac/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace obmac {

using nlohmann::json;

double round12(double x) {
    if (x == 0.0 || !std::isfinite(x)) return x;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

namespace {

json arr12(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(round12(x));
    return a;
}

}  // namespace

json to_json(const MassPointDistribution& d) {
    return json{{"points", arr12(d.points())}, {"weights", arr12(d.weights())}};
}

json to_json(const RateTuple& r) {
    return json{{"r1_given_2", round12(r.r1_given_2)},
                {"r2_given_1", round12(r.r2_given_1)},
                {"r1", round12(r.r1)},
                {"r2", round12(r.r2)},
                {"sum", round12(r.sum)}};
}

json to_json(const KktReport& k) {
    return json{{"theta1", round12(k.theta1)},
                {"theta2", round12(k.theta2)},
                {"theta1_identifiable", k.theta1_identifiable},
                {"theta2_identifiable", k.theta2_identifiable},
                {"theta_fit_residual_1", round12(k.theta_fit_residual_1)},
                {"theta_fit_residual_2", round12(k.theta_fit_residual_2)},
                {"max_grid_violation_1", round12(k.max_grid_violation_1)},
                {"max_grid_violation_2", round12(k.max_grid_violation_2)},
                {"atom_slack_1", arr12(k.atom_slack_1)},
                {"atom_slack_2", arr12(k.atom_slack_2)},
                {"tail_margin_1", round12(k.tail_margin_1)},
                {"tail_margin_2", round12(k.tail_margin_2)},
                {"passed", k.passed}};
}

json to_json(const SolveResult& r) {
    return json{{"lambda", round12(r.lambda)},
                {"tangent_slope", round12(-1.0 / r.lambda)},
                {"value", round12(r.value)},
                {"converged", r.converged},
                {"primary_user", r.lambda <= 1.0 ? 1 : 2},
                {"tie_break", "fewest-atoms-then-lowest-start"},
                {"f1", to_json(r.input.f1)},
                {"f2", to_json(r.input.f2)},
                {"rates", to_json(r.rates)},
                {"kkt", to_json(r.kkt)}};
}

json to_json(const TimeSharedSolution& s) {
    json atoms = json::array();
    for (const auto& at : s.atoms) {
        atoms.push_back(json{{"prob", round12(at.prob)},
                             {"f1", to_json(at.input.f1)},
                             {"f2", to_json(at.input.f2)},
                             {"rates", to_json(at.rates)},
                             {"p1", round12(at.p1)},
                             {"p2", round12(at.p2)},
                             {"kkt_passed", at.kkt_passed}});
    }
    return json{{"lambda", round12(s.lambda)}, {"atoms", atoms}};
}

json to_json(const RegionPoint& p) {
    return json{{"lambda", round12(p.lambda)},
                {"corner", std::string(1, p.corner)},
                {"r1", round12(p.r1)},
                {"r2", round12(p.r2)},
                {"kkt_passed", p.kkt_passed},
                {"solution", to_json(p.solution)}};
}

json to_json(const Remark2Report& r) {
    return json{{"grid_n", r.grid_n},
                {"product_max_sum_rate", round12(r.product_max_sum_rate)},
                {"best_p", round12(r.best_p)},
                {"best_q", round12(r.best_q)},
                {"benchmark", round12(r.benchmark)},
                {"gap", round12(r.gap)},
                {"min_levy", round12(r.min_levy)},
                {"argmin_levy_p", round12(r.argmin_levy_p)},
                {"argmin_levy_q", round12(r.argmin_levy_q)},
                {"u_construction_rate", round12(r.u_construction_rate)}};
}

MassPointDistribution dist_from_json(const json& j) {
    if (!j.is_object()) {
        throw std::runtime_error("distribution: expected a JSON object");
    }
    for (const auto& [key, _] : j.items()) {
        if (key != "points" && key != "weights") {
            throw std::runtime_error("distribution: unknown key \"" + key + "\"");
        }
    }
    if (!j.contains("points") || !j.contains("weights")) {
        throw std::runtime_error("distribution: missing \"points\" or \"weights\"");
    }
    if (!j["points"].is_array() || !j["weights"].is_array()) {
        throw std::runtime_error("distribution: \"points\" and \"weights\" must be arrays");
    }
    std::vector<double> pts, wts;
    for (const auto& v : j["points"]) {
        if (!v.is_number()) throw std::runtime_error("distribution: non-numeric point");
        pts.push_back(v.get<double>());
    }
    for (const auto& v : j["weights"]) {
        if (!v.is_number()) throw std::runtime_error("distribution: non-numeric weight");
        wts.push_back(v.get<double>());
    }
    try {
        return MassPointDistribution(pts, wts);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("distribution: ") + e.what());
    }
}

MassPointDistribution load_distribution(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    try {
        return dist_from_json(j);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

}  // namespace obmac
