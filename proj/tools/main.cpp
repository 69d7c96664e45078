#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "obmac/json_io.hpp"
#include "obmac/parallel.hpp"
#include "obmac/region.hpp"

namespace {

using namespace obmac;

// Exit codes: 0 ok, 1 hard error, 2 converged but uncertified,
// 64 usage, 65 malformed data file.
constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUnverified = 2;
constexpr int kExitUsage = 64;
constexpr int kExitDataErr = 65;

bool log_enabled() {
    const char* v = std::getenv("ONEBIT_MAC_LOG");
    return v != nullptr && std::string(v) != "" && std::string(v) != "0";
}

void log_line(const std::string& msg) {
    if (log_enabled()) std::cerr << "[onebit-mac] " << msg << "\n";
}

bool write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) return false;
    out << text;
    return bool(out);
}

struct CommonOpts {
    double threshold = 0.0;
    std::uint64_t seed = 1;
    int multistarts = 16;
    int workers = 0;
    std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--threshold", o.threshold, "ADC decision threshold")
        ->check(CLI::Range(-100.0, 100.0))
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "RNG seed for multistarts")->capture_default_str();
    cmd->add_option("--multistarts", o.multistarts, "number of solver starts")
        ->check(CLI::Range(1, 4096))
        ->capture_default_str();
    cmd->add_option("--workers", o.workers, "worker threads (0 = all cores)")
        ->check(CLI::Range(0, 4096))
        ->capture_default_str();
    cmd->add_option("--out", o.out, "output path (default: stdout)");
}

SolverConfig make_config(const CommonOpts& o) {
    SolverConfig cfg;
    cfg.rng_seed = o.seed;
    cfg.multistarts = o.multistarts;
    cfg.workers = o.workers == 0 ? default_workers() : o.workers;
    return cfg;
}

int emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return kExitOk;
    }
    if (!write_text(out_path, text)) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return kExitError;
    }
    return kExitOk;
}

int cmd_solve(double lambda, double p1, double p2, const CommonOpts& o) {
    const SolverConfig cfg = make_config(o);
    const ChannelParams ch{o.threshold};
    log_line("solve lambda=" + std::to_string(lambda));
    const SolveResult res = alternate_maximize(lambda, {p1, p2}, ch, cfg);
    const int rc = emit(to_json(res).dump(2) + "\n", o.out);
    if (rc != kExitOk) return rc;
    if (!res.kkt.passed) return kExitUnverified;
    return kExitOk;
}

std::string region_csv(const std::vector<RegionPoint>& points) {
    std::string csv = "lambda,r1,r2,corner,atoms,kkt_passed\n";
    char buf[160];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%c,%zu,%d\n", round12(p.lambda),
                      round12(p.r1), round12(p.r2), p.corner, p.solution.atoms.size(),
                      p.kkt_passed ? 1 : 0);
        csv += buf;
    }
    return csv;
}

std::string boundary_dat(std::vector<RegionPoint> points) {
    // Upper boundary for plotting: sort by r1, drop dominated repeats.
    std::sort(points.begin(), points.end(), [](const RegionPoint& a, const RegionPoint& b) {
        return a.r1 < b.r1 || (a.r1 == b.r1 && a.r2 > b.r2);
    });
    std::string dat = "# r1 r2\n";
    char buf[80];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%.12g %.12g\n", round12(p.r1), round12(p.r2));
        dat += buf;
    }
    return dat;
}

int cmd_trace(const std::vector<double>& lambdas, double p1, double p2,
              const CommonOpts& o) {
    const SolverConfig cfg = make_config(o);
    const ChannelParams ch{o.threshold};
    log_line("trace over " + std::to_string(lambdas.size()) + " lambdas");
    const auto points = trace_boundary(lambdas, {p1, p2}, ch, cfg);

    nlohmann::json jpoints = nlohmann::json::array();
    for (const auto& p : points) jpoints.push_back(to_json(p));

    if (o.out.empty()) {
        std::cout << region_csv(points);
        return kExitOk;
    }
    if (!write_text(o.out + ".csv", region_csv(points)) ||
        !write_text(o.out + ".json", jpoints.dump(2) + "\n") ||
        !write_text(o.out + "_boundary.dat", boundary_dat(points))) {
        std::cerr << "error: cannot write outputs at prefix " << o.out << "\n";
        return kExitError;
    }
    return kExitOk;
}

int cmd_verify(const std::string& f1_path, const std::string& f2_path, double lambda,
               double p1, double p2, const CommonOpts& o) {
    MassPointDistribution f1 = MassPointDistribution::point_mass(0.0);
    MassPointDistribution f2 = MassPointDistribution::point_mass(0.0);
    try {
        f1 = load_distribution(f1_path);
        f2 = load_distribution(f2_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataErr;
    }
    const ChannelParams ch{o.threshold};
    SolveResult probe;
    probe.lambda = lambda;
    probe.input = ProductInput{std::move(f1), std::move(f2)};
    probe.rates = rate_tuple(probe.input, ch);
    probe.value = i_lambda(probe.input, lambda, ch);
    probe.converged = true;
    const SolverConfig cfg = make_config(o);
    const KktReport rep = verify_kkt(probe, PowerBudget{p1, p2}, cfg, ch);
    const int rc = emit(to_json(rep).dump(2) + "\n", o.out);
    if (rc != kExitOk) return rc;
    return rep.passed ? kExitOk : kExitUnverified;
}

int cmd_remark2(int grid_n, const CommonOpts& o) {
    const ChannelParams ch{o.threshold};
    const Remark2Report rep = remark2_scan(grid_n, ch);
    return emit(to_json(rep).dump(2) + "\n", o.out);
}

int cmd_selftest(bool inject_fault, const CommonOpts& o) {
    const ChannelParams ch{o.threshold};
    struct Check {
        std::string name;
        bool passed;
        double margin;
    };
    std::vector<Check> checks;
    std::mt19937_64 rng(o.seed);

    {  // Hessian positive definiteness.
        std::uniform_real_distribution<double> u(1e-3, 50.0);
        double margin = 1.0 / 0.0;
        bool ok = true;
        for (int it = 0; it < 200; ++it) {
            const Mat2 h = hessian_q_sqrtsum(u(rng), u(rng));
            const double det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            const double tr = h[0][0] + h[1][1];
            margin = std::min(margin, std::min(det, tr));
            ok = ok && det > 0.0 && tr > 0.0;
        }
        if (inject_fault) {  // fault-injection hook for exit-path testing
            ok = false;
        }
        checks.push_back({"hessian-positive-definite", ok, margin});
    }
    {  // Convexity of log2 Q(a + sqrt x).
        std::uniform_real_distribution<double> ua(0.0, 10.0);
        std::uniform_real_distribution<double> ux(0.01, 50.0);
        double margin = 1.0 / 0.0;
        bool ok = true;
        for (int it = 0; it < 200; ++it) {
            const double d2 = log_q_shift_second_difference(ua(rng), ux(rng), 1e-3);
            margin = std::min(margin, d2);
            ok = ok && d2 > 0.0;
        }
        checks.push_back({"log-q-shift-convexity", ok, margin});
    }
    auto random_dist = [&rng](double span) {
        std::uniform_int_distribution<int> na(1, 4);
        std::uniform_real_distribution<double> ux(-span, span);
        std::uniform_real_distribution<double> uw(0.05, 1.0);
        const int n = na(rng);
        std::vector<double> pts, wts;
        double sum = 0.0;
        for (int i = 0; i < n;) {
            const double x = ux(rng);
            bool clash = false;
            for (double y : pts) {
                if (std::abs(x - y) < 1e-6) clash = true;
            }
            if (clash) continue;
            pts.push_back(x);
            wts.push_back(uw(rng));
            sum += wts.back();
            ++i;
        }
        for (double& w : wts) w /= sum;
        return MassPointDistribution(pts, wts);
    };
    {  // Per-pair KL bound.
        std::uniform_real_distribution<double> ux(-5.0, 5.0);
        double margin = 1.0 / 0.0;
        bool ok = true;
        for (int it = 0; it < 200; ++it) {
            const ProductInput in{random_dist(2.5), random_dist(2.5)};
            const double l2 = log2_q(std::sqrt(second_moment(in.f1)) +
                                     std::sqrt(second_moment(in.f2)));
            const double bound = 1.0 - 2.0 * l2;
            const double x1 = ux(rng), x2 = ux(rng);
            const auto t = transition(x1, x2, ch);
            const double lpy0 = detail::log2_q_mix_output(in, ch, +1.0);
            const double lpy1 = detail::log2_q_mix_output(in, ch, -1.0);
            double kl = 0.0;
            if (t.p0 > 0.0) kl += t.p0 * (log2_q(x1 + x2 - ch.threshold) - lpy0);
            if (t.p1 > 0.0) kl += t.p1 * (log2_q(-(x1 + x2 - ch.threshold)) - lpy1);
            margin = std::min(margin, bound - std::abs(kl));
            ok = ok && std::abs(kl) <= bound;
        }
        checks.push_back({"kl-pair-bound", ok, margin});
    }
    {  // hb_ratio toward 1.
        const MassPointDistribution f({-2.0, 2.0}, {0.5, 0.5});
        double prev = 0.0;
        bool ok = true;
        for (double x2 : {5.0, 10.0, 15.0, 20.0}) {
            const double r = hb_ratio(f, x2, ch);
            ok = ok && r > prev && r <= 1.0;
            prev = r;
        }
        ok = ok && hb_ratio(MassPointDistribution::point_mass(1.1), 3.0, ch) == 1.0;
        checks.push_back({"hb-ratio-limit", ok, 1.0 - prev});
    }
    {  // Mixture identities.
        std::uniform_real_distribution<double> ul(0.05, 1.0);
        double margin = 0.0;
        bool ok = true;
        for (int it = 0; it < 200; ++it) {
            const ProductInput in{random_dist(2.5), random_dist(2.5)};
            const double lam = ul(rng);
            const double target = i_lambda(in, lam, ch);
            double mix1 = 0.0, mix2 = 0.0;
            for (std::size_t i = 0; i < in.f1.size(); ++i) {
                mix1 += in.f1.weights()[i] * density_tilde(in.f1.points()[i], in, lam, ch);
            }
            for (std::size_t j = 0; j < in.f2.size(); ++j) {
                mix2 += in.f2.weights()[j] * density_i(in.f2.points()[j], in, lam, ch);
            }
            margin = std::max({margin, std::abs(mix1 - target), std::abs(mix2 - target)});
            ok = ok && std::abs(mix1 - target) <= 1e-9 && std::abs(mix2 - target) <= 1e-9;
        }
        checks.push_back({"mixture-identities", ok, margin});
    }
    {  // Single-user reduction.
        SolverConfig cfg = make_config(o);
        cfg.multistarts = std::min(cfg.multistarts, 6);
        const SolveResult res = alternate_maximize(1.0, {2.0, 0.0}, ch, cfg);
        const double target = 1.0 - h_b(q(std::sqrt(2.0)));
        const double err = std::abs(res.value - target);
        bool ok = err <= 1e-4 && res.input.f1.size() == 2;
        if (ok) {
            ok = std::abs(res.input.f1.points()[0] + std::sqrt(2.0)) <= 1e-2 &&
                 std::abs(res.input.f1.points()[1] - std::sqrt(2.0)) <= 1e-2;
        }
        checks.push_back({"single-user-reduction", ok, err});
    }

    bool all_ok = true;
    std::string out;
    char buf[160];
    for (const auto& c : checks) {
        std::snprintf(buf, sizeof buf, "[%s] %-28s margin=%.3g\n", c.passed ? "PASS" : "FAIL",
                      c.name.c_str(), c.margin);
        out += buf;
        all_ok = all_ok && c.passed;
    }
    out += all_ok ? "selftest: all checks passed\n" : "selftest: FAILURES\n";
    const int rc = emit(out, o.out);
    if (rc != kExitOk) return rc;
    return all_ok ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Capacity region tools for the two-user Gaussian MAC with a one-bit ADC"};
    app.require_subcommand(1);

    CommonOpts so, to, vo, ro, sto;
    double lambda = 0.0, p1 = 0.0, p2 = 0.0;
    auto* solve = app.add_subcommand("solve", "maximize the weighted rate at one lambda");
    solve->add_option("--lambda", lambda, "weight on the slower user's rate")
        ->required()
        ->check(CLI::PositiveNumber);
    solve->add_option("--p1", p1, "power budget of user 1")
        ->required()
        ->check(CLI::NonNegativeNumber);
    solve->add_option("--p2", p2, "power budget of user 2")
        ->required()
        ->check(CLI::NonNegativeNumber);
    add_common(solve, so);

    std::vector<double> lambdas;
    double tp1 = 0.0, tp2 = 0.0;
    auto* trace = app.add_subcommand("trace", "trace the capacity region boundary");
    trace->add_option("--lambdas", lambdas, "comma-separated lambda sweep")
        ->required()
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    trace->add_option("--p1", tp1, "power budget of user 1")
        ->required()
        ->check(CLI::NonNegativeNumber);
    trace->add_option("--p2", tp2, "power budget of user 2")
        ->required()
        ->check(CLI::NonNegativeNumber);
    add_common(trace, to);

    std::string f1_path, f2_path;
    double vlambda = 0.0, vp1 = 0.0, vp2 = 0.0;
    auto* verify = app.add_subcommand("verify", "check the KKT conditions of given inputs");
    verify->add_option("--f1", f1_path, "distribution JSON for user 1")->required();
    verify->add_option("--f2", f2_path, "distribution JSON for user 2")->required();
    verify->add_option("--lambda", vlambda, "weight")->required()->check(CLI::PositiveNumber);
    verify->add_option("--p1", vp1, "power budget of user 1")
        ->required()
        ->check(CLI::NonNegativeNumber);
    verify->add_option("--p2", vp2, "power budget of user 2")
        ->required()
        ->check(CLI::NonNegativeNumber);
    add_common(verify, vo);

    int grid_n = 101;
    auto* remark2 = app.add_subcommand("remark2", "ternary product family separation scan");
    remark2->add_option("--grid-n", grid_n, "parameter grid resolution per axis")
        ->check(CLI::Range(2, 100000))
        ->capture_default_str();
    add_common(remark2, ro);

    bool inject_fault = false;
    auto* selftest = app.add_subcommand("selftest", "run the built-in invariant suite");
    selftest->add_flag("--inject-fault", inject_fault, "force one check to fail")
        ->group("");  // hidden
    add_common(selftest, sto);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            return app.exit(e);
        }
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (solve->parsed()) return cmd_solve(lambda, p1, p2, so);
        if (trace->parsed()) return cmd_trace(lambdas, tp1, tp2, to);
        if (verify->parsed()) return cmd_verify(f1_path, f2_path, vlambda, vp1, vp2, vo);
        if (remark2->parsed()) return cmd_remark2(grid_n, ro);
        if (selftest->parsed()) return cmd_selftest(inject_fault, sto);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitUsage;
}
