#include "obmac/region.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "obmac/parallel.hpp"

namespace obmac {

namespace {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;

// Dense two-phase primal simplex with Bland's rule, sized for a handful
// of rows. Constraints: A x (<= or ==) b with b >= 0, x >= 0.
struct LpSolution {
    Vec x;
    double value = 0.0;
    bool feasible = false;
};

LpSolution simplex_solve(const Mat& a, const Vec& b, const std::vector<bool>& is_eq,
                         const Vec& obj) {
    const std::size_t m = a.size();
    const std::size_t n = obj.size();
    std::size_t n_slack = 0, n_art = 0;
    for (bool eq : is_eq) {
        if (eq) {
            ++n_art;
        } else {
            ++n_slack;
        }
    }
    const std::size_t ncol = n + n_slack + n_art;
    Mat t(m, Vec(ncol + 1, 0.0));
    std::vector<std::size_t> basis(m);
    {
        std::size_t slack = n, art = n + n_slack;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
            t[i][ncol] = b[i];
            if (is_eq[i]) {
                t[i][art] = 1.0;
                basis[i] = art++;
            } else {
                t[i][slack] = 1.0;
                basis[i] = slack++;
            }
        }
    }

    auto pivot = [&](std::size_t prow, std::size_t pcol, Vec& red) {
        const double pv = t[prow][pcol];
        for (double& v : t[prow]) v /= pv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == prow || t[i][pcol] == 0.0) continue;
            const double f = t[i][pcol];
            for (std::size_t j = 0; j <= ncol; ++j) t[i][j] -= f * t[prow][j];
        }
        const double f = red[pcol];
        if (f != 0.0) {
            for (std::size_t j = 0; j <= ncol; ++j) red[j] -= f * t[prow][j];
        }
        basis[prow] = pcol;
    };

    // Bland: entering = lowest-index negative reduced cost; leaving = the
    // ratio-test row whose basic variable has the lowest index.
    auto run = [&](Vec& red, std::size_t allowed_cols) -> bool {
        for (int guard = 0; guard < 20000; ++guard) {
            std::size_t pcol = ncol;
            for (std::size_t j = 0; j < allowed_cols; ++j) {
                if (red[j] < -1e-11) {
                    pcol = j;
                    break;
                }
            }
            if (pcol == ncol) return true;
            std::size_t prow = m;
            double best = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (t[i][pcol] <= 1e-12) continue;
                const double ratio = t[i][ncol] / t[i][pcol];
                if (prow == m || ratio < best - 1e-15 ||
                    (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[prow])) {
                    prow = i;
                    best = ratio;
                }
            }
            if (prow == m) return false;  // unbounded
            pivot(prow, pcol, red);
        }
        return false;
    };

    LpSolution sol;
    if (n_art > 0) {
        Vec red(ncol + 1, 0.0);
        for (std::size_t j = n + n_slack; j < ncol; ++j) red[j] = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] >= n + n_slack) {
                for (std::size_t j = 0; j <= ncol; ++j) red[j] -= t[i][j];
            }
        }
        if (!run(red, n + n_slack) || red[ncol] < -1e-8) return sol;
        // Drive any surviving artificial out of the basis.
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] < n + n_slack) continue;
            for (std::size_t j = 0; j < n + n_slack; ++j) {
                if (std::abs(t[i][j]) > 1e-9) {
                    pivot(i, j, red);
                    break;
                }
            }
        }
    }
    {
        Vec red(ncol + 1, 0.0);
        for (std::size_t j = 0; j < n; ++j) red[j] = -obj[j];
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] < n && obj[basis[i]] != 0.0) {
                const double f = obj[basis[i]];
                for (std::size_t j = 0; j <= ncol; ++j) red[j] += f * t[i][j];
            }
        }
        if (!run(red, n + n_slack)) return sol;
        sol.value = red[ncol];
    }
    sol.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n) sol.x[basis[i]] = t[i][ncol];
    }
    sol.feasible = true;
    return sol;
}

}  // namespace

Bits boundary_objective(const RateTuple& rates, double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("boundary_objective: lambda must be positive");
    if (lambda <= 1.0) return rates.r1_given_2 + lambda * rates.r2;
    return rates.r1 + lambda * rates.r2_given_1;
}

std::vector<std::pair<double, double>> default_power_grid(PowerBudget budget) {
    auto axis = [](double p) {
        std::vector<double> v{0.0};
        if (p > 0.0) {
            const double top = 2.0 * p;
            // 16 geometric points from top/64 up to top.
            for (int k = 15; k >= 0; --k) {
                v.push_back(top * std::pow(64.0, -k / 15.0));
            }
        }
        return v;
    };
    const auto a1 = axis(budget.p1);
    const auto a2 = axis(budget.p2);
    std::vector<std::pair<double, double>> cells;
    cells.reserve(a1.size() * a2.size());
    for (double p1 : a1) {
        for (double p2 : a2) cells.emplace_back(p1, p2);
    }
    return cells;
}

PowerGridResult solve_power_grid(double lambda,
                                 const std::vector<std::pair<double, double>>& grid,
                                 const ChannelParams& ch, const SolverConfig& cfg) {
    for (const auto& [p1, p2] : grid) {
        if (p1 < 0.0 || p2 < 0.0) {
            throw std::invalid_argument("solve_power_grid: negative grid power");
        }
    }
    PowerGridResult out;
    out.lambda = lambda;
    out.cells = grid;
    out.results.resize(grid.size());
    SolverConfig cell_cfg = cfg;
    cell_cfg.multistarts = std::min(cfg.multistarts, 6);
    cell_cfg.workers = 1;
    parallel_for(grid.size(), cfg.workers, [&](std::size_t i) {
        out.results[i] =
            alternate_maximize(lambda, {grid[i].first, grid[i].second}, ch, cell_cfg);
    });
    return out;
}

TimeSharedSolution concave_envelope(const PowerGridResult& table, PowerBudget budget) {
    if (table.cells.empty()) {
        throw std::invalid_argument("concave_envelope: empty table");
    }
    const std::size_t n = table.cells.size();
    Vec obj(n);
    for (std::size_t u = 0; u < n; ++u) {
        obj[u] = boundary_objective(table.results[u].rates, table.lambda);
    }
    Mat a(3, Vec(n));
    for (std::size_t u = 0; u < n; ++u) {
        a[0][u] = 1.0;
        a[1][u] = table.cells[u].first;
        a[2][u] = table.cells[u].second;
    }
    const Vec b{1.0, budget.p1, budget.p2};
    const std::vector<bool> is_eq{true, false, false};
    const LpSolution lp = simplex_solve(a, b, is_eq, obj);
    if (!lp.feasible) {
        throw std::runtime_error("concave_envelope: infeasible envelope LP");
    }
    TimeSharedSolution sol;
    sol.lambda = table.lambda;
    for (std::size_t u = 0; u < n; ++u) {
        if (lp.x[u] <= 1e-10) continue;
        TimeSharedAtom atom;
        atom.prob = lp.x[u];
        atom.input = table.results[u].input;
        atom.rates = table.results[u].rates;
        atom.p1 = table.cells[u].first;
        atom.p2 = table.cells[u].second;
        atom.kkt_passed = table.results[u].kkt.passed;
        sol.atoms.push_back(std::move(atom));
    }
    // Renormalize the kept mass.
    double mass = 0.0;
    for (const auto& at : sol.atoms) mass += at.prob;
    for (auto& at : sol.atoms) at.prob /= mass;
    return sol;
}

std::pair<std::pair<Bits, Bits>, std::pair<Bits, Bits>> pentagon_corners(
    const TimeSharedSolution& sol) {
    double a1 = 0.0, a2 = 0.0, b1 = 0.0, b2 = 0.0;
    for (const auto& at : sol.atoms) {
        a1 += at.prob * at.rates.r1_given_2;
        a2 += at.prob * at.rates.r2;
        b1 += at.prob * at.rates.r1;
        b2 += at.prob * at.rates.r2_given_1;
    }
    return {{a1, a2}, {b1, b2}};
}

std::vector<RegionPoint> trace_boundary(std::vector<double> lambdas, PowerBudget budget,
                                        const ChannelParams& ch, const SolverConfig& cfg) {
    for (double l : lambdas) {
        if (!(l > 0.0)) throw std::domain_error("trace_boundary: lambda must be positive");
    }
    std::sort(lambdas.begin(), lambdas.end());
    lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
    if (!std::binary_search(lambdas.begin(), lambdas.end(), 1.0)) {
        lambdas.insert(std::lower_bound(lambdas.begin(), lambdas.end(), 1.0), 1.0);
    }

    const auto grid = default_power_grid(budget);
    std::vector<RegionPoint> points;
    for (double lambda : lambdas) {
        const PowerGridResult table = solve_power_grid(lambda, grid, ch, cfg);
        TimeSharedSolution sol = concave_envelope(table, budget);
        const auto corners = pentagon_corners(sol);
        bool kkt_all = true;
        for (const auto& at : sol.atoms) kkt_all = kkt_all && at.kkt_passed;

        auto emit = [&](char corner) {
            RegionPoint pt;
            pt.lambda = lambda;
            pt.corner = corner;
            pt.r1 = corner == 'A' ? corners.first.first : corners.second.first;
            pt.r2 = corner == 'A' ? corners.first.second : corners.second.second;
            pt.solution = sol;
            pt.kkt_passed = kkt_all;
            points.push_back(std::move(pt));
        };
        if (lambda < 1.0) {
            emit('A');
        } else if (lambda > 1.0) {
            emit('B');
        } else {
            emit('A');
            emit('B');
        }
    }
    return points;
}

Remark2Report remark2_scan(int grid_n, const ChannelParams& ch) {
    if (grid_n < 2) throw std::invalid_argument("remark2_scan: grid_n must be at least 2");
    const double sqrt2 = std::sqrt(2.0);
    const MassPointDistribution fstar({-sqrt2, sqrt2}, {0.5, 0.5});

    Remark2Report rep;
    rep.grid_n = grid_n;
    rep.product_max_sum_rate = -1.0;
    rep.min_levy = 2.0;
    for (int i = 0; i < grid_n; ++i) {
        for (int j = 0; j < grid_n; ++j) {
            const double p = 0.25 * i / (grid_n - 1);
            const double r = 0.25 * j / (grid_n - 1);
            const ProductInput in{remark2_ternary(p), remark2_ternary(r)};
            const double s = rate_tuple(in, ch).sum;
            if (s > rep.product_max_sum_rate) {
                rep.product_max_sum_rate = s;
                rep.best_p = p;
                rep.best_q = r;
            }
            const double d = levy_distance(remark2_sum_distribution(p, r), fstar);
            if (d < rep.min_levy) {
                rep.min_levy = d;
                rep.argmin_levy_p = p;
                rep.argmin_levy_q = r;
            }
        }
    }
    rep.benchmark = 1.0 - h_b(q(sqrt2));
    rep.gap = rep.benchmark - rep.product_max_sum_rate;
    const MassPointDistribution d0 = MassPointDistribution::point_mass(0.0);
    rep.u_construction_rate = 0.5 * rate_tuple({fstar, d0}, ch).sum +
                              0.5 * rate_tuple({d0, fstar}, ch).sum;
    return rep;
}

}  // namespace obmac
