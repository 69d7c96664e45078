#pragma once

#include <utility>
#include <vector>

#include "obmac/solver.hpp"

namespace obmac {

/// One time-sharing atom: realization probability, the product input used
/// during that fraction of time, its rates, and its per-letter powers.
struct TimeSharedAtom {
    double prob = 0.0;
    ProductInput input;
    RateTuple rates;
    double p1 = 0.0;
    double p2 = 0.0;
    bool kkt_passed = false;
};

struct TimeSharedSolution {
    std::vector<TimeSharedAtom> atoms;
    double lambda = 1.0;
};

struct RegionPoint {
    double lambda = 1.0;
    char corner = 'A';  // 'A': (I(X1;Y|X2,U), I(X2;Y|U)); 'B': the mirror
    Bits r1 = 0.0;
    Bits r2 = 0.0;
    TimeSharedSolution solution;
    bool kkt_passed = false;
};

struct PowerGridResult {
    double lambda = 1.0;
    std::vector<std::pair<double, double>> cells;
    std::vector<SolveResult> results;  // aligned with cells
};

/// Supporting-functional value of one solved letter: the per-pentagon
/// maximum of R1 + lambda R2 (corner A for lambda <= 1, corner B above).
Bits boundary_objective(const RateTuple& rates, double lambda);

/// Default 17 x 17 power grid per axis: zero plus geometric spacing up
/// to twice the budget, so the envelope can express on/off schemes.
std::vector<std::pair<double, double>> default_power_grid(PowerBudget budget);

PowerGridResult solve_power_grid(double lambda,
                                 const std::vector<std::pair<double, double>>& grid,
                                 const ChannelParams& ch, const SolverConfig& cfg);

/// Upper concave envelope over the solved grid: a small exact simplex LP
/// over convex combinations of cells under the average-power budget. The
/// basic optimal solution carries at most 3 atoms.
TimeSharedSolution concave_envelope(const PowerGridResult& table, PowerBudget budget);

/// (cornerA, cornerB) of the pentagon mixed over the auxiliary atoms.
std::pair<std::pair<Bits, Bits>, std::pair<Bits, Bits>> pentagon_corners(
    const TimeSharedSolution& sol);

/// Boundary sweep: per lambda solve the power grid, convexify, and emit
/// the supported corner; at lambda = 1 both sum-rate corners appear.
/// lambda = 1 is added to the sweep when missing.
std::vector<RegionPoint> trace_boundary(std::vector<double> lambdas, PowerBudget budget,
                                        const ChannelParams& ch, const SolverConfig& cfg);

struct Remark2Report {
    int grid_n = 0;
    double product_max_sum_rate = 0.0;  // best ternary product distribution
    double best_p = 0.0;
    double best_q = 0.0;
    double benchmark = 0.0;  // 1 - H_b(Q(sqrt 2))
    double gap = 0.0;        // benchmark - product_max_sum_rate
    double min_levy = 0.0;
    double argmin_levy_p = 0.0;
    double argmin_levy_q = 0.0;
    double u_construction_rate = 0.0;  // I(X1,X2;Y|U) of the two-atom scheme
};

/// Brute-force scan of the zero-mean unit-power ternary product family
/// on a grid_n x grid_n parameter grid, plus the two-atom time-sharing
/// construction that beats every product distribution.
Remark2Report remark2_scan(int grid_n, const ChannelParams& ch);

}  // namespace obmac
