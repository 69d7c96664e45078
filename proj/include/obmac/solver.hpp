#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "obmac/info.hpp"

namespace obmac {

struct SolverConfig {
    int max_alternations = 500;
    double rate_tol = 1e-9;
    int multistarts = 16;
    std::uint64_t rng_seed = 1;
    double kkt_grid_halfwidth = 0.0;  // 0: derived from support_bound
    double kkt_grid_step = 1e-2;
    double kkt_tol = 1e-6;
    double weight_floor = 1e-7;
    double merge_tol = 0.0;  // 0: 1e-3 * max(1, sqrt(P)) per side
    int workers = 0;         // 0: hardware concurrency
};

/// Certificate data for the necessary optimality conditions. theta1 is
/// the multiplier of the primary side (X1 for lambda <= 1, X2 for
/// lambda > 1); Lemma 2 requires it to be strictly positive.
struct KktReport {
    double theta1 = 0.0;
    double theta2 = 0.0;
    bool theta1_identifiable = false;
    bool theta2_identifiable = false;
    double theta_fit_residual_1 = 0.0;
    double theta_fit_residual_2 = 0.0;
    double max_grid_violation_1 = 0.0;
    double max_grid_violation_2 = 0.0;
    std::vector<double> atom_slack_1;
    std::vector<double> atom_slack_2;
    double tail_margin_1 = 0.0;
    double tail_margin_2 = 0.0;
    bool passed = false;
};

struct SolveResult {
    ProductInput input;
    double lambda = 1.0;
    Bits value = 0.0;  // i_lambda(input, lambda)
    RateTuple rates;
    KktReport kkt;
    bool converged = false;
};

/// Mass-point caps (n1, n2): (5,3) for 0<lambda<1, (3,3) at lambda=1,
/// (3,5) for lambda>1.
std::pair<int, int> cardinality_cap(double lambda);

/// Maximizes the weighted objective over the weights of f1 on fixed
/// supports, subject to the simplex and sum w_i x_i^2 <= p1. Requires
/// the role-normalized branch, i.e. 0 < lambda <= 1. KKT residual of the
/// returned point is below 1e-10.
std::vector<double> optimize_weights(const std::vector<double>& supports1,
                                     const MassPointDistribution& f2, double lambda,
                                     double p1, const SolverConfig& cfg,
                                     const ChannelParams& ch = {});

/// Best distribution for one side given the other: exact weight
/// optimization alternated with damped-Newton location ascent on the
/// analytic location gradient, confined to the support bound box.
/// side = 1 optimizes f1 given other = f2; side = 2 the reverse.
MassPointDistribution optimize_side(int side, const MassPointDistribution& other,
                                    double lambda, double p, const SolverConfig& cfg,
                                    const ChannelParams& ch = {});

/// Full solve at one (lambda, power budget): multistart alternating
/// maximization plus KKT certification.
SolveResult alternate_maximize(double lambda, PowerBudget budget, const ChannelParams& ch,
                               const SolverConfig& cfg);

struct ThetaEstimate {
    double theta1 = 0.0;
    double theta2 = 0.0;
    bool theta1_identifiable = false;
    bool theta2_identifiable = false;
    double residual1 = 0.0;  // max |density + theta (P - x^2) - I*| over atoms
    double residual2 = 0.0;
};

/// Least-squares fit of the Lagrange multipliers from the equality
/// conditions at the points of increase. A side whose atoms all sit on
/// the power circle leaves theta unidentifiable by the fit; it is then
/// chosen to minimize the worst grid violation.
ThetaEstimate estimate_theta(const ProductInput& input, double lambda, PowerBudget budget,
                             const ChannelParams& ch);

/// Budget inferred from the input's second moments (the constraint is
/// active at certified optima on the primary side, and an inactive side
/// verifies identically at its own moment).
KktReport verify_kkt(const SolveResult& result, const SolverConfig& cfg,
                     const ChannelParams& ch);

/// Same check against an explicit budget.
KktReport verify_kkt(const SolveResult& result, PowerBudget budget, const SolverConfig& cfg,
                     const ChannelParams& ch);

/// Box half-width B such that no point of increase can lie outside
/// [-B, B]: beyond B the density tail bound minus theta_lower (x^2 - P)
/// drops below zero. Floored at max(4, 3 (sqrt(P1) + sqrt(P2))).
double support_bound(PowerBudget budget, double lambda, double theta_lower);

namespace detail {
/// Role-normalized view: maximize I(XA;Y|XB) + mu I(XB;Y), mu in (0,1].
/// A = user 1 for lambda <= 1, user 2 for lambda > 1.
struct NormProblem {
    double mu = 1.0;
    bool swapped = false;
    double pa = 0.0;
    double pb = 0.0;
    ChannelParams ch;
};
NormProblem normalize(double lambda, PowerBudget budget, const ChannelParams& ch);
Bits norm_value(const MassPointDistribution& fa, const MassPointDistribution& fb,
                const NormProblem& np);
}  // namespace detail

}  // namespace obmac
