#pragma once

#include <cstddef>
#include <vector>

#include "obmac/scalar.hpp"

namespace obmac {

/// Finitely supported probability distribution on the real line.
/// Invariants: points strictly increasing, weights positive, weights sum
/// to 1 (validated to 1e-10 on construction, then renormalized exactly).
class MassPointDistribution {
public:
    MassPointDistribution(std::vector<double> points, std::vector<double> weights);

    static MassPointDistribution point_mass(double x);

    const std::vector<double>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return points_.size(); }

    /// P(X <= x)
    double cdf(double x) const;
    /// P(X < x)
    double cdf_left(double x) const;

private:
    std::vector<double> points_;
    std::vector<double> weights_;
};

struct PowerBudget {
    double p1 = 0.0;
    double p2 = 0.0;
};

/// E[X^2] under d.
double second_moment(const MassPointDistribution& d);

/// Levy distance between the CDFs of f and g, computed by bisection on
/// the feasibility predicate with candidate checks at the atoms of both
/// distributions shifted by +-eps. Absolute tolerance 1e-12.
double levy_distance(const MassPointDistribution& f, const MassPointDistribution& g);

/// p *^ p' = p(1-2p') + p'(1-2p), the pseudo-convolution coefficient of
/// the ternary sum family; defined for p, p' in [0, 1/4].
Prob hat_star(Prob p, Prob q);

/// Zero-mean unit-power ternary marginal with atoms {-sqrt(2), 0, sqrt(2)}
/// and weights (p, 1-2p, p); p in [0, 1/4].
MassPointDistribution remark2_ternary(double p);

/// Distribution of X1 + X2 for independent ternary marginals with
/// parameters p and q: atoms on {0, +-sqrt(2), +-2 sqrt(2)}, zero-weight
/// atoms pruned.
MassPointDistribution remark2_sum_distribution(double p, double q);

/// Drops atoms with weight < weight_floor (renormalizing) and coalesces
/// runs of atoms closer than merge_tol at their weight-weighted mean.
/// Idempotent. Throws if everything would be pruned.
MassPointDistribution prune_merge(const MassPointDistribution& d, double weight_floor,
                                  double merge_tol);

}  // namespace obmac
