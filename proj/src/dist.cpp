#include "obmac/dist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace obmac {

namespace {

constexpr double kSumTol = 1e-10;
const double kSqrt2 = std::sqrt(2.0);

}  // namespace

MassPointDistribution::MassPointDistribution(std::vector<double> points,
                                             std::vector<double> weights) {
    if (points.size() != weights.size() || points.empty()) {
        throw std::invalid_argument("MassPointDistribution: size mismatch or empty");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i])) {
            throw std::invalid_argument("MassPointDistribution: non-finite point");
        }
        if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
            throw std::invalid_argument("MassPointDistribution: weights must be positive");
        }
    }
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

    double sum = 0.0;
    for (std::size_t k : order) {
        if (!points_.empty() && points[k] == points_.back()) {
            weights_.back() += weights[k];  // dedupe identical positions
        } else {
            points_.push_back(points[k]);
            weights_.push_back(weights[k]);
        }
        sum += weights[k];
    }
    if (std::abs(sum - 1.0) > kSumTol) {
        throw std::invalid_argument("MassPointDistribution: weights sum to " +
                                    std::to_string(sum) + ", expected 1");
    }
    for (double& w : weights_) w /= sum;
}

MassPointDistribution MassPointDistribution::point_mass(double x) {
    return MassPointDistribution({x}, {1.0});
}

double MassPointDistribution::cdf(double x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < points_.size() && points_[i] <= x; ++i) s += weights_[i];
    return s;
}

double MassPointDistribution::cdf_left(double x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < points_.size() && points_[i] < x; ++i) s += weights_[i];
    return s;
}

double second_moment(const MassPointDistribution& d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        s += d.weights()[i] * d.points()[i] * d.points()[i];
    }
    return s;
}

namespace {

// sup over x of A(x) - B(x + eps) for step CDFs. The supremum is attained
// either at an atom of A or just left of (atom of B) - eps.
double sup_gap(const MassPointDistribution& a, const MassPointDistribution& b, double eps) {
    double s = 0.0;
    for (double p : a.points()) s = std::max(s, a.cdf(p) - b.cdf(p + eps));
    for (double p : b.points()) s = std::max(s, a.cdf_left(p - eps) - b.cdf_left(p));
    return s;
}

bool levy_feasible(const MassPointDistribution& f, const MassPointDistribution& g,
                   double eps) {
    return sup_gap(g, f, eps) <= eps && sup_gap(f, g, eps) <= eps;
}

}  // namespace

double levy_distance(const MassPointDistribution& f, const MassPointDistribution& g) {
    if (levy_feasible(f, g, 0.0)) return 0.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 48; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (levy_feasible(f, g, mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

Prob hat_star(Prob p, Prob q) {
    if (p.value() > 0.25 || q.value() > 0.25) {
        throw std::domain_error("hat_star: parameters must lie in [0, 1/4]");
    }
    return Prob(p.value() * (1.0 - 2.0 * q.value()) + q.value() * (1.0 - 2.0 * p.value()));
}

MassPointDistribution remark2_ternary(double p) {
    if (!(p >= 0.0) || p > 0.25) {
        throw std::domain_error("remark2_ternary: p must lie in [0, 1/4]");
    }
    if (p == 0.0) return MassPointDistribution::point_mass(0.0);
    return MassPointDistribution({-kSqrt2, 0.0, kSqrt2}, {p, 1.0 - 2.0 * p, p});
}

MassPointDistribution remark2_sum_distribution(double p, double q) {
    if (!(p >= 0.0) || p > 0.25 || !(q >= 0.0) || q > 0.25) {
        throw std::domain_error("remark2_sum_distribution: parameters must lie in [0, 1/4]");
    }
    const double pq = p * q;
    const double ps = hat_star(Prob(p), Prob(q)).value();
    const double mid = 1.0 - 2.0 * (pq + ps);
    std::vector<double> pts, wts;
    auto add = [&](double x, double w) {
        if (w > 0.0) {
            pts.push_back(x);
            wts.push_back(w);
        }
    };
    add(-2.0 * kSqrt2, pq);
    add(-kSqrt2, ps);
    add(0.0, mid);
    add(kSqrt2, ps);
    add(2.0 * kSqrt2, pq);
    return MassPointDistribution(std::move(pts), std::move(wts));
}

MassPointDistribution prune_merge(const MassPointDistribution& d, double weight_floor,
                                  double merge_tol) {
    std::vector<double> pts, wts;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.weights()[i] >= weight_floor) {
            pts.push_back(d.points()[i]);
            wts.push_back(d.weights()[i]);
        }
    }
    if (pts.empty()) {
        throw std::domain_error("prune_merge: weight floor removes every atom");
    }
    std::vector<double> mpts, mwts;
    bool merged_any = false;
    std::size_t i = 0;
    while (i < pts.size()) {
        std::size_t j = i + 1;
        while (j < pts.size() && pts[j] - pts[j - 1] <= merge_tol) ++j;
        if (j == i + 1) {
            mpts.push_back(pts[i]);
            mwts.push_back(wts[i]);
        } else {
            double w = 0.0, wx = 0.0;
            for (std::size_t k = i; k < j; ++k) {
                w += wts[k];
                wx += wts[k] * pts[k];
            }
            mpts.push_back(wx / w);
            mwts.push_back(w);
            merged_any = true;
        }
        i = j;
    }
    if (!merged_any && mpts.size() == d.size()) return d;
    const double sum = std::accumulate(mwts.begin(), mwts.end(), 0.0);
    for (double& w : mwts) w /= sum;
    return MassPointDistribution(std::move(mpts), std::move(mwts));
}

}  // namespace obmac
