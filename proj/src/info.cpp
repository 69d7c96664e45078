#include "obmac/info.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace obmac {

namespace {

// a * L where L plays log2(b); zero mass contributes zero regardless of L.
double xlog2(double a, double l) {
    return a == 0.0 ? 0.0 : a * l;
}

// Repairs the ulp-level overshoot of convex-combination roundoff.
double clamp01(double p) {
    return std::clamp(p, 0.0, 1.0);
}

void check_lambda_unit(double lambda, const char* who) {
    if (!(lambda > 0.0) || lambda > 1.0 || !std::isfinite(lambda)) {
        throw std::domain_error(std::string(who) + ": lambda must lie in (0, 1]");
    }
}

}  // namespace

namespace detail {

double log2_q_mix(const MassPointDistribution& f, double shift, double sign) {
    double lmax = -1.0 / 0.0;
    const std::size_t n = f.size();
    std::vector<double> ls(n);
    for (std::size_t i = 0; i < n; ++i) {
        ls[i] = log2_q(sign * (f.points()[i] + shift));
        lmax = std::max(lmax, ls[i]);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += f.weights()[i] * std::exp2(ls[i] - lmax);
    }
    return lmax + std::log2(acc);
}

double log2_q_mix_output(const ProductInput& in, const ChannelParams& ch, double sign) {
    double lmax = -1.0 / 0.0;
    std::vector<double> ls(in.f2.size());
    for (std::size_t j = 0; j < in.f2.size(); ++j) {
        ls[j] = log2_q_mix(in.f1, in.f2.points()[j] - ch.threshold, sign);
        lmax = std::max(lmax, ls[j]);
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < in.f2.size(); ++j) {
        acc += in.f2.weights()[j] * std::exp2(ls[j] - lmax);
    }
    return lmax + std::log2(acc);
}

}  // namespace detail

BinaryPmf transition(double x1, double x2, const ChannelParams& ch) {
    const double p0 = q(x1 + x2 - ch.threshold).value();
    const double p1 = q(-(x1 + x2 - ch.threshold)).value();
    return {p0, p1};
}

BinaryPmf output_pmf(const ProductInput& in, const ChannelParams& ch) {
    double p0 = 0.0, p1 = 0.0;
    for (std::size_t i = 0; i < in.f1.size(); ++i) {
        for (std::size_t j = 0; j < in.f2.size(); ++j) {
            const double w = in.f1.weights()[i] * in.f2.weights()[j];
            const BinaryPmf t = transition(in.f1.points()[i], in.f2.points()[j], ch);
            p0 += w * t.p0;
            p1 += w * t.p1;
        }
    }
    return {clamp01(p0), clamp01(p1)};
}

BinaryPmf cond_output_pmf(const MassPointDistribution& f1, double x2,
                          const ChannelParams& ch) {
    double p0 = 0.0, p1 = 0.0;
    for (std::size_t i = 0; i < f1.size(); ++i) {
        const BinaryPmf t = transition(f1.points()[i], x2, ch);
        p0 += f1.weights()[i] * t.p0;
        p1 += f1.weights()[i] * t.p1;
    }
    return {clamp01(p0), clamp01(p1)};
}

RateTuple rate_tuple(const ProductInput& in, const ChannelParams& ch) {
    const auto& f1 = in.f1;
    const auto& f2 = in.f2;
    double py0 = 0.0;
    double h_y_12 = 0.0;  // H(Y|X1,X2)
    for (std::size_t i = 0; i < f1.size(); ++i) {
        for (std::size_t j = 0; j < f2.size(); ++j) {
            const double w = f1.weights()[i] * f2.weights()[j];
            const double p0 = q(f1.points()[i] + f2.points()[j] - ch.threshold).value();
            py0 += w * p0;
            h_y_12 += w * h_b(Prob(p0));
        }
    }
    double h_y_2 = 0.0;  // H(Y|X2)
    for (std::size_t j = 0; j < f2.size(); ++j) {
        h_y_2 += f2.weights()[j] * h_b(Prob(cond_output_pmf(f1, f2.points()[j], ch).p0));
    }
    double h_y_1 = 0.0;  // H(Y|X1)
    for (std::size_t i = 0; i < f1.size(); ++i) {
        h_y_1 += f1.weights()[i] * h_b(Prob(cond_output_pmf(f2, f1.points()[i], ch).p0));
    }
    const double h_y = h_b(Prob(clamp01(py0)));
    RateTuple r;
    r.r1_given_2 = h_y_2 - h_y_12;
    r.r2_given_1 = h_y_1 - h_y_12;
    r.r1 = h_y - h_y_1;
    r.r2 = h_y - h_y_2;
    r.sum = h_y - h_y_12;
    return r;
}

Bits i_lambda(const ProductInput& in, double lambda, const ChannelParams& ch) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::domain_error("i_lambda: lambda must be positive");
    }
    const RateTuple r = rate_tuple(in, ch);
    if (lambda <= 1.0) return r.r1_given_2 + lambda * r.r2;
    return r.r2_given_1 + lambda * r.r1;
}

double density_tilde(double x1, const ProductInput& in, double lambda,
                     const ChannelParams& ch) {
    check_lambda_unit(lambda, "density_tilde");
    const double tau = ch.threshold;
    const double lpy0 = detail::log2_q_mix_output(in, ch, +1.0);
    const double lpy1 = detail::log2_q_mix_output(in, ch, -1.0);
    double acc = 0.0;
    for (std::size_t j = 0; j < in.f2.size(); ++j) {
        const double x2 = in.f2.points()[j];
        const double s = x1 + x2 - tau;
        const double p0 = q(s).value();
        const double p1 = q(-s).value();
        const double lp0 = log2_q(s);
        const double lp1 = log2_q(-s);
        const double lc0 = detail::log2_q_mix(in.f1, x2 - tau, +1.0);
        const double lc1 = detail::log2_q_mix(in.f1, x2 - tau, -1.0);
        const double kl = xlog2(p0, lp0 - lpy0) + xlog2(p1, lp1 - lpy1);
        const double cross = xlog2(p0, lpy0 - lc0) + xlog2(p1, lpy1 - lc1);
        acc += in.f2.weights()[j] * (kl + (1.0 - lambda) * cross);
    }
    return acc;
}

double density_i(double x2, const ProductInput& in, double lambda,
                 const ChannelParams& ch) {
    check_lambda_unit(lambda, "density_i");
    const double tau = ch.threshold;
    const double lpy0 = detail::log2_q_mix_output(in, ch, +1.0);
    const double lpy1 = detail::log2_q_mix_output(in, ch, -1.0);
    double kl_avg = 0.0;
    for (std::size_t i = 0; i < in.f1.size(); ++i) {
        const double s = in.f1.points()[i] + x2 - tau;
        const double p0 = q(s).value();
        const double p1 = q(-s).value();
        kl_avg += in.f1.weights()[i] *
                  (xlog2(p0, log2_q(s) - lpy0) + xlog2(p1, log2_q(-s) - lpy1));
    }
    const double lc0 = detail::log2_q_mix(in.f1, x2 - tau, +1.0);
    const double lc1 = detail::log2_q_mix(in.f1, x2 - tau, -1.0);
    const double c0 = std::exp2(lc0);
    const double c1 = std::exp2(lc1);
    const double kl_cond = xlog2(c0, lc0 - lpy0) + xlog2(c1, lc1 - lpy1);
    return kl_avg - (1.0 - lambda) * kl_cond;
}

double hb_ratio(const MassPointDistribution& f1, double x2, const ChannelParams& ch) {
    double num = 0.0;
    double mix = 0.0;
    for (std::size_t i = 0; i < f1.size(); ++i) {
        const double p = q(f1.points()[i] + x2 - ch.threshold).value();
        num += f1.weights()[i] * h_b(Prob(p));
        mix += f1.weights()[i] * p;
    }
    const double den = h_b(Prob(clamp01(mix)));
    if (den == 0.0) {
        throw std::domain_error("hb_ratio: denominator underflow");
    }
    return num / den;
}

}  // namespace obmac
