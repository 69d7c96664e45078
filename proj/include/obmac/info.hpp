#pragma once

#include "obmac/dist.hpp"
#include "obmac/scalar.hpp"

namespace obmac {

/// One-bit ADC decision threshold; the hard decision is Y = 1 iff
/// X1 + X2 + Z >= threshold, so p(0|x1,x2) = Q(x1 + x2 - threshold).
struct ChannelParams {
    double threshold = 0.0;
};

/// Independent pair of input distributions, one MAC letter.
struct ProductInput {
    MassPointDistribution f1 = MassPointDistribution::point_mass(0.0);
    MassPointDistribution f2 = MassPointDistribution::point_mass(0.0);
};

/// The five mutual informations of one product input, in bits.
struct RateTuple {
    Bits r1_given_2 = 0.0;  // I(X1;Y|X2)
    Bits r2_given_1 = 0.0;  // I(X2;Y|X1)
    Bits r1 = 0.0;          // I(X1;Y)
    Bits r2 = 0.0;          // I(X2;Y)
    Bits sum = 0.0;         // I(X1,X2;Y)
};

struct BinaryPmf {
    double p0 = 0.0;
    double p1 = 0.0;
};

BinaryPmf transition(double x1, double x2, const ChannelParams& ch);
BinaryPmf output_pmf(const ProductInput& in, const ChannelParams& ch);
BinaryPmf cond_output_pmf(const MassPointDistribution& f1, double x2, const ChannelParams& ch);

RateTuple rate_tuple(const ProductInput& in, const ChannelParams& ch);

/// Weighted objective: I(X1;Y|X2) + lambda I(X2;Y) for 0 < lambda <= 1,
/// I(X2;Y|X1) + lambda I(X1;Y) for lambda > 1.
Bits i_lambda(const ProductInput& in, double lambda, const ChannelParams& ch);

/// Density of the weighted objective over F_{X1} given F_{X2}: the
/// per-letter KL integrand plus the (1-lambda) cross term, averaged over
/// f2. Defined for 0 < lambda <= 1. Its f1-mixture equals i_lambda.
double density_tilde(double x1, const ProductInput& in, double lambda,
                     const ChannelParams& ch);

/// Density over F_{X2} given F_{X1}; f2-mixture equals i_lambda.
/// Defined for 0 < lambda <= 1.
double density_i(double x2, const ProductInput& in, double lambda,
                 const ChannelParams& ch);

/// Ratio of the mixed binary output entropy to the entropy of the mixed
/// output: sum_i w_i H_b(Q(x_i + x2)) / H_b(sum_i w_i Q(x_i + x2)).
/// Equals 1 for single-atom f1 and tends to 1 as x2 -> +inf.
double hb_ratio(const MassPointDistribution& f1, double x2, const ChannelParams& ch);

namespace detail {
/// log2 of sum_i w_i Q(sign * (x_i + shift)), stable far into the tails.
double log2_q_mix(const MassPointDistribution& f, double shift, double sign);
/// log2 p_Y(y) for y = 0 (sign +1) or y = 1 (sign -1).
double log2_q_mix_output(const ProductInput& in, const ChannelParams& ch, double sign);
}  // namespace detail

}  // namespace obmac
