#pragma once

#include <array>

namespace obmac {

/// A probability value, checked to lie in [0,1] on construction.
class Prob {
public:
    Prob() = default;
    explicit Prob(double v);
    double value() const { return v_; }
    operator double() const { return v_; }

private:
    double v_ = 0.0;
};

/// Rates, entropies and mutual informations, all base 2.
using Bits = double;

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Gaussian upper-tail probability Q(x) = P(Z >= x), Z ~ N(0,1).
Prob q(double x);

/// log2 Q(x) without underflow; erfc-based up to x = 30, asymptotic
/// tail series beyond (absolute error < 1e-9 everywhere, < 3e-12 on the
/// series side).
double log2_q(double x);

/// Binary entropy in bits, with the 0*log 0 = 0 convention.
Bits h_b(Prob t);
Bits h_b(double t);

/// Closed-form Hessian of f(u,v) = Q(sqrt(u)+sqrt(v)), u,v > 0.
/// Positive definite everywhere on the open quadrant.
Mat2 hessian_q_sqrtsum(double u, double v);

/// Central second difference of x -> log2 Q(a + sqrt(x)) with step h,
/// divided by h^2. Positive wherever the map is convex (a >= 0, x > h).
double log_q_shift_second_difference(double a, double x, double h);

/// Standard normal density; the derivative of -Q.
double gauss_pdf(double x);

}  // namespace obmac
