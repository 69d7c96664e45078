#include "obmac/scalar.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace obmac {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvLn2 = 1.4426950408889634074;
constexpr double kLnSqrt2Pi = 0.91893853320467274178;

void require_finite(double x, const char* who) {
    if (!std::isfinite(x)) {
        throw std::domain_error(std::string(who) + ": non-finite argument");
    }
}

}  // namespace

Prob::Prob(double v) : v_(v) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::domain_error("Prob: value outside [0,1]: " + std::to_string(v));
    }
}

Prob q(double x) {
    require_finite(x, "q");
    return Prob(0.5 * std::erfc(x * kInvSqrt2));
}

double log2_q(double x) {
    require_finite(x, "log2_q");
    if (x <= 30.0) {
        return std::log2(0.5 * std::erfc(x * kInvSqrt2));
    }
    // ln Q(x) = -x^2/2 - ln(x sqrt(2 pi)) + ln S(x),
    // S(x) = 1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8.
    const double r = 1.0 / (x * x);
    const double s = 1.0 + r * (-1.0 + r * (3.0 + r * (-15.0 + r * 105.0)));
    return (-0.5 * x * x - std::log(x) - kLnSqrt2Pi + std::log(s)) * kInvLn2;
}

Bits h_b(Prob t) {
    const double p = t.value();
    if (p == 0.0 || p == 1.0) return 0.0;
    // -(1-p) log2(1-p) via log1p keeps the p -> 0 tail accurate.
    return -p * std::log2(p) - (1.0 - p) * std::log1p(-p) * kInvLn2;
}

Bits h_b(double t) { return h_b(Prob(t)); }

Mat2 hessian_q_sqrtsum(double u, double v) {
    require_finite(u, "hessian_q_sqrtsum");
    require_finite(v, "hessian_q_sqrtsum");
    if (!(u > 0.0) || !(v > 0.0)) {
        throw std::domain_error("hessian_q_sqrtsum: arguments must be strictly positive");
    }
    const double su = std::sqrt(u);
    const double sv = std::sqrt(v);
    const double s = su + sv;
    const double pref = gauss_pdf(s);
    Mat2 h;
    h[0][0] = pref * (1.0 / (4.0 * u * su) + s / (4.0 * u));
    h[1][1] = pref * (1.0 / (4.0 * v * sv) + s / (4.0 * v));
    h[0][1] = h[1][0] = pref * s / (4.0 * su * sv);
    return h;
}

double log_q_shift_second_difference(double a, double x, double h) {
    require_finite(a, "log_q_shift_second_difference");
    require_finite(x, "log_q_shift_second_difference");
    if (!(h > 0.0) || !(x - h > 0.0)) {
        throw std::domain_error("log_q_shift_second_difference: need h > 0 and x - h > 0");
    }
    if (a < 0.0) {
        throw std::domain_error("log_q_shift_second_difference: need a >= 0");
    }
    const double fm = log2_q(a + std::sqrt(x - h));
    const double f0 = log2_q(a + std::sqrt(x));
    const double fp = log2_q(a + std::sqrt(x + h));
    return (fp - 2.0 * f0 + fm) / (h * h);
}

double gauss_pdf(double x) {
    return std::exp(-0.5 * x * x - kLnSqrt2Pi);
}

}  // namespace obmac
