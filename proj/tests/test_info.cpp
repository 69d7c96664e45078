#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "obmac/info.hpp"

using namespace obmac;

namespace {

const double kSqrt2 = std::sqrt(2.0);
constexpr double kSumRateStar = 0.6025969807153306;  // 1 - H_b(Q(sqrt 2))

MassPointDistribution delta0() { return MassPointDistribution::point_mass(0.0); }

MassPointDistribution antipodal(double a) {
    return MassPointDistribution({-a, a}, {0.5, 0.5});
}

MassPointDistribution random_dist(std::mt19937_64& rng, int max_atoms = 4,
                                  double span = 2.5) {
    std::uniform_int_distribution<int> na(1, max_atoms);
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
}

double xlog2(double a, double l) { return a == 0.0 ? 0.0 : a * l; }

}  // namespace

TEST_CASE("transition") {
    const ChannelParams ch;
    auto t = transition(0.0, 0.0, ch);
    CHECK(t.p0 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(t.p1 == doctest::Approx(0.5).epsilon(1e-15));
    t = transition(1.0, 1.0, ch);
    CHECK(t.p0 == doctest::Approx(0.02275013194817921).epsilon(1e-12));
    const ChannelParams shifted{1.3 + 0.9};
    t = transition(1.3, 0.9, shifted);
    CHECK(t.p0 == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("output pmf") {
    const ChannelParams ch;
    auto p = output_pmf({delta0(), delta0()}, ch);
    CHECK(p.p0 == doctest::Approx(0.5).epsilon(1e-15));
    p = output_pmf({antipodal(kSqrt2), delta0()}, ch);
    CHECK(p.p0 == doctest::Approx(0.5).epsilon(1e-14));

    // Power-feasible inputs keep p(0) above Q(sqrt P1 + sqrt P2).
    std::mt19937_64 rng(37);
    for (int it = 0; it < 200; ++it) {
        const ProductInput in{random_dist(rng), random_dist(rng)};
        const double p1 = second_moment(in.f1);
        const double p2 = second_moment(in.f2);
        const double lower = q(std::sqrt(p1) + std::sqrt(p2)).value();
        CHECK(output_pmf(in, ch).p0 >= lower - 1e-14);
    }
}

TEST_CASE("conditional output pmf") {
    const ChannelParams ch;
    auto p = cond_output_pmf(delta0(), 0.0, ch);
    CHECK(p.p0 == doctest::Approx(0.5).epsilon(1e-15));

    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> ux(-4.0, 4.0);
    for (int it = 0; it < 200; ++it) {
        const auto f1 = random_dist(rng);
        const double x2 = ux(rng);
        const double lower = q(std::sqrt(second_moment(f1)) + std::abs(x2)).value();
        const auto pm = cond_output_pmf(f1, x2, ch);
        CHECK(pm.p0 >= lower - 1e-14);
        CHECK(pm.p1 >= lower - 1e-14);
    }
    CHECK(cond_output_pmf(antipodal(kSqrt2), 30.0, ch).p1 ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rate tuple") {
    const ChannelParams ch;
    SUBCASE("deterministic inputs give zero rates") {
        const RateTuple r = rate_tuple({delta0(), delta0()}, ch);
        CHECK(r.sum == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(r.r1_given_2 == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(r.r1 == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("single-user benchmark") {
        const RateTuple r = rate_tuple({antipodal(kSqrt2), delta0()}, ch);
        CHECK(r.sum == doctest::Approx(kSumRateStar).epsilon(1e-12));
        CHECK(r.r1 == doctest::Approx(kSumRateStar).epsilon(1e-12));
        CHECK(r.r2 == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("chain rule and range") {
        std::mt19937_64 rng(43);
        for (int it = 0; it < 200; ++it) {
            const ProductInput in{random_dist(rng), random_dist(rng)};
            const RateTuple r = rate_tuple(in, ch);
            CHECK(std::abs(r.sum - (r.r1 + r.r2_given_1)) <= 1e-9);
            CHECK(std::abs(r.sum - (r.r2 + r.r1_given_2)) <= 1e-9);
            for (double v : {r.r1_given_2, r.r2_given_1, r.r1, r.r2, r.sum}) {
                CHECK(v >= -1e-12);
                CHECK(v <= 1.0 + 1e-12);
            }
            CHECK(r.sum >= r.r1 - 1e-12);
            CHECK(r.sum >= r.r2 - 1e-12);
        }
    }
    SUBCASE("threshold shift equivariance") {
        std::mt19937_64 rng(47);
        for (int it = 0; it < 50; ++it) {
            const auto f1 = random_dist(rng);
            const auto f2 = random_dist(rng);
            const double c = 0.75;
            std::vector<double> shifted = f1.points();
            for (double& x : shifted) x += c;
            const MassPointDistribution f1s(shifted, f1.weights());
            const RateTuple a = rate_tuple({f1, f2}, ChannelParams{0.0});
            const RateTuple b = rate_tuple({f1s, f2}, ChannelParams{c});
            CHECK(std::abs(a.sum - b.sum) <= 1e-14);
            CHECK(std::abs(a.r1_given_2 - b.r1_given_2) <= 1e-14);
            CHECK(std::abs(a.r2 - b.r2) <= 1e-14);
        }
    }
}

TEST_CASE("i_lambda") {
    const ChannelParams ch;
    CHECK(i_lambda({delta0(), delta0()}, 0.7, ch) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(i_lambda({antipodal(kSqrt2), delta0()}, 1.0, ch) ==
          doctest::Approx(kSumRateStar).epsilon(1e-12));
    CHECK_THROWS_AS(i_lambda({delta0(), delta0()}, 0.0, ch), std::domain_error);
    CHECK_THROWS_AS(i_lambda({delta0(), delta0()}, -2.0, ch), std::domain_error);

    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> ul(0.05, 4.0);
    for (int it = 0; it < 100; ++it) {
        const ProductInput in{random_dist(rng), random_dist(rng)};
        const double lam = ul(rng);
        CHECK(i_lambda(in, lam, ch) <= 1.0 + lam);
        // Continuity across the branch point.
        const double lo = i_lambda(in, 1.0 - 1e-9, ch);
        const double hi = i_lambda(in, 1.0 + 1e-9, ch);
        CHECK(std::abs(lo - hi) < 1e-6);
    }
}

TEST_CASE("densities satisfy the mixture identities") {
    const ChannelParams ch;
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> ul(0.05, 1.0);
    for (int it = 0; it < 200; ++it) {
        const ProductInput in{random_dist(rng), random_dist(rng)};
        const double lam = ul(rng);
        const double target = i_lambda(in, lam, ch);
        double mix1 = 0.0;
        for (std::size_t i = 0; i < in.f1.size(); ++i) {
            mix1 += in.f1.weights()[i] * density_tilde(in.f1.points()[i], in, lam, ch);
        }
        CHECK(std::abs(mix1 - target) <= 1e-9);
        double mix2 = 0.0;
        for (std::size_t j = 0; j < in.f2.size(); ++j) {
            mix2 += in.f2.weights()[j] * density_i(in.f2.points()[j], in, lam, ch);
        }
        CHECK(std::abs(mix2 - target) <= 1e-9);
    }
    CHECK_THROWS_AS(density_tilde(0.0, ProductInput{delta0(), delta0()}, 1.5, ch),
                    std::domain_error);
    CHECK_THROWS_AS(density_i(0.0, ProductInput{delta0(), delta0()}, 0.0, ch),
                    std::domain_error);
}

TEST_CASE("density bounds and tail limits") {
    const ChannelParams ch;
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> ul(0.05, 1.0);
    std::uniform_real_distribution<double> ux(-6.0, 6.0);
    for (int it = 0; it < 100; ++it) {
        const ProductInput in{random_dist(rng), random_dist(rng)};
        const double lam = ul(rng);
        const double l2 = log2_q(std::sqrt(second_moment(in.f1)) +
                                 std::sqrt(second_moment(in.f2)));
        const double bound = (2.0 - lam) * (1.0 - 2.0 * l2);
        for (int k = 0; k < 5; ++k) {
            CHECK(std::abs(density_tilde(ux(rng), in, lam, ch)) <= bound + 1e-12);
        }
        // Tail limit of the side-1 density.
        const double lim_bound = -(2.0 - lam) * l2;
        CHECK(density_tilde(40.0, in, lam, ch) <= lim_bound + 1e-9);
        CHECK(density_tilde(-40.0, in, lam, ch) <= lim_bound + 1e-9);
    }

    SUBCASE("side-2 density tail equals -lambda log2 pY(1)") {
        std::mt19937_64 rng2(67);
        for (int it = 0; it < 50; ++it) {
            const ProductInput in{random_dist(rng2), random_dist(rng2)};
            const double lam = 0.3 + 0.7 * (it % 10) / 10.0;
            const double lpy1 = detail::log2_q_mix_output(in, ch, -1.0);
            CHECK(density_i(40.0, in, lam, ch) ==
                  doctest::Approx(-lam * lpy1).epsilon(1e-6));
        }
    }
    CHECK(density_i(0.0, ProductInput{delta0(), delta0()}, 1.0, ch) ==
          doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("lemma-3 style bounds on the KL pieces") {
    const ChannelParams ch;
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> ux(-5.0, 5.0);
    for (int it = 0; it < 200; ++it) {
        const ProductInput in{random_dist(rng), random_dist(rng)};
        const double p1 = second_moment(in.f1);
        const double p2 = second_moment(in.f2);
        const double l2 = log2_q(std::sqrt(p1) + std::sqrt(p2));
        const double x1 = ux(rng), x2 = ux(rng);

        const auto t = transition(x1, x2, ch);
        const double lpy0 = detail::log2_q_mix_output(in, ch, +1.0);
        const double lpy1 = detail::log2_q_mix_output(in, ch, -1.0);
        const double kl = xlog2(t.p0, log2_q(x1 + x2) - lpy0) +
                          xlog2(t.p1, log2_q(-(x1 + x2)) - lpy1);
        CHECK(std::abs(kl) <= 1.0 - 2.0 * l2 + 1e-12);

        const double lc0 = detail::log2_q_mix(in.f1, x2, +1.0);
        const double lc1 = detail::log2_q_mix(in.f1, x2, -1.0);
        const double cross = xlog2(t.p0, lpy0 - lc0) + xlog2(t.p1, lpy1 - lc1);
        const double cross_bound =
            -2.0 * l2 - 2.0 * log2_q(std::sqrt(p1) + std::abs(x2));
        CHECK(std::abs(cross) <= cross_bound + 1e-12);
    }
}

TEST_CASE("constructive lower bound on I(X1;Y|X2)") {
    const ChannelParams ch;
    std::mt19937_64 rng(73);
    for (double m : {2.0, 4.0, 8.0}) {
        for (int it = 0; it < 30; ++it) {
            std::uniform_real_distribution<double> ux(-m, m);
            std::uniform_real_distribution<double> uw(0.05, 1.0);
            std::vector<double> pts, wts;
            double sum = 0.0;
            for (int i = 0; i < 3; ++i) {
                pts.push_back(ux(rng));
                wts.push_back(uw(rng));
                sum += wts.back();
            }
            for (double& w : wts) w /= sum;
            MassPointDistribution f2 = prune_merge(MassPointDistribution(pts, wts), 0.0, 1e-9);
            const double p2 = second_moment(f2);
            const ProductInput in{antipodal(2.0 * m), f2};
            const double lhs = rate_tuple(in, ch).r1_given_2;
            const double rhs =
                (1.0 - p2 / (m * m)) *
                    h_b(Prob(0.5 - 0.5 * (q(3.0 * m).value() + q(m).value()))) -
                h_b(q(2.0 * m));
            CHECK(lhs >= rhs - 1e-12);
        }
    }
}

TEST_CASE("hb_ratio") {
    const ChannelParams ch;
    SUBCASE("single atom is exactly one") {
        const auto f = MassPointDistribution::point_mass(0.7);
        for (double x2 : {-3.0, 0.0, 2.0, 11.0}) {
            CHECK(hb_ratio(f, x2, ch) == 1.0);
        }
    }
    SUBCASE("never exceeds one") {
        std::mt19937_64 rng(79);
        std::uniform_real_distribution<double> ux(-6.0, 6.0);
        for (int it = 0; it < 200; ++it) {
            const auto f = random_dist(rng);
            CHECK(hb_ratio(f, ux(rng), ch) <= 1.0 + 1e-14);
        }
    }
    SUBCASE("increases toward one along the lemma-4 sequence") {
        const auto f = antipodal(2.0);
        // 250-digit reference values for f = (1/2) at +-2.
        const double expected[] = {0.9164530007634144, 0.9811165437205867,
                                   0.9922711304558497, 0.9958619442584620};
        const double xs[] = {5.0, 10.0, 15.0, 20.0};
        double prev = 0.0;
        for (int k = 0; k < 4; ++k) {
            const double r = hb_ratio(f, xs[k], ch);
            CHECK(r == doctest::Approx(expected[k]).epsilon(1e-9));
            CHECK(r > prev);
            CHECK(r < 1.0);
            prev = r;
        }
    }
}

TEST_CASE("weighted objective is concave in each side's weights") {
    const ChannelParams ch;
    std::mt19937_64 rng(83);
    std::uniform_real_distribution<double> ul(0.05, 1.0);
    std::uniform_real_distribution<double> ua(0.0, 1.0);
    std::uniform_real_distribution<double> uw(0.05, 1.0);
    for (int it = 0; it < 120; ++it) {
        const auto f1 = random_dist(rng, 4);
        const auto f2 = random_dist(rng, 4);
        const double lam = ul(rng);
        const double alpha = ua(rng);
        // Mix weights on f2's support, f1 fixed.
        std::vector<double> w(f2.size()), wp(f2.size());
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t j = 0; j < f2.size(); ++j) {
            w[j] = uw(rng);
            wp[j] = uw(rng);
            s1 += w[j];
            s2 += wp[j];
        }
        std::vector<double> wm(f2.size());
        for (std::size_t j = 0; j < f2.size(); ++j) {
            w[j] /= s1;
            wp[j] /= s2;
            wm[j] = alpha * w[j] + (1.0 - alpha) * wp[j];
        }
        const auto mk = [&](const std::vector<double>& ws) {
            return ProductInput{f1, MassPointDistribution(f2.points(), ws)};
        };
        const double va = i_lambda(mk(w), lam, ch);
        const double vb = i_lambda(mk(wp), lam, ch);
        const double vm = i_lambda(mk(wm), lam, ch);
        CHECK(vm >= alpha * va + (1.0 - alpha) * vb - 1e-9);

        // Symmetrically in f1.
        std::vector<double> u(f1.size()), up(f1.size());
        s1 = s2 = 0.0;
        for (std::size_t i = 0; i < f1.size(); ++i) {
            u[i] = uw(rng);
            up[i] = uw(rng);
            s1 += u[i];
            s2 += up[i];
        }
        std::vector<double> um(f1.size());
        for (std::size_t i = 0; i < f1.size(); ++i) {
            u[i] /= s1;
            up[i] /= s2;
            um[i] = alpha * u[i] + (1.0 - alpha) * up[i];
        }
        const auto mk1 = [&](const std::vector<double>& ws) {
            return ProductInput{MassPointDistribution(f1.points(), ws), f2};
        };
        const double ua1 = i_lambda(mk1(u), lam, ch);
        const double ub1 = i_lambda(mk1(up), lam, ch);
        const double um1 = i_lambda(mk1(um), lam, ch);
        CHECK(um1 >= alpha * ua1 + (1.0 - alpha) * ub1 - 1e-9);
    }
}
