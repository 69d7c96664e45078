#include "support/grid_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace oracle {

namespace {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;

double qf(double x) { return 0.5 * std::erfc(x * 0.70710678118654752440); }

double hb(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return -t * std::log2(t) - (1.0 - t) * std::log2(1.0 - t);
}

double dotv(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vec simplex_proj(Vec v) {
    Vec u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0, tau = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        const double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) tau = t;
    }
    for (double& x : v) x = std::max(0.0, x - tau);
    return v;
}

Vec power_proj(const Vec& v, const Vec& asq, double p) {
    Vec w = simplex_proj(v);
    if (dotv(asq, w) <= p + 1e-14) return w;
    auto mom = [&](double th) {
        Vec s(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) s[i] = v[i] - th * asq[i];
        return dotv(asq, simplex_proj(s));
    };
    double lo = 0.0, hi = 1.0;
    while (mom(hi) > p && hi < 1e12) hi *= 2.0;
    for (int it = 0; it < 90; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mom(mid) > p ? lo : hi) = mid;
    }
    Vec s(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) s[i] = v[i] - hi * asq[i];
    return simplex_proj(s);
}

// Normalized objective for mass points on fixed alphabets:
// V = mu H(Y) + (1-mu) H(Y|B) - H(Y|A,B), K[i][j] = Q(xa_i + xb_j).
struct Tables {
    Mat k;    // na x nb
    Mat hbk;  // hb of k
};

Tables make_tables(const Vec& xa, const Vec& xb) {
    Tables t;
    t.k.assign(xa.size(), Vec(xb.size()));
    t.hbk.assign(xa.size(), Vec(xb.size()));
    for (std::size_t i = 0; i < xa.size(); ++i) {
        for (std::size_t j = 0; j < xb.size(); ++j) {
            t.k[i][j] = qf(xa[i] + xb[j]);
            t.hbk[i][j] = hb(t.k[i][j]);
        }
    }
    return t;
}

double objective(const Tables& t, const Vec& wa, const Vec& wb, double mu) {
    const std::size_t na = wa.size(), nb = wb.size();
    double py0 = 0.0, hyb = 0.0, hyab = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
        double aj = 0.0, hj = 0.0;
        for (std::size_t i = 0; i < na; ++i) {
            aj += wa[i] * t.k[i][j];
            hj += wa[i] * t.hbk[i][j];
        }
        py0 += wb[j] * aj;
        hyb += wb[j] * hb(aj);
        hyab += wb[j] * hj;
    }
    return mu * hb(std::clamp(py0, 0.0, 1.0)) + (1.0 - mu) * hyb - hyab;
}

double hbp(double t) {
    t = std::clamp(t, 1e-300, 1.0 - 1e-16);
    return std::log2((1.0 - t) / t);
}

Vec grad_wa(const Tables& t, const Vec& wa, const Vec& wb, double mu) {
    const std::size_t na = wa.size(), nb = wb.size();
    Vec aj(nb, 0.0);
    double py0 = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
        for (std::size_t i = 0; i < na; ++i) aj[j] += wa[i] * t.k[i][j];
        py0 += wb[j] * aj[j];
    }
    const double hp0 = hbp(py0);
    Vec g(na, 0.0);
    for (std::size_t i = 0; i < na; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < nb; ++j) {
            acc += wb[j] * (mu * hp0 * t.k[i][j] + (1.0 - mu) * hbp(aj[j]) * t.k[i][j] -
                            t.hbk[i][j]);
        }
        g[i] = acc;
    }
    return g;
}

Vec grad_wb(const Tables& t, const Vec& wa, const Vec& wb, double mu) {
    const std::size_t na = wa.size(), nb = wb.size();
    Vec aj(nb, 0.0), hj(nb, 0.0);
    double py0 = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
        for (std::size_t i = 0; i < na; ++i) {
            aj[j] += wa[i] * t.k[i][j];
            hj[j] += wa[i] * t.hbk[i][j];
        }
        py0 += wb[j] * aj[j];
    }
    const double hp0 = hbp(py0);
    Vec g(nb, 0.0);
    for (std::size_t j = 0; j < nb; ++j) {
        g[j] = mu * hp0 * aj[j] + (1.0 - mu) * hb(aj[j]) - hj[j];
    }
    return g;
}

Vec pg_maximize(const std::function<double(const Vec&)>& value,
                const std::function<Vec(const Vec&)>& grad, const Vec& asq, double p,
                Vec w, int iters) {
    double v = value(w);
    double step = 0.5;
    for (int it = 0; it < iters; ++it) {
        const Vec g = grad(w);
        bool improved = false;
        double t = step;
        for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
            Vec cand(w.size());
            for (std::size_t i = 0; i < w.size(); ++i) cand[i] = w[i] + t * g[i];
            cand = power_proj(cand, asq, p);
            const double vc = value(cand);
            if (vc > v + 1e-16) {
                w = std::move(cand);
                v = vc;
                step = t * 1.7;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    return w;
}

Vec grid_axis(double b, double step) {
    Vec xs;
    for (double x = -b; x <= b + 0.5 * step; x += step) xs.push_back(x);
    return xs;
}

}  // namespace

double alternating_grid_max(double lambda, double p1, double p2, double step, int starts,
                            int sweeps) {
    double mu, pa, pb;
    if (lambda <= 1.0) {
        mu = lambda;
        pa = p1;
        pb = p2;
    } else {
        mu = 1.0 / lambda;
        pa = p2;
        pb = p1;
    }
    const Vec xa = grid_axis(std::max(1.0, 3.0 * std::sqrt(pa)), step);
    const Vec xb = grid_axis(std::max(1.0, 3.0 * std::sqrt(pb)), step);
    const Tables tab = make_tables(xa, xb);
    Vec asq_a(xa.size()), asq_b(xb.size());
    for (std::size_t i = 0; i < xa.size(); ++i) asq_a[i] = xa[i] * xa[i];
    for (std::size_t j = 0; j < xb.size(); ++j) asq_b[j] = xb[j] * xb[j];

    auto nearest = [](const Vec& xs, double target) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < xs.size(); ++i) {
            if (std::abs(xs[i] - target) < std::abs(xs[best] - target)) best = i;
        }
        return best;
    };
    auto start_dist = [&](const Vec& xs, const Vec& asq, double p, int kind) {
        Vec w(xs.size(), 0.0);
        if (p <= 0.0) {
            w[nearest(xs, 0.0)] = 1.0;
            return w;
        }
        switch (kind % 6) {
            case 0:  // antipodal at +-sqrt(p)
                w[nearest(xs, -std::sqrt(p))] = 0.5;
                w[nearest(xs, std::sqrt(p))] += 0.5;
                break;
            case 1:  // uniform over the alphabet
                w.assign(xs.size(), 1.0 / static_cast<double>(xs.size()));
                break;
            case 2:  // three-point
                w[nearest(xs, -std::sqrt(p))] = 0.3;
                w[nearest(xs, 0.0)] += 0.4;
                w[nearest(xs, std::sqrt(p))] += 0.3;
                break;
            case 3:  // heavy low, light high
                w[nearest(xs, -0.7 * std::sqrt(p))] = 0.8;
                w[nearest(xs, 1.7 * std::sqrt(p))] += 0.2;
                break;
            case 4:  // mirrored heavy-light
                w[nearest(xs, 0.7 * std::sqrt(p))] = 0.8;
                w[nearest(xs, -1.7 * std::sqrt(p))] += 0.2;
                break;
            default:  // spread at half power
                w[nearest(xs, -std::sqrt(0.5 * p))] = 0.5;
                w[nearest(xs, std::sqrt(0.5 * p))] += 0.5;
                break;
        }
        return power_proj(w, asq, p);
    };

    double best = -1.0;
    for (int s = 0; s < starts; ++s) {
        Vec wa = start_dist(xa, asq_a, pa, s);
        Vec wb = start_dist(xb, asq_b, pb, (s + 3) % 6);
        double v = objective(tab, wa, wb, mu);
        for (int sweep = 0; sweep < sweeps; ++sweep) {
            if (pa > 0.0) {
                wa = pg_maximize([&](const Vec& w) { return objective(tab, w, wb, mu); },
                                 [&](const Vec& w) { return grad_wa(tab, w, wb, mu); },
                                 asq_a, pa, wa, 3000);
            }
            if (pb > 0.0) {
                wb = pg_maximize([&](const Vec& w) { return objective(tab, wa, w, mu); },
                                 [&](const Vec& w) { return grad_wb(tab, wa, w, mu); },
                                 asq_b, pb, wb, 3000);
            }
            const double vn = objective(tab, wa, wb, mu);
            if (vn - v < 1e-10) {
                v = vn;
                break;
            }
            v = vn;
        }
        best = std::max(best, v);
    }
    return best;
}

double side_brute_force(double box, double loc_step, int cap,
                        const std::vector<double>& x_other,
                        const std::vector<double>& w_other, bool opt_is_conditional_side,
                        double mu, double p, int weight_divisions) {
    const Vec grid = grid_axis(box, loc_step);
    const std::size_t g = grid.size();
    const std::size_t m = x_other.size();

    // Per-location rows against the fixed side.
    Mat k(g, Vec(m)), hbk(g, Vec(m));
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            k[i][j] = qf(grid[i] + x_other[j]);
            hbk[i][j] = hb(k[i][j]);
        }
    }

    const int nd = weight_divisions;
    double best = -1.0;
    std::vector<std::size_t> idx(cap, 0);

    auto eval = [&](const std::vector<std::size_t>& sup, const Vec& w) {
        // a_j over the conditional structure; when the optimized side is
        // the conditional one (side A), H(Y|B) mixes over the fixed side.
        double py0 = 0.0, hyb = 0.0, hyab = 0.0;
        if (opt_is_conditional_side) {
            for (std::size_t j = 0; j < m; ++j) {
                double aj = 0.0, hj = 0.0;
                for (std::size_t t = 0; t < sup.size(); ++t) {
                    aj += w[t] * k[sup[t]][j];
                    hj += w[t] * hbk[sup[t]][j];
                }
                py0 += w_other[j] * aj;
                hyb += w_other[j] * hb(aj);
                hyab += w_other[j] * hj;
            }
        } else {
            // Optimized side is B: H(Y|B=x) mixes over the fixed side A.
            for (std::size_t t = 0; t < sup.size(); ++t) {
                double at = 0.0, ht = 0.0;
                for (std::size_t j = 0; j < m; ++j) {
                    at += w_other[j] * k[sup[t]][j];
                    ht += w_other[j] * hbk[sup[t]][j];
                }
                py0 += w[t] * at;
                hyb += w[t] * hb(at);
                hyab += w[t] * ht;
            }
        }
        return mu * hb(std::clamp(py0, 0.0, 1.0)) + (1.0 - mu) * hyb - hyab;
    };

    // Enumerate supports of exactly `cap` grid points (smaller supports
    // appear as zero weights on the simplex grid).
    std::function<void(std::size_t, int)> rec = [&](std::size_t lo, int depth) {
        if (depth == cap) {
            // Weight compositions w_t = c_t / nd.
            std::vector<int> c(cap, 0);
            std::function<void(int, int)> wrec = [&](int t, int left) {
                if (t == cap - 1) {
                    c[t] = left;
                    Vec w(cap);
                    double pw = 0.0;
                    for (int u = 0; u < cap; ++u) {
                        w[u] = static_cast<double>(c[u]) / nd;
                        pw += w[u] * grid[idx[u]] * grid[idx[u]];
                    }
                    if (pw <= p + 1e-12) best = std::max(best, eval(idx, w));
                    return;
                }
                for (int v = 0; v <= left; ++v) {
                    c[t] = v;
                    wrec(t + 1, left - v);
                }
            };
            wrec(0, nd);
            return;
        }
        for (std::size_t i = lo; i < g; ++i) {
            idx[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace oracle
