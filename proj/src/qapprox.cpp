#include "fblnet/qapprox.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fblnet/qfunc.hpp"

namespace fblnet {

QuadApproxParams quad_params(double theta1, double theta0) {
    if (!(theta1 > 0.0)) throw std::domain_error("quad_params: theta1 must be > 0");
    return QuadApproxParams{theta0, theta1, 0.5 / (theta1 * theta1)};
}

double linear_pc_chi(double x, const LinearApproxParams& p) {
    if (x >= p.delta1) return 1.0;
    if (x < -p.delta1) return 0.0;
    return x / (2.0 * p.delta1) + p.delta0;
}

double quad_pc_chi(double x, const QuadApproxParams& p) {
    if (x >= p.theta1) return 1.0;
    if (x <= -p.theta1) return 0.0;
    if (x >= 0.0) return p.theta2 * x * (2.0 * p.theta1 - x) + p.theta0;
    return p.theta2 * x * (2.0 * p.theta1 + x) + p.theta0;
}

double linear_pc(double payload_bits, int blocklength, const ChannelParams& ch,
                 const LinearApproxParams& p) {
    return linear_pc_chi(chi(payload_bits, blocklength, ch), p);
}

double quad_pc(double payload_bits, int blocklength, const ChannelParams& ch,
               const QuadApproxParams& p) {
    return quad_pc_chi(chi(payload_bits, blocklength, ch), p);
}

namespace {

long long round_clamped(double k) {
    long long r = std::llround(k); // ties away from zero
    return r < 1 ? 1 : r;
}

} // namespace

double linear_branch_threshold(const ChannelParams& ch, const LinearApproxParams& p) {
    return 9.0 * p.delta1 * p.delta1 * ch.dispersion / (ch.capacity * ch.capacity);
}

long long linear_opt_k(int blocklength, const ChannelParams& ch,
                       const LinearApproxParams& p) {
    if (blocklength < 1) throw std::domain_error("linear_opt_k: blocklength must be >= 1");
    const double n = static_cast<double>(blocklength);
    const double m = n * ch.capacity;
    const double s = std::sqrt(n * ch.dispersion);
    const double k = (n >= linear_branch_threshold(ch, p))
                         ? m - p.delta1 * s
                         : 0.5 * (m + p.delta1 * s);
    return round_clamped(k);
}

double quad_branch_threshold(const ChannelParams& ch, const QuadApproxParams& p) {
    return p.theta1 * p.theta1 * ch.dispersion / (4.0 * ch.capacity * ch.capacity);
}

namespace {

// Exhaustive integer maximizer of (k/n)*quad_pc over the support of the
// approximation; smallest argmax on ties.
long long quad_exhaustive_opt(int blocklength, const ChannelParams& ch,
                              const QuadApproxParams& p) {
    const double n = static_cast<double>(blocklength);
    const double hi = n * ch.capacity + p.theta1 * std::sqrt(n * ch.dispersion);
    const long long k_max = std::max(1LL, static_cast<long long>(std::ceil(hi)) + 1);
    long long best_k = 1;
    double best_u = -1.0;
    for (long long k = 1; k <= k_max; ++k) {
        const double u = static_cast<double>(k) / n * quad_pc(static_cast<double>(k), blocklength, ch, p);
        if (u > best_u) {
            best_u = u;
            best_k = k;
        }
    }
    return best_k;
}

} // namespace

QuadOptResult quad_opt_k_detail(int blocklength, const ChannelParams& ch,
                                const QuadApproxParams& p, QuadOptForm form) {
    if (blocklength < 1) throw std::domain_error("quad_opt_k: blocklength must be >= 1");
    const double n = static_cast<double>(blocklength);
    const double m = n * ch.capacity;
    const double s = std::sqrt(n * ch.dispersion);
    const double t1 = p.theta1;
    const bool upper = n >= quad_branch_threshold(ch, p);

    double k;
    if (form == QuadOptForm::Derived) {
        if (upper) {
            const double disc = m * m - 2.0 * t1 * s * m + 7.0 * t1 * t1 * s * s;
            if (disc < 0.0) { // cannot happen: disc = (m - t1*s)^2 + 6*t1^2*s^2
                return {quad_exhaustive_opt(blocklength, ch, p), true};
            }
            k = (2.0 * (m - t1 * s) + std::sqrt(disc)) / 3.0;
        } else {
            k = (m + t1 * s) / 3.0;
        }
    } else {
        if (upper) {
            const double rad = n * ch.capacity * ch.capacity - 7.0 * t1 * t1 * ch.dispersion -
                               2.0 * t1 * ch.capacity * std::sqrt(n * ch.dispersion);
            if (rad < 0.0) {
                return {quad_exhaustive_opt(blocklength, ch, p), true};
            }
            k = 2.0 / 3.0 * (m - t1 * s) + std::sqrt(n) / 3.0 * std::sqrt(rad);
        } else {
            k = (m - t1 * s) / 3.0;
        }
    }
    return {round_clamped(k), false};
}

long long quad_opt_k(int blocklength, const ChannelParams& ch, const QuadApproxParams& p) {
    return quad_opt_k_detail(blocklength, ch, p, QuadOptForm::Derived).k;
}

namespace {

// Fixed trapezoid grid over chi in [-8, 8], step 1e-3; the exact curve is
// precomputed once per fit.
constexpr double kFitLo = -8.0;
constexpr double kFitHi = 8.0;
constexpr int kFitPoints = 16001;

struct FitGrid {
    std::vector<double> chi;
    std::vector<double> exact;
    FitGrid() : chi(kFitPoints), exact(kFitPoints) {
        const double h = (kFitHi - kFitLo) / (kFitPoints - 1);
        for (int i = 0; i < kFitPoints; ++i) {
            chi[i] = kFitLo + h * i;
            exact[i] = gaussian_cdf(chi[i]);
        }
    }
};

const FitGrid& fit_grid() {
    static const FitGrid grid;
    return grid;
}

double integrate_error(const std::function<double(double)>& approx, FitObjective obj) {
    const FitGrid& g = fit_grid();
    const double h = (kFitHi - kFitLo) / (kFitPoints - 1);
    double acc = 0.0;
    for (int i = 0; i < kFitPoints; ++i) {
        double e = std::fabs(approx(g.chi[i]) - g.exact[i]);
        if (obj == FitObjective::SquaredError) e *= e;
        const double w = (i == 0 || i == kFitPoints - 1) ? 0.5 : 1.0;
        acc += w * e;
    }
    if (!std::isfinite(acc)) throw std::runtime_error("fit quadrature diverged");
    return acc * h;
}

double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - g * (hi - lo);
    double b = lo + g * (hi - lo);
    double fa = f(a), fb = f(b);
    for (int i = 0; i < iters; ++i) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

LinearApproxParams fit_linear(FitObjective obj, bool fit_delta0) {
    auto objective_d1 = [&](double d1) {
        if (!fit_delta0) {
            LinearApproxParams p{0.5, d1};
            return integrate_error([&](double x) { return linear_pc_chi(x, p); }, obj);
        }
        auto inner = [&](double d0) {
            LinearApproxParams p{d0, d1};
            return integrate_error([&](double x) { return linear_pc_chi(x, p); }, obj);
        };
        const double d0 = golden_min(inner, 0.0, 1.0, 70);
        return inner(d0);
    };
    const double d1 = golden_min(objective_d1, 0.5, 4.0, 90);
    double d0 = 0.5;
    if (fit_delta0) {
        auto inner = [&](double v) {
            LinearApproxParams p{v, d1};
            return integrate_error([&](double x) { return linear_pc_chi(x, p); }, obj);
        };
        d0 = golden_min(inner, 0.0, 1.0, 90);
    }
    return LinearApproxParams{d0, d1};
}

QuadApproxParams fit_quadratic(FitObjective obj) {
    auto objective = [&](double t1) {
        const QuadApproxParams p = quad_params(t1);
        return integrate_error([&](double x) { return quad_pc_chi(x, p); }, obj);
    };
    return quad_params(golden_min(objective, 1.0, 4.0, 90));
}

} // namespace fblnet
