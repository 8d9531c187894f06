#pragma once

#include "fblnet/fbl_model.hpp"

namespace fblnet {

// Piecewise approximations of the success probability as a function of the
// normalized margin chi, chosen so that the throughput maximization
// (k/n) * Pc(k, n) admits closed-form optima.

// Ramp: 0 below -delta1, chi/(2*delta1) + delta0 inside, 1 above +delta1.
struct LinearApproxParams {
    double delta0 = 0.5;
    double delta1 = 1.545;
};

// Quadratic spline, C^1 in k: 1 above theta1, theta2*chi*(2*theta1 -+ chi) + theta0
// on [0, theta1) / (-theta1, 0), 0 at or below -theta1. Derivative continuity at
// the outer knots forces theta2 = 0.5/theta1^2.
struct QuadApproxParams {
    double theta0 = 0.5;
    double theta1 = 2.35;
    double theta2 = 0.5 / (2.35 * 2.35);
};

// Params with the theta2 = 0.5/theta1^2 constraint applied.
QuadApproxParams quad_params(double theta1, double theta0 = 0.5);

double linear_pc(double payload_bits, int blocklength, const ChannelParams& ch,
                 const LinearApproxParams& p = {});
double quad_pc(double payload_bits, int blocklength, const ChannelParams& ch,
               const QuadApproxParams& p = {});

// Same curves directly in chi, for fitting and plotting.
double linear_pc_chi(double chi, const LinearApproxParams& p = {});
double quad_pc_chi(double chi, const QuadApproxParams& p = {});

// Blocklength threshold 9*delta1^2*V/C^2 separating the two branches of the
// linear optimum (the ramp's stationary point meets the ramp edge there).
double linear_branch_threshold(const ChannelParams& ch, const LinearApproxParams& p = {});

// Closed-form maximizer of (k/n)*linear_pc, rounded to the nearest integer
// (ties away from zero) and clamped to >= 1:
//   n >= threshold:  nC - delta1*sqrt(nV)
//   n <  threshold:  (nC + delta1*sqrt(nV)) / 2
long long linear_opt_k(int blocklength, const ChannelParams& ch,
                       const LinearApproxParams& p = {});

// Threshold theta1^2*V/(4C^2) for the quadratic optimum's branch switch.
double quad_branch_threshold(const ChannelParams& ch, const QuadApproxParams& p = {});

// Which closed form to evaluate for the quadratic optimum. Derived is the
// stationary-point solution of the cubic d/dk [k * quad_pc(k)], i.e. the
// positive root of
//   3k^2 - 4(nC - theta1*sqrt(nV))k + ((nC)^2 - 2*theta1*nC*sqrt(nV) - theta1^2*nV) = 0
// for n above the branch threshold and (nC + theta1*sqrt(nV))/3 below it.
// PrintedEq24 evaluates the alternative published form, which differs in two
// signs and can produce a negative discriminant or a negative packet size;
// it exists for comparison only and falls back to exhaustive integer search
// when its radicand goes negative.
enum class QuadOptForm { Derived, PrintedEq24 };

struct QuadOptResult {
    long long k = 1;
    bool used_fallback = false; // exhaustive search replaced the closed form
};

QuadOptResult quad_opt_k_detail(int blocklength, const ChannelParams& ch,
                                const QuadApproxParams& p = {},
                                QuadOptForm form = QuadOptForm::Derived);

long long quad_opt_k(int blocklength, const ChannelParams& ch,
                     const QuadApproxParams& p = {});

// Fitting of the free approximation constants against the exact Q-based
// curve, by quadrature over chi in [-8, 8] (both curves are within 1e-15 of
// 0/1 outside). SquaredError is the default and reproduces the stock
// constants delta1 = 1.545 / theta1 = 2.35; AbsoluteError minimizes the
// integral of |approx - exact| instead, which lands at delta1 ~= 1.487 and
// theta1 ~= 2.331.
enum class FitObjective { SquaredError, AbsoluteError };

// theta0 is pinned to 0.5 by odd symmetry; theta2 follows theta1.
QuadApproxParams fit_quadratic(FitObjective obj = FitObjective::SquaredError);

// delta0 is pinned to 0.5 unless fit_delta0 is set, in which case it is
// optimized jointly and comes back at 0.5 anyway (odd symmetry).
LinearApproxParams fit_linear(FitObjective obj = FitObjective::SquaredError,
                              bool fit_delta0 = false);

} // namespace fblnet
