#pragma once

// Scalar special functions used by the capacity and detector models.
// All functions are pure and reentrant.

#include <cstdint>

namespace interweave::specfun {

struct Tolerance {
    double abs_tol = 1e-14;
    double rel_tol = 1e-14;
    int max_iter = 500;
};

// Exponential integral E1(x) = int_x^inf exp(-t)/t dt, x > 0.
double exp_integral_e1(double x);

// exp(x) * E1(x), computed without forming exp(x) so it stays finite for
// large x. Used by the Rayleigh ergodic capacity closed form.
double exp_scaled_e1(double x);

// Standard normal upper tail P[N(0,1) > x].
double q_function(double x);

// Inverse of q_function on (0, 1).
double q_inverse(double q, const Tolerance& tol = {});

// Regularized lower / upper incomplete gamma P(a, x), Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// x such that P(a, x) = q, for q in [0, 1).
double gamma_p_inverse(double a, double q, const Tolerance& tol = {});

// x such that Q(a, x) = q, for q in (0, 1]. Keeps full relative precision
// when q is tiny, where forming 1 - q first would not.
double gamma_q_inverse(double a, double q, const Tolerance& tol = {});

// CDF of the noncentral chi-square distribution with `dof` degrees of
// freedom and noncentrality `delta`, evaluated at x.
double noncentral_chi2_cdf(double x, double dof, double delta);

// CDF of the magnitude-squared-coherence estimate formed from `segments`
// independent segment pairs whose true coherence is `true_msc`.
double msc_cdf(double x, int segments, double true_msc);

// Closed form only; returns a non-finite value when the finite sum
// overflows instead of falling back to simulation.
double msc_cdf_closed_form(double x, int segments, double true_msc);

// Monte Carlo estimate of msc_cdf, deterministic in `seed`.
struct MscEstimate {
    double cdf;
    double std_error;
};
MscEstimate msc_cdf_monte_carlo(double x, int segments, double true_msc,
                                std::int64_t trials, std::uint64_t seed);

// Clamp a computed probability to [0, 1]. Drift beyond 1e-9 outside the
// interval raises InvariantBreach.
double clamp_probability(double value);

} // namespace interweave::specfun
