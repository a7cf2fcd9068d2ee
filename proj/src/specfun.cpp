#include "interweave/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "interweave/errors.hpp"
#include "interweave/rng.hpp"

namespace interweave::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;

// Series for E1 on (0, 1): -gamma - ln x - sum_k (-x)^k / (k k!).
double e1_series(double x) {
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k < kMaxIter; ++k) {
        term *= -x / k;
        const double add = term / k;
        sum += add;
        if (std::abs(add) < std::abs(sum) * kEps * 0.5) break;
    }
    return -std::numbers::egamma - std::log(x) - sum;
}

// Modified Lentz evaluation of the E1 continued fraction; returns exp(x) E1(x).
double e1_scaled_continued_fraction(double x) {
    double b = x + 1.0;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

// log of x^a e^-x / Gamma(a)
double gamma_log_prefactor(double a, double x) {
    return -x + a * std::log(x) - std::lgamma(a);
}

double lower_gamma_series(double a, double x) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(gamma_log_prefactor(a, x));
}

double upper_gamma_continued_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return std::exp(gamma_log_prefactor(a, x)) * h;
}

void check_gamma_args(double a, double x) {
    if (!(a > 0.0)) throw DomainError("incomplete gamma: shape must be positive");
    if (!(x >= 0.0)) throw DomainError("incomplete gamma: argument must be nonnegative");
}

// Acklam's rational approximation to the standard normal quantile.
double normal_quantile_guess(double p) {
    static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                             -2.759285104469687e+02, 1.383577518672690e+02,
                                             -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                             -1.556989798598866e+02, 6.680131188771972e+01,
                                             -1.328068155288572e+01};
    static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                             -2.400758277161838e+00, -2.549732539343734e+00,
                                             4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                             2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Halley iteration for P(a, x) = lower (equivalently Q(a, x) = upper), with
// lower + upper = 1. The smaller tail drives the residual.
double invert_incomplete_gamma(double a, double lower, double upper, const Tolerance& tol) {
    const bool use_upper = upper < lower;
    const double gln = std::lgamma(a);
    const double a1 = a - 1.0;
    double lna1 = 0.0;
    double afac = 0.0;
    double x;
    if (a > 1.0) {
        lna1 = std::log(a1);
        afac = std::exp(a1 * (lna1 - 1.0) - gln);
        const double pp = std::min(lower, upper);
        const double t = std::sqrt(-2.0 * std::log(pp));
        x = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
        if (lower < 0.5) x = -x;
        x = std::max(1e-3, a * std::pow(1.0 - 1.0 / (9.0 * a) - x / (3.0 * std::sqrt(a)), 3.0));
    } else {
        const double t = 1.0 - a * (0.253 + a * 0.12);
        if (lower < t) {
            x = std::pow(lower / t, 1.0 / a);
        } else {
            x = 1.0 - std::log(upper / (1.0 - t));
        }
    }
    for (int j = 0; j < std::max(tol.max_iter, 1); ++j) {
        if (x <= 0.0) return 0.0;
        const double err = use_upper ? upper - gamma_q(a, x) : gamma_p(a, x) - lower;
        double density;
        if (a > 1.0) {
            density = afac * std::exp(-(x - a1) + a1 * (std::log(x) - lna1));
        } else {
            density = std::exp(-x + a1 * std::log(x) - gln);
        }
        if (density == 0.0) break;
        const double u = err / density;
        const double step = u / (1.0 - 0.5 * std::min(1.0, u * (a1 / x - 1.0)));
        x -= step;
        if (x <= 0.0) x = 0.5 * (x + step);
        if (std::abs(step) < std::max(tol.rel_tol * x, kTiny)) break;
    }
    return x;
}

} // namespace

double clamp_probability(double value) {
    if (!(value >= -1e-9 && value <= 1.0 + 1e-9)) {
        throw InvariantBreach("probability drifted outside [0,1]: " + std::to_string(value));
    }
    return std::clamp(value, 0.0, 1.0);
}

double exp_integral_e1(double x) {
    if (!(x > 0.0)) throw DomainError("E1 requires x > 0");
    if (x < 1.0) return e1_series(x);
    return e1_scaled_continued_fraction(x) * std::exp(-x);
}

double exp_scaled_e1(double x) {
    if (!(x > 0.0)) throw DomainError("E1 requires x > 0");
    if (x < 1.0) return std::exp(x) * e1_series(x);
    return e1_scaled_continued_fraction(x);
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double q_inverse(double q, const Tolerance& tol) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("q_inverse requires 0 < q < 1");
    if (q == 0.5) return 0.0;
    double x = -normal_quantile_guess(q);
    const double sqrt_2pi = std::sqrt(2.0 * std::numbers::pi);
    for (int i = 0; i < std::max(tol.max_iter, 1); ++i) {
        const double e = q_function(x) - q;
        const double u = e * sqrt_2pi * std::exp(0.5 * x * x);
        const double step = u / (1.0 - 0.5 * x * u);
        x += step;
        if (std::abs(step) <= tol.abs_tol + tol.rel_tol * std::abs(x)) break;
    }
    return x;
}

double gamma_p(double a, double x) {
    check_gamma_args(a, x);
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return clamp_probability(lower_gamma_series(a, x));
    return clamp_probability(1.0 - upper_gamma_continued_fraction(a, x));
}

double gamma_q(double a, double x) {
    check_gamma_args(a, x);
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return clamp_probability(1.0 - lower_gamma_series(a, x));
    return clamp_probability(upper_gamma_continued_fraction(a, x));
}

double gamma_p_inverse(double a, double q, const Tolerance& tol) {
    if (!(a > 0.0)) throw DomainError("gamma_p_inverse requires a > 0");
    if (!(q >= 0.0 && q < 1.0)) throw DomainError("gamma_p_inverse requires 0 <= q < 1");
    if (q == 0.0) return 0.0;
    return invert_incomplete_gamma(a, q, 1.0 - q, tol);
}

double gamma_q_inverse(double a, double q, const Tolerance& tol) {
    if (!(a > 0.0)) throw DomainError("gamma_q_inverse requires a > 0");
    if (!(q > 0.0 && q <= 1.0)) throw DomainError("gamma_q_inverse requires 0 < q <= 1");
    if (q == 1.0) return 0.0;
    return invert_incomplete_gamma(a, 1.0 - q, q, tol);
}

double noncentral_chi2_cdf(double x, double dof, double delta) {
    if (!(x >= 0.0)) throw DomainError("noncentral_chi2_cdf requires x >= 0");
    if (!(dof > 0.0)) throw DomainError("noncentral_chi2_cdf requires dof > 0");
    if (!(delta >= 0.0)) throw DomainError("noncentral_chi2_cdf requires delta >= 0");
    if (x == 0.0) return 0.0;
    const double a = 0.5 * dof;
    const double y = 0.5 * x;
    if (delta == 0.0) return gamma_p(a, y);

    // Poisson(lambda) mixture of central chi-square CDFs, summed outward
    // from the Poisson mode. The tail bounds use the geometric decay of the
    // Poisson weights and the monotonicity of P(a + j, y) in j.
    const double lambda = 0.5 * delta;
    const auto mode = static_cast<long>(std::floor(lambda));
    const double w_mode =
        std::exp(-lambda + mode * std::log(lambda) - std::lgamma(static_cast<double>(mode) + 1.0));

    double sum = 0.0;
    double w = w_mode;
    for (long j = mode;; ++j) {
        const double pj = gamma_p(a + j, y);
        sum += w * pj;
        const double w_next = w * lambda / (j + 1);
        const double ratio = lambda / (j + 2);
        if (pj == 0.0) break;
        if (ratio < 1.0) {
            const double tail = pj * w_next / (1.0 - ratio);
            if (tail <= 1e-16 * sum) break;
        }
        if (j - mode > kMaxIter) break;
        w = w_next;
    }
    w = w_mode;
    for (long j = mode - 1; j >= 0; --j) {
        w *= (j + 1) / lambda;
        sum += w * gamma_p(a + j, y);
        const double ratio = j / lambda;
        const double tail = w * ratio / (1.0 - ratio);
        if (sum > 0.0 && tail <= 1e-16 * sum) break;
    }
    return clamp_probability(sum);
}

double msc_cdf_closed_form(double x, int segments, double true_msc) {
    const int n = segments;
    const double c = true_msc;
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double denom = 1.0 - c * x;
    const double log_prefactor = std::log(x) + n * std::log((1.0 - c) / denom);
    const double s = (1.0 - x) / denom;
    const double log_s = std::log(s);
    const double z = c * x;

    double total = 0.0;
    for (int k = 0; k <= n - 2; ++k) {
        // 2F1(-k, 1-N; 1; z) = sum_j C(k,j) C(N-1,j) z^j, all terms positive.
        double coeff = 1.0;
        double poly = 1.0;
        for (int j = 0; j < k; ++j) {
            coeff *= static_cast<double>(k - j) * static_cast<double>(n - 1 - j) /
                     (static_cast<double>(j + 1) * (j + 1)) * z;
            poly += coeff;
        }
        if (!std::isfinite(poly)) return std::numeric_limits<double>::quiet_NaN();
        if (poly == 0.0) continue;
        total += std::exp(log_prefactor + k * log_s + std::log(poly));
    }
    return total;
}

MscEstimate msc_cdf_monte_carlo(double x, int segments, double true_msc, std::int64_t trials,
                                std::uint64_t seed) {
    if (trials < 1) throw DomainError("msc_cdf_monte_carlo requires trials >= 1");
    const double mix = std::sqrt(true_msc);
    const double orth = std::sqrt(1.0 - true_msc);
    std::int64_t below = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        CounterStream rng(seed, static_cast<std::uint64_t>(t));
        std::complex<double> cross{0.0, 0.0};
        double power_x = 0.0;
        double power_y = 0.0;
        for (int k = 0; k < segments; ++k) {
            const auto a = rng.complex_normal();
            const auto b = rng.complex_normal();
            const auto y = mix * a + orth * b;
            cross += a * std::conj(y);
            power_x += std::norm(a);
            power_y += std::norm(y);
        }
        if (std::norm(cross) / (power_x * power_y) <= x) ++below;
    }
    const double n = static_cast<double>(trials);
    const double cdf = static_cast<double>(below) / n;
    return {cdf, std::sqrt(std::max(cdf * (1.0 - cdf), 1.0 / n) / n)};
}

double msc_cdf(double x, int segments, double true_msc) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("msc_cdf requires 0 <= x <= 1");
    if (segments < 2) throw DomainError("msc_cdf requires at least 2 segments");
    if (!(true_msc >= 0.0 && true_msc < 1.0)) throw DomainError("msc_cdf requires 0 <= msc < 1");
    const double closed = msc_cdf_closed_form(x, segments, true_msc);
    if (std::isfinite(closed)) return clamp_probability(closed);
    // Budget of about 4e7 segment draws.
    const std::int64_t trials = std::clamp<std::int64_t>(40'000'000 / segments, 10'000, 1'000'000);
    return clamp_probability(msc_cdf_monte_carlo(x, segments, true_msc, trials, 0x5eed).cdf);
}

} // namespace interweave::specfun
