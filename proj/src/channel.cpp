#include "interweave/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "interweave/errors.hpp"
#include "interweave/kernels.hpp"
#include "interweave/rng.hpp"
#include "interweave/specfun.hpp"

namespace interweave {

void SystemParams::validate() const {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("occupancy p must lie in [0,1]");
    if (!(power_pu >= 0.0)) throw DomainError("PU power must be nonnegative");
    if (!(power_cr >= 0.0)) throw DomainError("CR power must be nonnegative");
    if (!(noise_var > 0.0)) throw DomainError("noise variance must be positive");
}

double SystemParams::rs_db() const { return 10.0 * std::log10(power_pu / power_cr); }

double SystemParams::pu_snr_db() const { return 10.0 * std::log10(power_pu / noise_var); }

SystemParams SystemParams::from_db(double p, double pu_snr_db, double rs_db) {
    SystemParams s;
    s.p = p;
    s.noise_var = 1.0;
    s.power_pu = std::pow(10.0, pu_snr_db / 10.0);
    s.power_cr = s.power_pu / std::pow(10.0, rs_db / 10.0);
    return s;
}

std::string_view fading_name(FadingKind kind) {
    return kind == FadingKind::rayleigh_unit ? "rayleigh_unit" : "deterministic_unit";
}

FadingKind parse_fading(std::string_view name) {
    if (name == "rayleigh_unit" || name == "rayleigh") return FadingKind::rayleigh_unit;
    if (name == "deterministic_unit" || name == "deterministic") {
        return FadingKind::deterministic_unit;
    }
    throw ConfigError("unknown fading model '" + std::string(name) + "'");
}

double ergodic_capacity(double signal_power, double interference_power, double noise_var,
                        FadingKind fading) {
    if (!(noise_var > 0.0)) throw DomainError("ergodic_capacity: noise variance must be positive");
    if (!(signal_power >= 0.0) || !(interference_power >= 0.0)) {
        throw DomainError("ergodic_capacity: powers must be nonnegative");
    }
    if (signal_power == 0.0) return 0.0;
    const double snr = signal_power / (interference_power + noise_var);
    if (fading == FadingKind::deterministic_unit) return std::log2(1.0 + snr);
    // |h|^2 ~ Exp(1): E[ln(1 + snr X)] = exp(1/snr) E1(1/snr).
    return std::numbers::log2e * specfun::exp_scaled_e1(1.0 / snr);
}

CapacityEstimate ergodic_capacity_monte_carlo(double signal_power, double interference_power,
                                              double noise_var, FadingKind fading,
                                              std::int64_t samples, std::uint64_t seed) {
    if (!(noise_var > 0.0)) throw DomainError("ergodic_capacity: noise variance must be positive");
    if (samples < 1) throw DomainError("ergodic_capacity_monte_carlo: samples must be >= 1");
    const double snr = signal_power / (interference_power + noise_var);
    constexpr std::int64_t kBlock = 1 << 16;
    std::vector<double> rates;
    rates.reserve(static_cast<std::size_t>(std::min(samples, kBlock)));
    kernels::Moments total;
    for (std::int64_t start = 0; start < samples; start += kBlock) {
        const std::int64_t end = std::min(samples, start + kBlock);
        rates.clear();
        for (std::int64_t i = start; i < end; ++i) {
            CounterStream rng(seed, static_cast<std::uint64_t>(i));
            const double gain = fading == FadingKind::rayleigh_unit ? rng.exponential() : 1.0;
            rates.push_back(std::log2(1.0 + gain * snr));
        }
        total += kernels::moments(rates);
    }
    return {total.mean(), total.std_error()};
}

CapacityConstants capacity_constants(const SystemParams& params, FadingKind fading) {
    params.validate();
    CapacityConstants k;
    const double pp = params.power_pu;
    const double pc = params.power_cr;
    const double n0 = params.noise_var;
    k.a_p = ergodic_capacity(pp, 0.0, n0, fading);
    k.b_p = ergodic_capacity(pp, pc, n0, fading);
    k.a_c = ergodic_capacity(pc, 0.0, n0, fading);
    k.b_c = ergodic_capacity(pc, pp, n0, fading);
    k.c_p_ideal = k.a_p;
    k.c_c_ideal = k.a_c;
    return k;
}

} // namespace interweave
