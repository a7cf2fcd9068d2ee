#pragma once

// Ergodic capacity of a flat-fading link, optionally with co-channel
// interference treated as Gaussian noise, and the four capacity constants
// that the rate-region and admissibility models consume.

#include <cstdint>
#include <string_view>

namespace interweave {

struct SystemParams {
    double p = 0.5;          // probability the channel is free of the PU
    double power_pu = 1.0;   // P_p
    double power_cr = 1.0;   // P_c
    double noise_var = 1.0;  // sigma^2

    // Throws DomainError when a field is out of range.
    void validate() const;

    // 10 log10(P_p / P_c).
    double rs_db() const;

    // P_p / sigma^2 in dB.
    double pu_snr_db() const;

    // Scenario with the given PU SNR and power ratio, noise fixed at 1.
    static SystemParams from_db(double p, double pu_snr_db, double rs_db);
};

enum class FadingKind { rayleigh_unit, deterministic_unit };

std::string_view fading_name(FadingKind kind);
FadingKind parse_fading(std::string_view name);

struct CapacityConstants {
    double a_p = 0.0;  // PU alone
    double b_p = 0.0;  // PU with CR interference
    double a_c = 0.0;  // CR alone
    double b_c = 0.0;  // CR with PU interference
    double c_p_ideal = 0.0;
    double c_c_ideal = 0.0;
};

// E[log2(1 + |h|^2 S / (I + N))] in bits per complex dimension.
double ergodic_capacity(double signal_power, double interference_power, double noise_var,
                        FadingKind fading);

struct CapacityEstimate {
    double mean;
    double std_error;
};

// Sample-mean estimate of ergodic_capacity from `samples` fading draws.
CapacityEstimate ergodic_capacity_monte_carlo(double signal_power, double interference_power,
                                              double noise_var, FadingKind fading,
                                              std::int64_t samples, std::uint64_t seed);

CapacityConstants capacity_constants(const SystemParams& params, FadingKind fading);

} // namespace interweave
