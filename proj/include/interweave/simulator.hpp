#pragma once

// Slot-level Monte Carlo of the interweave system: per slot the PU state,
// the CR's detection outcome and the fading gains are drawn, and each user
// accrues its instantaneous Shannon rate for that slot class.

#include <array>
#include <cstdint>
#include <string>

#include "interweave/channel.hpp"
#include "interweave/ratemodel.hpp"

namespace interweave {

struct SimulationConfig {
    SystemParams params;
    DetectionErrorPair err;
    FadingKind fading = FadingKind::rayleigh_unit;
    std::int64_t n_slots = 1'000'000;
    std::uint64_t seed = 1;
    int threads = 1;  // does not affect results

    void validate() const;
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

struct InterferenceReport {
    bool skipped = true;  // no busy/free slots were drawn
    std::int64_t slots = 0;
    Estimate mean_power;  // mean of |h_pc|^2 P_p over those slots
    double expected = 0.0;  // P_p
    double z_score = 0.0;
};

struct SimulationResult {
    Estimate empirical_cp;
    Estimate empirical_cc;
    Estimate empirical_eta_hat;  // value is +infinity when p == 1
    bool eta_defined = false;
    std::array<std::int64_t, 4> q_counts{};
    std::int64_t n_slots = 0;
    InterferenceReport interference;
};

SimulationResult run(const SimulationConfig& config);

// Simulates `n_slots` slots of `config` and checks the Gaussian-noise
// variance assumption on the PU-to-CR cross link.
InterferenceReport interference_power_check(const SimulationConfig& config, std::int64_t n_slots);

// JSON record with the result, the echoed configuration and the seed.
std::string simulation_json(const SimulationConfig& config, const SimulationResult& result);

} // namespace interweave
