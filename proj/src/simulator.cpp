#include "interweave/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include <json.hpp>

#include "interweave/errors.hpp"
#include "interweave/kernels.hpp"
#include "interweave/rng.hpp"

namespace interweave {

namespace {

// Slots per reduction block. Fixed so the summation tree, and therefore
// every reported bit, is independent of the worker count.
constexpr std::int64_t kBlockSlots = 1 << 16;

struct BlockTotals {
    kernels::Moments pu;
    kernels::Moments cr;
    kernels::Moments both;
    kernels::Moments cross_power;
    std::array<std::int64_t, 4> q_counts{};
};

BlockTotals simulate_block(const SimulationConfig& cfg, std::int64_t begin, std::int64_t end) {
    const auto& sp = cfg.params;
    const double snr_pu = sp.power_pu / sp.noise_var;
    const double sinr_pu = sp.power_pu / (sp.power_cr + sp.noise_var);
    const double snr_cr = sp.power_cr / sp.noise_var;
    const double sinr_cr = sp.power_cr / (sp.power_pu + sp.noise_var);
    const bool rayleigh = cfg.fading == FadingKind::rayleigh_unit;

    const auto len = static_cast<std::size_t>(end - begin);
    std::vector<double> pu(len);
    std::vector<double> cr(len);
    std::vector<double> both(len);
    std::vector<double> cross;
    BlockTotals t;
    for (std::int64_t i = begin; i < end; ++i) {
        CounterStream rng(cfg.seed, static_cast<std::uint64_t>(i));
        const bool free = rng.uniform() < sp.p;
        const double u_detect = rng.uniform();
        const double g_p = rayleigh ? rng.exponential() : 1.0;
        const double g_c = rayleigh ? rng.exponential() : 1.0;
        const double g_pc = rayleigh ? rng.exponential() : 1.0;
        // Y = 1: CR declares the channel free.
        const bool declared_free = free ? u_detect >= cfg.err.p_md : u_detect < cfg.err.p_fa;

        double r_p = 0.0;
        double r_c = 0.0;
        int q;
        if (free && declared_free) {
            q = 0;
            r_c = std::log2(1.0 + g_c * snr_cr);
        } else if (!free && declared_free) {
            q = 1;
            r_p = std::log2(1.0 + g_p * sinr_pu);
            r_c = std::log2(1.0 + g_c * sinr_cr);
            cross.push_back(g_pc * sp.power_pu);
        } else if (free) {
            q = 2;  // nobody transmits
        } else {
            q = 3;
            r_p = std::log2(1.0 + g_p * snr_pu);
        }
        ++t.q_counts[static_cast<std::size_t>(q)];
        const auto k = static_cast<std::size_t>(i - begin);
        pu[k] = r_p;
        cr[k] = r_c;
        both[k] = r_p + r_c;
    }
    t.pu = kernels::moments(pu);
    t.cr = kernels::moments(cr);
    t.both = kernels::moments(both);
    t.cross_power = kernels::moments(cross);
    return t;
}

BlockTotals simulate(const SimulationConfig& cfg) {
    const std::int64_t blocks = (cfg.n_slots + kBlockSlots - 1) / kBlockSlots;
    std::vector<BlockTotals> partial(static_cast<std::size_t>(blocks));
    auto work = [&](std::int64_t b) {
        const std::int64_t begin = b * kBlockSlots;
        partial[static_cast<std::size_t>(b)] =
            simulate_block(cfg, begin, std::min(cfg.n_slots, begin + kBlockSlots));
    };
    const auto workers = static_cast<std::int64_t>(std::clamp<std::int64_t>(cfg.threads, 1, blocks));
    if (workers == 1) {
        for (std::int64_t b = 0; b < blocks; ++b) work(b);
    } else {
        std::vector<std::jthread> pool;
        for (std::int64_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::int64_t b = w; b < blocks; b += workers) work(b);
            });
        }
    }
    BlockTotals total;
    for (const auto& b : partial) {
        total.pu += b.pu;
        total.cr += b.cr;
        total.both += b.both;
        total.cross_power += b.cross_power;
        for (std::size_t q = 0; q < 4; ++q) total.q_counts[q] += b.q_counts[q];
    }
    return total;
}

InterferenceReport make_interference_report(const SimulationConfig& cfg, const kernels::Moments& m) {
    InterferenceReport r;
    r.expected = cfg.params.power_pu;
    r.slots = m.count;
    if (m.count == 0) return r;
    r.skipped = false;
    r.mean_power = {m.mean(), m.std_error()};
    const double diff = r.mean_power.value - r.expected;
    if (r.mean_power.std_error > 0.0) {
        r.z_score = diff / r.mean_power.std_error;
    } else {
        r.z_score = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    return r;
}

} // namespace

void SimulationConfig::validate() const {
    params.validate();
    err.validate();
    if (n_slots < 1) throw DomainError("n_slots must be >= 1");
}

SimulationResult run(const SimulationConfig& config) {
    config.validate();
    const BlockTotals t = simulate(config);
    SimulationResult r;
    r.n_slots = config.n_slots;
    r.q_counts = t.q_counts;
    r.empirical_cp = {t.pu.mean(), t.pu.std_error()};
    r.empirical_cc = {t.cr.mean(), t.cr.std_error()};

    const double p = config.params.p;
    const double c_p = ergodic_capacity(config.params.power_pu, 0.0, config.params.noise_var,
                                        config.fading);
    r.eta_defined = p < 1.0 && c_p > 0.0;
    if (r.eta_defined) {
        const double denom = (1.0 - p) * c_p;
        r.empirical_eta_hat = {t.both.mean() / denom, t.both.std_error() / denom};
    } else {
        r.empirical_eta_hat = {std::numeric_limits<double>::infinity(), 0.0};
    }
    r.interference = make_interference_report(config, t.cross_power);
    return r;
}

InterferenceReport interference_power_check(const SimulationConfig& config, std::int64_t n_slots) {
    SimulationConfig cfg = config;
    cfg.n_slots = n_slots;
    cfg.validate();
    return make_interference_report(cfg, simulate(cfg).cross_power);
}

std::string simulation_json(const SimulationConfig& config, const SimulationResult& result) {
    using nlohmann::ordered_json;
    auto estimate = [](const Estimate& e) {
        ordered_json j;
        j["value"] = e.value;
        j["std_error"] = e.std_error;
        return j;
    };
    ordered_json j;
    j["seed"] = config.seed;
    ordered_json cfg;
    cfg["p"] = config.params.p;
    cfg["power_pu"] = config.params.power_pu;
    cfg["power_cr"] = config.params.power_cr;
    cfg["noise_var"] = config.params.noise_var;
    cfg["p_fa"] = config.err.p_fa;
    cfg["p_md"] = config.err.p_md;
    cfg["fading"] = std::string(fading_name(config.fading));
    cfg["n_slots"] = config.n_slots;
    j["config"] = cfg;
    ordered_json res;
    res["empirical_cp"] = estimate(result.empirical_cp);
    res["empirical_cc"] = estimate(result.empirical_cc);
    if (result.eta_defined) {
        res["empirical_eta_hat"] = estimate(result.empirical_eta_hat);
    } else {
        res["empirical_eta_hat"] = nullptr;
    }
    res["q_counts"] = result.q_counts;
    res["n_slots"] = result.n_slots;
    ordered_json inter;
    inter["skipped"] = result.interference.skipped;
    inter["slots"] = result.interference.slots;
    inter["mean_power"] = estimate(result.interference.mean_power);
    inter["expected"] = result.interference.expected;
    inter["z_score"] = result.interference.z_score;
    res["interference"] = inter;
    j["result"] = res;
    return j.dump(2);
}

} // namespace interweave
