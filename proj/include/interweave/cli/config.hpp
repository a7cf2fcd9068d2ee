#pragma once

// Versioned JSON configuration shared by every subcommand.
//
// Numeric axes accept a single number, an explicit list, or the string
// "start:step:stop" (inclusive, point i = start + i * step).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "interweave/channel.hpp"
#include "interweave/detectors.hpp"
#include "interweave/ratemodel.hpp"

namespace interweave::cli {

inline constexpr int kSchemaVersion = 1;

class Sweep {
public:
    Sweep() = default;
    static Sweep list(std::vector<double> values);
    static Sweep range(double start, double step, double stop);
    // Throws ConfigError naming `field` on malformed input.
    static Sweep parse(const std::string& text, const std::string& field);

    const std::vector<double>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool is_range() const { return range_.has_value(); }
    std::string to_string() const;  // only for ranges

    friend bool operator==(const Sweep& a, const Sweep& b) { return a.points_ == b.points_ && a.range_text_ == b.range_text_; }

private:
    struct Range {
        double start;
        double step;
        double stop;
    };
    std::optional<Range> range_;
    std::string range_text_;
    std::vector<double> points_;
};

struct EtaSweepBlock {
    Sweep p;
    Sweep rs_db;
    friend bool operator==(const EtaSweepBlock&, const EtaSweepBlock&) = default;
};

struct RateRegionBlock {
    double p = 0.5;
    std::vector<DetectionErrorPair> cases;
    friend bool operator==(const RateRegionBlock& a, const RateRegionBlock& b) {
        if (a.p != b.p || a.cases.size() != b.cases.size()) return false;
        for (std::size_t i = 0; i < a.cases.size(); ++i) {
            if (a.cases[i].p_fa != b.cases[i].p_fa || a.cases[i].p_md != b.cases[i].p_md) return false;
        }
        return true;
    }
};

struct AdmissibleGridBlock {
    int resolution = 101;
    Sweep p;
    std::optional<Sweep> rs_db;  // scenario RS when absent
    Sweep gamma = Sweep::list({0.9});
    friend bool operator==(const AdmissibleGridBlock&, const AdmissibleGridBlock&) = default;
};

struct DetectorRocBlock {
    std::optional<double> p;  // scenario p when absent
    int points = kDefaultRocPoints;
    double p_fa_min = kDefaultPfaMin;
    double p_fa_max = kDefaultPfaMax;
    std::vector<DetectorParams> detectors;
    friend bool operator==(const DetectorRocBlock& a, const DetectorRocBlock& b);
};

struct SimulateBlock {
    DetectionErrorPair err;
    std::int64_t n_slots = 1'000'000;
    double z_limit = 4.0;
    friend bool operator==(const SimulateBlock& a, const SimulateBlock& b) {
        return a.err.p_fa == b.err.p_fa && a.err.p_md == b.err.p_md && a.n_slots == b.n_slots &&
               a.z_limit == b.z_limit;
    }
};

struct Config {
    int schema_version = kSchemaVersion;
    SystemParams scenario;
    FadingKind fading = FadingKind::rayleigh_unit;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string output_dir = ".";
    std::optional<EtaSweepBlock> eta_sweep;
    std::optional<RateRegionBlock> rate_region;
    std::optional<AdmissibleGridBlock> admissible_grid;
    std::optional<DetectorRocBlock> detector_roc;
    std::optional<SimulateBlock> simulate;

    friend bool operator==(const Config& a, const Config& b);
};

// Throws ConfigError with the offending field path.
Config parse_config(const std::string& json_text);
Config load_config(const std::string& path);
// Canonical JSON text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const Config& config);

// 64-bit FNV-1a of `text`, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

} // namespace interweave::cli
