#include "interweave/cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "interweave/errors.hpp"

namespace interweave::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::size_t kMaxSweepPoints = 10'000'000;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError(field + ": " + what);
}

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) fail(where, "expected an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!ok.count(it.key())) fail(where + "." + it.key(), "unknown key");
    }
}

double get_number(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) fail(where + "." + key, "missing");
    const json& v = obj.at(key);
    if (!v.is_number()) fail(where + "." + key, "expected a number");
    return v.get<double>();
}

double number_or(const json& obj, const std::string& where, const char* key, double fallback) {
    return obj.contains(key) ? get_number(obj, where, key) : fallback;
}

std::int64_t get_integer(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) fail(where + "." + key, "missing");
    const json& v = obj.at(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d == std::floor(d) && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
    }
    fail(where + "." + key, "expected an integer");
}

void check_probability(double v, const std::string& field) {
    if (!(v >= 0.0 && v <= 1.0)) fail(field, "must lie in [0,1]");
}

Sweep sweep_from_json(const json& v, const std::string& field) {
    if (v.is_number()) return Sweep::list({v.get<double>()});
    if (v.is_string()) return Sweep::parse(v.get<std::string>(), field);
    if (v.is_array()) {
        std::vector<double> values;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) fail(field + "[" + std::to_string(i) + "]", "expected a number");
            values.push_back(v[i].get<double>());
        }
        if (values.empty()) fail(field, "sweep is empty");
        return Sweep::list(std::move(values));
    }
    fail(field, "expected a number, a list or \"start:step:stop\"");
}

ordered_json sweep_to_json(const Sweep& s) {
    if (s.is_range()) return s.to_string();
    return s.points();
}

SystemParams parse_scenario(const json& j) {
    const std::string w = "scenario";
    allow_keys(j, w, {"p", "power_pu", "power_cr", "noise_var", "pu_snr_db", "rs_db"});
    SystemParams s;
    s.p = get_number(j, w, "p");
    const bool db_form = j.contains("pu_snr_db") || j.contains("rs_db");
    const bool linear_form = j.contains("power_pu") || j.contains("power_cr");
    if (db_form && linear_form) fail(w, "give either power_pu/power_cr or pu_snr_db/rs_db");
    if (db_form) {
        s = SystemParams::from_db(s.p, get_number(j, w, "pu_snr_db"), get_number(j, w, "rs_db"));
        if (j.contains("noise_var")) fail(w + ".noise_var", "fixed at 1 in the dB form");
    } else {
        s.power_pu = get_number(j, w, "power_pu");
        s.power_cr = get_number(j, w, "power_cr");
        s.noise_var = number_or(j, w, "noise_var", 1.0);
    }
    check_probability(s.p, w + ".p");
    if (!(s.power_pu > 0.0)) fail(w + ".power_pu", "must be positive");
    if (!(s.power_cr > 0.0)) fail(w + ".power_cr", "must be positive");
    if (!(s.noise_var > 0.0)) fail(w + ".noise_var", "must be positive");
    return s;
}

DetectionErrorPair parse_err(const json& j, const std::string& w) {
    DetectionErrorPair e{get_number(j, w, "p_fa"), get_number(j, w, "p_md")};
    check_probability(e.p_fa, w + ".p_fa");
    check_probability(e.p_md, w + ".p_md");
    return e;
}

DetectorParams parse_detector_block(const json& j, const std::string& w) {
    if (!j.is_object()) fail(w, "expected an object");
    if (!j.contains("kind") || !j.at("kind").is_string()) fail(w + ".kind", "missing");
    DetectorParams d;
    try {
        d.kind = parse_detector(j.at("kind").get<std::string>());
    } catch (const ConfigError& e) {
        fail(w + ".kind", e.what());
    }
    switch (d.kind) {
    case DetectorKind::energy:
        allow_keys(j, w, {"kind", "l_segments", "m_per_segment", "power_pu", "noise_var", "ed_delta_scale"});
        d.l_segments = static_cast<int>(get_integer(j, w, "l_segments"));
        d.m_per_segment = static_cast<int>(get_integer(j, w, "m_per_segment"));
        d.power_pu = get_number(j, w, "power_pu");
        d.noise_var = number_or(j, w, "noise_var", 1.0);
        d.ed_delta_scale = number_or(j, w, "ed_delta_scale", 1.0);
        break;
    case DetectorKind::matched_filter:
        allow_keys(j, w, {"kind", "signal_energy", "noise_var"});
        d.signal_energy = get_number(j, w, "signal_energy");
        d.noise_var = number_or(j, w, "noise_var", 1.0);
        break;
    case DetectorKind::msc:
        allow_keys(j, w, {"kind", "l_segments", "true_msc"});
        d.l_segments = static_cast<int>(get_integer(j, w, "l_segments"));
        d.true_msc = get_number(j, w, "true_msc");
        break;
    }
    try {
        d.validate();
    } catch (const DomainError& e) {
        fail(w, e.what());
    }
    return d;
}

ordered_json detector_to_json(const DetectorParams& d) {
    ordered_json j;
    j["kind"] = std::string(detector_name(d.kind));
    switch (d.kind) {
    case DetectorKind::energy:
        j["l_segments"] = d.l_segments;
        j["m_per_segment"] = d.m_per_segment;
        j["power_pu"] = d.power_pu;
        j["noise_var"] = d.noise_var;
        j["ed_delta_scale"] = d.ed_delta_scale;
        break;
    case DetectorKind::matched_filter:
        j["signal_energy"] = d.signal_energy;
        j["noise_var"] = d.noise_var;
        break;
    case DetectorKind::msc:
        j["l_segments"] = d.l_segments;
        j["true_msc"] = d.true_msc;
        break;
    }
    return j;
}

bool same_detector(const DetectorParams& a, const DetectorParams& b) {
    return a.kind == b.kind && a.l_segments == b.l_segments && a.m_per_segment == b.m_per_segment &&
           a.signal_energy == b.signal_energy && a.noise_var == b.noise_var &&
           a.power_pu == b.power_pu && a.true_msc == b.true_msc &&
           a.ed_delta_scale == b.ed_delta_scale;
}

} // namespace

Sweep Sweep::list(std::vector<double> values) {
    Sweep s;
    s.points_ = std::move(values);
    return s;
}

Sweep Sweep::range(double start, double step, double stop) {
    if (!std::isfinite(start) || !std::isfinite(step) || !std::isfinite(stop)) {
        throw ConfigError("sweep bounds must be finite");
    }
    if (step == 0.0) throw ConfigError("sweep step must be nonzero");
    const double span = (stop - start) / step;
    if (span < -1e-9) throw ConfigError("sweep step points away from stop");
    if (span > static_cast<double>(kMaxSweepPoints)) throw ConfigError("sweep has too many points");
    const auto last = static_cast<std::size_t>(std::floor(span + 1e-9));
    Sweep s;
    s.range_ = Range{start, step, stop};
    s.points_.resize(last + 1);
    for (std::size_t i = 0; i <= last; ++i) s.points_[i] = start + static_cast<double>(i) * step;
    // Land exactly on an inclusive endpoint that the product missed by rounding.
    if (std::abs(s.points_.back() - stop) <= 1e-9 * std::abs(step)) s.points_.back() = stop;
    std::ostringstream os;
    os.precision(17);
    os << start << ':' << step << ':' << stop;
    s.range_text_ = os.str();
    return s;
}

Sweep Sweep::parse(const std::string& text, const std::string& field) {
    double v[3];
    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k) {
        const std::size_t end = k < 2 ? text.find(':', pos) : text.size();
        if (end == std::string::npos) fail(field, "expected \"start:step:stop\"");
        const std::string part = text.substr(pos, end - pos);
        try {
            std::size_t used = 0;
            v[k] = std::stod(part, &used);
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            fail(field, "bad number '" + part + "' in \"" + text + "\"");
        }
        pos = end + 1;
    }
    try {
        Sweep s = range(v[0], v[1], v[2]);
        s.range_text_ = text;
        return s;
    } catch (const ConfigError& e) {
        fail(field, e.what());
    }
}

std::string Sweep::to_string() const { return range_text_; }

bool operator==(const DetectorRocBlock& a, const DetectorRocBlock& b) {
    if (a.p != b.p || a.points != b.points || a.p_fa_min != b.p_fa_min ||
        a.p_fa_max != b.p_fa_max || a.detectors.size() != b.detectors.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.detectors.size(); ++i) {
        if (!same_detector(a.detectors[i], b.detectors[i])) return false;
    }
    return true;
}

bool operator==(const Config& a, const Config& b) {
    return a.schema_version == b.schema_version && a.scenario.p == b.scenario.p &&
           a.scenario.power_pu == b.scenario.power_pu &&
           a.scenario.power_cr == b.scenario.power_cr &&
           a.scenario.noise_var == b.scenario.noise_var && a.fading == b.fading &&
           a.seed == b.seed && a.threads == b.threads && a.output_dir == b.output_dir &&
           a.eta_sweep == b.eta_sweep && a.rate_region == b.rate_region &&
           a.admissible_grid == b.admissible_grid && a.detector_roc == b.detector_roc &&
           a.simulate == b.simulate;
}

Config parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    allow_keys(root, "config", {"schema_version", "scenario", "fading", "seed", "threads", "output",
                                "eta_sweep", "rate_region", "admissible_grid", "detector_roc",
                                "simulate"});
    Config c;
    c.schema_version = static_cast<int>(get_integer(root, "config", "schema_version"));
    if (c.schema_version != kSchemaVersion) {
        fail("schema_version", "unsupported version " + std::to_string(c.schema_version));
    }
    if (!root.contains("scenario")) fail("scenario", "missing");
    c.scenario = parse_scenario(root.at("scenario"));
    if (root.contains("fading")) {
        if (!root.at("fading").is_string()) fail("fading", "expected a string");
        c.fading = parse_fading(root.at("fading").get<std::string>());
    }
    if (root.contains("seed")) {
        const json& s = root.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
            fail("seed", "expected a nonnegative integer");
        }
        c.seed = s.get<std::uint64_t>();
    }
    if (root.contains("threads")) {
        c.threads = static_cast<int>(get_integer(root, "config", "threads"));
        if (c.threads < 1) fail("threads", "must be >= 1");
    }
    if (root.contains("output")) {
        const json& o = root.at("output");
        allow_keys(o, "output", {"dir"});
        if (o.contains("dir")) {
            if (!o.at("dir").is_string()) fail("output.dir", "expected a string");
            c.output_dir = o.at("dir").get<std::string>();
        }
    }
    if (root.contains("eta_sweep")) {
        const json& j = root.at("eta_sweep");
        allow_keys(j, "eta_sweep", {"p", "rs_db"});
        EtaSweepBlock b;
        if (!j.contains("p")) fail("eta_sweep.p", "missing");
        if (!j.contains("rs_db")) fail("eta_sweep.rs_db", "missing");
        b.p = sweep_from_json(j.at("p"), "eta_sweep.p");
        b.rs_db = sweep_from_json(j.at("rs_db"), "eta_sweep.rs_db");
        for (double p : b.p.points()) check_probability(p, "eta_sweep.p");
        c.eta_sweep = b;
    }
    if (root.contains("rate_region")) {
        const json& j = root.at("rate_region");
        allow_keys(j, "rate_region", {"p", "cases"});
        RateRegionBlock b;
        b.p = number_or(j, "rate_region", "p", c.scenario.p);
        check_probability(b.p, "rate_region.p");
        if (!j.contains("cases") || !j.at("cases").is_array() || j.at("cases").empty()) {
            fail("rate_region.cases", "expected a non-empty list");
        }
        for (std::size_t i = 0; i < j.at("cases").size(); ++i) {
            const std::string w = "rate_region.cases[" + std::to_string(i) + "]";
            allow_keys(j.at("cases")[i], w, {"p_fa", "p_md"});
            b.cases.push_back(parse_err(j.at("cases")[i], w));
        }
        c.rate_region = b;
    }
    if (root.contains("admissible_grid")) {
        const json& j = root.at("admissible_grid");
        allow_keys(j, "admissible_grid", {"resolution", "p", "rs_db", "gamma"});
        AdmissibleGridBlock b;
        if (j.contains("resolution")) b.resolution = static_cast<int>(get_integer(j, "admissible_grid", "resolution"));
        if (b.resolution < 2 || b.resolution > 4001) fail("admissible_grid.resolution", "must lie in [2, 4001]");
        if (!j.contains("p")) fail("admissible_grid.p", "missing");
        b.p = sweep_from_json(j.at("p"), "admissible_grid.p");
        for (double p : b.p.points()) check_probability(p, "admissible_grid.p");
        if (j.contains("rs_db")) b.rs_db = sweep_from_json(j.at("rs_db"), "admissible_grid.rs_db");
        if (j.contains("gamma")) b.gamma = sweep_from_json(j.at("gamma"), "admissible_grid.gamma");
        for (double g : b.gamma.points()) {
            if (!(g > 0.0 && g <= 1.0)) fail("admissible_grid.gamma", "must lie in (0,1]");
        }
        c.admissible_grid = b;
    }
    if (root.contains("detector_roc")) {
        const json& j = root.at("detector_roc");
        allow_keys(j, "detector_roc", {"p", "points", "p_fa_min", "p_fa_max", "detectors"});
        DetectorRocBlock b;
        if (j.contains("p")) {
            b.p = get_number(j, "detector_roc", "p");
            if (!(*b.p > 0.0 && *b.p <= 1.0)) fail("detector_roc.p", "must lie in (0,1]");
        }
        if (j.contains("points")) b.points = static_cast<int>(get_integer(j, "detector_roc", "points"));
        if (b.points < 2) fail("detector_roc.points", "must be >= 2");
        b.p_fa_min = number_or(j, "detector_roc", "p_fa_min", b.p_fa_min);
        b.p_fa_max = number_or(j, "detector_roc", "p_fa_max", b.p_fa_max);
        if (!(b.p_fa_min > 0.0 && b.p_fa_max < 1.0 && b.p_fa_min < b.p_fa_max)) {
            fail("detector_roc.p_fa_min", "need 0 < p_fa_min < p_fa_max < 1");
        }
        if (!j.contains("detectors") || !j.at("detectors").is_array() || j.at("detectors").empty()) {
            fail("detector_roc.detectors", "expected a non-empty list");
        }
        for (std::size_t i = 0; i < j.at("detectors").size(); ++i) {
            b.detectors.push_back(parse_detector_block(
                j.at("detectors")[i], "detector_roc.detectors[" + std::to_string(i) + "]"));
        }
        c.detector_roc = b;
    }
    if (root.contains("simulate")) {
        const json& j = root.at("simulate");
        allow_keys(j, "simulate", {"p_fa", "p_md", "n_slots", "z_limit"});
        SimulateBlock b;
        b.err = parse_err(j, "simulate");
        if (j.contains("n_slots")) b.n_slots = get_integer(j, "simulate", "n_slots");
        if (b.n_slots < 1) fail("simulate.n_slots", "must be >= 1");
        b.z_limit = number_or(j, "simulate", "z_limit", b.z_limit);
        if (!(b.z_limit > 0.0)) fail("simulate.z_limit", "must be positive");
        c.simulate = b;
    }
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const Config& c) {
    ordered_json root;
    root["schema_version"] = c.schema_version;
    ordered_json sc;
    sc["p"] = c.scenario.p;
    sc["power_pu"] = c.scenario.power_pu;
    sc["power_cr"] = c.scenario.power_cr;
    sc["noise_var"] = c.scenario.noise_var;
    root["scenario"] = sc;
    root["fading"] = std::string(fading_name(c.fading));
    root["seed"] = c.seed;
    root["threads"] = c.threads;
    root["output"] = ordered_json{{"dir", c.output_dir}};
    if (c.eta_sweep) {
        ordered_json j;
        j["p"] = sweep_to_json(c.eta_sweep->p);
        j["rs_db"] = sweep_to_json(c.eta_sweep->rs_db);
        root["eta_sweep"] = j;
    }
    if (c.rate_region) {
        ordered_json j;
        j["p"] = c.rate_region->p;
        ordered_json cases = ordered_json::array();
        for (const auto& e : c.rate_region->cases) {
            ordered_json one;
            one["p_fa"] = e.p_fa;
            one["p_md"] = e.p_md;
            cases.push_back(one);
        }
        j["cases"] = cases;
        root["rate_region"] = j;
    }
    if (c.admissible_grid) {
        ordered_json j;
        j["resolution"] = c.admissible_grid->resolution;
        j["p"] = sweep_to_json(c.admissible_grid->p);
        if (c.admissible_grid->rs_db) j["rs_db"] = sweep_to_json(*c.admissible_grid->rs_db);
        j["gamma"] = sweep_to_json(c.admissible_grid->gamma);
        root["admissible_grid"] = j;
    }
    if (c.detector_roc) {
        ordered_json j;
        if (c.detector_roc->p) j["p"] = *c.detector_roc->p;
        j["points"] = c.detector_roc->points;
        j["p_fa_min"] = c.detector_roc->p_fa_min;
        j["p_fa_max"] = c.detector_roc->p_fa_max;
        ordered_json dets = ordered_json::array();
        for (const auto& d : c.detector_roc->detectors) dets.push_back(detector_to_json(d));
        j["detectors"] = dets;
        root["detector_roc"] = j;
    }
    if (c.simulate) {
        ordered_json j;
        j["p_fa"] = c.simulate->err.p_fa;
        j["p_md"] = c.simulate->err.p_md;
        j["n_slots"] = c.simulate->n_slots;
        j["z_limit"] = c.simulate->z_limit;
        root["simulate"] = j;
    }
    return root.dump(2) + "\n";
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace interweave::cli
