#include "interweave/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "interweave/admissibility.hpp"
#include "interweave/cli/svg.hpp"
#include "interweave/csv.hpp"
#include "interweave/errors.hpp"
#include "interweave/simulator.hpp"

#ifndef INTERWEAVE_VERSION
#define INTERWEAVE_VERSION "0.0.0"
#endif

namespace interweave::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Runs fn(0..n-1) on up to `threads` workers. Callers store results by
// index, so output order never depends on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    pool.clear();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

fs::path prepare_output_dir(const std::string& dir) {
    const fs::path path(dir);
    std::error_code ec;
    fs::create_directories(path, ec);
    if (ec) throw ConfigError("output directory '" + dir + "' cannot be created: " + ec.message());
    const fs::path probe = path / ".interweave_write_check";
    {
        std::ofstream out(probe);
        if (!out) throw ConfigError("output directory '" + dir + "' is not writable");
    }
    fs::remove(probe, ec);
    return path;
}

class OutputFile {
public:
    explicit OutputFile(const fs::path& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw ConfigError("cannot open '" + path.string() + "' for writing");
    }
    std::ostream& stream() { return out_; }

private:
    fs::path path_;
    std::ofstream out_;
};

void provenance_lines(CsvWriter& csv, const Provenance& prov) {
    csv.comment("tool", std::string("interweave ") + std::string(tool_version()));
    csv.comment("command", prov.command);
    csv.comment("config_hash", "fnv1a64:" + prov.config_hash);
    csv.comment("seed", std::to_string(prov.seed));
}

ordered_json provenance_json(const Provenance& prov) {
    ordered_json j;
    j["tool"] = "interweave";
    j["version"] = std::string(tool_version());
    j["command"] = prov.command;
    j["config_hash"] = "fnv1a64:" + prov.config_hash;
    j["seed"] = prov.seed;
    return j;
}

void warn(std::ostream& log, const std::string& msg) { log << "warning: " << msg << '\n'; }

SystemParams with_rs(const SystemParams& base, double rs_db) {
    SystemParams s = base;
    s.power_cr = base.power_pu / std::pow(10.0, rs_db / 10.0);
    return s;
}

std::string label(const char* key, double v) { return std::string(key) + "=" + format_double(v); }

void write_svg_chart(const fs::path& path, const svg::Chart& chart) {
    OutputFile f(path);
    svg::write_chart(f.stream(), chart);
}

constexpr std::size_t kMaxHeatmaps = 16;

// ---- eta-sweep ---------------------------------------------------------

int cmd_eta_sweep(const Config& cfg, const Provenance& prov, const fs::path& dir, bool svg,
                  std::ostream& log) {
    if (!cfg.eta_sweep) throw ConfigError("eta_sweep: block missing");
    const auto& ps = cfg.eta_sweep->p.points();
    const auto& rss = cfg.eta_sweep->rs_db.points();
    std::vector<CapacityConstants> consts(rss.size());
    parallel_for(rss.size(), cfg.threads, [&](std::size_t r) {
        consts[r] = capacity_constants(with_rs(cfg.scenario, rss[r]), cfg.fading);
    });
    std::vector<double> eta(ps.size() * rss.size());
    parallel_for(eta.size(), cfg.threads, [&](std::size_t k) {
        eta[k] = eta_ideal_or_infinity(consts[k / ps.size()], ps[k % ps.size()]);
    });
    if (std::find(ps.begin(), ps.end(), 1.0) != ps.end()) {
        warn(log, "p = 1 in the sweep; eta is unbounded there and written as inf");
    }

    OutputFile f(dir / "eta_sweep.csv");
    CsvWriter csv(f.stream());
    provenance_lines(csv, prov);
    csv.header({"p", "RS_db", "eta"});
    for (std::size_t r = 0; r < rss.size(); ++r) {
        for (std::size_t i = 0; i < ps.size(); ++i) csv.row(ps[i], rss[r], eta[r * ps.size() + i]);
    }
    if (svg) {
        svg::Chart chart{"Spectral efficiency factor", "p", "eta", {}};
        for (std::size_t r = 0; r < rss.size(); ++r) {
            svg::Series s{label("RS_dB", rss[r]), ps, {}};
            s.y.assign(eta.begin() + r * ps.size(), eta.begin() + (r + 1) * ps.size());
            chart.series.push_back(std::move(s));
        }
        write_svg_chart(dir / "eta_sweep.svg", chart);
    }
    return kExitOk;
}

// ---- rate-region -------------------------------------------------------

int cmd_rate_region(const Config& cfg, const Provenance& prov, const fs::path& dir, bool svg,
                    std::ostream& log) {
    if (!cfg.rate_region) throw ConfigError("rate_region: block missing");
    const auto& block = *cfg.rate_region;
    const auto consts = capacity_constants(cfg.scenario, cfg.fading);
    const auto ideal = ideal_rate_region(consts, block.p);
    std::vector<RateRegionPolygon> regions;
    for (const auto& e : block.cases) regions.push_back(nonideal_rate_region(consts, block.p, e));

    std::size_t breaches = 0;
    OutputFile f(dir / "rate_region.csv");
    CsvWriter csv(f.stream());
    provenance_lines(csv, prov);
    csv.header({"polygon", "kind", "p", "p_fa", "p_md", "vertex", "r_c", "r_p", "inside_ideal"});
    for (std::size_t v = 0; v < ideal.vertices.size(); ++v) {
        csv.row(0, "ideal", block.p, 0.0, 0.0, v, ideal.vertices[v].r_c, ideal.vertices[v].r_p, true);
    }
    for (std::size_t k = 0; k < regions.size(); ++k) {
        const auto& poly = regions[k];
        for (std::size_t v = 0; v < poly.vertices.size(); ++v) {
            const bool inside = ideal.contains(poly.vertices[v], 1e-12);
            if (!inside) {
                ++breaches;
                warn(log, "non-ideal vertex (" + format_double(poly.vertices[v].r_c) + ", " +
                              format_double(poly.vertices[v].r_p) + ") of case p_fa=" +
                              format_double(block.cases[k].p_fa) + " p_md=" +
                              format_double(block.cases[k].p_md) + " lies outside the ideal region");
            }
            csv.row(k + 1, "non_ideal", block.p, block.cases[k].p_fa, block.cases[k].p_md, v,
                    poly.vertices[v].r_c, poly.vertices[v].r_p, inside);
        }
    }
    if (svg) {
        svg::Chart chart{"Rate regions at " + label("p", block.p), "R_c", "R_p", {}};
        auto series = [](std::string name, const RateRegionPolygon& poly) {
            svg::Series s{std::move(name), {}, {}, true};
            for (const auto& v : poly.vertices) {
                s.x.push_back(v.r_c);
                s.y.push_back(v.r_p);
            }
            return s;
        };
        chart.series.push_back(series("ideal", ideal));
        for (std::size_t k = 0; k < regions.size(); ++k) {
            chart.series.push_back(series(label("p_fa", block.cases[k].p_fa) + " " +
                                              label("p_md", block.cases[k].p_md),
                                          regions[k]));
        }
        write_svg_chart(dir / "rate_region.svg", chart);
    }
    if (breaches > 0) {
        log << "error: " << breaches << " non-ideal vertices fall outside the ideal region\n";
        return kExitInvariant;
    }
    return kExitOk;
}

// ---- admissible-grid ---------------------------------------------------

int cmd_admissible_grid(const Config& cfg, const Provenance& prov, const fs::path& dir, bool svg,
                        std::ostream& log) {
    if (!cfg.admissible_grid) throw ConfigError("admissible_grid: block missing");
    const auto& block = *cfg.admissible_grid;
    const std::vector<double> rss =
        block.rs_db ? block.rs_db->points() : std::vector<double>{cfg.scenario.rs_db()};
    const auto& ps = block.p.points();
    const auto& gammas = block.gamma.points();

    std::vector<CapacityConstants> consts(rss.size());
    for (std::size_t r = 0; r < rss.size(); ++r) {
        consts[r] = block.rs_db ? capacity_constants(with_rs(cfg.scenario, rss[r]), cfg.fading)
                                : capacity_constants(cfg.scenario, cfg.fading);
    }
    // Grid k covers (RS, p, gamma) in row-major order.
    const std::size_t per_rs = ps.size() * gammas.size();
    auto rs_of = [&](std::size_t k) { return k / per_rs; };
    auto gamma_of = [&](std::size_t k) { return gammas[k % gammas.size()]; };
    auto p_of = [&](std::size_t k) { return ps[(k / gammas.size()) % ps.size()]; };
    std::vector<RegionGrid> grids(rss.size() * per_rs);
    parallel_for(grids.size(), cfg.threads, [&](std::size_t k) {
        grids[k] = region_grid(consts[rs_of(k)], p_of(k), LossFactor(gamma_of(k)), block.resolution);
    });
    for (std::size_t r = 0; r < rss.size(); ++r) {
        const auto& k = consts[r];
        if (std::find(ps.begin(), ps.end(), 0.0) != ps.end() && k.a_p - k.b_p - k.b_c > 0.0) {
            warn(log, "p = 0 at " + label("RS_db", rss[r]) +
                          ": the CR never finds the channel free; only p_fa = 0 is weakly admissible");
        }
    }

    {
        OutputFile f(dir / "admissible_grid.csv");
        CsvWriter csv(f.stream());
        provenance_lines(csv, prov);
        csv.header({"RS_db", "p", "gamma", "p_fa", "p_md", "eta_hat", "weak", "strong_gamma"});
        for (std::size_t k = 0; k < grids.size(); ++k) {
            for (const auto& c : grids[k].cells) {
                csv.row(rss[rs_of(k)], grids[k].p, grids[k].gamma, c.p_fa, c.p_md, c.eta_hat,
                        c.verdict.weakly_admissible, c.verdict.strong_with_gamma);
            }
        }
    }
    {
        OutputFile f(dir / "admissible_summary.csv");
        CsvWriter csv(f.stream());
        provenance_lines(csv, prov);
        csv.header({"RS_db", "p", "gamma", "weak_fraction", "strong_gamma_fraction",
                    "strong_pfa_bound", "full_admissible_point"});
        for (std::size_t k = 0; k < grids.size(); ++k) {
            const auto& kc = consts[rs_of(k)];
            csv.row(rss[rs_of(k)], grids[k].p, grids[k].gamma, grids[k].weak_fraction(),
                    grids[k].strong_gamma_fraction(),
                    strong_pfa_bound(kc, LossFactor(grids[k].gamma)).bound, full_admissible_point(kc));
        }
    }
    if (svg) {
        // One heatmap per lattice is only readable for short sweeps.
        for (std::size_t k = 0; k < grids.size() && grids.size() <= kMaxHeatmaps; ++k) {
            const auto& g = grids[k];
            svg::Heatmap map;
            map.title = "Admissible pairs, " + label("RS_dB", rss[rs_of(k)]) + " " +
                        label("p", g.p) + " " + label("gamma", g.gamma);
            map.x_label = "p_fa";
            map.y_label = "p_md";
            map.rows = g.n;
            map.cols = g.n;
            map.palette = {"#f2f2f2", "#9ecae1", "#fdae6b", "#31a354"};
            map.legend = {"inadmissible", "weak only", "strong (gamma) only", "weak and strong"};
            map.cells.resize(static_cast<std::size_t>(g.n) * g.n);
            for (int i = 0; i < g.n; ++i) {
                for (int j = 0; j < g.n; ++j) {
                    const auto& v = g.at(i, j).verdict;
                    // Row = p_md index, column = p_fa index.
                    map.cells[static_cast<std::size_t>(j) * g.n + i] =
                        (v.weakly_admissible ? 1 : 0) + (v.strong_with_gamma ? 2 : 0);
                }
            }
            OutputFile f(dir / ("admissible_grid_" + std::to_string(k) + ".svg"));
            svg::write_heatmap(f.stream(), map);
        }
        if (gammas.size() > 1) {
            svg::Chart chart{"Strong p_fa bound versus loss", "1 - gamma", "p_fa bound", {}};
            for (std::size_t r = 0; r < rss.size(); ++r) {
                svg::Series s{label("RS_dB", rss[r]), {}, {}};
                for (double g : gammas) {
                    s.x.push_back(1.0 - g);
                    s.y.push_back(strong_pfa_bound(consts[r], LossFactor(g)).bound);
                }
                chart.series.push_back(std::move(s));
            }
            write_svg_chart(dir / "strong_bound.svg", chart);
        }
    }
    return kExitOk;
}

// ---- detector-roc ------------------------------------------------------

int cmd_detector_roc(const Config& cfg, const Provenance& prov, const fs::path& dir, bool svg,
                     std::ostream& log) {
    if (!cfg.detector_roc) throw ConfigError("detector_roc: block missing");
    const auto& block = *cfg.detector_roc;
    const double p = block.p.value_or(cfg.scenario.p);
    if (!(p > 0.0)) throw ConfigError("detector_roc.p: the weak boundary needs p > 0");
    const auto consts = capacity_constants(cfg.scenario, cfg.fading);
    const auto grid = logit_grid(block.points, block.p_fa_min, block.p_fa_max);
    std::vector<RocCurve> curves(block.detectors.size());
    parallel_for(curves.size(), cfg.threads, [&](std::size_t d) {
        curves[d] = admissible_arc(sample_roc(block.detectors[d], grid), consts, p);
    });
    if (consts.a_p - consts.b_p - consts.b_c <= 0.0) {
        warn(log, "A_p - B_p - B_c <= 0 in this scenario: every (p_fa, p_md) pair is weakly admissible");
    }
    {
        OutputFile f(dir / "detector_roc.csv");
        CsvWriter csv(f.stream());
        provenance_lines(csv, prov);
        write_roc_csv(f.stream(), curves);
    }
    {
        OutputFile f(dir / "detector_summary.csv");
        CsvWriter csv(f.stream());
        provenance_lines(csv, prov);
        csv.header({"index", "detector", "p", "admissible_fraction"});
        for (std::size_t d = 0; d < curves.size(); ++d) {
            csv.row(d, detector_name(curves[d].kind), p, curves[d].admissible_fraction());
        }
    }
    if (svg) {
        svg::Chart chart{"ROC and weak admissibility boundary, " + label("p", p), "p_fa", "p_md", {}};
        for (const auto& c : curves) {
            svg::Series s{std::string(detector_name(c.kind)), {}, {}};
            for (const auto& pt : c.points) {
                s.x.push_back(pt.p_fa);
                s.y.push_back(pt.p_md);
            }
            chart.series.push_back(std::move(s));
        }
        svg::Series boundary{"weak boundary", {}, {}};
        for (double x : grid) {
            boundary.x.push_back(x);
            boundary.y.push_back(weak_boundary(consts, p, x));
        }
        chart.series.push_back(std::move(boundary));
        write_svg_chart(dir / "detector_roc.svg", chart);
    }
    return kExitOk;
}

// ---- simulate ----------------------------------------------------------

double z_score(double value, double se, double expected) {
    const double diff = value - expected;
    if (se > 0.0) return diff / se;
    if (std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(expected))) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), diff);
}

int cmd_simulate(const Config& cfg, const Provenance& prov, const fs::path& dir, bool,
                 std::ostream& log) {
    if (!cfg.simulate) throw ConfigError("simulate: block missing");
    SimulationConfig sim;
    sim.params = cfg.scenario;
    sim.err = cfg.simulate->err;
    sim.fading = cfg.fading;
    sim.n_slots = cfg.simulate->n_slots;
    sim.seed = prov.seed;
    sim.threads = cfg.threads;
    const auto result = run(sim);
    const auto consts = capacity_constants(cfg.scenario, cfg.fading);
    const auto analytic = nonideal_capacities(consts, cfg.scenario.p, sim.err);

    struct Row {
        const char* name;
        Estimate emp;
        double expected;
        double z;
    };
    std::vector<Row> rows;
    auto add = [&](const char* name, const Estimate& e, double expected) {
        rows.push_back({name, e, expected, z_score(e.value, e.std_error, expected)});
    };
    add("C_p_prime", result.empirical_cp, analytic.c_p_prime);
    add("C_c_prime", result.empirical_cc, analytic.c_c_prime);
    if (result.eta_defined) add("eta_hat", result.empirical_eta_hat, analytic.eta_hat);
    if (!result.interference.skipped) {
        add("interference_power", result.interference.mean_power, result.interference.expected);
    }
    bool failed = false;
    for (const auto& r : rows) failed = failed || !(std::abs(r.z) <= cfg.simulate->z_limit);

    ordered_json doc;
    doc["provenance"] = provenance_json(prov);
    doc["simulation"] = ordered_json::parse(simulation_json(sim, result));
    ordered_json cmp = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json one;
        one["quantity"] = r.name;
        one["empirical"] = r.emp.value;
        one["std_error"] = r.emp.std_error;
        one["analytic"] = r.expected;
        one["z"] = std::isfinite(r.z) ? ordered_json(r.z) : ordered_json(format_double(r.z));
        cmp.push_back(one);
    }
    doc["comparison"] = cmp;
    doc["z_limit"] = cfg.simulate->z_limit;
    doc["status"] = failed ? "statistical_failure" : "ok";
    {
        OutputFile f(dir / "simulate.json");
        f.stream() << doc.dump(2) << '\n';
    }
    {
        OutputFile f(dir / "simulate_comparison.csv");
        CsvWriter csv(f.stream());
        provenance_lines(csv, prov);
        csv.header({"quantity", "empirical", "std_error", "analytic", "z"});
        for (const auto& r : rows) csv.row(r.name, r.emp.value, r.emp.std_error, r.expected, r.z);
    }
    if (failed) {
        for (const auto& r : rows) {
            if (!(std::abs(r.z) <= cfg.simulate->z_limit)) {
                log << "error: " << r.name << " z-score " << format_double(r.z) << " exceeds "
                    << format_double(cfg.simulate->z_limit) << '\n';
            }
        }
        return kExitStatistical;
    }
    return kExitOk;
}

using Handler = int (*)(const Config&, const Provenance&, const fs::path&, bool, std::ostream&);

Handler find_handler(std::string_view name) {
    if (name == "eta-sweep") return cmd_eta_sweep;
    if (name == "rate-region") return cmd_rate_region;
    if (name == "admissible-grid") return cmd_admissible_grid;
    if (name == "detector-roc") return cmd_detector_roc;
    if (name == "simulate") return cmd_simulate;
    return nullptr;
}

} // namespace

std::string_view tool_version() { return INTERWEAVE_VERSION; }

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"eta-sweep", "rate-region", "admissible-grid",
                                                "detector-roc", "simulate"};
    return names;
}

Config effective_config(Config config, const RunOptions& options) {
    if (options.out_dir) config.output_dir = *options.out_dir;
    if (options.seed) config.seed = *options.seed;
    if (options.threads) {
        if (*options.threads < 1) throw ConfigError("threads: must be >= 1");
        config.threads = *options.threads;
    }
    return config;
}

std::string config_hash(const Config& config) {
    Config c = config;
    c.output_dir = ".";
    c.threads = 1;
    return fnv1a_hex(serialize_config(c));
}

int run_command(std::string_view command, const Config& config, const RunOptions& options,
                std::ostream& log) {
    const Handler handler = find_handler(command);
    if (!handler) {
        log << "error: unknown command '" << command << "'\n";
        return kExitConfig;
    }
    try {
        const Config cfg = effective_config(config, options);
        const Provenance prov{std::string(command), config_hash(cfg), cfg.seed};
        const fs::path dir = prepare_output_dir(cfg.output_dir);
        return handler(cfg, prov, dir, options.svg, log);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvariantBreach& e) {
        log << "invariant breach: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const fs::filesystem_error& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
}

int run_command_file(std::string_view command, const std::string& config_path,
                     const RunOptions& options, std::ostream& log) {
    Config cfg;
    try {
        cfg = load_config(config_path);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return run_command(command, cfg, options, log);
}

} // namespace interweave::cli
