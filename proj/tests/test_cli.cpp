#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "interweave/cli/commands.hpp"
#include "interweave/cli/config.hpp"
#include "interweave/errors.hpp"

using namespace interweave;
using namespace interweave::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("interweave_test_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Data rows: lines that are neither provenance comments nor the header.
std::vector<std::string> data_rows(const fs::path& path) {
    std::istringstream in(slurp(path));
    std::vector<std::string> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("#", 0) == 0) continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        rows.push_back(line);
    }
    return rows;
}

int run(const std::string& cmd, const std::string& json, const fs::path& out, std::string* log = nullptr,
        std::optional<int> threads = std::nullopt) {
    RunOptions opt;
    opt.out_dir = out.string();
    opt.threads = threads;
    std::ostringstream os;
    const int rc = run_command(cmd, parse_config(json), opt, os);
    if (log) *log = os.str();
    return rc;
}

const char* kScenario = R"("schema_version": 1, "scenario": {"p": 0.4, "pu_snr_db": 40, "rs_db": 20})";

std::string doc(const std::string& body) {
    return std::string("{") + kScenario + (body.empty() ? "" : ", ") + body + "}";
}

} // namespace

TEST_CASE("sweep grammar") {
    const auto s = Sweep::parse("0:0.1:1", "x");
    REQUIRE(s.size() == 11);
    CHECK(s.points().front() == 0.0);
    CHECK(s.points()[3] == 0.0 + 3 * 0.1);
    CHECK(s.points().back() == 1.0);
    CHECK(Sweep::parse("0:0.02:0.98", "x").size() == 50);
    CHECK(Sweep::parse("5:-1:1", "x").points() == std::vector<double>{5, 4, 3, 2, 1});
    CHECK(Sweep::parse("0:0.3:1", "x").points().back() == Catch::Approx(0.9));
    CHECK_THROWS_WITH(Sweep::parse("0:0:1", "eta_sweep.p"), Catch::Matchers::ContainsSubstring("eta_sweep.p"));
    CHECK_THROWS_AS(Sweep::parse("1:0.1:0", "x"), ConfigError);
    CHECK_THROWS_AS(Sweep::parse("0:a:1", "x"), ConfigError);
    CHECK_THROWS_AS(Sweep::parse("0:1", "x"), ConfigError);
}

TEST_CASE("config round trip") {
    const std::string text = doc(R"(
        "fading": "rayleigh", "seed": 99, "threads": 3, "output": {"dir": "somewhere"},
        "eta_sweep": {"p": "0:0.02:0.98", "rs_db": [0, 10, 20, 30]},
        "rate_region": {"p": 0.5, "cases": [{"p_fa": 0.1, "p_md": 0.2}]},
        "admissible_grid": {"resolution": 11, "p": [0.2, 0.4], "rs_db": "0:10:20", "gamma": 0.8},
        "detector_roc": {"p": 0.2, "points": 50, "detectors": [
            {"kind": "energy", "l_segments": 4, "m_per_segment": 64, "power_pu": 0.004},
            {"kind": "msc", "l_segments": 4, "true_msc": 0.2},
            {"kind": "mf", "signal_energy": 1.02}]},
        "simulate": {"p_fa": 0.2, "p_md": 0.3, "n_slots": 1000}
    )");
    const Config a = parse_config(text);
    const std::string once = serialize_config(a);
    const Config b = parse_config(once);
    CHECK(a == b);
    CHECK(serialize_config(b) == once);
    CHECK(b.seed == 99);
    CHECK(b.eta_sweep->p.size() == 50);
    CHECK(b.admissible_grid->rs_db->points() == std::vector<double>{0, 10, 20});
    CHECK(b.detector_roc->detectors[2].kind == DetectorKind::matched_filter);
    CHECK(config_hash(a) == config_hash(b));
    Config moved = a;
    moved.output_dir = "elsewhere";
    CHECK(config_hash(moved) == config_hash(a));
    moved.seed = 100;
    CHECK(config_hash(moved) != config_hash(a));
}

TEST_CASE("config errors name the field") {
    using Catch::Matchers::ContainsSubstring;
    CHECK_THROWS_WITH(parse_config("{"), ContainsSubstring("JSON"));
    CHECK_THROWS_WITH(parse_config(R"({"schema_version": 2, "scenario": {"p": 0.5}})"),
                      ContainsSubstring("schema_version"));
    CHECK_THROWS_WITH(parse_config(R"({"schema_version": 1})"), ContainsSubstring("scenario"));
    CHECK_THROWS_WITH(parse_config(doc(R"("detector_roc": {"detectors": [{"kind": "mf"}]})")),
                      ContainsSubstring("detector_roc.detectors[0].signal_energy"));
    CHECK_THROWS_WITH(
        parse_config(doc(R"("detector_roc": {"detectors": [{"kind": "energy", "l_segments": 4, "power_pu": 1}]})")),
        ContainsSubstring("m_per_segment"));
    CHECK_THROWS_WITH(parse_config(doc(R"("eta_sweep": {"p": [], "rs_db": 0})")),
                      ContainsSubstring("eta_sweep.p"));
    CHECK_THROWS_WITH(parse_config(doc(R"("eta_sweep": {"p": "0:0.5:1.5", "rs_db": 0})")),
                      ContainsSubstring("eta_sweep.p"));
    CHECK_THROWS_WITH(parse_config(doc(R"("simulat": {})")), ContainsSubstring("simulat"));
    CHECK_THROWS_WITH(parse_config(doc(R"("admissible_grid": {"p": 0.5, "gamma": 0})")),
                      ContainsSubstring("gamma"));
}

TEST_CASE("eta-sweep table") {
    const auto out = scratch("eta");
    std::string log;
    REQUIRE(run("eta-sweep", doc(R"("eta_sweep": {"p": "0:0.1:0.9", "rs_db": [0, 10, 20, 30]})"), out) == kExitOk);
    const auto rows = data_rows(out / "eta_sweep.csv");
    CHECK(rows.size() == 40);
    const std::string text = slurp(out / "eta_sweep.csv");
    CHECK(text.rfind("# tool: interweave ", 0) == 0);
    CHECK(text.find("# config_hash: fnv1a64:") != std::string::npos);
    CHECK(text.find("# seed: 1\r\n") != std::string::npos);
    CHECK(text.find("p,RS_db,eta\r\n") != std::string::npos);
    // Monotone in p within each RS block.
    for (std::size_t b = 0; b < 4; ++b) {
        double prev = 0.0;
        for (std::size_t i = 0; i < 10; ++i) {
            const auto& r = rows[b * 10 + i];
            const double eta = std::stod(r.substr(r.rfind(',') + 1));
            CHECK(eta > prev);
            prev = eta;
        }
    }
    REQUIRE(run("eta-sweep", doc(R"("eta_sweep": {"p": [0.5, 1], "rs_db": 0})"), out, &log) == kExitOk);
    CHECK(data_rows(out / "eta_sweep.csv").back() == "1,0,inf");
    CHECK(log.find("warning") != std::string::npos);
}

TEST_CASE("rate-region table and containment breach") {
    const auto out = scratch("region");
    REQUIRE(run("rate-region",
                doc(R"("rate_region": {"p": 0.5, "cases": [{"p_fa": 0, "p_md": 0}, {"p_fa": 0.1, "p_md": 0.2}, {"p_fa": 0.3, "p_md": 0.2}]})"),
                out) == kExitOk);
    const auto rows = data_rows(out / "rate_region.csv");
    // Triangle, the zero-error case collapses onto it, then two quadrilaterals.
    CHECK(rows.size() == 3 + 3 + 4 + 4);
    CHECK(rows[0].substr(rows[0].find(",0,")) == rows[3].substr(rows[3].find(",0,")));
    // Case 2 and 3 share p_md, so their R_c cuts nearly agree and their R_p cuts differ.

    std::string log;
    const std::string symmetric = R"({"schema_version": 1, "scenario": {"p": 0.5, "power_pu": 1, "power_cr": 1},
        "rate_region": {"p": 0.5, "cases": [{"p_fa": 0.3, "p_md": 0.2}]}})";
    CHECK(run("rate-region", symmetric, out, &log) == kExitInvariant);
    CHECK(log.find("outside the ideal region") != std::string::npos);
    CHECK(fs::exists(out / "rate_region.csv"));
}

TEST_CASE("admissible-grid table") {
    const auto out = scratch("grid");
    REQUIRE(run("admissible-grid", doc(R"("admissible_grid": {"resolution": 101, "p": 0.4, "gamma": 0.9})"), out) ==
            kExitOk);
    CHECK(data_rows(out / "admissible_grid.csv").size() == 10201);
    REQUIRE(run("admissible-grid",
                doc(R"("admissible_grid": {"resolution": 21, "p": [0, 0.2, 0.4, 0.6], "gamma": 0.9})"), out) ==
            kExitOk);
    const auto summary = data_rows(out / "admissible_summary.csv");
    REQUIRE(summary.size() == 4);
    double prev = -1.0;
    for (const auto& r : summary) {
        // RS_db,p,gamma,weak_fraction,...
        std::vector<std::string> f;
        std::stringstream ss(r);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        const double weak = std::stod(f[3]);
        CHECK(weak >= prev);
        prev = weak;
    }
    std::string log;
    run("admissible-grid", doc(R"("admissible_grid": {"resolution": 5, "p": 0, "gamma": 0.9})"), out, &log);
    CHECK(log.find("only p_fa = 0") != std::string::npos);
}

TEST_CASE("detector-roc table") {
    const auto out = scratch("roc");
    const std::string text = doc(R"("detector_roc": {"p": 0.2, "detectors": [
        {"kind": "energy", "l_segments": 4, "m_per_segment": 64, "power_pu": 0.004},
        {"kind": "msc", "l_segments": 4, "true_msc": 0.2},
        {"kind": "matched_filter", "signal_energy": 0}]})");
    REQUIRE(run("detector-roc", text, out) == kExitOk);
    const auto rows = data_rows(out / "detector_roc.csv");
    REQUIRE(rows.size() == 600);
    for (std::size_t i = 400; i < 600; ++i) {
        std::stringstream ss(rows[i]);
        std::string name, fa, md;
        std::getline(ss, name, ',');
        std::getline(ss, fa, ',');
        std::getline(ss, md, ',');
        CHECK(name == "matched_filter");
        CHECK(std::abs(std::stod(md) - (1.0 - std::stod(fa))) < 1e-9);
    }
    CHECK(data_rows(out / "detector_summary.csv").size() == 3);
}

TEST_CASE("simulate record and statistical exit code") {
    const auto out = scratch("sim");
    const std::string ok = R"({"schema_version": 1, "scenario": {"p": 1, "power_pu": 1, "power_cr": 1},
        "seed": 5, "simulate": {"p_fa": 0.2, "p_md": 0, "n_slots": 200000}})";
    REQUIRE(run("simulate", ok, out) == kExitOk);
    const std::string first = slurp(out / "simulate.json");
    CHECK(first.find("\"status\": \"ok\"") != std::string::npos);
    CHECK(first.find("\"empirical_eta_hat\": null") != std::string::npos);
    REQUIRE(run("simulate", ok, out, nullptr, 4) == kExitOk);
    CHECK(slurp(out / "simulate.json") == first);

    const std::string strict = R"({"schema_version": 1, "scenario": {"p": 0.5, "power_pu": 1, "power_cr": 1},
        "simulate": {"p_fa": 0.2, "p_md": 0.1, "n_slots": 10000, "z_limit": 1e-9}})";
    std::string log;
    CHECK(run("simulate", strict, out, &log) == kExitStatistical);
    CHECK(slurp(out / "simulate.json").find("statistical_failure") != std::string::npos);
}

TEST_CASE("outputs are byte-identical across reruns and worker counts") {
    const std::string text = doc(R"(
        "eta_sweep": {"p": "0:0.05:0.95", "rs_db": [0, 10, 20]},
        "admissible_grid": {"resolution": 31, "p": [0.2, 0.5], "rs_db": [0, 20], "gamma": [0.8, 0.9]},
        "detector_roc": {"detectors": [{"kind": "msc", "l_segments": 6, "true_msc": 0.3},
                                       {"kind": "mf", "signal_energy": 2}]},
        "simulate": {"p_fa": 0.1, "p_md": 0.1, "n_slots": 150000})");
    for (const auto& cmd : command_names()) {
        if (cmd == "rate-region") continue;
        const auto a = scratch("det_a");
        const auto b = scratch("det_b");
        run(cmd, text, a, nullptr, 1);
        run(cmd, text, b, nullptr, 3);
        std::size_t files = 0;
        for (const auto& entry : fs::directory_iterator(a)) {
            INFO(cmd << " " << entry.path().filename());
            CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
            ++files;
        }
        CHECK(files >= 1);
    }
}

TEST_CASE("unknown command and unwritable output") {
    std::ostringstream log;
    CHECK(run_command("plot", parse_config(doc("")), {}, log) == kExitConfig);
    RunOptions opt;
    opt.out_dir = "/proc/interweave_cannot_write_here";
    CHECK(run_command("eta-sweep", parse_config(doc(R"("eta_sweep": {"p": 0.5, "rs_db": 0})")), opt, log) ==
          kExitConfig);
    CHECK(run_command("eta-sweep", parse_config(doc("")), {}, log) == kExitConfig);
    CHECK(run_command_file("eta-sweep", "/nonexistent/config.json", {}, log) == kExitConfig);
}
