#include "interweave/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "interweave/admissibility.hpp"
#include "interweave/csv.hpp"
#include "interweave/errors.hpp"
#include "interweave/specfun.hpp"

namespace interweave {

namespace {

void check_pfa(double p_fa) {
    if (!(p_fa > 0.0 && p_fa < 1.0)) throw DomainError("p_fa must lie in (0,1)");
}

} // namespace

std::string_view detector_name(DetectorKind kind) {
    switch (kind) {
    case DetectorKind::energy: return "energy";
    case DetectorKind::matched_filter: return "matched_filter";
    case DetectorKind::msc: return "msc";
    }
    return "unknown";
}

DetectorKind parse_detector(std::string_view name) {
    if (name == "energy" || name == "ed") return DetectorKind::energy;
    if (name == "matched_filter" || name == "mf") return DetectorKind::matched_filter;
    if (name == "msc") return DetectorKind::msc;
    throw ConfigError("unknown detector kind '" + std::string(name) + "'");
}

void DetectorParams::validate() const {
    switch (kind) {
    case DetectorKind::energy:
        if (l_segments < 1) throw DomainError("l_segments must be >= 1");
        if (m_per_segment < 1) throw DomainError("m_per_segment must be >= 1");
        if (!(noise_var > 0.0)) throw DomainError("noise_var must be positive");
        if (!(power_pu >= 0.0)) throw DomainError("power_pu must be nonnegative");
        if (!(ed_delta_scale > 0.0)) throw DomainError("ed_delta_scale must be positive");
        break;
    case DetectorKind::matched_filter:
        if (!(signal_energy >= 0.0)) throw DomainError("signal_energy must be nonnegative");
        if (!(noise_var > 0.0)) throw DomainError("noise_var must be positive");
        break;
    case DetectorKind::msc:
        if (l_segments < 2) throw DomainError("l_segments must be >= 2 for the coherence detector");
        if (!(true_msc >= 0.0 && true_msc < 1.0)) throw DomainError("true_msc must lie in [0,1)");
        break;
    }
}

double DetectorParams::energy_noncentrality() const {
    return ed_delta_scale * m_per_segment * l_segments * power_pu / noise_var;
}

double roc_energy(double p_fa, const DetectorParams& params) {
    check_pfa(p_fa);
    params.validate();
    // Threshold from the central chi-square(2L) tail: Q(L, lambda/2) = p_fa.
    const double threshold = 2.0 * specfun::gamma_q_inverse(params.l_segments, p_fa);
    return specfun::noncentral_chi2_cdf(threshold, 2.0 * params.l_segments,
                                        params.energy_noncentrality());
}

double roc_matched_filter(double p_fa, const DetectorParams& params) {
    check_pfa(p_fa);
    params.validate();
    // E / (sigma sqrt(E)) = sqrt(E) / sigma
    const double deflection = std::sqrt(params.signal_energy / params.noise_var);
    return specfun::clamp_probability(
        1.0 - specfun::q_function(specfun::q_inverse(p_fa) - deflection));
}

double roc_msc(double p_fa, const DetectorParams& params) {
    check_pfa(p_fa);
    params.validate();
    const double threshold = 1.0 - std::pow(p_fa, 1.0 / (params.l_segments - 1));
    return specfun::msc_cdf(threshold, params.l_segments, params.true_msc);
}

double roc(double p_fa, const DetectorParams& params) {
    switch (params.kind) {
    case DetectorKind::energy: return roc_energy(p_fa, params);
    case DetectorKind::matched_filter: return roc_matched_filter(p_fa, params);
    case DetectorKind::msc: return roc_msc(p_fa, params);
    }
    return 1.0;
}

double RocCurve::admissible_fraction() const {
    if (points.empty()) return 0.0;
    const auto count = std::count_if(points.begin(), points.end(),
                                     [](const RocPoint& pt) { return pt.admissible; });
    return static_cast<double>(count) / static_cast<double>(points.size());
}

std::vector<double> logit_grid(int n, double lo, double hi) {
    if (n < 2) throw DomainError("logit grid needs at least 2 points");
    if (!(lo > 0.0 && hi < 1.0 && lo < hi)) throw DomainError("logit grid bounds must satisfy 0 < lo < hi < 1");
    const double a = std::log(lo / (1.0 - lo));
    const double b = std::log(hi / (1.0 - hi));
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = a + (b - a) * i / (n - 1);
        grid[i] = 1.0 / (1.0 + std::exp(-t));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

RocCurve sample_roc(const DetectorParams& params, const std::vector<double>& p_fa_grid) {
    params.validate();
    RocCurve curve;
    curve.kind = params.kind;
    curve.points.reserve(p_fa_grid.size());
    for (double p_fa : p_fa_grid) curve.points.push_back({p_fa, roc(p_fa, params), false});
    return curve;
}

RocCurve admissible_arc(const RocCurve& curve, const CapacityConstants& consts, double p) {
    RocCurve out = curve;
    for (auto& pt : out.points) pt.admissible = pt.p_md <= weak_boundary_detail(consts, p, pt.p_fa).raw;
    return out;
}

void write_roc_csv(std::ostream& os, const std::vector<RocCurve>& curves, bool header) {
    CsvWriter csv(os);
    if (header) csv.header({"detector", "p_fa", "p_md", "admissible"});
    for (const auto& curve : curves) {
        for (const auto& pt : curve.points) {
            csv.row(detector_name(curve.kind), pt.p_fa, pt.p_md, pt.admissible);
        }
    }
}

} // namespace interweave
