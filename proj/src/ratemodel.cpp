#include "interweave/ratemodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "interweave/errors.hpp"
#include "interweave/kernels.hpp"

namespace interweave {

namespace {

void check_probability(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError(std::string(what) + " must lie in [0,1]");
}

void check_eta_domain(const CapacityConstants& consts, double p) {
    check_probability(p, "occupancy p");
    if (p >= 1.0) throw DomainError("spectral efficiency factor undefined at p = 1");
    if (!(consts.c_p_ideal > 0.0)) throw DomainError("spectral efficiency factor needs C_p > 0");
}

kernels::EtaInputs eta_inputs(const CapacityConstants& consts, double p) {
    return {consts.a_p, consts.b_p, consts.a_c, consts.b_c, consts.c_p_ideal, p};
}

RateRegionPolygon make_polygon(std::vector<RatePoint> raw, RegionKind kind) {
    RateRegionPolygon poly;
    poly.kind = kind;
    for (const auto& v : raw) {
        if (poly.vertices.empty() || !(poly.vertices.back() == v)) poly.vertices.push_back(v);
    }
    while (poly.vertices.size() > 1 && poly.vertices.back() == poly.vertices.front()) {
        poly.vertices.pop_back();
    }
    return poly;
}

double cross(const RatePoint& o, const RatePoint& a, const RatePoint& b) {
    return (a.r_c - o.r_c) * (b.r_p - o.r_p) - (a.r_p - o.r_p) * (b.r_c - o.r_c);
}

bool on_segment(const RatePoint& a, const RatePoint& b, const RatePoint& pt, double tol) {
    const double len = std::hypot(b.r_c - a.r_c, b.r_p - a.r_p);
    if (len == 0.0) return std::hypot(pt.r_c - a.r_c, pt.r_p - a.r_p) <= tol;
    if (std::abs(cross(a, b, pt)) / len > tol) return false;
    const double t = ((pt.r_c - a.r_c) * (b.r_c - a.r_c) + (pt.r_p - a.r_p) * (b.r_p - a.r_p)) /
                     (len * len);
    return t >= -tol / len && t <= 1.0 + tol / len;
}

} // namespace

void DetectionErrorPair::validate() const {
    check_probability(p_fa, "p_fa");
    check_probability(p_md, "p_md");
}

QDistribution q_distribution(double p, const DetectionErrorPair& err) {
    check_probability(p, "occupancy p");
    err.validate();
    return {p * (1.0 - err.p_md), (1.0 - p) * err.p_fa, p * err.p_md,
            (1.0 - p) * (1.0 - err.p_fa)};
}

bool RateRegionPolygon::degenerate() const { return vertices.size() < 3 || area() == 0.0; }

double RateRegionPolygon::area() const {
    if (vertices.size() < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const auto& a = vertices[i];
        const auto& b = vertices[(i + 1) % vertices.size()];
        twice += a.r_c * b.r_p - b.r_c * a.r_p;
    }
    return 0.5 * twice;
}

double RateRegionPolygon::max_r_c() const {
    double m = 0.0;
    for (const auto& v : vertices) m = std::max(m, v.r_c);
    return m;
}

double RateRegionPolygon::max_r_p() const {
    double m = 0.0;
    for (const auto& v : vertices) m = std::max(m, v.r_p);
    return m;
}

bool RateRegionPolygon::contains(const RatePoint& pt, double tol) const {
    if (vertices.empty()) return false;
    if (vertices.size() == 1) {
        return std::hypot(pt.r_c - vertices[0].r_c, pt.r_p - vertices[0].r_p) <= tol;
    }
    if (degenerate()) {
        for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
            if (on_segment(vertices[i], vertices[i + 1], pt, tol)) return true;
        }
        return on_segment(vertices.back(), vertices.front(), pt, tol);
    }
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const auto& a = vertices[i];
        const auto& b = vertices[(i + 1) % vertices.size()];
        const double len = std::hypot(b.r_c - a.r_c, b.r_p - a.r_p);
        if (cross(a, b, pt) / len < -tol) return false;
    }
    return true;
}

RateRegionPolygon ideal_rate_region(const CapacityConstants& consts, double p) {
    check_probability(p, "occupancy p");
    return make_polygon({{0.0, 0.0}, {p * consts.c_c_ideal, 0.0}, {0.0, (1.0 - p) * consts.c_p_ideal}},
                        RegionKind::ideal);
}

RateRegionPolygon nonideal_rate_region(const CapacityConstants& consts, double p,
                                       const DetectionErrorPair& err) {
    check_probability(p, "occupancy p");
    err.validate();
    const double cr_busy = err.p_fa * consts.b_c;                                // C1'
    const double cr_free = (1.0 - err.p_md) * consts.a_c;                        // C1
    const double pu = (1.0 - err.p_fa) * consts.a_p + err.p_fa * consts.b_p;     // C2
    const double flat_end = (1.0 - p) * cr_busy;
    const double r_c_cut = flat_end + p * cr_free;
    const double r_p_cut = (1.0 - p) * pu;
    return make_polygon({{0.0, 0.0}, {r_c_cut, 0.0}, {flat_end, r_p_cut}, {0.0, r_p_cut}},
                        RegionKind::non_ideal);
}

std::vector<RatePoint> uncontained_vertices(const RateRegionPolygon& inner,
                                            const RateRegionPolygon& outer, double tol) {
    std::vector<RatePoint> out;
    for (const auto& v : inner.vertices) {
        if (!outer.contains(v, tol)) out.push_back(v);
    }
    return out;
}

double eta_ideal(const CapacityConstants& consts, double p) {
    check_eta_domain(consts, p);
    // Same operation order as eta_hat at zero detection errors.
    const double q = 1.0 - p;
    return (p * consts.c_c_ideal + q * consts.c_p_ideal) / (q * consts.c_p_ideal);
}

double eta_ideal_or_infinity(const CapacityConstants& consts, double p) {
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return eta_ideal(consts, p);
}

double eta_ideal_slope(const CapacityConstants& consts, double p) {
    check_eta_domain(consts, p);
    const double q = 1.0 - p;
    return consts.c_c_ideal / (consts.c_p_ideal * q * q);
}

CapacityBreakdown nonideal_capacities(const CapacityConstants& consts, double p,
                                      const DetectionErrorPair& err) {
    check_probability(p, "occupancy p");
    err.validate();
    const double q = 1.0 - p;
    CapacityBreakdown out;
    out.c_p_prime = q * ((1.0 - err.p_fa) * consts.a_p + err.p_fa * consts.b_p);
    out.c_c_prime = (p * (1.0 - err.p_md)) * consts.a_c + (q * err.p_fa) * consts.b_c;
    out.sum = out.c_c_prime + out.c_p_prime;
    out.eta_defined = p < 1.0 && consts.c_p_ideal > 0.0;
    out.eta_hat = out.eta_defined ? out.sum / (q * consts.c_p_ideal)
                                  : std::numeric_limits<double>::infinity();
    return out;
}

double sum_capacity(const CapacityConstants& consts, double p, const DetectionErrorPair& err) {
    check_probability(p, "occupancy p");
    err.validate();
    const double interference_net = consts.a_p - consts.b_p - consts.b_c;
    return -consts.a_c * p * err.p_md - (1.0 - p) * interference_net * err.p_fa +
           p * consts.a_c + (1.0 - p) * consts.a_p;
}

OccupancyOptimum optimal_occupancy(const CapacityConstants& consts,
                                   const DetectionErrorPair& err) {
    err.validate();
    OccupancyOptimum out;
    out.m_value = (consts.a_p - consts.b_p - consts.b_c) * err.p_fa - consts.a_c * err.p_md +
                  consts.a_c - consts.a_p;
    if (out.m_value > kOccupancyTieEps) {
        out.p_star = 1.0;
    } else if (out.m_value < -kOccupancyTieEps) {
        out.p_star = 0.0;
    }
    return out;
}

double eta_hat(const CapacityConstants& consts, double p, const DetectionErrorPair& err) {
    check_eta_domain(consts, p);
    err.validate();
    return kernels::eta_hat_point(eta_inputs(consts, p), err.p_fa, err.p_md);
}

EtaHatPartials eta_hat_partials(const CapacityConstants& consts, double p,
                                const DetectionErrorPair& err) {
    check_eta_domain(consts, p);
    err.validate();
    const double q = 1.0 - p;
    const double cp = consts.c_p_ideal;
    EtaHatPartials d;
    d.d_dp = (1.0 / (q * q)) * (consts.a_c * (1.0 - err.p_md) / cp);
    d.d_dpmd = -p * consts.a_c / (q * cp);
    d.d_dpfa = -(consts.a_p - consts.b_p - consts.b_c) / cp;
    return d;
}

} // namespace interweave
