#pragma once

// Ideal and non-ideal rate regions, spectral efficiency factors and sum
// capacity of a PU/CR pair sharing one channel by interweaving.

#include <optional>
#include <vector>

#include "interweave/channel.hpp"

namespace interweave {

struct DetectionErrorPair {
    double p_fa = 0.0;  // CR declares the channel free while the PU occupies it
    double p_md = 0.0;  // CR declares the channel occupied while it is free

    void validate() const;
};

// Probabilities of the four (true state, detected state) slot classes:
// q1 free/free, q2 busy/free, q3 free/busy, q4 busy/busy.
struct QDistribution {
    double q1 = 0.0;
    double q2 = 0.0;
    double q3 = 0.0;
    double q4 = 0.0;

    double total() const { return q1 + q2 + q3 + q4; }
};

QDistribution q_distribution(double p, const DetectionErrorPair& err);

struct RatePoint {
    double r_c = 0.0;
    double r_p = 0.0;

    friend bool operator==(const RatePoint&, const RatePoint&) = default;
};

enum class RegionKind { ideal, non_ideal };

// Convex region in the (R_c, R_p) quadrant as a counterclockwise vertex list
// starting at the origin. Repeated vertices are dropped, so degenerate
// regions have fewer than three vertices.
struct RateRegionPolygon {
    std::vector<RatePoint> vertices;
    RegionKind kind = RegionKind::ideal;

    bool degenerate() const;
    double area() const;
    double max_r_c() const;
    double max_r_p() const;
    bool contains(const RatePoint& pt, double tol = 1e-12) const;
};

RateRegionPolygon ideal_rate_region(const CapacityConstants& consts, double p);

RateRegionPolygon nonideal_rate_region(const CapacityConstants& consts, double p,
                                       const DetectionErrorPair& err);

// Vertices of `inner` that fall outside `outer` beyond `tol`.
std::vector<RatePoint> uncontained_vertices(const RateRegionPolygon& inner,
                                            const RateRegionPolygon& outer, double tol = 1e-12);

double eta_ideal(const CapacityConstants& consts, double p);

// eta_ideal, or +infinity when p == 1.
double eta_ideal_or_infinity(const CapacityConstants& consts, double p);

double eta_ideal_slope(const CapacityConstants& consts, double p);

struct CapacityBreakdown {
    double c_p_prime = 0.0;
    double c_c_prime = 0.0;
    double sum = 0.0;
    // Infinite, with eta_defined false, when p == 1 or C_p == 0.
    double eta_hat = 0.0;
    bool eta_defined = false;
};

CapacityBreakdown nonideal_capacities(const CapacityConstants& consts, double p,
                                      const DetectionErrorPair& err);

double sum_capacity(const CapacityConstants& consts, double p, const DetectionErrorPair& err);

struct OccupancyOptimum {
    std::optional<double> p_star;  // empty: every p in [0,1] is optimal
    double m_value = 0.0;
};

inline constexpr double kOccupancyTieEps = 1e-12;

OccupancyOptimum optimal_occupancy(const CapacityConstants& consts,
                                   const DetectionErrorPair& err);

double eta_hat(const CapacityConstants& consts, double p, const DetectionErrorPair& err);

struct EtaHatPartials {
    double d_dp = 0.0;
    double d_dpmd = 0.0;
    double d_dpfa = 0.0;
};

EtaHatPartials eta_hat_partials(const CapacityConstants& consts, double p,
                                const DetectionErrorPair& err);

} // namespace interweave
