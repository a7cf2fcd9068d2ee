#pragma once

// Receiver operating characteristics p_md = f(p_fa) of three spectrum
// sensing detectors and their intersection with the weak admissibility
// boundary.

#include <iosfwd>
#include <string_view>
#include <vector>

#include "interweave/channel.hpp"

namespace interweave {

enum class DetectorKind { energy, matched_filter, msc };

std::string_view detector_name(DetectorKind kind);
DetectorKind parse_detector(std::string_view name);

struct DetectorParams {
    DetectorKind kind = DetectorKind::energy;
    int l_segments = 1;       // L, number of disjoint segments
    int m_per_segment = 1;    // M = N / L
    double signal_energy = 0.0;  // E (matched filter)
    double noise_var = 1.0;      // sigma^2
    double power_pu = 0.0;       // P_p seen by the sensing receiver
    double true_msc = 0.0;       // |gamma|^2 (coherence detector)
    // Noncentrality multiplier for the energy detector; 1.0 gives
    // delta = M L P_p / sigma^2, 0.5 the alternative M L P_p / (2 sigma^2).
    double ed_delta_scale = 1.0;

    // Throws DomainError naming the first invalid field for this kind.
    void validate() const;

    double energy_noncentrality() const;
};

double roc_energy(double p_fa, const DetectorParams& params);
double roc_matched_filter(double p_fa, const DetectorParams& params);
double roc_msc(double p_fa, const DetectorParams& params);

// Dispatch on params.kind.
double roc(double p_fa, const DetectorParams& params);

struct RocPoint {
    double p_fa = 0.0;
    double p_md = 0.0;
    bool admissible = false;
};

struct RocCurve {
    DetectorKind kind = DetectorKind::energy;
    std::vector<RocPoint> points;

    double admissible_fraction() const;
};

inline constexpr int kDefaultRocPoints = 200;
inline constexpr double kDefaultPfaMin = 1e-4;
inline constexpr double kDefaultPfaMax = 1.0 - 1e-4;

// n points equally spaced in logit(p_fa) between lo and hi inclusive.
std::vector<double> logit_grid(int n, double lo = kDefaultPfaMin, double hi = kDefaultPfaMax);

RocCurve sample_roc(const DetectorParams& params, const std::vector<double>& p_fa_grid);

// Copy of `curve` with admissible set to p_md <= weak_boundary(p_fa).
RocCurve admissible_arc(const RocCurve& curve, const CapacityConstants& consts, double p);

// CSV with columns detector,p_fa,p_md,admissible.
void write_roc_csv(std::ostream& os, const std::vector<RocCurve>& curves, bool header = true);

} // namespace interweave
