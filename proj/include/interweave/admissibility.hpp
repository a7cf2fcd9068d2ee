#pragma once

// Weak and strong admissibility of detector operating points (p_fa, p_md).

#include <iosfwd>
#include <optional>
#include <vector>

#include "interweave/channel.hpp"
#include "interweave/ratemodel.hpp"

namespace interweave {

class LossFactor {
public:
    // 0 < gamma <= 1, otherwise DomainError.
    explicit LossFactor(double gamma);
    double value() const { return gamma_; }

private:
    double gamma_;
};

struct WeakBoundary {
    double raw = 1.0;      // 1 - ((1-p)/p) ((A_p - B_p - B_c)/A_c) p_fa
    double clamped = 1.0;  // raw clamped to [0, 1]
    bool any_admissible = true;  // false when raw < 0
};

WeakBoundary weak_boundary_detail(const CapacityConstants& consts, double p, double p_fa);

// Largest weakly admissible p_md at this p_fa, clamped to [0, 1].
double weak_boundary(const CapacityConstants& consts, double p, double p_fa);

struct AdmissibilityVerdict {
    bool weakly_admissible = false;
    bool strongly_admissible = false;
    bool strong_with_gamma = false;
    std::optional<double> boundary_pmd;
};

AdmissibilityVerdict verdict(const CapacityConstants& consts, double p,
                             const DetectionErrorPair& err, LossFactor gamma);

struct StrongBound {
    double bound = 0.0;
    // A_p <= B_p: interference costs the PU nothing.
    bool degenerate = false;
};

// gamma = B_p / A_p, below which every p_fa keeps the PU within its loss budget.
double full_admissible_point(const CapacityConstants& consts);

StrongBound strong_pfa_bound(const CapacityConstants& consts, LossFactor gamma);

struct GridCell {
    double p_fa = 0.0;
    double p_md = 0.0;
    double eta_hat = 0.0;  // +infinity when p == 1
    AdmissibilityVerdict verdict;
};

// Verdict lattice over [0,1]^2, p_fa-major: cell (i, j) has
// p_fa = i/(n-1), p_md = j/(n-1).
struct RegionGrid {
    int n = 0;
    double p = 0.0;
    double gamma = 1.0;
    std::vector<GridCell> cells;

    const GridCell& at(int i, int j) const { return cells[static_cast<std::size_t>(i) * n + j]; }
    double weak_fraction() const;
    double strong_gamma_fraction() const;
};

RegionGrid region_grid(const CapacityConstants& consts, double p, LossFactor gamma, int n,
                       int threads = 1);

// CSV with columns p_fa,p_md,weak,strong_gamma,eta_hat.
void write_region_grid_csv(std::ostream& os, const RegionGrid& grid, bool header = true);

} // namespace interweave
