#include "interweave/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "interweave/csv.hpp"
#include "interweave/errors.hpp"
#include "interweave/kernels.hpp"

namespace interweave {

LossFactor::LossFactor(double gamma) : gamma_(gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("loss factor must lie in (0,1]");
}

WeakBoundary weak_boundary_detail(const CapacityConstants& consts, double p, double p_fa) {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("weak boundary requires 0 < p <= 1");
    if (!(p_fa >= 0.0 && p_fa <= 1.0)) throw DomainError("p_fa must lie in [0,1]");
    if (!(consts.a_c > 0.0)) throw DomainError("weak boundary requires A_c > 0");
    WeakBoundary b;
    b.raw = 1.0 - ((1.0 - p) / p) * ((consts.a_p - consts.b_p - consts.b_c) / consts.a_c) * p_fa;
    b.any_admissible = b.raw >= 0.0;
    b.clamped = std::clamp(b.raw, 0.0, 1.0);
    return b;
}

double weak_boundary(const CapacityConstants& consts, double p, double p_fa) {
    return weak_boundary_detail(consts, p, p_fa).clamped;
}

AdmissibilityVerdict verdict(const CapacityConstants& consts, double p,
                             const DetectionErrorPair& err, LossFactor gamma) {
    err.validate();
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("occupancy p must lie in [0,1]");
    AdmissibilityVerdict v;
    if (p == 0.0) {
        // eta_hat = 1 - p_fa (A_p - B_p - B_c) / C_p; the CR never sees a free slot.
        v.weakly_admissible = err.p_fa * (consts.a_p - consts.b_p - consts.b_c) <= 0.0;
    } else {
        const WeakBoundary b = weak_boundary_detail(consts, p, err.p_fa);
        v.weakly_admissible = err.p_md <= b.raw;
        if (b.any_admissible) v.boundary_pmd = b.clamped;
    }
    // C_p' >= gamma (1 - p) C_p with the common (1 - p) factor removed.
    const double pu_rate = (1.0 - err.p_fa) * consts.a_p + err.p_fa * consts.b_p;
    v.strong_with_gamma = pu_rate >= gamma.value() * consts.c_p_ideal;
    v.strongly_admissible = err.p_fa == 0.0;
    return v;
}

double full_admissible_point(const CapacityConstants& consts) {
    if (!(consts.a_p > 0.0)) throw DomainError("full admissible point requires A_p > 0");
    return consts.b_p / consts.a_p;
}

StrongBound strong_pfa_bound(const CapacityConstants& consts, LossFactor gamma) {
    StrongBound out;
    if (!(consts.a_p > consts.b_p)) {
        out.degenerate = true;
        out.bound = 1.0;
        return out;
    }
    if (gamma.value() <= full_admissible_point(consts)) {
        out.bound = 1.0;
        return out;
    }
    out.bound = std::min(1.0, consts.a_p * (1.0 - gamma.value()) / (consts.a_p - consts.b_p));
    return out;
}

double RegionGrid::weak_fraction() const {
    if (cells.empty()) return 0.0;
    const auto count = std::count_if(cells.begin(), cells.end(),
                                     [](const GridCell& c) { return c.verdict.weakly_admissible; });
    return static_cast<double>(count) / static_cast<double>(cells.size());
}

double RegionGrid::strong_gamma_fraction() const {
    if (cells.empty()) return 0.0;
    const auto count = std::count_if(cells.begin(), cells.end(),
                                     [](const GridCell& c) { return c.verdict.strong_with_gamma; });
    return static_cast<double>(count) / static_cast<double>(cells.size());
}

RegionGrid region_grid(const CapacityConstants& consts, double p, LossFactor gamma, int n,
                       int threads) {
    if (n < 2) throw DomainError("region grid needs at least 2 points per axis");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("occupancy p must lie in [0,1]");
    RegionGrid grid;
    grid.n = n;
    grid.p = p;
    grid.gamma = gamma.value();
    grid.cells.resize(static_cast<std::size_t>(n) * n);

    const double step = 1.0 / (n - 1);
    const kernels::EtaInputs inputs{consts.a_p, consts.b_p, consts.a_c,
                                    consts.b_c, consts.c_p_ideal, p};
    const bool eta_defined = p < 1.0 && consts.c_p_ideal > 0.0;

    auto fill_row = [&](int i) {
        const double p_fa = i == n - 1 ? 1.0 : i * step;
        std::vector<double> fa(static_cast<std::size_t>(n), p_fa);
        std::vector<double> md(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) md[j] = j == n - 1 ? 1.0 : j * step;
        std::vector<double> eta(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
        if (eta_defined) kernels::eta_hat_batch(inputs, fa, md, eta);
        for (int j = 0; j < n; ++j) {
            GridCell& cell = grid.cells[static_cast<std::size_t>(i) * n + j];
            cell.p_fa = p_fa;
            cell.p_md = md[j];
            cell.eta_hat = eta[j];
            cell.verdict = verdict(consts, p, {p_fa, md[j]}, gamma);
        }
    };

    const int workers = std::clamp(threads, 1, n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fill_row(i);
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (int i = w; i < n; i += workers) fill_row(i);
            });
        }
    }
    return grid;
}

void write_region_grid_csv(std::ostream& os, const RegionGrid& grid, bool header) {
    CsvWriter csv(os);
    if (header) csv.header({"p_fa", "p_md", "weak", "strong_gamma", "eta_hat"});
    for (const auto& c : grid.cells) {
        csv.row(c.p_fa, c.p_md, c.verdict.weakly_admissible, c.verdict.strong_with_gamma,
                c.eta_hat);
    }
}

} // namespace interweave
