#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference
// implementation and SIMD variants (AVX2 on x86-64, NEON on AArch64) that
// produce bit-identical results: reductions use four fixed accumulation
// lanes combined as (l0 + l1) + (l2 + l3) on every path, and no path fuses
// multiply-add.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace interweave::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

// Best instruction set supported by the running CPU.
Isa detected_isa();

// Instruction set used by the dispatching entry points.
Isa active_isa();

// Pin dispatch to `isa` (must be supported), or restore auto-detection.
void force_isa(std::optional<Isa> isa);

bool isa_supported(Isa isa);

struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t count = 0;

    double mean() const { return count > 0 ? sum / static_cast<double>(count) : 0.0; }
    // Standard error of the mean (population variance / n).
    double std_error() const;
    Moments& operator+=(const Moments& other);
};

// Inputs of the non-ideal spectral efficiency factor at fixed occupancy.
struct EtaInputs {
    double a_p;
    double b_p;
    double a_c;
    double b_c;
    double c_p;
    double p;
};

// Sum and sum of squares of `values`.
Moments moments(std::span<const double> values);

// out[i] = eta_hat(p_fa[i], p_md[i]). Spans must have equal length.
void eta_hat_batch(const EtaInputs& in, std::span<const double> p_fa,
                   std::span<const double> p_md, std::span<double> out);

namespace scalar {
Moments moments(std::span<const double> values);
void eta_hat_batch(const EtaInputs& in, std::span<const double> p_fa,
                   std::span<const double> p_md, std::span<double> out);
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
Moments moments(std::span<const double> values);
void eta_hat_batch(const EtaInputs& in, std::span<const double> p_fa,
                   std::span<const double> p_md, std::span<double> out);
} // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
Moments moments(std::span<const double> values);
void eta_hat_batch(const EtaInputs& in, std::span<const double> p_fa,
                   std::span<const double> p_md, std::span<double> out);
} // namespace neon
#endif

// Scalar form of a single eta_hat evaluation, shared by every path.
inline double eta_hat_point(const EtaInputs& in, double p_fa, double p_md) {
    const double q = 1.0 - in.p;
    const double c_p_prime = q * ((1.0 - p_fa) * in.a_p + p_fa * in.b_p);
    const double c_c_prime = (in.p * (1.0 - p_md)) * in.a_c + (q * p_fa) * in.b_c;
    return (c_c_prime + c_p_prime) / (q * in.c_p);
}

} // namespace interweave::kernels
