#include "interweave/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

namespace interweave::kernels {

namespace {

// -1 means auto-detect.
std::atomic<int> g_forced{-1};

} // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
    }
    return "unknown";
}

bool isa_supported(Isa isa) {
    switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
        return __builtin_cpu_supports("avx2");
#else
        return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
        return true;
#else
        return false;
#endif
    }
    return false;
}

Isa detected_isa() {
    static const Isa best = [] {
        if (isa_supported(Isa::avx2)) return Isa::avx2;
        if (isa_supported(Isa::neon)) return Isa::neon;
        return Isa::scalar;
    }();
    return best;
}

Isa active_isa() {
    const int forced = g_forced.load(std::memory_order_relaxed);
    return forced < 0 ? detected_isa() : static_cast<Isa>(forced);
}

void force_isa(std::optional<Isa> isa) {
    if (isa && !isa_supported(*isa)) {
        throw std::invalid_argument("instruction set not supported on this CPU");
    }
    g_forced.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

double Moments::std_error() const {
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    const double m = sum / n;
    const double var = std::max(sum_sq / n - m * m, 0.0);
    return std::sqrt(var / n);
}

Moments& Moments::operator+=(const Moments& other) {
    sum += other.sum;
    sum_sq += other.sum_sq;
    count += other.count;
    return *this;
}

Moments moments(std::span<const double> values) {
    switch (active_isa()) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2: return avx2::moments(values);
#endif
#if defined(__aarch64__)
    case Isa::neon: return neon::moments(values);
#endif
    default: return scalar::moments(values);
    }
}

void eta_hat_batch(const EtaInputs& in, std::span<const double> p_fa,
                   std::span<const double> p_md, std::span<double> out) {
    if (p_fa.size() != out.size() || p_md.size() != out.size()) {
        throw std::invalid_argument("eta_hat_batch: span lengths differ");
    }
    switch (active_isa()) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2: avx2::eta_hat_batch(in, p_fa, p_md, out); return;
#endif
#if defined(__aarch64__)
    case Isa::neon: neon::eta_hat_batch(in, p_fa, p_md, out); return;
#endif
    default: scalar::eta_hat_batch(in, p_fa, p_md, out); return;
    }
}

} // namespace interweave::kernels
