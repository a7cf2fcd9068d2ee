#include "interweave/kernels.hpp"

#include <cstddef>

namespace interweave::kernels::scalar {

Moments moments(std::span<const double> values) {
    double sum[4] = {0.0, 0.0, 0.0, 0.0};
    double sq[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t n = values.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double v = values[i];
        sum[i & 3] += v;
        sq[i & 3] += v * v;
    }
    Moments m;
    m.sum = (sum[0] + sum[1]) + (sum[2] + sum[3]);
    m.sum_sq = (sq[0] + sq[1]) + (sq[2] + sq[3]);
    m.count = static_cast<std::int64_t>(n);
    return m;
}

void eta_hat_batch(const EtaInputs& in, std::span<const double> p_fa,
                   std::span<const double> p_md, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = eta_hat_point(in, p_fa[i], p_md[i]);
    }
}

} // namespace interweave::kernels::scalar
