#include "interweave/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cstddef>

namespace interweave::kernels::neon {

Moments moments(std::span<const double> values) {
    const std::size_t n = values.size();
    const double* data = values.data();
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    float64x2_t sq01 = vdupq_n_f64(0.0);
    float64x2_t sq23 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float64x2_t lo = vld1q_f64(data + i);
        const float64x2_t hi = vld1q_f64(data + i + 2);
        acc01 = vaddq_f64(acc01, lo);
        acc23 = vaddq_f64(acc23, hi);
        sq01 = vaddq_f64(sq01, vmulq_f64(lo, lo));
        sq23 = vaddq_f64(sq23, vmulq_f64(hi, hi));
    }
    double sum[4];
    double sq[4];
    vst1q_f64(sum, acc01);
    vst1q_f64(sum + 2, acc23);
    vst1q_f64(sq, sq01);
    vst1q_f64(sq + 2, sq23);
    for (; i < n; ++i) {
        const double v = data[i];
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
    const std::size_t n = out.size();
    const float64x2_t one = vdupq_n_f64(1.0);
    const float64x2_t p = vdupq_n_f64(in.p);
    const float64x2_t q = vdupq_n_f64(1.0 - in.p);
    const float64x2_t a_p = vdupq_n_f64(in.a_p);
    const float64x2_t b_p = vdupq_n_f64(in.b_p);
    const float64x2_t a_c = vdupq_n_f64(in.a_c);
    const float64x2_t b_c = vdupq_n_f64(in.b_c);
    const float64x2_t denom = vmulq_f64(q, vdupq_n_f64(in.c_p));
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t fa = vld1q_f64(p_fa.data() + i);
        const float64x2_t md = vld1q_f64(p_md.data() + i);
        const float64x2_t pu =
            vmulq_f64(q, vaddq_f64(vmulq_f64(vsubq_f64(one, fa), a_p), vmulq_f64(fa, b_p)));
        const float64x2_t cr = vaddq_f64(vmulq_f64(vmulq_f64(p, vsubq_f64(one, md)), a_c),
                                         vmulq_f64(vmulq_f64(q, fa), b_c));
        vst1q_f64(out.data() + i, vdivq_f64(vaddq_f64(cr, pu), denom));
    }
    for (; i < n; ++i) out[i] = eta_hat_point(in, p_fa[i], p_md[i]);
}

} // namespace interweave::kernels::neon

#endif
