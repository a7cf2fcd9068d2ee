// Compiled with -mavx2 only; entry points are reached through the runtime
// dispatcher after a CPUID check.

#include "interweave/kernels.hpp"

#include <immintrin.h>

#include <cstddef>

namespace interweave::kernels::avx2 {

Moments moments(std::span<const double> values) {
    const std::size_t n = values.size();
    const double* data = values.data();
    __m256d acc = _mm256_setzero_pd();
    __m256d acc_sq = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(data + i);
        acc = _mm256_add_pd(acc, v);
        acc_sq = _mm256_add_pd(acc_sq, _mm256_mul_pd(v, v));
    }
    alignas(32) double sum[4];
    alignas(32) double sq[4];
    _mm256_store_pd(sum, acc);
    _mm256_store_pd(sq, acc_sq);
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
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d p = _mm256_set1_pd(in.p);
    const __m256d q = _mm256_set1_pd(1.0 - in.p);
    const __m256d a_p = _mm256_set1_pd(in.a_p);
    const __m256d b_p = _mm256_set1_pd(in.b_p);
    const __m256d a_c = _mm256_set1_pd(in.a_c);
    const __m256d b_c = _mm256_set1_pd(in.b_c);
    const __m256d denom = _mm256_mul_pd(q, _mm256_set1_pd(in.c_p));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d fa = _mm256_loadu_pd(p_fa.data() + i);
        const __m256d md = _mm256_loadu_pd(p_md.data() + i);
        const __m256d pu = _mm256_mul_pd(
            q, _mm256_add_pd(_mm256_mul_pd(_mm256_sub_pd(one, fa), a_p), _mm256_mul_pd(fa, b_p)));
        const __m256d cr =
            _mm256_add_pd(_mm256_mul_pd(_mm256_mul_pd(p, _mm256_sub_pd(one, md)), a_c),
                          _mm256_mul_pd(_mm256_mul_pd(q, fa), b_c));
        _mm256_storeu_pd(out.data() + i, _mm256_div_pd(_mm256_add_pd(cr, pu), denom));
    }
    for (; i < n; ++i) out[i] = eta_hat_point(in, p_fa[i], p_md[i]);
}

} // namespace interweave::kernels::avx2
