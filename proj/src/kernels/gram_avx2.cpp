#include "uhho/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <vector>

namespace uhho::kernels::avx2 {

namespace {

__attribute__((target("avx2,fma"))) inline double hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

} // namespace

__attribute__((target("avx2,fma"))) void weighted_gram(const double* a, std::size_t na, const double* b,
                                                       std::size_t nb, const double* w, std::size_t nq,
                                                       double* c)
{
    const std::size_t nv = nq & ~static_cast<std::size_t>(3);
    std::vector<double> aw(nq);

    for (std::size_t i = 0; i < na; ++i) {
        const double* ai = a + i * nq;
        std::size_t q = 0;
        for (; q < nv; q += 4)
            _mm256_storeu_pd(aw.data() + q, _mm256_mul_pd(_mm256_loadu_pd(ai + q), _mm256_loadu_pd(w + q)));
        for (; q < nq; ++q)
            aw[q] = ai[q] * w[q];

        std::size_t j = 0;
        // Two output columns per pass to reuse the loaded weighted row.
        for (; j + 1 < nb; j += 2) {
            const double* b0 = b + j * nq;
            const double* b1 = b0 + nq;
            __m256d acc0 = _mm256_setzero_pd();
            __m256d acc1 = _mm256_setzero_pd();
            for (q = 0; q < nv; q += 4) {
                const __m256d x = _mm256_loadu_pd(aw.data() + q);
                acc0 = _mm256_fmadd_pd(x, _mm256_loadu_pd(b0 + q), acc0);
                acc1 = _mm256_fmadd_pd(x, _mm256_loadu_pd(b1 + q), acc1);
            }
            double s0 = hsum(acc0), s1 = hsum(acc1);
            for (; q < nq; ++q) {
                s0 += aw[q] * b0[q];
                s1 += aw[q] * b1[q];
            }
            c[i * nb + j] = s0;
            c[i * nb + j + 1] = s1;
        }
        for (; j < nb; ++j) {
            const double* bj = b + j * nq;
            __m256d acc = _mm256_setzero_pd();
            for (q = 0; q < nv; q += 4)
                acc = _mm256_fmadd_pd(_mm256_loadu_pd(aw.data() + q), _mm256_loadu_pd(bj + q), acc);
            double s = hsum(acc);
            for (; q < nq; ++q)
                s += aw[q] * bj[q];
            c[i * nb + j] = s;
        }
    }
}

} // namespace uhho::kernels::avx2

#endif
