#include "uhho/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <vector>

namespace uhho::kernels::neon {

void weighted_gram(const double* a, std::size_t na, const double* b, std::size_t nb, const double* w,
                   std::size_t nq, double* c)
{
    const std::size_t nv = nq & ~static_cast<std::size_t>(1);
    std::vector<double> aw(nq);

    for (std::size_t i = 0; i < na; ++i) {
        const double* ai = a + i * nq;
        std::size_t q = 0;
        for (; q < nv; q += 2)
            vst1q_f64(aw.data() + q, vmulq_f64(vld1q_f64(ai + q), vld1q_f64(w + q)));
        for (; q < nq; ++q)
            aw[q] = ai[q] * w[q];

        for (std::size_t j = 0; j < nb; ++j) {
            const double* bj = b + j * nq;
            float64x2_t acc = vdupq_n_f64(0.0);
            for (q = 0; q < nv; q += 2)
                acc = vfmaq_f64(acc, vld1q_f64(aw.data() + q), vld1q_f64(bj + q));
            double s = vaddvq_f64(acc);
            for (; q < nq; ++q)
                s += aw[q] * bj[q];
            c[i * nb + j] = s;
        }
    }
}

} // namespace uhho::kernels::neon

#endif
