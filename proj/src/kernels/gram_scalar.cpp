#include "uhho/kernels.hpp"

namespace uhho::kernels::scalar {

void weighted_gram(const double* a, std::size_t na, const double* b, std::size_t nb, const double* w,
                   std::size_t nq, double* c)
{
    for (std::size_t i = 0; i < na; ++i) {
        const double* ai = a + i * nq;
        for (std::size_t j = 0; j < nb; ++j) {
            const double* bj = b + j * nq;
            double s = 0.0;
            for (std::size_t q = 0; q < nq; ++q)
                s += w[q] * ai[q] * bj[q];
            c[i * nb + j] = s;
        }
    }
}

} // namespace uhho::kernels::scalar
