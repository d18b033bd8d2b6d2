#pragma once

#include <cstddef>
#include <string_view>

#include "uhho/common.hpp"

/// Quadrature accumulation kernels with a scalar reference path and SIMD variants
/// chosen at runtime from the host CPU features.
namespace uhho::kernels {

/// Row-major table: one row per basis function, one column per quadrature point.
using Values = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

/// Best instruction set supported by this build and this CPU.
Isa detected_isa() noexcept;

/// Instruction set currently used by the dispatching entry points.
Isa active_isa() noexcept;

/// Override the dispatch target (tests, benchmarks). Throws ConfigError if unsupported.
void force_isa(Isa isa);

/// Restore the detected instruction set.
void reset_isa() noexcept;

bool isa_supported(Isa isa) noexcept;

/// c[i * nb + j] = sum_q w[q] * a[i * nq + q] * b[j * nq + q]  (overwrites c).
using GramFn = void (*)(const double* a, std::size_t na, const double* b, std::size_t nb, const double* w,
                        std::size_t nq, double* c);

namespace scalar {
void weighted_gram(const double* a, std::size_t na, const double* b, std::size_t nb, const double* w,
                   std::size_t nq, double* c);
}

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void weighted_gram(const double* a, std::size_t na, const double* b, std::size_t nb, const double* w,
                   std::size_t nq, double* c);
}
#endif

#if defined(__aarch64__)
namespace neon {
void weighted_gram(const double* a, std::size_t na, const double* b, std::size_t nb, const double* w,
                   std::size_t nq, double* c);
}
#endif

/// Dispatching entry point.
void weighted_gram(const double* a, std::size_t na, const double* b, std::size_t nb, const double* w,
                   std::size_t nq, double* c);

/// Gram matrix G(i, j) = sum_q w_q a(i, q) b(j, q).
Matrix gram(const Values& a, const Values& b, const Vector& w);

/// Weighted moments m(i) = sum_q w_q a(i, q) f_q.
Vector moments(const Values& a, const Vector& f, const Vector& w);

} // namespace uhho::kernels
