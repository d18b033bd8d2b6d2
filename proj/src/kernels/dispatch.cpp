#include <atomic>
#include <cstdlib>
#include <string>

#include "uhho/kernels.hpp"

namespace uhho::kernels {

namespace {

Isa probe() noexcept
{
    if (const char* env = std::getenv("UHHO_FORCE_SCALAR"); env != nullptr && std::string(env) == "1")
        return Isa::scalar;
#if defined(__x86_64__) || defined(_M_X64)
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return Isa::avx2;
#elif defined(__aarch64__)
    return Isa::neon;
#endif
    return Isa::scalar;
}

std::atomic<Isa>& current()
{
    static std::atomic<Isa> isa{probe()};
    return isa;
}

} // namespace

std::string_view isa_name(Isa isa) noexcept
{
    switch (isa) {
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
    default: return "scalar";
    }
}

Isa detected_isa() noexcept
{
    static const Isa isa = probe();
    return isa;
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

bool isa_supported(Isa isa) noexcept
{
    if (isa == Isa::scalar)
        return true;
#if defined(__x86_64__) || defined(_M_X64)
    if (isa == Isa::avx2) {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    }
#elif defined(__aarch64__)
    if (isa == Isa::neon)
        return true;
#endif
    return false;
}

void force_isa(Isa isa)
{
    if (!isa_supported(isa))
        throw ConfigError("instruction set '" + std::string(isa_name(isa)) + "' is not available on this host");
    current().store(isa, std::memory_order_relaxed);
}

void reset_isa() noexcept { current().store(detected_isa(), std::memory_order_relaxed); }

void weighted_gram(const double* a, std::size_t na, const double* b, std::size_t nb, const double* w,
                   std::size_t nq, double* c)
{
    switch (active_isa()) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2: avx2::weighted_gram(a, na, b, nb, w, nq, c); return;
#endif
#if defined(__aarch64__)
    case Isa::neon: neon::weighted_gram(a, na, b, nb, w, nq, c); return;
#endif
    default: scalar::weighted_gram(a, na, b, nb, w, nq, c); return;
    }
}

Matrix gram(const Values& a, const Values& b, const Vector& w)
{
    if (a.cols() != w.size() || b.cols() != w.size())
        throw std::invalid_argument("gram: value tables and weights disagree on the number of points");
    Values out(a.rows(), b.rows());
    weighted_gram(a.data(), static_cast<std::size_t>(a.rows()), b.data(), static_cast<std::size_t>(b.rows()),
                  w.data(), static_cast<std::size_t>(w.size()), out.data());
    return out;
}

Vector moments(const Values& a, const Vector& f, const Vector& w)
{
    if (a.cols() != w.size() || f.size() != w.size())
        throw std::invalid_argument("moments: value table and data disagree on the number of points");
    Vector out(a.rows());
    weighted_gram(a.data(), static_cast<std::size_t>(a.rows()), f.data(), 1, w.data(),
                  static_cast<std::size_t>(w.size()), out.data());
    return out;
}

} // namespace uhho::kernels
