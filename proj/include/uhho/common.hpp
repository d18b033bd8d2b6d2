#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace uhho {

using Point = Eigen::Vector2d;
using Vector2 = Eigen::Vector2d;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

using CellId = std::size_t;
using FaceId = std::size_t;

inline constexpr std::size_t no_id = static_cast<std::size_t>(-1);

/// Subdomain index. Omega_1 = {phi < 0}, Omega_2 = {phi > 0}.
enum class Side : std::uint8_t { one = 0, two = 1 };

inline constexpr std::array<Side, 2> both_sides{Side::one, Side::two};

constexpr std::size_t idx(Side s) noexcept { return static_cast<std::size_t>(s); }
constexpr Side opposite(Side s) noexcept { return s == Side::one ? Side::two : Side::one; }
constexpr int number(Side s) noexcept { return s == Side::one ? 1 : 2; }

/// Invalid user input or configuration. The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Geometric or algebraic failure during a run. The CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double cross(const Vector2& a, const Vector2& b) noexcept { return a.x() * b.y() - a.y() * b.x(); }

/// Number of bivariate monomials of total degree <= degree.
constexpr std::size_t poly_dim(int degree) noexcept
{
    return degree < 0 ? 0 : static_cast<std::size_t>((degree + 1) * (degree + 2) / 2);
}

} // namespace uhho
