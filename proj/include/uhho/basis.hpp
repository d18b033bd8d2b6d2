#pragma once

#include <utility>
#include <vector>

#include "uhho/kernels.hpp"
#include "uhho/quadrature.hpp"

namespace uhho {

using kernels::Values;

/// Exponent pairs (alpha, beta) of the bivariate monomials of total degree <= degree,
/// graded lexicographic: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
const std::vector<std::pair<int, int>>& monomial_exponents(int degree);

/// Scaled monomials ((x - cx) / s)^alpha ((y - cy) / s)^beta.
///
/// The first poly_dim(m) functions span P^m for every m <= degree, which is how the
/// gradient space P^k(T^i; R^2) is taken from the same basis as the cell unknowns.
struct CellBasis {
    Point center = Point::Zero();
    double scale = 1.0;
    int degree = 0;

    CellBasis() = default;
    CellBasis(const Point& c, double s, int d) : center(c), scale(s), degree(d) {}

    std::size_t size() const noexcept { return poly_dim(degree); }

    /// values(a, q) = phi_a(points[q]).
    Values values(const Eigen::Matrix2Xd& points) const;
    /// Physical-coordinate derivatives d/dx and d/dy of each function.
    void gradients(const Eigen::Matrix2Xd& points, Values& dx, Values& dy) const;

    Vector eval(const Point& p) const;
    /// Polynomial value sum_a c_a phi_a(p).
    double eval(const Vector& coeffs, const Point& p) const;
    Vector2 eval_gradient(const Vector& coeffs, const Point& p) const;

    /// Matrix D_x, D_y with (d/dx p)(coeffs) = D_x * coeffs expressed in the same basis.
    static Matrix derivative_matrix(int degree, int component, double scale);
};

/// 1D monomials in the arc-length coordinate t = (p - mid) . tangent / half_length,
/// multiplied by a constant amplitude.
struct FaceBasis {
    Point mid = Point::Zero();
    Vector2 tangent = Vector2::UnitX();
    double half_length = 1.0;
    double amplitude = 1.0;
    int degree = 0;

    FaceBasis() = default;
    FaceBasis(const Point& a, const Point& b, int d, double amp = 1.0);

    std::size_t size() const noexcept { return static_cast<std::size_t>(degree + 1); }
    Values values(const Eigen::Matrix2Xd& points) const;
    double eval(const Vector& coeffs, const Point& p) const;
};

/// Mass matrix sum_q w_q phi_a phi_b. Throws NumericalError("singular mass matrix") when the
/// Jacobi-scaled condition number exceeds max_cond or the rule is empty.
Matrix mass_matrix(const Values& phi, const Vector& weights, double max_cond = 1e14);

/// Condition number of the Jacobi-scaled symmetric matrix (diag entries normalized to 1).
double scaled_condition(const Matrix& m);

} // namespace uhho
