#pragma once

#include <span>
#include <vector>

#include "uhho/common.hpp"

namespace uhho {

struct Triangle {
    std::array<Point, 3> v;
    double signed_area() const noexcept { return 0.5 * cross(v[1] - v[0], v[2] - v[0]); }
    Point centroid() const noexcept { return (v[0] + v[1] + v[2]) / 3.0; }
    Point incenter() const noexcept;
};

/// Points and weights of a composite rule; stored column-wise for the kernels.
struct QuadratureRule {
    Eigen::Matrix2Xd points;
    Eigen::VectorXd weights;

    std::size_t size() const noexcept { return static_cast<std::size_t>(weights.size()); }
    bool empty() const noexcept { return weights.size() == 0; }
    Point point(std::size_t q) const { return points.col(static_cast<Eigen::Index>(q)); }
    double weight(std::size_t q) const { return weights(static_cast<Eigen::Index>(q)); }
    double measure() const { return weights.sum(); }
    void append(const QuadratureRule& other);
};

/// Gauss-Legendre rule with n points on [0, 1]; exact for degree 2n - 1.
QuadratureRule gauss_legendre_unit(int n);

/// Collapsed-Gauss rule on the reference triangle (0,0), (1,0), (0,1), exact for
/// polynomials of total degree <= degree. All weights are positive.
const QuadratureRule& reference_triangle_rule(int degree);

/// Rule on a physical triangle. Negatively oriented triangles contribute negative
/// weights so that fans of signed triangles still integrate exactly.
QuadratureRule triangle_rule(const Triangle& t, int degree);

/// Composite rule over a list of triangles.
QuadratureRule triangles_rule(std::span<const Triangle> tris, int degree);

/// Tensor Gauss rule on the axis-aligned square [x0, x0 + w] x [y0, y0 + w].
QuadratureRule square_rule(const Point& origin, double width, int degree);

/// Gauss-Legendre rule on the segment [a, b]; weights sum to |b - a|.
/// Zero-length segments produce an empty rule.
QuadratureRule segment_rule(const Point& a, const Point& b, int degree);

} // namespace uhho
