#include "uhho/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace uhho {

Point Triangle::incenter() const noexcept
{
    const double a = (v[1] - v[2]).norm();
    const double b = (v[2] - v[0]).norm();
    const double c = (v[0] - v[1]).norm();
    const double p = a + b + c;
    if (p == 0.0)
        return v[0];
    return (a * v[0] + b * v[1] + c * v[2]) / p;
}

void QuadratureRule::append(const QuadratureRule& other)
{
    if (other.empty())
        return;
    const Eigen::Index n0 = weights.size();
    const Eigen::Index n1 = other.weights.size();
    points.conservativeResize(2, n0 + n1);
    weights.conservativeResize(n0 + n1);
    points.rightCols(n1) = other.points;
    weights.tail(n1) = other.weights;
}

QuadratureRule gauss_legendre_unit(int n)
{
    if (n < 1)
        throw std::invalid_argument("Gauss-Legendre rule needs at least one point");

    QuadratureRule rule;
    rule.points = Eigen::Matrix2Xd::Zero(2, n);
    rule.weights.resize(n);

    // Newton iteration on P_n with the Chebyshev initial guess, on [-1, 1].
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        // Recompute derivative at the converged root.
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points(0, n - 1 - i) = 0.5 * (x + 1.0);
        rule.weights(n - 1 - i) = 0.5 * w;
    }
    return rule;
}

namespace {

QuadratureRule build_reference_triangle(int degree)
{
    // Duffy map (u, v) -> (u, v (1 - u)) with Jacobian (1 - u).
    const int nu = (degree + 3) / 2;  // exact for degree + 1 in u
    const int nv = (degree + 2) / 2;  // exact for degree in v
    const QuadratureRule gu = gauss_legendre_unit(std::max(nu, 1));
    const QuadratureRule gv = gauss_legendre_unit(std::max(nv, 1));

    QuadratureRule rule;
    rule.points.resize(2, gu.size() * gv.size());
    rule.weights.resize(static_cast<Eigen::Index>(gu.size() * gv.size()));
    Eigen::Index q = 0;
    for (std::size_t i = 0; i < gu.size(); ++i) {
        const double u = gu.points(0, i);
        for (std::size_t j = 0; j < gv.size(); ++j) {
            const double v = gv.points(0, j);
            rule.points(0, q) = u;
            rule.points(1, q) = v * (1.0 - u);
            rule.weights(q) = gu.weights(i) * gv.weights(j) * (1.0 - u);
            ++q;
        }
    }
    return rule;
}

} // namespace

const QuadratureRule& reference_triangle_rule(int degree)
{
    static std::mutex mutex;
    static std::map<int, QuadratureRule> cache;
    const int d = std::max(degree, 0);
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(d);
    if (it == cache.end())
        it = cache.emplace(d, build_reference_triangle(d)).first;
    return it->second;
}

QuadratureRule triangle_rule(const Triangle& t, int degree)
{
    const QuadratureRule& ref = reference_triangle_rule(degree);
    Eigen::Matrix2d jac;
    jac.col(0) = t.v[1] - t.v[0];
    jac.col(1) = t.v[2] - t.v[0];
    const double det = jac.determinant();

    QuadratureRule rule;
    rule.points = (jac * ref.points).colwise() + t.v[0];
    rule.weights = ref.weights * det;
    return rule;
}

QuadratureRule triangles_rule(std::span<const Triangle> tris, int degree)
{
    const QuadratureRule& ref = reference_triangle_rule(degree);
    const Eigen::Index nq = static_cast<Eigen::Index>(ref.size());
    QuadratureRule rule;
    rule.points.resize(2, nq * static_cast<Eigen::Index>(tris.size()));
    rule.weights.resize(nq * static_cast<Eigen::Index>(tris.size()));
    Eigen::Index off = 0;
    for (const Triangle& t : tris) {
        Eigen::Matrix2d jac;
        jac.col(0) = t.v[1] - t.v[0];
        jac.col(1) = t.v[2] - t.v[0];
        const double det = jac.determinant();
        rule.points.middleCols(off, nq) = (jac * ref.points).colwise() + t.v[0];
        rule.weights.segment(off, nq) = ref.weights * det;
        off += nq;
    }
    return rule;
}

QuadratureRule square_rule(const Point& origin, double width, int degree)
{
    const QuadratureRule g = gauss_legendre_unit(std::max((degree + 2) / 2, 1));
    const Eigen::Index n = static_cast<Eigen::Index>(g.size());
    QuadratureRule rule;
    rule.points.resize(2, n * n);
    rule.weights.resize(n * n);
    Eigen::Index q = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            rule.points(0, q) = origin.x() + width * g.points(0, i);
            rule.points(1, q) = origin.y() + width * g.points(0, j);
            rule.weights(q) = width * width * g.weights(i) * g.weights(j);
            ++q;
        }
    return rule;
}

QuadratureRule segment_rule(const Point& a, const Point& b, int degree)
{
    const double len = (b - a).norm();
    QuadratureRule rule;
    if (len == 0.0) {
        rule.points.resize(2, 0);
        rule.weights.resize(0);
        return rule;
    }
    const QuadratureRule g = gauss_legendre_unit(std::max((degree + 2) / 2, 1));
    const Eigen::Index n = static_cast<Eigen::Index>(g.size());
    rule.points.resize(2, n);
    rule.weights.resize(n);
    for (Eigen::Index q = 0; q < n; ++q) {
        rule.points.col(q) = a + (b - a) * g.points(0, q);
        rule.weights(q) = len * g.weights(q);
    }
    return rule;
}

} // namespace uhho
