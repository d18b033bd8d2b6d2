#include "uhho/basis.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <mutex>

#include <Eigen/Eigenvalues>

namespace uhho {

namespace {

constexpr int max_basis_degree = 16;

std::size_t monomial_index(int alpha, int beta)
{
    const int d = alpha + beta;
    return static_cast<std::size_t>(d * (d + 1) / 2 + beta);
}

} // namespace

const std::vector<std::pair<int, int>>& monomial_exponents(int degree)
{
    if (degree < 0 || degree > max_basis_degree)
        throw ConfigError("polynomial degree out of range: " + std::to_string(degree));
    static std::array<std::vector<std::pair<int, int>>, max_basis_degree + 1> cache;
    static std::once_flag once;
    std::call_once(once, [] {
        for (int m = 0; m <= max_basis_degree; ++m)
            for (int d = 0; d <= m; ++d)
                for (int beta = 0; beta <= d; ++beta)
                    cache[static_cast<std::size_t>(m)].emplace_back(d - beta, beta);
    });
    return cache[static_cast<std::size_t>(degree)];
}

Values CellBasis::values(const Eigen::Matrix2Xd& points) const
{
    const auto n = static_cast<Eigen::Index>(size());
    const Eigen::Index nq = points.cols();
    Values out(n, nq);
    if (n == 0 || nq == 0)
        return out;
    const double inv = 1.0 / scale;
    // Powers per point, then rows in graded-lex order.
    Values px(degree + 1, nq), py(degree + 1, nq);
    px.row(0).setOnes();
    py.row(0).setOnes();
    for (Eigen::Index q = 0; q < nq; ++q) {
        const double x = (points(0, q) - center.x()) * inv;
        const double y = (points(1, q) - center.y()) * inv;
        for (int e = 1; e <= degree; ++e) {
            px(e, q) = px(e - 1, q) * x;
            py(e, q) = py(e - 1, q) * y;
        }
    }
    const auto& exps = monomial_exponents(degree);
    for (Eigen::Index a = 0; a < n; ++a) {
        const auto [alpha, beta] = exps[static_cast<std::size_t>(a)];
        out.row(a) = px.row(alpha).cwiseProduct(py.row(beta));
    }
    return out;
}

void CellBasis::gradients(const Eigen::Matrix2Xd& points, Values& dx, Values& dy) const
{
    const auto n = static_cast<Eigen::Index>(size());
    const Eigen::Index nq = points.cols();
    dx.setZero(n, nq);
    dy.setZero(n, nq);
    if (nq == 0)
        return;
    const Values low = CellBasis(center, scale, degree > 0 ? degree - 1 : 0).values(points);
    const double inv = 1.0 / scale;
    const auto& exps = monomial_exponents(degree);
    for (Eigen::Index a = 0; a < n; ++a) {
        const auto [alpha, beta] = exps[static_cast<std::size_t>(a)];
        if (alpha > 0)
            dx.row(a) = (alpha * inv) * low.row(static_cast<Eigen::Index>(monomial_index(alpha - 1, beta)));
        if (beta > 0)
            dy.row(a) = (beta * inv) * low.row(static_cast<Eigen::Index>(monomial_index(alpha, beta - 1)));
    }
}

Vector CellBasis::eval(const Point& p) const
{
    Eigen::Matrix2Xd pts(2, 1);
    pts.col(0) = p;
    return values(pts).col(0);
}

double CellBasis::eval(const Vector& coeffs, const Point& p) const { return coeffs.dot(eval(p)); }

Vector2 CellBasis::eval_gradient(const Vector& coeffs, const Point& p) const
{
    Eigen::Matrix2Xd pts(2, 1);
    pts.col(0) = p;
    Values dx, dy;
    gradients(pts, dx, dy);
    return {coeffs.dot(dx.col(0)), coeffs.dot(dy.col(0))};
}

Matrix CellBasis::derivative_matrix(int degree, int component, double scale)
{
    const auto& exps = monomial_exponents(degree);
    const auto n = static_cast<Eigen::Index>(exps.size());
    Matrix d = Matrix::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        const auto [alpha, beta] = exps[static_cast<std::size_t>(a)];
        if (component == 0 && alpha > 0)
            d(static_cast<Eigen::Index>(monomial_index(alpha - 1, beta)), a) = alpha / scale;
        if (component == 1 && beta > 0)
            d(static_cast<Eigen::Index>(monomial_index(alpha, beta - 1)), a) = beta / scale;
    }
    return d;
}

FaceBasis::FaceBasis(const Point& a, const Point& b, int d, double amp)
    : mid(0.5 * (a + b)), half_length(0.5 * (b - a).norm()), amplitude(amp), degree(d)
{
    if (!(half_length > 0.0))
        throw NumericalError("face basis on a zero-length segment");
    tangent = (b - a) / (2.0 * half_length);
}

Values FaceBasis::values(const Eigen::Matrix2Xd& points) const
{
    const Eigen::Index nq = points.cols();
    Values out(degree + 1, nq);
    if (nq == 0)
        return out;
    out.row(0).setConstant(amplitude);
    for (Eigen::Index q = 0; q < nq; ++q) {
        const double t = (points.col(q) - mid).dot(tangent) / half_length;
        for (int e = 1; e <= degree; ++e)
            out(e, q) = out(e - 1, q) * t;
    }
    return out;
}

double FaceBasis::eval(const Vector& coeffs, const Point& p) const
{
    Eigen::Matrix2Xd pts(2, 1);
    pts.col(0) = p;
    return coeffs.dot(values(pts).col(0));
}

double scaled_condition(const Matrix& m)
{
    const Vector d = m.diagonal().cwiseMax(0.0).cwiseSqrt();
    if ((d.array() <= 0.0).any())
        return std::numeric_limits<double>::infinity();
    const Vector inv = d.cwiseInverse();
    const Matrix s = inv.asDiagonal() * m * inv.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

Matrix mass_matrix(const Values& phi, const Vector& weights, double max_cond)
{
    if (weights.size() == 0)
        throw NumericalError("singular mass matrix (empty region)");
    Matrix m = kernels::gram(phi, phi, weights);
    if (scaled_condition(m) > max_cond)
        throw NumericalError("singular mass matrix");
    return m;
}

} // namespace uhho
