#include "uhho/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace uhho {

CartesianMesh::CartesianMesh(int level) : level_(level)
{
    if (level < 0)
        throw ConfigError("refinement level must be non-negative");
    if (level > max_level)
        throw ConfigError("refinement too deep: level " + std::to_string(level) + " exceeds " +
                          std::to_string(max_level));

    n_ = static_cast<std::size_t>(10) << level;
    dx_ = 1.0 / static_cast<double>(n_);

    const std::size_t n = n_;
    faces_.reserve(2 * n * (n + 1));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c <= n; ++c) {
            Face f;
            f.a = Point(c * dx_, r * dx_);
            f.b = Point(c * dx_, (r + 1) * dx_);
            f.orientation = FaceOrientation::vertical;
            f.cells = {c > 0 ? cell_at(r, c - 1) : no_id, c < n ? cell_at(r, c) : no_id};
            faces_.push_back(f);
        }
    }
    for (std::size_t r = 0; r <= n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            Face f;
            f.a = Point(c * dx_, r * dx_);
            f.b = Point((c + 1) * dx_, r * dx_);
            f.orientation = FaceOrientation::horizontal;
            f.cells = {r > 0 ? cell_at(r - 1, c) : no_id, r < n ? cell_at(r, c) : no_id};
            faces_.push_back(f);
        }
    }
}

std::array<Point, 4> CartesianMesh::corners(CellId c) const
{
    const double x0 = col(c) * dx_;
    const double y0 = row(c) * dx_;
    const double x1 = (col(c) + 1) * dx_;
    const double y1 = (row(c) + 1) * dx_;
    return {Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1)};
}

Point CartesianMesh::center(CellId c) const
{
    return Point((col(c) + 0.5) * dx_, (row(c) + 0.5) * dx_);
}

std::array<FaceId, 4> CartesianMesh::cell_faces(CellId c) const
{
    const std::size_t r = row(c), cc = col(c);
    const std::size_t nv = n_ * (n_ + 1);
    const FaceId bottom = nv + r * n_ + cc;
    const FaceId top = nv + (r + 1) * n_ + cc;
    const FaceId left = r * (n_ + 1) + cc;
    const FaceId right = r * (n_ + 1) + cc + 1;
    return {bottom, right, top, left};
}

Vector2 CartesianMesh::local_normal(int j) noexcept
{
    switch (j) {
    case 0: return Vector2(0.0, -1.0);
    case 1: return Vector2(1.0, 0.0);
    case 2: return Vector2(0.0, 1.0);
    default: return Vector2(-1.0, 0.0);
    }
}

std::vector<CellId> CartesianMesh::neighborhood(CellId c, int layers) const
{
    // On a Cartesian grid the closure-intersection layers are (2j+1)x(2j+1) blocks.
    const long n = static_cast<long>(n_);
    const long r = static_cast<long>(row(c)), cc = static_cast<long>(col(c));
    std::vector<CellId> out;
    for (long i = std::max(0L, r - layers); i <= std::min(n - 1, r + layers); ++i)
        for (long j = std::max(0L, cc - layers); j <= std::min(n - 1, cc + layers); ++j)
            out.push_back(cell_at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
    return out;
}

bool CartesianMesh::contains(CellId c, const Point& p, double tol) const
{
    const auto cs = corners(c);
    return p.x() >= cs[0].x() - tol && p.x() <= cs[2].x() + tol && p.y() >= cs[0].y() - tol &&
           p.y() <= cs[2].y() + tol;
}

} // namespace uhho
