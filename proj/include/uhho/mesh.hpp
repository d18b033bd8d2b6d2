#pragma once

#include <cmath>
#include <vector>

#include "uhho/common.hpp"

namespace uhho {

enum class FaceOrientation : std::uint8_t { vertical, horizontal };

struct Face {
    Point a;                  ///< first endpoint (lower / left)
    Point b;                  ///< second endpoint
    FaceOrientation orientation;
    std::array<CellId, 2> cells;   ///< [left-or-below, right-or-above]; no_id outside the domain
    bool boundary() const noexcept { return cells[0] == no_id || cells[1] == no_id; }
    double length() const noexcept { return (b - a).norm(); }
};

/// Uniform Cartesian mesh of the unit square with 10 * 2^level cells per direction.
///
/// Cells are numbered row-major (id = row * n + col). Vertical faces come first,
/// id = row * (n + 1) + col for the face at x = col * dx; horizontal faces follow,
/// id = n * (n + 1) + row * n + col for the face at y = row * dx.
/// Local faces of a cell are ordered counter-clockwise: bottom, right, top, left,
/// and local face j joins corner j to corner j + 1 (corners start bottom-left).
class CartesianMesh {
public:
    static constexpr int max_level = 10;

    explicit CartesianMesh(int level);

    int level() const noexcept { return level_; }
    std::size_t cells_per_side() const noexcept { return n_; }
    std::size_t num_cells() const noexcept { return n_ * n_; }
    std::size_t num_faces() const noexcept { return faces_.size(); }

    /// Side length of every cell.
    double cell_width() const noexcept { return dx_; }
    /// Cell diameter h_T (identical for all cells).
    double h() const noexcept { return dx_ * std::sqrt(2.0); }
    double cell_area() const noexcept { return dx_ * dx_; }

    std::size_t row(CellId c) const noexcept { return c / n_; }
    std::size_t col(CellId c) const noexcept { return c % n_; }
    CellId cell_at(std::size_t row, std::size_t col) const noexcept { return row * n_ + col; }

    std::array<Point, 4> corners(CellId c) const;
    Point center(CellId c) const;
    std::array<FaceId, 4> cell_faces(CellId c) const;
    const Face& face(FaceId f) const { return faces_.at(f); }

    /// Unit outward normal of cell c on its local face j.
    static Vector2 local_normal(int j) noexcept;

    /// Delta_j(T): cells whose closure meets the closure of Delta_{j-1}(T), with Delta_0(T) = {T}.
    /// Returned sorted by id and including c itself.
    std::vector<CellId> neighborhood(CellId c, int layers) const;

    bool contains(CellId c, const Point& p, double tol = 0.0) const;

private:
    int level_;
    std::size_t n_;
    double dx_;
    std::vector<Face> faces_;
};

} // namespace uhho
