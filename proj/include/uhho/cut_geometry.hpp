#pragma once

#include <vector>

#include "uhho/level_set.hpp"
#include "uhho/mesh.hpp"
#include "uhho/quadrature.hpp"

namespace uhho {

enum class CellKind : std::uint8_t { uncut, well_cut, ill_cut };

/// Portion F^i of a background face lying in Omega_i.
struct SubFace {
    Point a = Point::Zero();
    Point b = Point::Zero();
    bool present = false;
    double length() const noexcept { return present ? (b - a).norm() : 0.0; }
};

struct FaceCut {
    bool cut = false;
    Point crossing = Point::Zero();
    std::array<SubFace, 2> part;
    const SubFace& on(Side s) const { return part[idx(s)]; }
};

struct CellCut {
    CellKind kind = CellKind::uncut;
    /// Uncut: the subdomain containing the cell. Ill-cut: the failing side iota(T).
    Side side = Side::one;
    /// Points on Gamma from one boundary crossing to the other (2^r segments).
    std::vector<Point> polyline;
    std::array<std::vector<Triangle>, 2> tris;
    std::array<double, 2> area{0.0, 0.0};
    std::array<double, 2> rho{0.0, 0.0};

    bool cut() const noexcept { return kind != CellKind::uncut; }
    bool has(Side s) const noexcept { return cut() || s == side; }
    bool ill(Side s) const noexcept { return kind == CellKind::ill_cut && side == s; }
    /// Sub-cell exists and satisfies the ball condition (uncut cells count as good).
    bool good(Side s) const noexcept { return has(s) && !ill(s); }
    double sub_area(Side s) const noexcept { return area[idx(s)]; }
};

struct CutOptions {
    int r = 8;              ///< polyline subdivision exponent (2^r segments)
    double theta = 0.3;     ///< flagging parameter of the ball criterion
    int samples = 8;        ///< m x m sample grid for detection and inradius estimates
    bool allow_boundary_contact = false;
};

/// N_i and its inverse. partner[i][S] = N_i(S) or no_id; dependents[i][T] = N_i^{-1}(T) sorted.
struct PairingMap {
    std::array<std::vector<CellId>, 2> partner;
    std::array<std::vector<std::vector<CellId>>, 2> dependents;

    CellId of(Side s, CellId c) const { return partner[idx(s)][c]; }
    const std::vector<CellId>& inverse(Side s, CellId c) const { return dependents[idx(s)][c]; }
    std::size_t size() const;
};

/// Root of phi on the segment [p0, p1] by bisection. Requires a strict sign change
/// (with the convention phi >= 0 counted as side two); throws NumericalError otherwise.
Point intersect_edge(const LevelSet& ls, const Point& p0, const Point& p1);

/// Recursive chord bisection from a to b (both on Gamma): each chord midpoint is
/// projected onto Gamma along grad(phi). Returns 2^r + 1 points.
std::vector<Point> build_polyline(const LevelSet& ls, const Point& a, const Point& b, int r);

/// Triangulates a simple counter-clockwise polygon. Tries fans from interior anchors
/// first and falls back to ear clipping. Triangles below min_area are dropped.
std::vector<Triangle> triangulate_polygon(const std::vector<Point>& poly, double min_area);
std::vector<Triangle> triangulate_polygon(const std::vector<Point>& poly, double min_area,
                                          const std::vector<Point>& extra_anchors);

/// Sub-triangulations of the two sides of a square cell cut by one arc.
/// corners: counter-clockwise from the bottom-left; crossing[j]: Gamma on local face j, if cut.
std::array<std::vector<Triangle>, 2> subtriangulate(const LevelSet& ls, const std::array<Point, 4>& corners,
                                                    const std::array<const Point*, 4>& crossing,
                                                    const std::vector<Point>& polyline, double min_area);

/// Geometry of a cut Cartesian mesh: face splits, cell classification and pairing.
class CutMesh {
public:
    CutMesh(CartesianMesh mesh, LevelSetPtr ls, CutOptions options = {});

    const CartesianMesh& mesh() const noexcept { return mesh_; }
    const LevelSet& level_set() const noexcept { return *ls_; }
    const LevelSetPtr& level_set_ptr() const noexcept { return ls_; }
    const CutOptions& options() const noexcept { return options_; }

    const CellCut& cell(CellId c) const { return cells_.at(c); }
    const FaceCut& face(FaceId f) const { return faces_.at(f); }
    const PairingMap& pairing() const noexcept { return pairing_; }

    /// Ball-criterion threshold theta * h_T / 2.
    double threshold() const noexcept;

    std::size_t count(CellKind kind) const;
    std::size_t count_ill(Side s) const;

    /// Quadrature rule on the sub-cell T^i (tensor rule for uncut cells).
    QuadratureRule cell_rule(CellId c, Side s, int degree) const;
    /// Barycenter of T^i from its sub-triangulation (cell center when uncut).
    Point sub_barycenter(CellId c, Side s) const;
    /// Interface rule on T^Gamma with unit normals grad(phi)/|grad(phi)| at each node.
    void interface_rule(CellId c, int degree, QuadratureRule& rule, Eigen::Matrix2Xd& normals) const;

private:
    void split_faces();
    void classify_cells();
    void build_pairing();
    void pair_side(Side s, const std::vector<CellId>& already);

    CartesianMesh mesh_;
    LevelSetPtr ls_;
    CutOptions options_;
    std::vector<FaceCut> faces_;
    std::vector<CellCut> cells_;
    PairingMap pairing_;
};

} // namespace uhho
