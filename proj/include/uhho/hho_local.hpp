#pragma once

#include <functional>
#include <vector>

#include "uhho/basis.hpp"
#include "uhho/cut_geometry.hpp"

namespace uhho {

/// Normalization of the face basis functions.
/// plain: 1D monomials centered at the sub-face midpoint, scaled by half its length.
/// amplitude: the same monomials multiplied by sqrt(|F| / |F^i|), so that every
/// sub-face basis has the L2 size of a full-face basis regardless of the cut position.
enum class FaceScaling { plain, amplitude };

struct HhoParams {
    int k = 1;
    std::array<double, 2> kappa{1.0, 1.0};
    double eta = 20.0;
    FaceScaling face_scaling = FaceScaling::amplitude;
};

using ScalarField = std::function<double(const Point&)>;
using SidedField = std::function<double(const Point&, Side)>;

/// Right-hand side data: source per side, Dirichlet trace on the boundary per side,
/// and the interface jumps g_D = u_1 - u_2 and g_N = (kappa_1 grad u_1 - kappa_2 grad u_2) . n_Gamma.
struct ProblemData {
    SidedField f;
    SidedField dirichlet;
    ScalarField g_d;
    ScalarField g_n;
};

/// A contiguous range of global unknowns.
struct Block {
    std::size_t offset = 0;
    std::size_t size = 0;
};

/// Local numbering of a set of global blocks; repeated blocks map to the same columns.
class LocalMap {
public:
    std::size_t add(const Block& b);
    std::size_t size() const noexcept { return size_; }
    const std::vector<Block>& blocks() const noexcept { return blocks_; }
    const std::vector<std::size_t>& starts() const noexcept { return starts_; }
    Vector gather(const Vector& global) const;
    /// Global index of local column j.
    std::size_t global(std::size_t j) const;

private:
    std::vector<Block> blocks_;
    std::vector<std::size_t> starts_;
    std::size_t size_ = 0;
};

/// Sub-face of a sub-cell with its outward unit normal.
struct LocalFace {
    FaceId face;
    int local;
    Vector2 normal;
    Point a, b;
};

/// Unknowns, bases and geometry queries of the unfitted HHO space on a cut mesh.
/// Keeps a reference to the cut mesh, which must outlive it.
class HhoSpace {
public:
    HhoSpace(const CutMesh& cuts, HhoParams params);

    const CutMesh& cuts() const noexcept { return cuts_; }
    const CartesianMesh& mesh() const noexcept { return cuts_.mesh(); }
    const HhoParams& params() const noexcept { return params_; }
    int k() const noexcept { return params_.k; }
    int quad_degree() const noexcept { return 2 * params_.k + 3; }
    double h() const noexcept { return cuts_.mesh().h(); }
    double kappa(Side s) const noexcept { return params_.kappa[idx(s)]; }

    std::size_t cell_size() const noexcept { return poly_dim(params_.k + 1); }
    std::size_t face_size() const noexcept { return static_cast<std::size_t>(params_.k + 1); }
    std::size_t grad_scalar_size() const noexcept { return poly_dim(params_.k); }
    std::size_t grad_size() const noexcept { return 2 * poly_dim(params_.k); }

    /// Global offset of the cell unknowns of T^i, or no_id if T^i is empty.
    std::size_t cell_offset(CellId c, Side s) const { return cell_offset_[2 * c + idx(s)]; }
    /// Global offset of the face unknowns of F^i, or no_id if F^i is empty.
    std::size_t face_offset(FaceId f, Side s) const { return face_offset_[2 * f + idx(s)]; }
    Block cell_block(CellId c, Side s) const { return {cell_offset(c, s), cell_size()}; }
    Block face_block(FaceId f, Side s) const { return {face_offset(f, s), face_size()}; }

    std::size_t num_dofs() const noexcept { return num_dofs_; }
    std::size_t num_cell_dofs() const noexcept { return num_cell_dofs_; }
    std::size_t num_face_dofs() const noexcept { return num_dofs_ - num_cell_dofs_; }
    bool dirichlet_face(FaceId f) const { return mesh().face(f).boundary(); }
    /// Per-dof flag: true for unknowns on boundary faces.
    const std::vector<bool>& dirichlet_mask() const noexcept { return dirichlet_mask_; }

    const CellBasis& cell_basis(CellId c, Side s) const { return cell_basis_[2 * c + idx(s)]; }
    const FaceBasis& face_basis(FaceId f, Side s) const { return face_basis_[2 * f + idx(s)]; }

    /// (T, i) belongs to the sub-cells with a reconstruction from faces (not ill-cut on side i).
    bool ok(CellId c, Side s) const { return cuts_.cell(c).good(s); }
    bool ko(CellId c, Side s) const { return cuts_.cell(c).ill(s); }
    bool has(CellId c, Side s) const { return cuts_.cell(c).has(s); }

    std::vector<LocalFace> sub_faces(CellId c, Side s) const;

    /// Cell unknowns of group {T} united with all cells paired to it, as given by union-find
    /// over the pairing relation; returns a group id per cell.
    std::vector<std::size_t> condensation_groups(std::size_t& num_groups) const;

private:
    const CutMesh& cuts_;
    HhoParams params_;
    std::vector<std::size_t> cell_offset_;
    std::vector<std::size_t> face_offset_;
    std::vector<CellBasis> cell_basis_;
    std::vector<FaceBasis> face_basis_;
    std::vector<bool> dirichlet_mask_;
    std::size_t num_dofs_ = 0;
    std::size_t num_cell_dofs_ = 0;
};

/// Weighted quadratic form c * sum_q w_q (values^T v)_q^2 on local unknowns.
/// values(j, q) is the contribution of local unknown j to the residual at point q.
struct QuadraticForm {
    LocalMap map;
    Values values;
    Vector weights;
    double coef = 0.0;

    Matrix matrix() const;
    double value(const Vector& local) const;
};

/// Gradient reconstruction G_{T^i} on the extended stencil of (T, i) in P^OK.
struct GradientOperator {
    CellId cell = no_id;
    Side side = Side::one;
    LocalMap map;
    Matrix rhs;    ///< (G, q) right-hand side, grad_size x map.size()
    Matrix mass;   ///< block-diagonal vector mass matrix on T^i
    Matrix G;      ///< mass^{-1} rhs
    Vector lift;   ///< coefficients of l^k_{T^1}(g_D), side one only when data is given

    /// Local contribution kappa_i G^T M G.
    Matrix stiffness(double kappa) const;
};

/// Reconstruction for (T, i) in P^OK. When g_d is given and i = 1 the lifting of g_d is
/// computed on the same stencil.
GradientOperator gradient_reconstruction(const HhoSpace& space, CellId c, Side s, const ScalarField* g_d = nullptr);

/// Differentiation matrix of the cell basis of T^i into P^k(T^i; R^2), grad_size x cell_size.
Matrix gradient_plain(const HhoSpace& space, CellId c, Side s);

/// kappa_i (grad v, grad w)_{T^i} on the cell unknowns of an ill-cut sub-cell.
Matrix ko_stiffness(const HhoSpace& space, CellId c, Side s);

/// kappa_i h^{-1} || Pi^k_F v_T - v_F ||^2 summed over the sub-faces of T^i.
QuadraticForm stab_circ(const HhoSpace& space, CellId c, Side s);
/// kappa_1 h^{-1} || v_{T^1} - v_{T^2} ||^2 on T^Gamma.
QuadraticForm stab_gamma(const HhoSpace& space, CellId c);
/// eta kappa_i h^{-2} || v_{S^i} - v_{T^i}^+ ||^2 on T^i, for S paired to T on side i.
QuadraticForm stab_pairing(const HhoSpace& space, CellId t, Side s, CellId partner);

/// Load contributions on a local map.
struct LocalVector {
    LocalMap map;
    Vector values;
};

/// (f_i, w_{T^i})_{T^i}.
LocalVector load_volume(const HhoSpace& space, CellId c, Side s, const SidedField& f);
/// (g_N, w_{T^2})_{T^Gamma} + kappa_1 h^{-1} (g_D, w_{T^1} - w_{T^2})_{T^Gamma}.
LocalVector load_interface(const HhoSpace& space, CellId c, const ProblemData& data);
/// -kappa_1 (l^k_{T^1}(g_D), G_{T^1} w) for an operator built with g_d.
LocalVector load_lift(const HhoSpace& space, const GradientOperator& op);

} // namespace uhho
