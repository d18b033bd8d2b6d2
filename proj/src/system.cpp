#include "uhho/system.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <unordered_map>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>
#include <unsupported/Eigen/SparseExtra>
#include <lapacke.h>

namespace uhho {

namespace {

using Triplet = Eigen::Triplet<double>;

void scatter(std::vector<Triplet>& trips, const LocalMap& map, const Matrix& local)
{
    const auto& blocks = map.blocks();
    const auto& starts = map.starts();
    for (std::size_t bi = 0; bi < blocks.size(); ++bi)
        for (std::size_t bj = 0; bj < blocks.size(); ++bj)
            for (std::size_t i = 0; i < blocks[bi].size; ++i)
                for (std::size_t j = 0; j < blocks[bj].size; ++j) {
                    const double v = local(static_cast<Eigen::Index>(starts[bi] + i),
                                           static_cast<Eigen::Index>(starts[bj] + j));
                    if (v != 0.0)
                        trips.emplace_back(static_cast<int>(blocks[bi].offset + i),
                                           static_cast<int>(blocks[bj].offset + j), v);
                }
}

void scatter(Vector& b, const LocalMap& map, const Vector& local)
{
    const auto& blocks = map.blocks();
    const auto& starts = map.starts();
    for (std::size_t bi = 0; bi < blocks.size(); ++bi)
        b.segment(static_cast<Eigen::Index>(blocks[bi].offset), static_cast<Eigen::Index>(blocks[bi].size)) +=
            local.segment(static_cast<Eigen::Index>(starts[bi]), static_cast<Eigen::Index>(blocks[bi].size));
}

double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b)
{
    const double nb = b.norm();
    const double nr = (a * x - b).norm();
    return nb > 0.0 ? nr / nb : nr;
}

/// b - A x accumulated in extended precision, so that refinement is not limited by the
/// cancellation in A x.
Vector extended_residual(const SparseMatrix& a, const Vector& x, const Vector& b)
{
    std::vector<long double> r(b.begin(), b.end());
    for (Eigen::Index j = 0; j < a.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(a, j); it; ++it)
            r[static_cast<std::size_t>(it.row())] -= static_cast<long double>(it.value()) * x(j);
    Vector out(b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i)
        out(i) = static_cast<double>(r[static_cast<std::size_t>(i)]);
    return out;
}

} // namespace

GlobalSystem assemble(const HhoSpace& space, const ProblemData& data)
{
    const CutMesh& cuts = space.cuts();
    const std::size_t n = space.num_dofs();
    std::vector<Triplet> trips;
    GlobalSystem sys;
    sys.b = Vector::Zero(static_cast<Eigen::Index>(n));
    const ScalarField* g_d = data.g_d ? &data.g_d : nullptr;

    for (CellId c = 0; c < space.mesh().num_cells(); ++c) {
        const CellCut& cc = cuts.cell(c);
        for (Side s : both_sides) {
            if (!cc.has(s))
                continue;
            if (space.ok(c, s)) {
                const GradientOperator op = gradient_reconstruction(space, c, s, g_d);
                scatter(trips, op.map, op.stiffness(space.kappa(s)));
                if (s == Side::one && g_d != nullptr)
                    scatter(sys.b, op.map, load_lift(space, op).values);
                for (CellId dep : cuts.pairing().inverse(s, c)) {
                    const QuadraticForm sn = stab_pairing(space, c, s, dep);
                    scatter(trips, sn.map, sn.matrix());
                }
            } else {
                LocalMap map;
                map.add(space.cell_block(c, s));
                scatter(trips, map, ko_stiffness(space, c, s));
            }
            const QuadraticForm sc = stab_circ(space, c, s);
            scatter(trips, sc.map, sc.matrix());
            const LocalVector lv = load_volume(space, c, s, data.f);
            scatter(sys.b, lv.map, lv.values);
        }
        if (cc.cut()) {
            const QuadraticForm sg = stab_gamma(space, c);
            scatter(trips, sg.map, sg.matrix());
            const LocalVector li = load_interface(space, c, data);
            scatter(sys.b, li.map, li.values);
        }
    }

    sys.A.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    sys.A.setFromTriplets(trips.begin(), trips.end());
    sys.A.makeCompressed();
    sys.mask = space.dirichlet_mask();
    sys.dirichlet = data.dirichlet ? dirichlet_values(space, data.dirichlet) : Vector::Zero(static_cast<Eigen::Index>(n));
    return sys;
}

Vector dirichlet_values(const HhoSpace& space, const SidedField& trace)
{
    Vector out = Vector::Zero(static_cast<Eigen::Index>(space.num_dofs()));
    const CartesianMesh& mesh = space.mesh();
    for (FaceId f = 0; f < mesh.num_faces(); ++f) {
        if (!space.dirichlet_face(f))
            continue;
        for (Side s : both_sides) {
            const std::size_t off = space.face_offset(f, s);
            if (off == no_id)
                continue;
            const SubFace& part = space.cuts().face(f).on(s);
            const QuadratureRule fr = segment_rule(part.a, part.b, space.quad_degree());
            const Values psi = space.face_basis(f, s).values(fr.points);
            Vector g(static_cast<Eigen::Index>(fr.size()));
            for (std::size_t q = 0; q < fr.size(); ++q)
                g(static_cast<Eigen::Index>(q)) = trace(fr.point(q), s);
            const Matrix m = kernels::gram(psi, psi, fr.weights);
            out.segment(static_cast<Eigen::Index>(off), static_cast<Eigen::Index>(space.face_size())) =
                m.ldlt().solve(kernels::moments(psi, g, fr.weights));
        }
    }
    return out;
}

Vector interpolate(const HhoSpace& space, const SidedField& u)
{
    Vector out = Vector::Zero(static_cast<Eigen::Index>(space.num_dofs()));
    const CutMesh& cuts = space.cuts();
    const int degree = space.quad_degree();
    for (CellId c = 0; c < space.mesh().num_cells(); ++c)
        for (Side s : both_sides) {
            if (!space.has(c, s))
                continue;
            QuadratureRule rule = cuts.cell_rule(c, s, degree);
            if (space.ko(c, s))
                rule.append(cuts.cell_rule(cuts.pairing().of(s, c), s, degree));
            const Values phi = space.cell_basis(c, s).values(rule.points);
            Vector g(static_cast<Eigen::Index>(rule.size()));
            for (std::size_t q = 0; q < rule.size(); ++q)
                g(static_cast<Eigen::Index>(q)) = u(rule.point(q), s);
            out.segment(static_cast<Eigen::Index>(space.cell_offset(c, s)), static_cast<Eigen::Index>(space.cell_size())) =
                mass_matrix(phi, rule.weights).ldlt().solve(kernels::moments(phi, g, rule.weights));
        }
    for (FaceId f = 0; f < space.mesh().num_faces(); ++f)
        for (Side s : both_sides) {
            const std::size_t off = space.face_offset(f, s);
            if (off == no_id)
                continue;
            const SubFace& part = cuts.face(f).on(s);
            const QuadratureRule fr = segment_rule(part.a, part.b, degree);
            const Values psi = space.face_basis(f, s).values(fr.points);
            Vector g(static_cast<Eigen::Index>(fr.size()));
            for (std::size_t q = 0; q < fr.size(); ++q)
                g(static_cast<Eigen::Index>(q)) = u(fr.point(q), s);
            out.segment(static_cast<Eigen::Index>(off), static_cast<Eigen::Index>(space.face_size())) =
                kernels::gram(psi, psi, fr.weights).ldlt().solve(kernels::moments(psi, g, fr.weights));
        }
    return out;
}

ReducedSystem eliminate_dirichlet(const GlobalSystem& sys)
{
    const auto n = static_cast<std::size_t>(sys.A.rows());
    ReducedSystem red;
    std::vector<std::size_t> reduced(n, no_id);
    for (std::size_t i = 0; i < n; ++i)
        if (!sys.mask[i]) {
            reduced[i] = red.free.size();
            red.free.push_back(i);
        }
    const auto m = static_cast<Eigen::Index>(red.free.size());
    Vector lifted = sys.b - sys.A * sys.dirichlet;
    red.b.resize(m);
    for (Eigen::Index i = 0; i < m; ++i)
        red.b(i) = lifted(static_cast<Eigen::Index>(red.free[static_cast<std::size_t>(i)]));
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(sys.A.nonZeros()));
    for (Eigen::Index j = 0; j < sys.A.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(sys.A, j); it; ++it) {
            const std::size_t ri = reduced[static_cast<std::size_t>(it.row())];
            const std::size_t rj = reduced[static_cast<std::size_t>(it.col())];
            if (ri != no_id && rj != no_id)
                trips.emplace_back(static_cast<int>(ri), static_cast<int>(rj), it.value());
        }
    red.A.resize(m, m);
    red.A.setFromTriplets(trips.begin(), trips.end());
    red.A.makeCompressed();
    return red;
}

namespace {

/// Factorized reduced operator; apply() returns A^{-1} rhs.
class Factorization {
public:
    virtual ~Factorization() = default;
    virtual Vector apply(const Vector& rhs) const = 0;
};

class DirectFactorization final : public Factorization {
public:
    explicit DirectFactorization(const SparseMatrix& a) : ldlt_(a)
    {
        if (ldlt_.info() != Eigen::Success)
            throw NumericalError("solver breakdown: factorization failed");
    }
    Vector apply(const Vector& rhs) const override { return ldlt_.solve(rhs); }

private:
    Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
};

/// Elimination of the cell unknowns group by group, then an LDL^T solve of the face Schur complement.
class CondensedFactorization final : public Factorization {
public:
    CondensedFactorization(const HhoSpace& space, const ReducedSystem& red, std::size_t& num_groups);
    Vector apply(const Vector& rhs) const override;

private:
    std::size_t ncell_ = 0;
    Eigen::Index nface_ = 0;
    std::vector<std::vector<std::size_t>> group_dofs_;
    std::vector<std::vector<std::size_t>> face_list_;   ///< reduced face indices coupled to each group
    std::vector<Eigen::LLT<Matrix>> factors_;
    std::vector<Matrix> coupling_;                      ///< A_cf restricted to face_list_
    Eigen::SimplicialLDLT<SparseMatrix> schur_;
};

CondensedFactorization::CondensedFactorization(const HhoSpace& space, const ReducedSystem& red, std::size_t& ngroups)
{
    // Cell unknowns come first in the layout and are never Dirichlet.
    ncell_ = space.num_cell_dofs();
    const std::size_t bs = space.cell_size();
    const std::vector<std::size_t> cell_group = space.condensation_groups(ngroups);
    for (std::size_t i = 0; i < ncell_; ++i)
        if (red.free[i] != i)
            throw std::logic_error("cell unknowns must precede face unknowns");

    std::vector<std::size_t> dof_group(ncell_), dof_local(ncell_);
    group_dofs_.assign(ngroups, {});
    for (CellId c = 0; c < space.mesh().num_cells(); ++c)
        for (Side s : both_sides) {
            const std::size_t off = space.cell_offset(c, s);
            if (off == no_id)
                continue;
            const std::size_t g = cell_group[c];
            for (std::size_t j = 0; j < bs; ++j) {
                dof_group[off + j] = g;
                dof_local[off + j] = group_dofs_[g].size();
                group_dofs_[g].push_back(off + j);
            }
        }

    nface_ = static_cast<Eigen::Index>(red.free.size()) - static_cast<Eigen::Index>(ncell_);
    std::vector<Matrix> acc(ngroups);
    std::vector<std::unordered_map<std::size_t, std::size_t>> face_col(ngroups);
    std::vector<std::vector<Triplet>> acf(ngroups);
    face_list_.assign(ngroups, {});
    for (std::size_t g = 0; g < ngroups; ++g)
        acc[g] = Matrix::Zero(static_cast<Eigen::Index>(group_dofs_[g].size()),
                              static_cast<Eigen::Index>(group_dofs_[g].size()));
    std::vector<Triplet> schur;
    for (Eigen::Index j = 0; j < red.A.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(red.A, j); it; ++it) {
            const auto r = static_cast<std::size_t>(it.row());
            const auto c = static_cast<std::size_t>(it.col());
            if (r < ncell_ && c < ncell_) {
                if (dof_group[r] != dof_group[c])
                    throw std::logic_error("cell coupling across condensation groups");
                acc[dof_group[r]](static_cast<Eigen::Index>(dof_local[r]), static_cast<Eigen::Index>(dof_local[c])) +=
                    it.value();
            } else if (r < ncell_) {
                const std::size_t g = dof_group[r];
                auto [pos, inserted] = face_col[g].try_emplace(c - ncell_, face_list_[g].size());
                if (inserted)
                    face_list_[g].push_back(c - ncell_);
                acf[g].emplace_back(static_cast<int>(dof_local[r]), static_cast<int>(pos->second), it.value());
            } else if (c >= ncell_) {
                schur.emplace_back(static_cast<int>(r - ncell_), static_cast<int>(c - ncell_), it.value());
            }
        }

    factors_.resize(ngroups);
    coupling_.resize(ngroups);
    for (std::size_t g = 0; g < ngroups; ++g) {
        factors_[g].compute(acc[g]);
        if (factors_[g].info() != Eigen::Success)
            throw NumericalError("singular cell block in condensation group " + std::to_string(g));
        Matrix bgf = Matrix::Zero(acc[g].rows(), static_cast<Eigen::Index>(face_list_[g].size()));
        for (const auto& t : acf[g])
            bgf(t.row(), t.col()) += t.value();
        const Matrix sg = bgf.transpose() * factors_[g].solve(bgf);
        for (std::size_t a = 0; a < face_list_[g].size(); ++a)
            for (std::size_t b = 0; b < face_list_[g].size(); ++b)
                schur.emplace_back(static_cast<int>(face_list_[g][a]), static_cast<int>(face_list_[g][b]),
                                   -sg(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
        coupling_[g] = std::move(bgf);
    }
    SparseMatrix sff(nface_, nface_);
    sff.setFromTriplets(schur.begin(), schur.end());
    if (nface_ > 0) {
        schur_.compute(sff);
        if (schur_.info() != Eigen::Success)
            throw NumericalError("solver breakdown: Schur complement factorization failed");
    }
}

Vector CondensedFactorization::apply(const Vector& rhs) const
{
    const std::size_t ngroups = factors_.size();
    std::vector<Vector> y(ngroups);
    Vector bf = rhs.tail(nface_);
    auto group_rhs = [&](std::size_t g) {
        Vector bg(static_cast<Eigen::Index>(group_dofs_[g].size()));
        for (std::size_t i = 0; i < group_dofs_[g].size(); ++i)
            bg(static_cast<Eigen::Index>(i)) = rhs(static_cast<Eigen::Index>(group_dofs_[g][i]));
        return bg;
    };
    for (std::size_t g = 0; g < ngroups; ++g) {
        const Vector gy = coupling_[g].transpose() * factors_[g].solve(group_rhs(g));
        for (std::size_t a = 0; a < face_list_[g].size(); ++a)
            bf(static_cast<Eigen::Index>(face_list_[g][a])) -= gy(static_cast<Eigen::Index>(a));
    }
    Vector x(rhs.size());
    const Vector xf = nface_ > 0 ? Vector(schur_.solve(bf)) : Vector(bf);
    x.tail(nface_) = xf;
    for (std::size_t g = 0; g < ngroups; ++g) {
        Vector r = group_rhs(g);
        for (std::size_t a = 0; a < face_list_[g].size(); ++a)
            r -= coupling_[g].col(static_cast<Eigen::Index>(a)) * xf(static_cast<Eigen::Index>(face_list_[g][a]));
        const Vector xc = factors_[g].solve(r);
        for (std::size_t i = 0; i < group_dofs_[g].size(); ++i)
            x(static_cast<Eigen::Index>(group_dofs_[g][i])) = xc(static_cast<Eigen::Index>(i));
    }
    return x;
}

} // namespace

SolveReport solve(const HhoSpace& space, const GlobalSystem& sys, SolverKind kind)
{
    constexpr double tolerance = 1e-10;
    constexpr int max_refinements = 6;
    const ReducedSystem red = eliminate_dirichlet(sys);
    const auto m = static_cast<Eigen::Index>(red.free.size());
    SolveReport report;
    report.free_dofs = red.free.size();
    Vector xr = Vector::Zero(m);

    // b = 0 has the unique solution 0 for an SPD matrix.
    if (red.b.norm() != 0.0) {
        std::unique_ptr<Factorization> fact;
        if (kind == SolverKind::direct)
            fact = std::make_unique<DirectFactorization>(red.A);
        else
            fact = std::make_unique<CondensedFactorization>(space, red, report.groups);
        xr = fact->apply(red.b);
        // Iterative refinement with the same factors and an extended-precision residual recovers
        // the digits lost to conditioning at high k.
        for (int it = 0; it < max_refinements; ++it) {
            const Vector dx = fact->apply(extended_residual(red.A, xr, red.b));
            xr += dx;
            if (dx.norm() <= 4.0 * std::numeric_limits<double>::epsilon() * xr.norm())
                break;
        }
        report.residual = relative_residual(red.A, xr, red.b);
    }

    if (red.b.norm() != 0.0) {
        // Rounding floor of the residual itself: eps * || |A| |x| || / ||b||.
        const SparseMatrix abs_a = red.A.cwiseAbs();
        report.residual_floor =
            std::numeric_limits<double>::epsilon() * (abs_a * xr.cwiseAbs()).norm() / red.b.norm();
    }
    if (!(report.residual <= std::max(tolerance, 10.0 * report.residual_floor))) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%.3e (rounding floor %.3e)", report.residual, report.residual_floor);
        throw NumericalError(std::string("solver breakdown: relative residual ") + buf);
    }
    report.x = sys.dirichlet;
    for (Eigen::Index i = 0; i < m; ++i)
        report.x(static_cast<Eigen::Index>(red.free[static_cast<std::size_t>(i)])) = xr(i);
    return report;
}

double condition_number(const Matrix& a)
{
    if (a.rows() != a.cols())
        throw std::invalid_argument("condition number of a non-square matrix");
    const auto n = static_cast<lapack_int>(a.rows());
    if (n == 0)
        return 1.0;
    Matrix work = a;
    Vector w(n);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, work.data(), n, w.data());
    if (info != 0)
        throw NumericalError("eigenvalue solver failed with info " + std::to_string(info));
    const double hi = w.cwiseAbs().maxCoeff();
    const double lo = w.cwiseAbs().minCoeff();
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

double condition_number(const SparseMatrix& a, std::size_t max_dofs)
{
    if (static_cast<std::size_t>(a.rows()) > max_dofs)
        throw ConfigError("matrix too large for dense conditioning: " + std::to_string(a.rows()) + " > " +
                          std::to_string(max_dofs));
    return condition_number(Matrix(a));
}

void export_matrix_market(const SparseMatrix& a, const std::string& path)
{
    if (!Eigen::saveMarket(a, path))
        throw ConfigError("cannot write matrix to " + path);
}

} // namespace uhho
