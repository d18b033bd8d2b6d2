#include "uhho/hho_local.hpp"

#include <cmath>
#include <numeric>
#include <tuple>

#include <Eigen/Cholesky>

namespace uhho {

namespace {

struct Contribution {
    std::size_t row;
    std::size_t col;
    Matrix m;
};

Matrix collect(std::size_t rows, std::size_t cols, const std::vector<Contribution>& parts)
{
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (const auto& p : parts)
        out.block(static_cast<Eigen::Index>(p.row), static_cast<Eigen::Index>(p.col), p.m.rows(), p.m.cols()) += p.m;
    return out;
}

} // namespace

std::size_t LocalMap::add(const Block& b)
{
    for (std::size_t j = 0; j < blocks_.size(); ++j)
        if (blocks_[j].offset == b.offset)
            return starts_[j];
    if (b.offset == no_id)
        throw std::logic_error("local map: block without global unknowns");
    blocks_.push_back(b);
    starts_.push_back(size_);
    size_ += b.size;
    return starts_.back();
}

Vector LocalMap::gather(const Vector& global) const
{
    Vector out(static_cast<Eigen::Index>(size_));
    for (std::size_t j = 0; j < blocks_.size(); ++j)
        out.segment(static_cast<Eigen::Index>(starts_[j]), static_cast<Eigen::Index>(blocks_[j].size)) =
            global.segment(static_cast<Eigen::Index>(blocks_[j].offset), static_cast<Eigen::Index>(blocks_[j].size));
    return out;
}

std::size_t LocalMap::global(std::size_t j) const
{
    for (std::size_t b = 0; b < blocks_.size(); ++b)
        if (j >= starts_[b] && j < starts_[b] + blocks_[b].size)
            return blocks_[b].offset + (j - starts_[b]);
    throw std::out_of_range("local map column out of range");
}

HhoSpace::HhoSpace(const CutMesh& cuts, HhoParams params) : cuts_(cuts), params_(params)
{
    if (params_.k < 0 || params_.k > 6)
        throw ConfigError("polynomial degree k must lie in [0, 6]");
    if (!(params_.kappa[0] > 0.0) || !(params_.kappa[1] > 0.0))
        throw ConfigError("diffusion coefficients must be positive");
    if (params_.kappa[0] > params_.kappa[1])
        throw ConfigError("subdomains must be numbered so that kappa_1 <= kappa_2");
    if (!(params_.eta > 0.0))
        throw ConfigError("eta must be positive");

    const CartesianMesh& m = cuts_.mesh();
    const std::size_t nc = m.num_cells();
    const std::size_t nf = m.num_faces();
    const double scale = m.h() / 2.0;

    cell_offset_.assign(2 * nc, no_id);
    cell_basis_.assign(2 * nc, CellBasis{});
    std::size_t next = 0;
    for (CellId c = 0; c < nc; ++c) {
        for (Side s : both_sides) {
            if (!has(c, s))
                continue;
            cell_offset_[2 * c + idx(s)] = next;
            next += cell_size();
        }
    }
    num_cell_dofs_ = next;

    for (CellId c = 0; c < nc; ++c) {
        for (Side s : both_sides) {
            if (!has(c, s))
                continue;
            Point center = cuts_.sub_barycenter(c, s);
            if (ko(c, s)) {
                // Ill-cut side: center on the union with the partner's sub-cell.
                const CellId t = cuts_.pairing().of(s, c);
                const double as = cuts_.cell(c).sub_area(s);
                const double at = cuts_.cell(t).sub_area(s);
                center = (as * center + at * cuts_.sub_barycenter(t, s)) / (as + at);
            }
            cell_basis_[2 * c + idx(s)] = CellBasis(center, scale, params_.k + 1);
        }
    }

    face_offset_.assign(2 * nf, no_id);
    face_basis_.assign(2 * nf, FaceBasis{});
    for (FaceId f = 0; f < nf; ++f) {
        const FaceCut& fc = cuts_.face(f);
        for (Side s : both_sides) {
            const SubFace& part = fc.on(s);
            if (!part.present)
                continue;
            face_offset_[2 * f + idx(s)] = next;
            next += face_size();
            const double amp = params_.face_scaling == FaceScaling::amplitude
                                   ? std::sqrt(m.face(f).length() / part.length())
                                   : 1.0;
            face_basis_[2 * f + idx(s)] = FaceBasis(part.a, part.b, params_.k, amp);
        }
    }
    num_dofs_ = next;

    dirichlet_mask_.assign(num_dofs_, false);
    for (FaceId f = 0; f < nf; ++f) {
        if (!dirichlet_face(f))
            continue;
        for (Side s : both_sides)
            if (const std::size_t off = face_offset(f, s); off != no_id)
                for (std::size_t j = 0; j < face_size(); ++j)
                    dirichlet_mask_[off + j] = true;
    }
}

std::vector<LocalFace> HhoSpace::sub_faces(CellId c, Side s) const
{
    std::vector<LocalFace> out;
    const auto fids = mesh().cell_faces(c);
    for (int j = 0; j < 4; ++j) {
        const SubFace& part = cuts_.face(fids[static_cast<std::size_t>(j)]).on(s);
        if (!part.present)
            continue;
        out.push_back(LocalFace{fids[static_cast<std::size_t>(j)], j, CartesianMesh::local_normal(j), part.a, part.b});
    }
    return out;
}

std::vector<std::size_t> HhoSpace::condensation_groups(std::size_t& num_groups) const
{
    const std::size_t n = mesh().num_cells();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (Side s : both_sides)
        for (CellId c = 0; c < n; ++c)
            if (const CellId t = cuts_.pairing().of(s, c); t != no_id) {
                const std::size_t a = find(c), b = find(t);
                if (a != b)
                    parent[std::max(a, b)] = std::min(a, b);
            }
    std::vector<std::size_t> group(n, no_id), label(n, no_id);
    num_groups = 0;
    for (CellId c = 0; c < n; ++c) {
        const std::size_t r = find(c);
        if (label[r] == no_id)
            label[r] = num_groups++;
        group[c] = label[r];
    }
    return group;
}

Matrix QuadraticForm::matrix() const
{
    if (weights.size() == 0)
        return Matrix::Zero(static_cast<Eigen::Index>(map.size()), static_cast<Eigen::Index>(map.size()));
    return coef * kernels::gram(values, values, weights);
}

double QuadraticForm::value(const Vector& local) const
{
    if (weights.size() == 0)
        return 0.0;
    const Vector r = values.transpose() * local;
    return coef * r.cwiseProduct(r).dot(weights);
}

Matrix GradientOperator::stiffness(double kappa) const
{
    const Matrix a = kappa * (rhs.transpose() * G);
    return 0.5 * (a + a.transpose());
}

GradientOperator gradient_reconstruction(const HhoSpace& space, CellId t, Side s, const ScalarField* g_d)
{
    if (!space.ok(t, s))
        throw std::logic_error("gradient reconstruction requested for an ill-cut or empty sub-cell");
    const CutMesh& cuts = space.cuts();
    const int deg = space.quad_degree();
    const auto nk = static_cast<Eigen::Index>(space.grad_scalar_size());
    const CellBasis& bt = space.cell_basis(t, s);
    const CellBasis bk(bt.center, bt.scale, space.k());

    GradientOperator op;
    op.cell = t;
    op.side = s;
    std::vector<Contribution> parts;
    Vector lift_rhs = Vector::Zero(2 * nk);
    const bool with_lift = g_d != nullptr && s == Side::one;

    // (grad u_T, q)_{T^i}
    const QuadratureRule rule = cuts.cell_rule(t, s, deg);
    const Values phik = bk.values(rule.points);
    Values dx, dy;
    bt.gradients(rule.points, dx, dy);
    const Matrix mk = mass_matrix(phik, rule.weights);
    const std::size_t ct = op.map.add(space.cell_block(t, s));
    parts.push_back({0, ct, kernels::gram(phik, dx, rule.weights)});
    parts.push_back({static_cast<std::size_t>(nk), ct, kernels::gram(phik, dy, rule.weights)});

    // (u_F - u_X, q . n_X) on the sub-faces of X^i, with q extended when X != T.
    auto add_faces = [&](CellId x) {
        const CellBasis& bx = space.cell_basis(x, s);
        const std::size_t cx = op.map.add(space.cell_block(x, s));
        for (const LocalFace& lf : space.sub_faces(x, s)) {
            const QuadratureRule fr = segment_rule(lf.a, lf.b, deg);
            if (fr.empty())
                continue;
            const Values qv = bk.values(fr.points);
            const Matrix bf = kernels::gram(qv, space.face_basis(lf.face, s).values(fr.points), fr.weights);
            const Matrix bc = kernels::gram(qv, bx.values(fr.points), fr.weights);
            const std::size_t cf = op.map.add(space.face_block(lf.face, s));
            for (int c = 0; c < 2; ++c) {
                const auto row = static_cast<std::size_t>(c * nk);
                parts.push_back({row, cf, lf.normal[c] * bf});
                parts.push_back({row, cx, -lf.normal[c] * bc});
            }
        }
    };

    // -(u_{X^1} - u_{X^2}, q . n_Gamma)_{X^Gamma} and the lifting moments, side one only.
    auto add_interface = [&](CellId x) {
        if (s != Side::one || !cuts.cell(x).cut())
            return;
        QuadratureRule ir;
        Eigen::Matrix2Xd normals;
        cuts.interface_rule(x, deg, ir, normals);
        if (ir.empty())
            return;
        const Values qv = bk.values(ir.points);
        const Values v1 = space.cell_basis(x, Side::one).values(ir.points);
        const Values v2 = space.cell_basis(x, Side::two).values(ir.points);
        const std::size_t c1 = op.map.add(space.cell_block(x, Side::one));
        const std::size_t c2 = op.map.add(space.cell_block(x, Side::two));
        Vector gvals;
        if (with_lift) {
            gvals.resize(static_cast<Eigen::Index>(ir.size()));
            for (std::size_t q = 0; q < ir.size(); ++q)
                gvals(static_cast<Eigen::Index>(q)) = (*g_d)(ir.point(q));
        }
        for (int c = 0; c < 2; ++c) {
            const Vector wc = ir.weights.cwiseProduct(normals.row(c).transpose());
            const auto row = static_cast<std::size_t>(c * nk);
            parts.push_back({row, c1, -kernels::gram(qv, v1, wc)});
            parts.push_back({row, c2, kernels::gram(qv, v2, wc)});
            if (with_lift)
                lift_rhs.segment(c * nk, nk) += kernels::moments(qv, gvals, wc);
        }
    };

    add_faces(t);
    add_interface(t);
    for (CellId dep : cuts.pairing().inverse(s, t)) {
        add_faces(dep);
        add_interface(dep);
    }

    op.rhs = collect(2 * static_cast<std::size_t>(nk), op.map.size(), parts);
    op.mass = Matrix::Zero(2 * nk, 2 * nk);
    op.mass.topLeftCorner(nk, nk) = mk;
    op.mass.bottomRightCorner(nk, nk) = mk;
    const Eigen::LDLT<Matrix> ldlt(mk);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("singular mass matrix");
    op.G.resize(op.rhs.rows(), op.rhs.cols());
    op.G.topRows(nk) = ldlt.solve(op.rhs.topRows(nk));
    op.G.bottomRows(nk) = ldlt.solve(op.rhs.bottomRows(nk));
    if (with_lift) {
        op.lift.resize(2 * nk);
        op.lift.head(nk) = ldlt.solve(lift_rhs.head(nk));
        op.lift.tail(nk) = ldlt.solve(lift_rhs.tail(nk));
    }
    return op;
}

Matrix gradient_plain(const HhoSpace& space, CellId c, Side s)
{
    const CellBasis& b = space.cell_basis(c, s);
    const auto nk = static_cast<Eigen::Index>(space.grad_scalar_size());
    Matrix g(2 * nk, static_cast<Eigen::Index>(space.cell_size()));
    g.topRows(nk) = CellBasis::derivative_matrix(b.degree, 0, b.scale).topRows(nk);
    g.bottomRows(nk) = CellBasis::derivative_matrix(b.degree, 1, b.scale).topRows(nk);
    return g;
}

Matrix ko_stiffness(const HhoSpace& space, CellId c, Side s)
{
    const auto n = static_cast<Eigen::Index>(space.cell_size());
    const QuadratureRule rule = space.cuts().cell_rule(c, s, space.quad_degree());
    if (rule.empty())
        return Matrix::Zero(n, n);
    Values dx, dy;
    space.cell_basis(c, s).gradients(rule.points, dx, dy);
    return space.kappa(s) * (kernels::gram(dx, dx, rule.weights) + kernels::gram(dy, dy, rule.weights));
}

QuadraticForm stab_circ(const HhoSpace& space, CellId c, Side s)
{
    QuadraticForm form;
    form.coef = space.kappa(s) / space.h();
    const int deg = space.quad_degree();
    const CellBasis& bc = space.cell_basis(c, s);
    const std::size_t cc = form.map.add(space.cell_block(c, s));

    std::vector<std::tuple<std::size_t, Values, Values>> chunks;   // face col, cell rows, face rows
    std::vector<Vector> weights;
    for (const LocalFace& lf : space.sub_faces(c, s)) {
        const QuadratureRule fr = segment_rule(lf.a, lf.b, deg);
        if (fr.empty())
            continue;
        const Values psi = space.face_basis(lf.face, s).values(fr.points);
        const Values phi = bc.values(fr.points);
        const Matrix mf = kernels::gram(psi, psi, fr.weights);
        const Matrix bf = kernels::gram(psi, phi, fr.weights);
        const Matrix proj = mf.ldlt().solve(bf);   // Pi^k_F in face coefficients
        const std::size_t cf = form.map.add(space.face_block(lf.face, s));
        chunks.emplace_back(cf, Values(proj.transpose() * psi), Values(-psi));
        weights.push_back(fr.weights);
    }
    Eigen::Index total = 0;
    for (const auto& w : weights)
        total += w.size();
    form.values = Values::Zero(static_cast<Eigen::Index>(form.map.size()), total);
    form.weights.resize(total);
    Eigen::Index col = 0;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        const auto& [cf, cell_rows, face_rows] = chunks[i];
        const Eigen::Index nq = weights[i].size();
        form.values.block(static_cast<Eigen::Index>(cc), col, cell_rows.rows(), nq) += cell_rows;
        form.values.block(static_cast<Eigen::Index>(cf), col, face_rows.rows(), nq) += face_rows;
        form.weights.segment(col, nq) = weights[i];
        col += nq;
    }
    return form;
}

QuadraticForm stab_gamma(const HhoSpace& space, CellId c)
{
    QuadraticForm form;
    form.coef = space.kappa(Side::one) / space.h();
    QuadratureRule ir;
    Eigen::Matrix2Xd normals;
    space.cuts().interface_rule(c, space.quad_degree(), ir, normals);
    const std::size_t c1 = form.map.add(space.cell_block(c, Side::one));
    const std::size_t c2 = form.map.add(space.cell_block(c, Side::two));
    const auto n = static_cast<Eigen::Index>(space.cell_size());
    form.values = Values::Zero(static_cast<Eigen::Index>(form.map.size()), static_cast<Eigen::Index>(ir.size()));
    form.values.middleRows(static_cast<Eigen::Index>(c1), n) = space.cell_basis(c, Side::one).values(ir.points);
    form.values.middleRows(static_cast<Eigen::Index>(c2), n) = -space.cell_basis(c, Side::two).values(ir.points);
    form.weights = ir.weights;
    return form;
}

QuadraticForm stab_pairing(const HhoSpace& space, CellId t, Side s, CellId partner)
{
    QuadraticForm form;
    const double h = space.h();
    form.coef = space.params().eta * space.kappa(s) / (h * h);
    const QuadratureRule rule = space.cuts().cell_rule(t, s, space.quad_degree());
    const std::size_t cs = form.map.add(space.cell_block(partner, s));
    const std::size_t ct = form.map.add(space.cell_block(t, s));
    const auto n = static_cast<Eigen::Index>(space.cell_size());
    form.values = Values::Zero(static_cast<Eigen::Index>(form.map.size()), static_cast<Eigen::Index>(rule.size()));
    form.values.middleRows(static_cast<Eigen::Index>(cs), n) = space.cell_basis(partner, s).values(rule.points);
    form.values.middleRows(static_cast<Eigen::Index>(ct), n) = -space.cell_basis(t, s).values(rule.points);
    form.weights = rule.weights;
    return form;
}

LocalVector load_volume(const HhoSpace& space, CellId c, Side s, const SidedField& f)
{
    LocalVector out;
    out.map.add(space.cell_block(c, s));
    const QuadratureRule rule = space.cuts().cell_rule(c, s, space.quad_degree());
    if (rule.empty() || !f) {
        out.values = Vector::Zero(static_cast<Eigen::Index>(space.cell_size()));
        return out;
    }
    Vector fv(static_cast<Eigen::Index>(rule.size()));
    for (std::size_t q = 0; q < rule.size(); ++q)
        fv(static_cast<Eigen::Index>(q)) = f(rule.point(q), s);
    out.values = kernels::moments(space.cell_basis(c, s).values(rule.points), fv, rule.weights);
    return out;
}

LocalVector load_interface(const HhoSpace& space, CellId c, const ProblemData& data)
{
    LocalVector out;
    const std::size_t c1 = out.map.add(space.cell_block(c, Side::one));
    const std::size_t c2 = out.map.add(space.cell_block(c, Side::two));
    out.values = Vector::Zero(static_cast<Eigen::Index>(out.map.size()));
    QuadratureRule ir;
    Eigen::Matrix2Xd normals;
    space.cuts().interface_rule(c, space.quad_degree(), ir, normals);
    if (ir.empty())
        return out;
    const Values v1 = space.cell_basis(c, Side::one).values(ir.points);
    const Values v2 = space.cell_basis(c, Side::two).values(ir.points);
    const auto n = static_cast<Eigen::Index>(space.cell_size());
    const auto nq = static_cast<Eigen::Index>(ir.size());
    if (data.g_n) {
        Vector g(nq);
        for (Eigen::Index q = 0; q < nq; ++q)
            g(q) = data.g_n(ir.point(static_cast<std::size_t>(q)));
        out.values.segment(static_cast<Eigen::Index>(c2), n) += kernels::moments(v2, g, ir.weights);
    }
    if (data.g_d) {
        Vector g(nq);
        for (Eigen::Index q = 0; q < nq; ++q)
            g(q) = data.g_d(ir.point(static_cast<std::size_t>(q)));
        const double pen = space.kappa(Side::one) / space.h();
        out.values.segment(static_cast<Eigen::Index>(c1), n) += pen * kernels::moments(v1, g, ir.weights);
        out.values.segment(static_cast<Eigen::Index>(c2), n) -= pen * kernels::moments(v2, g, ir.weights);
    }
    return out;
}

LocalVector load_lift(const HhoSpace& space, const GradientOperator& op)
{
    LocalVector out;
    out.map = op.map;
    if (op.lift.size() == 0) {
        out.values = Vector::Zero(static_cast<Eigen::Index>(op.map.size()));
        return out;
    }
    out.values = -space.kappa(Side::one) * (op.rhs.transpose() * op.lift);
    return out;
}

} // namespace uhho
