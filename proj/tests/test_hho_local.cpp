#include <doctest.h>

#include <cmath>
#include <optional>
#include <random>

#include <Eigen/Eigenvalues>

#include "uhho/hho_local.hpp"
#include "uhho/cases.hpp"
#include "uhho/system.hpp"

using namespace uhho;

namespace {

/// n x . p = c, with n = (cos a, sin a).
class TiltedLine final : public LevelSet {
public:
    TiltedLine(double angle, double c) : n_(std::cos(angle), std::sin(angle)), c_(c) {}
    double value(const Point& p) const override { return n_.dot(p) - c_; }
    Vector2 gradient(const Point&) const override { return n_; }
    std::string describe() const override { return "tilted line"; }

private:
    Vector2 n_;
    double c_;
};

/// Random polynomial of total degree <= d in the global coordinates.
struct Poly {
    std::vector<std::pair<int, int>> e;
    std::vector<double> c;

    Poly(int d, std::mt19937_64& rng)
    {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int t = 0; t <= d; ++t)
            for (int b = 0; b <= t; ++b) {
                e.emplace_back(t - b, b);
                c.push_back(u(rng));
            }
    }
    double operator()(const Point& p) const
    {
        double s = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i)
            s += c[i] * std::pow(p.x(), e[i].first) * std::pow(p.y(), e[i].second);
        return s;
    }
    Vector2 grad(const Point& p) const
    {
        Vector2 g = Vector2::Zero();
        for (std::size_t i = 0; i < e.size(); ++i) {
            const auto [a, b] = e[i];
            if (a > 0)
                g.x() += c[i] * a * std::pow(p.x(), a - 1) * std::pow(p.y(), b);
            if (b > 0)
                g.y() += c[i] * b * std::pow(p.x(), a) * std::pow(p.y(), b - 1);
        }
        return g;
    }
};

/// Relative L2(T^i) distance between the reconstruction (plus an optional lift) and grad p.
double gradient_defect(const HhoSpace& space, const GradientOperator& op, const Vector& x, const Poly& p,
                       bool with_lift)
{
    const CellBasis& bt = space.cell_basis(op.cell, op.side);
    const CellBasis bk(bt.center, bt.scale, space.k());
    Vector g = op.G * op.map.gather(x);
    if (with_lift)
        g += op.lift;
    const auto nk = static_cast<Eigen::Index>(space.grad_scalar_size());
    const QuadratureRule rule = space.cuts().cell_rule(op.cell, op.side, 2 * space.k() + 2);
    double err = 0.0, ref = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point pt = rule.point(q);
        const Vector2 gh(bk.eval(Vector(g.head(nk)), pt), bk.eval(Vector(g.tail(nk)), pt));
        err += std::abs(rule.weight(q)) * (gh - p.grad(pt)).squaredNorm();
        ref += std::abs(rule.weight(q)) * p.grad(pt).squaredNorm();
    }
    return std::sqrt(err / ref);
}

CutMesh line_mesh(double angle, double c, double theta = 0.3)
{
    CutOptions o;
    o.r = 2;
    o.theta = theta;
    o.allow_boundary_contact = true;
    return CutMesh(CartesianMesh(0), std::make_shared<TiltedLine>(angle, c), o);
}

} // namespace

// Tolerances allow for rounding: at k = 3 an extension onto a diagonal dependent costs about seven digits.
TEST_CASE("gradient reconstruction reproduces gradients of polynomials across straight cuts")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ua(0.0, 2.0 * std::acos(-1.0)), uc(0.3, 0.7);
    for (int trial = 0; trial < 50; ++trial) {
        const double angle = ua(rng);
        const Vector2 n(std::cos(angle), std::sin(angle));
        const double c = uc(rng) * (std::abs(n.x()) + std::abs(n.y())) + std::min(0.0, n.x()) + std::min(0.0, n.y());
        const CutMesh cm = line_mesh(angle, c);
        const int k = trial % 4;
        HhoParams hp;
        hp.k = k;
        const HhoSpace space(cm, hp);

        // same polynomial on both sides
        const Poly p(k + 1, rng);
        const Vector x = interpolate(space, [&](const Point& pt, Side) { return p(pt); });
        // different polynomials with the matching jump data
        const Poly p2(k + 1, rng);
        const Vector y = interpolate(space, [&](const Point& pt, Side s) { return s == Side::one ? p(pt) : p2(pt); });
        const ScalarField g_d = [&](const Point& pt) { return p(pt) - p2(pt); };

        for (CellId t = 0; t < cm.mesh().num_cells(); ++t)
            for (Side s : both_sides) {
                if (!space.ok(t, s))
                    continue;
                const GradientOperator op = gradient_reconstruction(space, t, s);
                CHECK(gradient_defect(space, op, x, p, false) < 1e-8);
                if (!cm.cell(t).cut() && cm.pairing().inverse(s, t).empty())
                    continue;
                const GradientOperator opl = gradient_reconstruction(space, t, s, &g_d);
                CHECK(gradient_defect(space, opl, y, s == Side::one ? p : p2, s == Side::one) < 1e-8);
            }
    }
}

TEST_CASE("gradient reconstruction is exact on random curved cuts")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uc(0.42, 0.58), ur(0.15, 0.3), ut(0.0, 0.3);
    int accepted = 0;
    while (accepted < 50) {
        CutOptions o;
        o.r = 4;
        o.theta = ut(rng);
        std::optional<CutMesh> cm;
        try {
            cm.emplace(CartesianMesh(0), make_circle(uc(rng), uc(rng), ur(rng)), o);
        } catch (const NumericalError&) {
            continue;  // both sides ill-cut for this draw
        }
        HhoParams hp;
        hp.k = accepted % 4;
        const HhoSpace space(*cm, hp);
        const Poly p(hp.k + 1, rng);
        const Vector x = interpolate(space, [&](const Point& pt, Side) { return p(pt); });
        for (CellId t = 0; t < cm->mesh().num_cells(); ++t)
            for (Side s : both_sides)
                if (space.ok(t, s))
                    CHECK(gradient_defect(space, gradient_reconstruction(space, t, s), x, p, false) < 1e-8);
        ++accepted;
    }
}

TEST_CASE("lifted jumps are reproduced on curved cuts")
{
    // the jump term and the lift share their quadrature and normals, so the
    // reconstruction stays exact even though the polyline only approximates Gamma
    std::mt19937_64 rng(6);
    for (int k = 0; k <= 3; ++k) {
        const Poly p1(k + 1, rng), p2(k + 1, rng);
        const ScalarField g_d = [&](const Point& pt) { return p1(pt) - p2(pt); };
        CutOptions o;
        o.r = 3;
        const CutMesh cm(CartesianMesh(0), make_circle(0.5, 0.5, 1.0 / 3.0), o);
        HhoParams hp;
        hp.k = k;
        const HhoSpace space(cm, hp);
        const Vector y = interpolate(space, [&](const Point& pt, Side s) { return s == Side::one ? p1(pt) : p2(pt); });
        for (CellId t = 0; t < cm.mesh().num_cells(); ++t)
            if (cm.cell(t).cut() && space.ok(t, Side::one))
                CHECK(gradient_defect(space, gradient_reconstruction(space, t, Side::one, &g_d), y, p1, true) < 1e-8);
    }
}

TEST_CASE("stabilizations vanish on interpolants of a global polynomial")
{
    std::mt19937_64 rng(23);
    for (int k = 0; k <= 3; ++k)
        for (double theta : {0.2, 0.4}) {
            CutOptions o;
            o.r = 5;
            o.theta = theta;
            const CutMesh cm(CartesianMesh(0), make_case("sinsin_flower").level_set, o);
            HhoParams hp;
            hp.k = k;
            hp.kappa = {1.0, 10.0};
            const HhoSpace space(cm, hp);
            const Poly p(k + 1, rng);
            const Vector x = interpolate(space, [&](const Point& pt, Side) { return p(pt); });
            auto check = [&](const QuadraticForm& form) {
                const Vector v = form.map.gather(x);
                const double scale = form.matrix().norm() * v.squaredNorm();
                CHECK(form.value(v) >= 0.0);
                CHECK(form.value(v) <= 1e-20 * scale);
            };
            std::size_t npaired = 0;
            for (CellId t = 0; t < cm.mesh().num_cells(); ++t) {
                for (Side s : both_sides) {
                    if (!space.has(t, s))
                        continue;
                    check(stab_circ(space, t, s));
                    if (space.ok(t, s))
                        for (CellId dep : cm.pairing().inverse(s, t)) {
                            check(stab_pairing(space, t, s, dep));
                            ++npaired;
                        }
                }
                if (cm.cell(t).cut())
                    check(stab_gamma(space, t));
            }
            if (theta == 0.4)
                CHECK(npaired > 0);
        }
}

TEST_CASE("local forms are symmetric positive semidefinite")
{
    CutOptions o;
    o.r = 5;
    o.theta = 0.4;
    const CutMesh cm(CartesianMesh(0), make_circle(0.5, 0.5, 1.0 / 3.0), o);
    HhoParams hp;
    hp.k = 2;
    const HhoSpace space(cm, hp);
    for (CellId t = 0; t < cm.mesh().num_cells(); ++t) {
        if (!cm.cell(t).cut())
            continue;
        for (Side s : both_sides) {
            Matrix m = space.ko(t, s) ? ko_stiffness(space, t, s) : gradient_reconstruction(space, t, s).stiffness(1.0);
            CHECK((m - m.transpose()).norm() <= 1e-12 * m.norm());
            const Eigen::SelfAdjointEigenSolver<Matrix> es(m);
            CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().maxCoeff());
        }
    }
}

namespace {

// Independent fitted HHO on one uncut square cell: own Gauss rule from the Golub-Welsch
// eigenproblem, own monomials, own assembly of G and of the face stabilization.
struct Gauss1D {
    Vector x, w;   // on [-1, 1]
    explicit Gauss1D(int n)
    {
        Matrix j = Matrix::Zero(n, n);
        for (int i = 1; i < n; ++i)
            j(i, i - 1) = j(i - 1, i) = i / std::sqrt(4.0 * i * i - 1.0);
        const Eigen::SelfAdjointEigenSolver<Matrix> es(j);
        x = es.eigenvalues();
        w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
    }
};

struct FittedOracle {
    Matrix stiffness;  // indexed by global unknowns listed in idx
    Matrix stab;
    std::vector<std::size_t> idx;
};

FittedOracle fitted_oracle(const HhoSpace& space, CellId c, Side s)
{
    const int k = space.k();
    const CartesianMesh& mesh = space.mesh();
    const CellBasis& cb = space.cell_basis(c, s);
    const auto ex1 = monomial_exponents(k + 1);
    const int ncell = static_cast<int>(ex1.size());
    const int nk = static_cast<int>(poly_dim(k));
    const int nf = k + 1;
    const int ntot = ncell + 4 * nf;

    auto mono = [&](const Point& p, int a) {
        const Point xi = (p - cb.center) / cb.scale;
        return std::pow(xi.x(), ex1[a].first) * std::pow(xi.y(), ex1[a].second);
    };
    auto dmono = [&](const Point& p, int a, int comp) {
        const Point xi = (p - cb.center) / cb.scale;
        const int ea = ex1[a].first, eb = ex1[a].second;
        if (comp == 0)
            return ea == 0 ? 0.0 : ea * std::pow(xi.x(), ea - 1) * std::pow(xi.y(), eb) / cb.scale;
        return eb == 0 ? 0.0 : eb * std::pow(xi.x(), ea) * std::pow(xi.y(), eb - 1) / cb.scale;
    };
    const Gauss1D g(k + 3);
    const auto corners = mesh.corners(c);
    const double dx = mesh.cell_width();

    Matrix mass = Matrix::Zero(2 * nk, 2 * nk);
    Matrix b = Matrix::Zero(2 * nk, ntot);
    for (int i = 0; i < g.x.size(); ++i)
        for (int j = 0; j < g.x.size(); ++j) {
            const Point p = corners[0] + 0.5 * dx * Point(1 + g.x(i), 1 + g.x(j));
            const double w = 0.25 * dx * dx * g.w(i) * g.w(j);
            for (int comp = 0; comp < 2; ++comp)
                for (int a = 0; a < nk; ++a) {
                    for (int bb = 0; bb < nk; ++bb)
                        mass(comp * nk + a, comp * nk + bb) += w * mono(p, a) * mono(p, bb);
                    for (int u = 0; u < ncell; ++u)
                        b(comp * nk + a, u) += w * mono(p, a) * dmono(p, u, comp);
                }
        }

    FittedOracle out;
    for (int u = 0; u < ncell; ++u)
        out.idx.push_back(space.cell_offset(c, s) + static_cast<std::size_t>(u));
    Matrix stab = Matrix::Zero(ntot, ntot);
    const auto faces = mesh.cell_faces(c);
    for (int lf = 0; lf < 4; ++lf) {
        const FaceId f = faces[static_cast<std::size_t>(lf)];
        const FaceBasis& fb = space.face_basis(f, s);
        const Vector2 nrm = CartesianMesh::local_normal(lf);
        const Point pa = corners[static_cast<std::size_t>(lf)], pb = corners[static_cast<std::size_t>((lf + 1) % 4)];
        for (int m = 0; m < nf; ++m)
            out.idx.push_back(space.face_offset(f, s) + static_cast<std::size_t>(m));
        const int off = ncell + lf * nf;
        Matrix mff = Matrix::Zero(nf, nf), mfc = Matrix::Zero(nf, ncell);
        for (int q = 0; q < g.x.size(); ++q) {
            const Point p = pa + 0.5 * (1 + g.x(q)) * (pb - pa);
            const double w = 0.5 * dx * g.w(q);
            const double t = (p - fb.mid).dot(fb.tangent) / fb.half_length;
            for (int a = 0; a < nk; ++a)
                for (int comp = 0; comp < 2; ++comp) {
                    const double qn = w * mono(p, a) * nrm[comp];
                    for (int m = 0; m < nf; ++m)
                        b(comp * nk + a, off + m) += qn * fb.amplitude * std::pow(t, m);
                    for (int u = 0; u < ncell; ++u)
                        b(comp * nk + a, u) -= qn * mono(p, u);
                }
            for (int m = 0; m < nf; ++m) {
                for (int l = 0; l < nf; ++l)
                    mff(m, l) += w * fb.amplitude * fb.amplitude * std::pow(t, m) * std::pow(t, l);
                for (int u = 0; u < ncell; ++u)
                    mfc(m, u) += w * fb.amplitude * std::pow(t, m) * mono(p, u);
            }
        }
        // v_F - Pi_F v_T in face coefficients: [-P, I] with P = mff^{-1} mfc
        Matrix r = Matrix::Zero(nf, ntot);
        r.leftCols(ncell) = -mff.ldlt().solve(mfc);
        r.block(0, off, nf, nf) = Matrix::Identity(nf, nf);
        stab += r.transpose() * mff * r;
    }
    const Matrix gop = mass.ldlt().solve(b);
    out.stiffness = space.kappa(s) * b.transpose() * gop;
    out.stab = space.kappa(s) / space.h() * stab;
    return out;
}

Matrix to_oracle_order(const Matrix& m, const LocalMap& map, const std::vector<std::size_t>& idx)
{
    const auto n = static_cast<Eigen::Index>(idx.size());
    Matrix out = Matrix::Zero(n, n);
    std::vector<Eigen::Index> pos(map.size(), -1);
    for (std::size_t j = 0; j < map.size(); ++j)
        for (std::size_t i = 0; i < idx.size(); ++i)
            if (map.global(j) == idx[i])
                pos[j] = static_cast<Eigen::Index>(i);
    for (std::size_t i = 0; i < map.size(); ++i)
        for (std::size_t j = 0; j < map.size(); ++j) {
            REQUIRE(pos[i] >= 0);
            REQUIRE(pos[j] >= 0);
            out(pos[i], pos[j]) = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    return out;
}

} // namespace

TEST_CASE("uncut cells match an independent fitted HHO assembly")
{
    CutOptions o;
    o.r = 3;
    const CutMesh cm(CartesianMesh(1), make_circle(0.5, 0.5, 1.0 / 3.0), o);
    for (int k = 0; k <= 3; ++k) {
        HhoParams hp;
        hp.k = k;
        hp.kappa = {2.0, 5.0};
        const HhoSpace space(cm, hp);
        for (CellId c : {cm.mesh().cell_at(10, 10), cm.mesh().cell_at(1, 2), cm.mesh().cell_at(0, 0)}) {
            REQUIRE_FALSE(cm.cell(c).cut());
            const Side s = cm.cell(c).side;
            if (!cm.pairing().inverse(s, c).empty())
                continue;
            const FittedOracle ref = fitted_oracle(space, c, s);
            const GradientOperator op = gradient_reconstruction(space, c, s);
            const Matrix a = to_oracle_order(op.stiffness(space.kappa(s)), op.map, ref.idx);
            CHECK((a - ref.stiffness).norm() <= 1e-11 * ref.stiffness.norm());
            const QuadraticForm st = stab_circ(space, c, s);
            const Matrix sm = to_oracle_order(st.matrix(), st.map, ref.idx);
            CHECK((sm - ref.stab).norm() <= 1e-11 * ref.stab.norm());
        }
    }
}

TEST_CASE("space layout: cell blocks before face blocks")
{
    CutOptions o;
    o.r = 3;
    const CutMesh cm(CartesianMesh(0), make_circle(0.5, 0.5, 1.0 / 3.0), o);
    HhoParams hp;
    hp.k = 1;
    const HhoSpace space(cm, hp);
    std::size_t ncell = 0, nface = 0;
    for (CellId c = 0; c < cm.mesh().num_cells(); ++c)
        for (Side s : both_sides)
            if (space.has(c, s)) {
                ++ncell;
                CHECK(space.cell_offset(c, s) < space.num_cell_dofs());
            } else {
                CHECK(space.cell_offset(c, s) == no_id);
            }
    for (FaceId f = 0; f < cm.mesh().num_faces(); ++f)
        for (Side s : both_sides)
            if (space.face_offset(f, s) != no_id) {
                ++nface;
                CHECK(space.face_offset(f, s) >= space.num_cell_dofs());
            }
    CHECK(space.num_cell_dofs() == ncell * space.cell_size());
    CHECK(space.num_dofs() == space.num_cell_dofs() + nface * space.face_size());
    CHECK_THROWS_AS(HhoSpace(cm, HhoParams{7, {1.0, 1.0}, 20.0, FaceScaling::amplitude}), ConfigError);
}
