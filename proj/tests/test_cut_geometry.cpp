#include <doctest.h>

#include <cmath>
#include <numbers>

#include "uhho/cut_geometry.hpp"

using namespace uhho;

namespace {

double side_area(const CutMesh& cm, Side s)
{
    double a = 0.0;
    for (CellId c = 0; c < cm.mesh().num_cells(); ++c)
        if (cm.cell(c).has(s))
            a += cm.cell(c).cut() ? cm.cell(c).sub_area(s) : cm.mesh().cell_area();
    return a;
}

double interface_length(const CutMesh& cm)
{
    double len = 0.0;
    for (CellId c = 0; c < cm.mesh().num_cells(); ++c) {
        const auto& pl = cm.cell(c).polyline;
        for (std::size_t i = 1; i < pl.size(); ++i)
            len += (pl[i] - pl[i - 1]).norm();
    }
    return len;
}

CutMesh circle_mesh(int level, int r, double theta = 0.3)
{
    CutOptions o;
    o.r = r;
    o.theta = theta;
    return CutMesh(CartesianMesh(level), make_circle(0.5, 0.5, 1.0 / 3.0), o);
}

} // namespace

TEST_CASE("sub-cells partition every cut cell")
{
    for (int level = 0; level <= 2; ++level) {
        const CutMesh cm = circle_mesh(level, 6);
        const double area = cm.mesh().cell_area();
        std::size_t ncut = 0;
        for (CellId c = 0; c < cm.mesh().num_cells(); ++c) {
            const CellCut& cc = cm.cell(c);
            if (!cc.cut())
                continue;
            ++ncut;
            CHECK(std::abs(cc.sub_area(Side::one) + cc.sub_area(Side::two) - area) <= 1e-12 * area);
            CHECK(cc.polyline.size() == (1u << 6) + 1);
            for (Side s : both_sides) {
                const auto rule = cm.cell_rule(c, s, 2);
                CHECK(rule.measure() == doctest::Approx(cc.sub_area(s)).epsilon(1e-12));
            }
            for (const Point& p : cc.polyline)
                CHECK(std::abs(cm.level_set().value(p)) < 1e-13);
        }
        CHECK(ncut > 0);
    }
}

TEST_CASE("sub-faces split background faces at the crossing")
{
    const CutMesh cm = circle_mesh(1, 4);
    std::size_t ncut = 0;
    for (FaceId f = 0; f < cm.mesh().num_faces(); ++f) {
        const FaceCut& fc = cm.face(f);
        if (!fc.cut)
            continue;
        ++ncut;
        const Face& face = cm.mesh().face(f);
        const double len = (face.b - face.a).norm();
        CHECK(fc.on(Side::one).length() + fc.on(Side::two).length() == doctest::Approx(len).epsilon(1e-14));
        CHECK(std::abs(cm.level_set().value(fc.crossing)) < 1e-14);
    }
    CHECK(ncut > 0);
}

TEST_CASE("interface length and enclosed area approach the circle")
{
    const double R = 1.0 / 3.0;
    const CutMesh cm = circle_mesh(2, 8);
    CHECK(interface_length(cm) == doctest::Approx(2 * std::numbers::pi * R).epsilon(1e-7));
    CHECK(side_area(cm, Side::one) == doctest::Approx(std::numbers::pi * R * R).epsilon(1e-7));
    CHECK(side_area(cm, Side::one) + side_area(cm, Side::two) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("polyline area error decays like the square of the chord length")
{
    // chords inscribed in a convex arc lose area ~ L^3 kappa / 12 each, so the total
    // error drops by 4 per extra level of bisection: 4^4 = 256 between r = 4 and r = 8
    const double exact = std::numbers::pi / 9.0;
    const double e4 = std::abs(side_area(circle_mesh(1, 4), Side::one) - exact);
    const double e8 = std::abs(side_area(circle_mesh(1, 8), Side::one) - exact);
    CHECK(e4 / e8 > 200.0);
    CHECK(e4 / e8 < 300.0);
}

TEST_CASE("pairing properties")
{
    for (int level = 0; level <= 3; ++level)
        for (double theta : {0.1, 0.2, 0.3}) {
            const CutMesh cm = circle_mesh(level, 5, theta);
            const auto& mesh = cm.mesh();
            const PairingMap& pm = cm.pairing();
            for (Side s : both_sides)
                for (CellId c = 0; c < mesh.num_cells(); ++c) {
                    const CellId t = pm.of(s, c);
                    CHECK((t != no_id) == cm.cell(c).ill(s));
                    if (t == no_id)
                        continue;
                    CHECK(cm.cell(t).good(s));
                    const auto nb = mesh.neighborhood(c, 1);
                    CHECK(std::binary_search(nb.begin(), nb.end(), t));
                    const auto& dep = pm.inverse(s, t);
                    CHECK(std::binary_search(dep.begin(), dep.end(), c));
                    // reciprocal rule
                    if (s == Side::one && cm.cell(t).ill(Side::two))
                        CHECK(pm.of(Side::two, t) == c);
                }
        }
}

TEST_CASE("pairing prefers uncut cells, then the largest sub-cell, then the smallest id")
{
    const CutMesh cm = circle_mesh(2, 5);
    const auto& mesh = cm.mesh();
    for (Side s : both_sides)
        for (CellId c = 0; c < mesh.num_cells(); ++c) {
            const CellId t = cm.pairing().of(s, c);
            if (t == no_id || (s == Side::two && cm.cell(t).ill(Side::one)))
                continue;
            auto rank = [&](CellId u) {
                const CellCut& uc = cm.cell(u);
                return !uc.cut() ? 0 : (uc.kind == CellKind::well_cut ? 1 : 2);
            };
            for (CellId u : mesh.neighborhood(c, 1)) {
                if (u == c || !cm.cell(u).good(s))
                    continue;
                const bool better = rank(u) < rank(t) ||
                                    (rank(u) == rank(t) && cm.cell(u).sub_area(s) > cm.cell(t).sub_area(s)) ||
                                    (rank(u) == rank(t) && cm.cell(u).sub_area(s) == cm.cell(t).sub_area(s) && u < t);
                CHECK_FALSE(better);
            }
        }
}

TEST_CASE("ill-cut count grows with theta")
{
    std::size_t prev = 0;
    for (double theta : {0.0, 0.1, 0.2, 0.3}) {
        const CutMesh cm = circle_mesh(1, 5, theta);
        const std::size_t n = cm.count(CellKind::ill_cut);
        CHECK(n >= prev);
        prev = n;
    }
    CHECK(circle_mesh(1, 5, 0.0).count(CellKind::ill_cut) == 0);
    CHECK_THROWS_WITH_AS(circle_mesh(1, 5, 5.0), doctest::Contains("both sides ill-cut"), NumericalError);
}

TEST_CASE("square interface with corners inside cells")
{
    CutOptions o;
    o.r = 4;
    const CutMesh cm(CartesianMesh(0), make_square(0.45, 0.45, 0.01), o);
    const double half = 0.26;
    CHECK(side_area(cm, Side::one) == doctest::Approx(4 * half * half).epsilon(1e-3));
    // chords cut the four corners
    CHECK(interface_length(cm) == doctest::Approx(8 * half).epsilon(5e-3));
    CHECK(interface_length(cm) < 8 * half);
}

TEST_CASE("option validation")
{
    CutOptions o;
    o.r = 17;
    CHECK_THROWS_AS(CutMesh(CartesianMesh(0), make_circle(0.5, 0.5, 0.3), o), ConfigError);
    o.r = 4;
    o.theta = -1.0;
    CHECK_THROWS_AS(CutMesh(CartesianMesh(0), make_circle(0.5, 0.5, 0.3), o), ConfigError);
    o.theta = 0.3;
    CHECK_THROWS_WITH_AS(CutMesh(CartesianMesh(0), make_vertical_line(0.37), o),
                         doctest::Contains("touches the domain boundary"), ConfigError);
    o.allow_boundary_contact = true;
    CHECK_NOTHROW(CutMesh(CartesianMesh(0), make_vertical_line(0.37), o));
}

TEST_CASE("polygon triangulation of a non-convex shape")
{
    const std::vector<Point> poly{{0, 0}, {1, 0}, {1, 1}, {0.5, 0.2}, {0, 1}};
    const auto tris = triangulate_polygon(poly, 0.0);
    double area = 0.0;
    for (const auto& t : tris) {
        CHECK(t.signed_area() > 0.0);
        area += t.signed_area();
    }
    CHECK(area == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("edge intersection and polyline")
{
    const auto c = make_circle(0.5, 0.5, 0.25);
    const Point p = intersect_edge(*c, Point(0.5, 0.5), Point(1.0, 0.5));
    CHECK(p.x() == doctest::Approx(0.75).epsilon(1e-14));
    CHECK_THROWS_AS(intersect_edge(*c, Point(0.5, 0.5), Point(0.6, 0.5)), NumericalError);
    const auto pl = build_polyline(*c, Point(0.75, 0.5), Point(0.5, 0.75), 3);
    CHECK(pl.size() == 9);
    for (const Point& q : pl)
        CHECK((q - Point(0.5, 0.5)).norm() == doctest::Approx(0.25).epsilon(1e-13));
}
