#include <doctest.h>

#include <cmath>

#include "uhho/quadrature.hpp"

using namespace uhho;

namespace {

double integrate(const QuadratureRule& rule, int a, int b)
{
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point p = rule.point(q);
        s += rule.weight(q) * std::pow(p.x(), a) * std::pow(p.y(), b);
    }
    return s;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

} // namespace

TEST_CASE("square rule integrates monomials exactly")
{
    for (int deg = 0; deg <= 10; ++deg) {
        const auto rule = square_rule({0.0, 0.0}, 1.0, deg);
        for (int a = 0; a <= deg; ++a)
            for (int b = 0; a + b <= deg; ++b)
                CHECK(integrate(rule, a, b) == doctest::Approx(1.0 / ((a + 1) * (b + 1))).epsilon(1e-13));
    }
}

TEST_CASE("reference triangle rule integrates monomials exactly")
{
    for (int deg = 0; deg <= 12; ++deg) {
        const auto& rule = reference_triangle_rule(deg);
        for (std::size_t q = 0; q < rule.size(); ++q)
            CHECK(rule.weight(q) > 0.0);
        for (int a = 0; a <= deg; ++a)
            for (int b = 0; a + b <= deg; ++b) {
                const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                CHECK(integrate(rule, a, b) == doctest::Approx(exact).epsilon(1e-13));
            }
    }
}

TEST_CASE("signed triangle fans integrate a non-convex polygon")
{
    // L-shaped polygon of area 3/4 fanned from a vertex outside its kernel
    const Point o(1.0, 1.0);
    const std::vector<Point> poly{{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}};
    std::vector<Triangle> fan;
    for (std::size_t i = 0; i < poly.size(); ++i)
        fan.push_back({{o, poly[i], poly[(i + 1) % poly.size()]}});
    const auto rule = triangles_rule(fan, 3);
    CHECK(rule.measure() == doctest::Approx(0.75).epsilon(1e-14));
    // int x over the L-shape: full square 1/2 minus the removed corner 3/16
    CHECK(integrate(rule, 1, 0) == doctest::Approx(0.5 - 0.1875).epsilon(1e-13));
}

TEST_CASE("segment rule")
{
    const Point a(0.1, 0.2), b(0.7, 1.0);
    const auto rule = segment_rule(a, b, 7);
    CHECK(rule.measure() == doctest::Approx(1.0).epsilon(1e-14));
    // int_seg x^3 ds with x = 0.1 + 0.6 t, ds = dt
    const double exact = (std::pow(0.7, 4) - std::pow(0.1, 4)) / (4 * 0.6);
    CHECK(integrate(rule, 3, 0) == doctest::Approx(exact).epsilon(1e-13));
    CHECK(segment_rule(a, a, 3).empty());
}

TEST_CASE("Gauss-Legendre exactness degree")
{
    for (int n = 1; n <= 8; ++n) {
        const auto rule = gauss_legendre_unit(n);
        CHECK(rule.size() == static_cast<std::size_t>(n));
        for (int d = 0; d <= 2 * n - 1; ++d)
            CHECK(integrate(rule, d, 0) == doctest::Approx(1.0 / (d + 1)).epsilon(1e-13));
    }
}

TEST_CASE("incenter is equidistant from the edges")
{
    const Triangle t{{Point(0, 0), Point(3, 0), Point(0, 4)}};
    CHECK((t.incenter() - Point(1, 1)).norm() < 1e-14);
    CHECK(t.signed_area() == doctest::Approx(6.0));
}
