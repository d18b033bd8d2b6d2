#include <doctest.h>

#include <cmath>
#include <random>

#include "uhho/level_set.hpp"

using namespace uhho;

namespace {

Vector2 fd_gradient(const LevelSet& ls, const Point& p, double h = 1e-6)
{
    return {(ls.value(p + Vector2(h, 0)) - ls.value(p - Vector2(h, 0))) / (2 * h),
            (ls.value(p + Vector2(0, h)) - ls.value(p - Vector2(0, h))) / (2 * h)};
}

} // namespace

TEST_CASE("circle values and sides")
{
    const auto c = make_circle(0.5, 0.5, 1.0 / 3.0);
    CHECK(c->value({0.5, 0.5}) == doctest::Approx(-1.0 / 9.0));
    CHECK(c->side({0.5, 0.5}) == Side::one);
    CHECK(c->side({0.95, 0.95}) == Side::two);
    CHECK(c->value({0.5 + 1.0 / 3.0, 0.5}) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK_THROWS_AS(make_circle(0.5, 0.5, 0.0), ConfigError);
}

TEST_CASE("analytic gradients match finite differences")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    const LevelSetPtr shapes[] = {make_circle(0.5, 0.5, 1.0 / 3.0), make_flower(0.5, 0.5, 1.0 / 3.0, 0.03, 8),
                                  make_vertical_line(0.37), make_negated(make_circle(0.4, 0.6, 0.2))};
    for (const auto& ls : shapes)
        for (int i = 0; i < 50; ++i) {
            const Point p(u(rng), u(rng));
            if ((p - Point(0.5, 0.5)).norm() < 1e-3)
                continue;
            CHECK((ls->gradient(p) - fd_gradient(*ls, p)).norm() < 1e-6 * (1.0 + ls->gradient(p).norm()));
        }
}

TEST_CASE("square level set is the max-norm distance minus the half-width")
{
    const auto sq = make_square(0.45, 0.45, 0.005);
    CHECK(sq->value({0.45, 0.45}) == doctest::Approx(-0.255));
    CHECK(sq->value({0.45 + 0.255, 0.3}) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(sq->side({0.1, 0.45}) == Side::two);
    CHECK((sq->gradient({0.7, 0.5}) - Vector2(1, 0)).norm() < 1e-14);
    CHECK((sq->gradient({0.5, 0.1}) - Vector2(0, -1)).norm() < 1e-14);
}

TEST_CASE("normals are unit and point into Omega_2")
{
    const auto c = make_circle(0.5, 0.5, 0.3);
    const Point p(0.8, 0.5);
    CHECK(c->normal(p).norm() == doctest::Approx(1.0));
    CHECK(c->normal(p).x() == doctest::Approx(1.0));
    const auto flipped = make_negated(c);
    CHECK(flipped->normal(p).x() == doctest::Approx(-1.0));
    CHECK(flipped->side({0.5, 0.5}) == Side::two);
    CHECK_THROWS_AS(c->normal({0.5, 0.5}), NumericalError);
}

TEST_CASE("boundary contact detection")
{
    CHECK_FALSE(touches_domain_boundary(*make_circle(0.5, 0.5, 1.0 / 3.0)));
    CHECK(touches_domain_boundary(*make_vertical_line(0.37)));
    CHECK(touches_domain_boundary(*make_circle(0.5, 0.5, 0.6)));
    CHECK_FALSE(touches_domain_boundary(*make_flower(0.5, 0.5, 1.0 / 3.0, 0.03, 8)));
}
