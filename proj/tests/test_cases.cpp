#include <doctest.h>

#include <cmath>

#include "uhho/cases.hpp"

using namespace uhho;

TEST_CASE("every registered case is internally consistent")
{
    for (const auto& name : case_names()) {
        CAPTURE(name);
        const CaseDefinition c = make_case(name);
        const SelfCheck sc = self_check(c);
        CHECK(sc.pde <= 1e-6);
        CHECK(sc.dirichlet <= 1e-6);
        CHECK(sc.neumann <= 1e-6);
        CHECK(sc.gradient <= 1e-6);
        CHECK_NOTHROW(require_consistent(c));
        CHECK(c.kappa[0] <= c.kappa[1]);
    }
}

TEST_CASE("contrast overrides stay consistent")
{
    for (double k2 : {1e-4, 0.01, 10.0, 1e4}) {
        CAPTURE(k2);
        const CaseDefinition c = make_case("sol_circle_contrast", CaseParams{k2});
        CHECK(self_check(c).passed());
    }
    for (int d : {0, 1, 3}) {
        CaseParams p;
        p.patch_degree = d;
        CHECK(self_check(make_case("patch", p)).passed());
    }
}

TEST_CASE("jump data of the circular jump cases")
{
    const double R = 1.0 / 3.0;
    const CaseDefinition gn = make_case("sol_gN");
    CHECK(gn.kappa[1] == 1e4);
    const Point on(0.5 + R, 0.5);
    CHECK(gn.g_n(on) == doctest::Approx(2 * std::pow(R, 5) * (3 - 4 * R * R)));
    CHECK(gn.g_d(on) == 0.0);
    const CaseDefinition gd = make_case("sol_gD");
    CHECK(gd.g_d(on) == doctest::Approx(std::pow(R, 6) * (1.0 - 1e-4)));
    CHECK(gd.g_n(on) == 0.0);
}

TEST_CASE("kappa_2 below kappa_1 relabels the subdomains")
{
    const CaseDefinition plain = make_case("sol_gD", CaseParams{10.0});
    const CaseDefinition swapped = make_case("sol_gD", CaseParams{0.1});
    CHECK_FALSE(plain.relabeled);
    CHECK(swapped.relabeled);
    CHECK(swapped.kappa[0] == doctest::Approx(0.1));
    CHECK(swapped.kappa[1] == doctest::Approx(1.0));
    const Point in(0.5, 0.55), on(0.5 + 1.0 / 3.0, 0.5);
    // the disk is now Omega_2 and the solution itself is unchanged
    CHECK(swapped.level_set->side(in) == Side::two);
    CHECK(swapped.u(in, Side::two) == doctest::Approx(std::pow(0.05, 6)));
    CHECK(swapped.g_d(on) == doctest::Approx(-std::pow(1.0 / 3.0, 6) * (1.0 - 10.0)));
    CHECK(self_check(swapped).passed());
}

TEST_CASE("case registry errors")
{
    CHECK_THROWS_WITH_AS(make_case("nope"), doctest::Contains("sinsin"), ConfigError);
    CHECK_THROWS_AS(make_case("sinsin", CaseParams{10.0}), ConfigError);
    CHECK_THROWS_AS(make_case("sol_gN", CaseParams{-1.0}), ConfigError);
    CHECK(case_names().size() == 7);
}
