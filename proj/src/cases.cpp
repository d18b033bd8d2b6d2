#include "uhho/cases.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace uhho {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double center = 0.5;
constexpr double radius = 1.0 / 3.0;

double rho(const Point& p) { return std::hypot(p.x() - center, p.y() - center); }

/// d/dx and d/dy of a radial function with derivative du(rho).
Vector2 radial_gradient(const Point& p, double du_over_rho)
{
    return Vector2(p.x() - center, p.y() - center) * du_over_rho;
}

SidedField sided(std::function<double(const Point&)> one, std::function<double(const Point&)> two)
{
    return [one = std::move(one), two = std::move(two)](const Point& p, Side s) { return s == Side::one ? one(p) : two(p); };
}

ScalarField constant(double v)
{
    return [v](const Point&) { return v; };
}

/// Jump data evaluated pointwise from the registered solution.
void derive_jumps(CaseDefinition& c)
{
    c.g_d = [u = c.u](const Point& p) { return u(p, Side::one) - u(p, Side::two); };
    c.g_n = [g = c.grad_u, k = c.kappa, ls = c.level_set](const Point& p) {
        return (k[0] * g(p, Side::one) - k[1] * g(p, Side::two)).dot(ls->normal(p));
    };
}

CaseDefinition sinsin(LevelSetPtr ls, std::string name, std::string interface)
{
    CaseDefinition c;
    c.name = std::move(name);
    c.interface = std::move(interface);
    c.level_set = std::move(ls);
    c.u = [](const Point& p, Side) { return std::sin(pi * p.x()) * std::sin(pi * p.y()); };
    c.grad_u = [](const Point& p, Side) {
        return Vector2(pi * std::cos(pi * p.x()) * std::sin(pi * p.y()), pi * std::sin(pi * p.x()) * std::cos(pi * p.y()));
    };
    c.f = [](const Point& p, Side) { return 2.0 * pi * pi * std::sin(pi * p.x()) * std::sin(pi * p.y()); };
    c.g_d = constant(0.0);
    c.g_n = constant(0.0);
    return c;
}

CaseDefinition circle_contrast(double k1, double k2)
{
    CaseDefinition c;
    c.name = "sol_circle_contrast";
    c.interface = "circle";
    c.level_set = make_circle(center, center, radius);
    c.kappa = {k1, k2};
    const double shift = std::pow(radius, 6) * (1.0 / k1 - 1.0 / k2);
    c.u = sided([k1](const Point& p) { return std::pow(rho(p), 6) / k1; },
                [k2, shift](const Point& p) { return std::pow(rho(p), 6) / k2 + shift; });
    c.grad_u = [k1, k2](const Point& p, Side s) {
        return radial_gradient(p, 6.0 * std::pow(rho(p), 4) / (s == Side::one ? k1 : k2));
    };
    c.f = [](const Point& p, Side) { return -36.0 * std::pow(rho(p), 4); };
    c.g_d = constant(0.0);
    c.g_n = constant(0.0);
    return c;
}

CaseDefinition jump_neumann(double k1, double k2)
{
    CaseDefinition c;
    c.name = "sol_gN";
    c.interface = "circle";
    c.level_set = make_circle(center, center, radius);
    c.kappa = {k1, k2};
    const double r8 = std::pow(radius, 8);
    const double r6 = std::pow(radius, 6);
    c.u = sided([k1](const Point& p) { return std::pow(rho(p), 6) / k1; },
                [k1, k2, r6, r8](const Point& p) { return (std::pow(rho(p), 8) - r8) / k2 + r6 / k1; });
    c.grad_u = [k1, k2](const Point& p, Side s) {
        return s == Side::one ? radial_gradient(p, 6.0 * std::pow(rho(p), 4) / k1)
                              : radial_gradient(p, 8.0 * std::pow(rho(p), 6) / k2);
    };
    c.f = sided([](const Point& p) { return -36.0 * std::pow(rho(p), 4); },
                [](const Point& p) { return -64.0 * std::pow(rho(p), 6); });
    c.g_d = constant(0.0);
    c.g_n = constant(2.0 * std::pow(radius, 5) * (3.0 - 4.0 * radius * radius));
    return c;
}

CaseDefinition jump_dirichlet(double k1, double k2)
{
    CaseDefinition c;
    c.name = "sol_gD";
    c.interface = "circle";
    c.level_set = make_circle(center, center, radius);
    c.kappa = {k1, k2};
    c.u = [k1, k2](const Point& p, Side s) { return std::pow(rho(p), 6) / (s == Side::one ? k1 : k2); };
    c.grad_u = [k1, k2](const Point& p, Side s) {
        return radial_gradient(p, 6.0 * std::pow(rho(p), 4) / (s == Side::one ? k1 : k2));
    };
    c.f = [](const Point& p, Side) { return -36.0 * std::pow(rho(p), 4); };
    c.g_d = constant(std::pow(radius, 6) * (1.0 / k1 - 1.0 / k2));
    c.g_n = constant(0.0);
    return c;
}

CaseDefinition jump_mixed(double k1, double k2)
{
    CaseDefinition c;
    c.name = "sol_gD_gN";
    c.interface = "circle";
    c.level_set = make_circle(center, center, radius);
    c.kappa = {k1, k2};
    c.default_r = 10;
    c.u = sided([](const Point& p) { return std::cos(p.y()) * std::exp(p.x()); },
                [](const Point& p) { return std::sin(pi * p.x()) * std::sin(pi * p.y()); });
    c.grad_u = [](const Point& p, Side s) {
        if (s == Side::one)
            return Vector2(std::cos(p.y()) * std::exp(p.x()), -std::sin(p.y()) * std::exp(p.x()));
        return Vector2(pi * std::cos(pi * p.x()) * std::sin(pi * p.y()), pi * std::sin(pi * p.x()) * std::cos(pi * p.y()));
    };
    c.f = sided([](const Point&) { return 0.0; },
                [k2](const Point& p) { return k2 * 2.0 * pi * pi * std::sin(pi * p.x()) * std::sin(pi * p.y()); });
    derive_jumps(c);
    return c;
}

/// Full polynomial sum_{a+b<=d} x^a y^b / (1 + a + 2b), identical on both sides.
CaseDefinition patch(double k1, double k2, int degree)
{
    if (degree < 0 || degree > 8)
        throw ConfigError("patch degree must be in 0..8");
    CaseDefinition c;
    c.name = "patch";
    c.interface = "line";
    c.level_set = make_vertical_line(0.37);
    c.kappa = {k1, k2};
    c.boundary_contact = true;
    auto coef = [](int a, int b) { return 1.0 / (1.0 + a + 2.0 * b); };
    auto mono = [](double x, int a) { return a < 0 ? 0.0 : std::pow(x, a); };
    auto value = [=](const Point& p) {
        double v = 0.0;
        for (int a = 0; a <= degree; ++a)
            for (int b = 0; a + b <= degree; ++b)
                v += coef(a, b) * mono(p.x(), a) * mono(p.y(), b);
        return v;
    };
    auto grad = [=](const Point& p) {
        Vector2 g = Vector2::Zero();
        for (int a = 0; a <= degree; ++a)
            for (int b = 0; a + b <= degree; ++b) {
                g.x() += coef(a, b) * a * mono(p.x(), a - 1) * mono(p.y(), b);
                g.y() += coef(a, b) * b * mono(p.x(), a) * mono(p.y(), b - 1);
            }
        return g;
    };
    auto lap = [=](const Point& p) {
        double l = 0.0;
        for (int a = 0; a <= degree; ++a)
            for (int b = 0; a + b <= degree; ++b)
                l += coef(a, b) * (a * (a - 1) * mono(p.x(), a - 2) * mono(p.y(), b) +
                                   b * (b - 1) * mono(p.x(), a) * mono(p.y(), b - 2));
        return l;
    };
    c.u = [value](const Point& p, Side) { return value(p); };
    c.grad_u = [grad](const Point& p, Side) { return grad(p); };
    c.f = [lap, k1, k2](const Point& p, Side s) { return -(s == Side::one ? k1 : k2) * lap(p); };
    derive_jumps(c);
    return c;
}

/// Swaps the roles of the subdomains so that the registered kappa_1 <= kappa_2 again.
CaseDefinition relabel(CaseDefinition c)
{
    CaseDefinition r = c;
    r.relabeled = true;
    r.level_set = make_negated(c.level_set);
    r.kappa = {c.kappa[1], c.kappa[0]};
    r.u = [u = c.u](const Point& p, Side s) { return u(p, opposite(s)); };
    r.grad_u = [g = c.grad_u](const Point& p, Side s) { return g(p, opposite(s)); };
    r.f = [f = c.f](const Point& p, Side s) { return f(p, opposite(s)); };
    r.g_d = [g = c.g_d](const Point& p) { return -g(p); };
    // The normal and the flux difference both change sign.
    r.g_n = c.g_n;
    return r;
}

double laplacian_fd(const SidedField& u, const Point& p, Side s, double h)
{
    auto second = [&](const Vector2& e) {
        return (-u(p + 2 * h * e, s) + 16 * u(p + h * e, s) - 30 * u(p, s) + 16 * u(p - h * e, s) -
                u(p - 2 * h * e, s)) /
               (12 * h * h);
    };
    return second(Vector2::UnitX()) + second(Vector2::UnitY());
}

Vector2 gradient_fd(const SidedField& u, const Point& p, Side s, double h)
{
    auto first = [&](const Vector2& e) {
        return (-u(p + 2 * h * e, s) + 8 * u(p + h * e, s) - 8 * u(p - h * e, s) + u(p - 2 * h * e, s)) / (12 * h);
    };
    return {first(Vector2::UnitX()), first(Vector2::UnitY())};
}

} // namespace

ProblemData CaseDefinition::data() const
{
    return ProblemData{f, u, g_d, g_n};
}

std::vector<std::string> case_names()
{
    return {"sinsin", "sinsin_flower", "sol_circle_contrast", "sol_gN", "sol_gD", "sol_gD_gN", "patch"};
}

CaseDefinition make_case(const std::string& name, const CaseParams& params)
{
    double k1 = 1.0;
    double k2 = 1.0;
    if (name == "sol_gN" || name == "sol_gD")
        k2 = 1e4;
    if (params.kappa2)
        k2 = *params.kappa2;
    if (!(k2 > 0.0) || !std::isfinite(k2))
        throw ConfigError("kappa2 must be positive and finite");

    // Build with kappa_1 <= kappa_2 in the physical labeling, then swap if needed.
    const bool swap = k2 < k1;
    CaseDefinition c;
    if (name == "sinsin") {
        c = sinsin(make_circle(center, center, radius), name, "circle");
        if (k2 != 1.0)
            throw ConfigError("case sinsin has no diffusivity contrast");
    } else if (name == "sinsin_flower") {
        c = sinsin(make_flower(center, center, radius, 0.03, 8), name, "flower");
        if (k2 != 1.0)
            throw ConfigError("case sinsin_flower has no diffusivity contrast");
    } else if (name == "sol_circle_contrast") {
        c = circle_contrast(k1, k2);
    } else if (name == "sol_gN") {
        c = jump_neumann(k1, k2);
    } else if (name == "sol_gD") {
        c = jump_dirichlet(k1, k2);
    } else if (name == "sol_gD_gN") {
        c = jump_mixed(k1, k2);
    } else if (name == "patch") {
        c = patch(k1, k2, params.patch_degree);
    } else {
        std::string known;
        for (const auto& n : case_names())
            known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown case '" + name + "' (known: " + known + ")");
    }
    return swap ? relabel(std::move(c)) : c;
}

SelfCheck self_check(const CaseDefinition& c, int samples, unsigned seed)
{
    SelfCheck out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.02, 0.98);
    const LevelSet& ls = *c.level_set;
    const double h = 1e-3;

    for (Side s : both_sides) {
        int found = 0;
        for (int attempt = 0; attempt < 200 * samples && found < samples; ++attempt) {
            const Point p(unit(rng), unit(rng));
            if (ls.side(p) != s)
                continue;
            ++found;
            const double f = c.f(p, s);
            const double r = -c.kappa[idx(s)] * laplacian_fd(c.u, p, s, h) - f;
            out.pde = std::max(out.pde, std::abs(r) / (1.0 + std::abs(f)));
            const Vector2 g = c.grad_u(p, s);
            out.gradient = std::max(out.gradient, (gradient_fd(c.u, p, s, h) - g).norm() / (1.0 + g.norm()));
        }
    }

    // Points on Gamma by Newton steps along the normal from random starts.
    int found = 0;
    for (int attempt = 0; attempt < 200 * samples && found < samples; ++attempt) {
        Point p(unit(rng), unit(rng));
        for (int it = 0; it < 50; ++it) {
            const Vector2 g = ls.gradient(p);
            const double n2 = g.squaredNorm();
            if (n2 == 0.0)
                break;
            p -= ls.value(p) * g / n2;
        }
        if (std::abs(ls.value(p)) > 1e-12 || p.minCoeff() <= 0.0 || p.maxCoeff() >= 1.0)
            continue;
        ++found;
        const double jump = c.u(p, Side::one) - c.u(p, Side::two);
        out.dirichlet = std::max(out.dirichlet, std::abs(jump - c.g_d(p)));
        const double flux = (c.kappa[0] * c.grad_u(p, Side::one) - c.kappa[1] * c.grad_u(p, Side::two)).dot(ls.normal(p));
        out.neumann = std::max(out.neumann, std::abs(flux - c.g_n(p)));
    }
    return out;
}

void require_consistent(const CaseDefinition& c)
{
    const SelfCheck chk = self_check(c);
    if (!chk.passed())
        throw ConfigError("case " + c.name + " failed its consistency self-check (pde " + std::to_string(chk.pde) +
                          ", g_D " + std::to_string(chk.dirichlet) + ", g_N " + std::to_string(chk.neumann) + ")");
}

} // namespace uhho
