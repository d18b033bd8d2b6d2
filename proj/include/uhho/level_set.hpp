#pragma once

#include <memory>
#include <string>

#include "uhho/common.hpp"

namespace uhho {

/// Analytic level-set function. Omega_1 = {phi < 0}, Omega_2 = {phi > 0}, Gamma = {phi = 0}.
class LevelSet {
public:
    virtual ~LevelSet() = default;
    virtual double value(const Point& p) const = 0;
    virtual Vector2 gradient(const Point& p) const = 0;
    virtual std::string describe() const = 0;

    Side side(const Point& p) const { return value(p) < 0.0 ? Side::one : Side::two; }

    /// Unit normal grad(phi)/|grad(phi)|, pointing from Omega_1 to Omega_2.
    Vector2 normal(const Point& p) const;
};

using LevelSetPtr = std::shared_ptr<const LevelSet>;

/// (x-a)^2 + (y-b)^2 - R^2
LevelSetPtr make_circle(double a, double b, double radius);
/// (x-a)^2 + (y-b)^2 - R^2 + c cos(n theta)
LevelSetPtr make_flower(double a, double b, double radius, double c, int n);
/// max(|x-a|, |y-b|) - (0.25 + delta): closed square of half-width 0.25 + delta.
LevelSetPtr make_square(double a, double b, double delta);
/// x - x0: straight vertical interface.
LevelSetPtr make_vertical_line(double x0);
/// Sign-flipped copy, used to relabel the subdomains.
LevelSetPtr make_negated(LevelSetPtr inner);

/// True if phi changes sign (or vanishes) along the boundary of the unit square.
bool touches_domain_boundary(const LevelSet& ls, int samples_per_edge = 4096);

} // namespace uhho
