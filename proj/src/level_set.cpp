#include "uhho/level_set.hpp"

#include <cmath>
#include <algorithm>
#include <sstream>

namespace uhho {

Vector2 LevelSet::normal(const Point& p) const
{
    const Vector2 g = gradient(p);
    const double n = g.norm();
    if (n == 0.0)
        throw NumericalError("level set gradient vanishes at (" + std::to_string(p.x()) + ", " +
                             std::to_string(p.y()) + ")");
    return g / n;
}

namespace {

class Circle final : public LevelSet {
public:
    Circle(double a, double b, double r) : a_(a), b_(b), r_(r) {}
    double value(const Point& p) const override
    {
        const double dx = p.x() - a_, dy = p.y() - b_;
        return dx * dx + dy * dy - r_ * r_;
    }
    Vector2 gradient(const Point& p) const override { return Vector2(2.0 * (p.x() - a_), 2.0 * (p.y() - b_)); }
    std::string describe() const override
    {
        std::ostringstream os;
        os << "circle(a=" << a_ << ", b=" << b_ << ", R=" << r_ << ")";
        return os.str();
    }

private:
    double a_, b_, r_;
};

class Flower final : public LevelSet {
public:
    Flower(double a, double b, double r, double c, int n) : a_(a), b_(b), r_(r), c_(c), n_(n) {}
    double value(const Point& p) const override
    {
        const double dx = p.x() - a_, dy = p.y() - b_;
        // atan2 differs from the piecewise arctan formula by multiples of 2 pi, invisible to cos(n theta).
        const double theta = std::atan2(dy, dx);
        return dx * dx + dy * dy - r_ * r_ + c_ * std::cos(n_ * theta);
    }
    Vector2 gradient(const Point& p) const override
    {
        const double dx = p.x() - a_, dy = p.y() - b_;
        const double rho2 = dx * dx + dy * dy;
        const double theta = std::atan2(dy, dx);
        const double dcos = -c_ * n_ * std::sin(n_ * theta);
        if (rho2 == 0.0)
            return Vector2::Zero();
        return Vector2(2.0 * dx + dcos * (-dy / rho2), 2.0 * dy + dcos * (dx / rho2));
    }
    std::string describe() const override
    {
        std::ostringstream os;
        os << "flower(a=" << a_ << ", b=" << b_ << ", R=" << r_ << ", c=" << c_ << ", n=" << n_ << ")";
        return os.str();
    }

private:
    double a_, b_, r_, c_;
    int n_;
};

class Square final : public LevelSet {
public:
    Square(double a, double b, double delta) : a_(a), b_(b), delta_(delta) {}
    double value(const Point& p) const override
    {
        return std::max(std::abs(p.x() - a_), std::abs(p.y() - b_)) - (0.25 + delta_);
    }
    Vector2 gradient(const Point& p) const override
    {
        const double dx = p.x() - a_, dy = p.y() - b_;
        if (std::abs(dx) >= std::abs(dy))
            return Vector2(dx >= 0.0 ? 1.0 : -1.0, 0.0);
        return Vector2(0.0, dy >= 0.0 ? 1.0 : -1.0);
    }
    std::string describe() const override
    {
        std::ostringstream os;
        os << "square(a=" << a_ << ", b=" << b_ << ", delta=" << delta_ << ")";
        return os.str();
    }

private:
    double a_, b_, delta_;
};

class VerticalLine final : public LevelSet {
public:
    explicit VerticalLine(double x0) : x0_(x0) {}
    double value(const Point& p) const override { return p.x() - x0_; }
    Vector2 gradient(const Point&) const override { return Vector2(1.0, 0.0); }
    std::string describe() const override
    {
        std::ostringstream os;
        os << "line(x=" << x0_ << ")";
        return os.str();
    }

private:
    double x0_;
};

class Negated final : public LevelSet {
public:
    explicit Negated(LevelSetPtr inner) : inner_(std::move(inner)) {}
    double value(const Point& p) const override { return -inner_->value(p); }
    Vector2 gradient(const Point& p) const override { return -inner_->gradient(p); }
    std::string describe() const override { return "-" + inner_->describe(); }

private:
    LevelSetPtr inner_;
};

} // namespace

LevelSetPtr make_circle(double a, double b, double radius)
{
    if (!(radius > 0.0))
        throw ConfigError("circle radius must be positive");
    return std::make_shared<Circle>(a, b, radius);
}

LevelSetPtr make_flower(double a, double b, double radius, double c, int n)
{
    if (!(radius > 0.0))
        throw ConfigError("flower radius must be positive");
    return std::make_shared<Flower>(a, b, radius, c, n);
}

LevelSetPtr make_square(double a, double b, double delta) { return std::make_shared<Square>(a, b, delta); }

LevelSetPtr make_vertical_line(double x0) { return std::make_shared<VerticalLine>(x0); }

LevelSetPtr make_negated(LevelSetPtr inner) { return std::make_shared<Negated>(std::move(inner)); }

bool touches_domain_boundary(const LevelSet& ls, int samples_per_edge)
{
    const std::array<Point, 4> corners{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)};
    const Side ref = ls.side(corners[0]);
    for (int e = 0; e < 4; ++e) {
        const Point& p0 = corners[e];
        const Point& p1 = corners[(e + 1) % 4];
        for (int s = 0; s <= samples_per_edge; ++s) {
            const Point p = p0 + (p1 - p0) * (static_cast<double>(s) / samples_per_edge);
            if (ls.value(p) == 0.0 || ls.side(p) != ref)
                return true;
        }
    }
    return false;
}

} // namespace uhho
