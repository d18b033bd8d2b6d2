#include "uhho/cut_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace uhho {

namespace {

constexpr double root_tol = 1e-13;

bool differs(double f0, double f1) noexcept { return (f0 < 0.0) != (f1 < 0.0); }

double polygon_signed_area(const std::vector<Point>& poly)
{
    double a = 0.0;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i)
        a += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * a;
}

Point polygon_centroid(const std::vector<Point>& poly)
{
    double a = 0.0;
    Point c = Point::Zero();
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % n];
        const double w = cross(p, q);
        a += w;
        c += w * (p + q);
    }
    if (std::abs(a) < 1e-300)
        return poly.front();
    return c / (3.0 * a);
}

// Fan from an interior anchor; fails if any triangle is inverted beyond min_area.
bool try_fan(const std::vector<Point>& poly, const Point& anchor, double min_area, std::vector<Triangle>& out)
{
    std::vector<Triangle> tris;
    tris.reserve(poly.size());
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        const Triangle t{{anchor, poly[i], poly[(i + 1) % n]}};
        const double a = t.signed_area();
        if (a < -min_area)
            return false;
        if (a >= min_area)
            tris.push_back(t);
    }
    out = std::move(tris);
    return true;
}

bool inside_triangle(const Point& p, const Point& a, const Point& b, const Point& c)
{
    return cross(b - a, p - a) > 0.0 && cross(c - b, p - b) > 0.0 && cross(a - c, p - c) > 0.0;
}

std::vector<Triangle> ear_clip(const std::vector<Point>& poly, double min_area)
{
    std::vector<std::size_t> ids(poly.size());
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    std::vector<Triangle> tris;
    while (ids.size() > 3) {
        const std::size_t n = ids.size();
        std::size_t best = n;
        double best_area = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            const Point& a = poly[ids[(j + n - 1) % n]];
            const Point& b = poly[ids[j]];
            const Point& c = poly[ids[(j + 1) % n]];
            const double ar = 0.5 * cross(b - a, c - a);
            if (ar <= 0.0) {
                if (ar > -min_area && best == n) {
                    best = j;
                    best_area = ar;
                }
                continue;
            }
            bool ear = true;
            for (std::size_t m = 0; m < n && ear; ++m) {
                if (m == j || m == (j + 1) % n || m == (j + n - 1) % n)
                    continue;
                ear = !inside_triangle(poly[ids[m]], a, b, c);
            }
            if (ear) {
                best = j;
                best_area = ar;
                break;
            }
        }
        if (best == n)
            throw NumericalError("degenerate triangle: polygon cannot be triangulated");
        const Triangle t{{poly[ids[(best + n - 1) % n]], poly[ids[best]], poly[ids[(best + 1) % n]]}};
        if (best_area >= min_area)
            tris.push_back(t);
        ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(best));
    }
    const Triangle t{{poly[ids[0]], poly[ids[1]], poly[ids[2]]}};
    if (t.signed_area() >= min_area)
        tris.push_back(t);
    return tris;
}

// Bisection for phi(p + t * dir) = 0 on t in [0, len], assuming a sign change.
Point bisect_along(const LevelSet& ls, const Point& p, const Vector2& dir, double t0, double t1)
{
    double f0 = ls.value(p + t0 * dir);
    for (int it = 0; it < 200 && (t1 - t0) > root_tol * 1e-3 * std::max(1.0, std::abs(t1)); ++it) {
        const double tm = 0.5 * (t0 + t1);
        const double fm = ls.value(p + tm * dir);
        if (fm == 0.0)
            return p + tm * dir;
        if (differs(f0, fm))
            t1 = tm;
        else {
            t0 = tm;
            f0 = fm;
        }
    }
    const Point a = p + t0 * dir, b = p + t1 * dir;
    return std::abs(ls.value(a)) <= std::abs(ls.value(b)) ? a : b;
}

// Projects a chord midpoint onto Gamma, searching downhill along the given direction.
bool project(const LevelSet& ls, const Point& m, Vector2 dir, double len, Point& out)
{
    const double fm = ls.value(m);
    if (fm == 0.0) {
        out = m;
        return true;
    }
    if (fm > 0.0)
        dir = -dir;
    for (double reach = len; reach <= 8.0 * len; reach *= 2.0) {
        const double fe = ls.value(m + reach * dir);
        if (differs(fm, fe)) {
            out = bisect_along(ls, m, dir, 0.0, reach);
            return true;
        }
    }
    return false;
}

} // namespace

std::size_t PairingMap::size() const
{
    std::size_t n = 0;
    for (const auto& p : partner)
        n += static_cast<std::size_t>(std::count_if(p.begin(), p.end(), [](CellId c) { return c != no_id; }));
    return n;
}

Point intersect_edge(const LevelSet& ls, const Point& p0, const Point& p1)
{
    const double f0 = ls.value(p0);
    const double f1 = ls.value(p1);
    if (!differs(f0, f1))
        throw NumericalError("no sign change on edge");
    const double len = (p1 - p0).norm();
    if (len == 0.0)
        return p0;
    // Bisection on the parameter; 1e-13 relative bracket width, then a few extra halvings.
    const Vector2 dir = (p1 - p0) / len;
    double t0 = 0.0, t1 = len, g0 = f0;
    while (t1 - t0 > 1e-3 * root_tol * len) {
        const double tm = 0.5 * (t0 + t1);
        if (tm <= t0 || tm >= t1)
            break;
        const double gm = ls.value(p0 + tm * dir);
        if (gm == 0.0)
            return p0 + tm * dir;
        if (differs(g0, gm))
            t1 = tm;
        else {
            t0 = tm;
            g0 = gm;
        }
    }
    const Point a = p0 + t0 * dir, b = p0 + t1 * dir;
    return std::abs(ls.value(a)) <= std::abs(ls.value(b)) ? a : b;
}

std::vector<Point> build_polyline(const LevelSet& ls, const Point& a, const Point& b, int r)
{
    if (r < 0 || r > 20)
        throw ConfigError("subdivision exponent r out of range: " + std::to_string(r));
    const std::size_t n = std::size_t{1} << r;
    std::vector<Point> pts(n + 1);
    pts[0] = a;
    pts[n] = b;
    for (std::size_t step = n; step > 1; step /= 2) {
        for (std::size_t i = 0; i + step <= n; i += step) {
            const Point& p = pts[i];
            const Point& q = pts[i + step];
            const Point m = 0.5 * (p + q);
            const Vector2 chord = q - p;
            const double len = chord.norm();
            Point root = m;
            if (len > 0.0) {
                const Vector2 g = ls.gradient(m);
                bool found = false;
                if (g.norm() > 0.0)
                    found = project(ls, m, g.normalized(), len, root);
                if (!found)
                    found = project(ls, m, Vector2(-chord.y(), chord.x()) / len, len, root);
                if (!found)
                    throw NumericalError("polyline projection failed");
            }
            pts[i + step / 2] = root;
        }
    }
    return pts;
}

std::vector<Triangle> triangulate_polygon(const std::vector<Point>& poly, double min_area,
                                          const std::vector<Point>& extra_anchors)
{
    if (poly.size() < 3)
        return {};
    if (polygon_signed_area(poly) <= 0.0)
        return {};
    std::vector<Point> anchors;
    Point vc = Point::Zero();
    for (const auto& p : poly)
        vc += p;
    anchors.push_back(vc / static_cast<double>(poly.size()));
    anchors.push_back(polygon_centroid(poly));
    anchors.insert(anchors.end(), extra_anchors.begin(), extra_anchors.end());
    std::vector<Triangle> tris;
    for (const auto& anchor : anchors)
        if (try_fan(poly, anchor, min_area, tris))
            return tris;
    return ear_clip(poly, min_area);
}

std::vector<Triangle> triangulate_polygon(const std::vector<Point>& poly, double min_area)
{
    return triangulate_polygon(poly, min_area, {});
}

std::array<std::vector<Triangle>, 2> subtriangulate(const LevelSet& ls, const std::array<Point, 4>& corners,
                                                    const std::array<const Point*, 4>& crossing,
                                                    const std::vector<Point>& polyline, double min_area)
{
    int j1 = -1, j2 = -1;
    for (int j = 0; j < 4; ++j) {
        if (crossing[static_cast<std::size_t>(j)] == nullptr)
            continue;
        (j1 < 0 ? j1 : j2) = j;
    }
    if (j1 < 0 || j2 < 0 || polyline.size() < 2)
        throw NumericalError("disconnected cut");

    // Chain one runs counter-clockwise from the crossing on face j1 to the one on face j2.
    const std::size_t np = polyline.size();
    std::vector<Point> chain1{polyline.front()}, chain2{polyline.back()};
    std::vector<Point> corners1, corners2;
    for (int j = j1 + 1; j <= j2; ++j)
        corners1.push_back(corners[static_cast<std::size_t>(j)]);
    for (int j = j2 + 1; j <= j1 + 4; ++j)
        corners2.push_back(corners[static_cast<std::size_t>(j % 4)]);
    chain1.insert(chain1.end(), corners1.begin(), corners1.end());
    chain1.push_back(polyline.back());
    for (std::size_t q = np - 2; q >= 1; --q)
        chain1.push_back(polyline[q]);
    chain2.insert(chain2.end(), corners2.begin(), corners2.end());
    chain2.push_back(polyline.front());
    for (std::size_t q = 1; q + 1 < np; ++q)
        chain2.push_back(polyline[q]);

    const Side s1 = ls.side(corners1.front());
    auto anchors = [](const std::vector<Point>& cs, const Point& x, const Point& y) {
        std::vector<Point> out;
        Point c = x + y;
        for (const auto& p : cs)
            c += p;
        out.push_back(c / static_cast<double>(cs.size() + 2));
        out.insert(out.end(), cs.begin(), cs.end());
        return out;
    };

    std::array<std::vector<Triangle>, 2> out;
    out[idx(s1)] = triangulate_polygon(chain1, min_area, anchors(corners1, polyline.front(), polyline.back()));
    out[idx(opposite(s1))] =
        triangulate_polygon(chain2, min_area, anchors(corners2, polyline.front(), polyline.back()));
    return out;
}

CutMesh::CutMesh(CartesianMesh mesh, LevelSetPtr ls, CutOptions options)
    : mesh_(std::move(mesh)), ls_(std::move(ls)), options_(options)
{
    if (!ls_)
        throw ConfigError("missing level set");
    if (options_.theta < 0.0)
        throw ConfigError("theta must be non-negative");
    if (options_.samples < 2)
        throw ConfigError("sample grid must have at least 2 points per direction");
    if (options_.r < 0 || options_.r > 16)
        throw ConfigError("subdivision exponent r must lie in [0, 16]");
    if (!options_.allow_boundary_contact && touches_domain_boundary(*ls_))
        throw ConfigError("interface touches the domain boundary");
    split_faces();
    classify_cells();
    build_pairing();
}

double CutMesh::threshold() const noexcept { return options_.theta * mesh_.h() / 2.0; }

std::size_t CutMesh::count(CellKind kind) const
{
    return static_cast<std::size_t>(
        std::count_if(cells_.begin(), cells_.end(), [kind](const CellCut& c) { return c.kind == kind; }));
}

std::size_t CutMesh::count_ill(Side s) const
{
    return static_cast<std::size_t>(
        std::count_if(cells_.begin(), cells_.end(), [s](const CellCut& c) { return c.ill(s); }));
}

void CutMesh::split_faces()
{
    const LevelSet& ls = *ls_;
    const int m = options_.samples;
    faces_.assign(mesh_.num_faces(), FaceCut{});
    for (FaceId f = 0; f < mesh_.num_faces(); ++f) {
        const Face& face = mesh_.face(f);
        FaceCut& fc = faces_[f];
        int changes = 0;
        Point lo = face.a, hi = face.b;
        double prev = ls.value(face.a);
        Point prev_p = face.a;
        for (int j = 1; j <= m; ++j) {
            const Point p = face.a + (face.b - face.a) * (static_cast<double>(j) / m);
            const double v = j == m ? ls.value(face.b) : ls.value(p);
            if (differs(prev, v)) {
                ++changes;
                lo = prev_p;
                hi = p;
            }
            prev = v;
            prev_p = p;
        }
        if (changes > 1)
            throw NumericalError("disconnected cut: face " + std::to_string(f) + " crossed " +
                                 std::to_string(changes) + " times");
        const Side sa = ls.side(face.a);
        if (changes == 0) {
            fc.part[idx(sa)] = SubFace{face.a, face.b, true};
            continue;
        }
        fc.cut = true;
        fc.crossing = intersect_edge(ls, lo, hi);
        fc.part[idx(sa)] = SubFace{face.a, fc.crossing, true};
        fc.part[idx(opposite(sa))] = SubFace{fc.crossing, face.b, true};
        for (auto& part : fc.part)
            if (part.present && part.length() == 0.0)
                throw NumericalError("degenerate sub-face on face " + std::to_string(f));
    }
}

void CutMesh::classify_cells()
{
    const LevelSet& ls = *ls_;
    const int m = options_.samples;
    const double dx = mesh_.cell_width();
    const double min_area = 1e-14 * mesh_.cell_area();
    const double thr = threshold();
    cells_.assign(mesh_.num_cells(), CellCut{});

    for (CellId c = 0; c < mesh_.num_cells(); ++c) {
        CellCut& cc = cells_[c];
        const auto corners = mesh_.corners(c);
        const auto fids = mesh_.cell_faces(c);
        std::array<const Point*, 4> crossing{};
        int ncut = 0;
        for (std::size_t j = 0; j < 4; ++j) {
            if (faces_[fids[j]].cut) {
                crossing[j] = &faces_[fids[j]].crossing;
                ++ncut;
            }
        }
        const Point& o = corners[0];
        auto grid_point = [&](int a, int b) {
            return Point(o.x() + (a + 0.5) * dx / m, o.y() + (b + 0.5) * dx / m);
        };

        if (ncut == 0) {
            const Side s = ls.side(corners[0]);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    if (ls.side(grid_point(a, b)) != s)
                        throw NumericalError("disconnected cut: interface enclosed in cell " + std::to_string(c));
            cc.kind = CellKind::uncut;
            cc.side = s;
            cc.area[idx(s)] = mesh_.cell_area();
            continue;
        }
        if (ncut != 2)
            throw NumericalError("disconnected cut: cell " + std::to_string(c) + " has " + std::to_string(ncut) +
                                 " crossed faces");

        const Point* first = nullptr;
        const Point* second = nullptr;
        for (const Point* p : crossing)
            if (p != nullptr)
                (first == nullptr ? first : second) = p;
        cc.kind = CellKind::well_cut;
        cc.polyline = build_polyline(ls, *first, *second, options_.r);
        cc.tris = subtriangulate(ls, corners, crossing, cc.polyline, min_area);

        for (Side s : both_sides) {
            double area = 0.0;
            for (const auto& t : cc.tris[idx(s)])
                area += t.signed_area();
            cc.area[idx(s)] = area;
        }

        auto dist_to_boundary = [&](const Point& p) {
            return std::min({p.x() - o.x(), o.x() + dx - p.x(), p.y() - o.y(), o.y() + dx - p.y()});
        };
        auto radius_at = [&](const Point& p) {
            const double g = ls.gradient(p).norm();
            const double d_gamma = g > 0.0 ? std::abs(ls.value(p)) / g : 0.0;
            return std::max(0.0, std::min(dist_to_boundary(p), d_gamma));
        };
        // Compass search from the best sample; only ever increases the estimate.
        auto refine_radius = [&](Point x, Side s) {
            double best = radius_at(x);
            for (double step = dx / (2.0 * m); step > 1e-6 * dx;) {
                bool moved = false;
                for (const auto& d : {Vector2(1, 0), Vector2(-1, 0), Vector2(0, 1), Vector2(0, -1)}) {
                    const Point y = x + step * d;
                    if (ls.side(y) != s)
                        continue;
                    if (const double v = radius_at(y); v > best) {
                        best = v;
                        x = y;
                        moved = true;
                    }
                }
                if (!moved)
                    step *= 0.5;
            }
            return best;
        };
        for (Side s : both_sides) {
            double rho = 0.0;
            Point best_sample = Point::Zero();
            bool best_sample_valid = false;
            auto consider = [&](const Point& p) {
                if (const double v = radius_at(p); v > rho || !best_sample_valid) {
                    rho = std::max(rho, v);
                    if (ls.side(p) == s) {
                        best_sample = p;
                        best_sample_valid = true;
                    }
                }
            };
            for (const auto& t : cc.tris[idx(s)]) {
                for (const auto& v : t.v)
                    consider(v);
                consider(t.incenter());
            }
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    const Point p = grid_point(a, b);
                    if (ls.side(p) == s)
                        consider(p);
                }
            if (!cc.tris[idx(s)].empty())
                rho = std::max(rho, radius_at(sub_barycenter(c, s)));
            if (best_sample_valid)
                rho = std::max(rho, refine_radius(best_sample, s));
            cc.rho[idx(s)] = rho;
        }

        const bool ok1 = cc.rho[0] >= thr;
        const bool ok2 = cc.rho[1] >= thr;
        if (!ok1 && !ok2)
            throw NumericalError("both sides ill-cut in cell " + std::to_string(c) +
                                 " (mesh too coarse for this theta)");
        if (ok1 && ok2) {
            cc.kind = CellKind::well_cut;
        } else {
            cc.kind = CellKind::ill_cut;
            cc.side = ok1 ? Side::two : Side::one;
        }
    }
}

void CutMesh::pair_side(Side s, const std::vector<CellId>& pending)
{
    auto& partner = pairing_.partner[idx(s)];
    for (CellId sc : pending) {
        CellId best = no_id;
        std::tuple<int, double, CellId> best_key{3, 0.0, no_id};
        for (CellId t : mesh_.neighborhood(sc, 1)) {
            if (t == sc)
                continue;
            const CellCut& tc = cells_[t];
            if (!tc.good(s))
                continue;
            const int rank = !tc.cut() ? 0 : (tc.kind == CellKind::well_cut ? 1 : 2);
            const std::tuple<int, double, CellId> key{rank, -tc.sub_area(s), t};
            if (best == no_id || key < best_key) {
                best = t;
                best_key = key;
            }
        }
        if (best == no_id)
            throw NumericalError("pairing failed for cell " + std::to_string(sc) + " on side " +
                                 std::to_string(number(s)));
        partner[sc] = best;
    }
}

void CutMesh::build_pairing()
{
    const std::size_t n = mesh_.num_cells();
    for (Side s : both_sides) {
        pairing_.partner[idx(s)].assign(n, no_id);
        pairing_.dependents[idx(s)].assign(n, {});
    }
    std::array<std::vector<CellId>, 2> ko;
    for (CellId c = 0; c < n; ++c)
        if (cells_[c].kind == CellKind::ill_cut)
            ko[idx(cells_[c].side)].push_back(c);

    pair_side(Side::one, ko[0]);

    // Reciprocal rule: an ill-cut side-two cell chosen as a side-one partner is paired back.
    auto& p1 = pairing_.partner[0];
    auto& p2 = pairing_.partner[1];
    std::vector<CellId> rest;
    for (CellId t : ko[1]) {
        for (CellId s : ko[0]) {
            if (p1[s] == t) {
                p2[t] = s;
                break;
            }
        }
        if (p2[t] == no_id)
            rest.push_back(t);
    }
    pair_side(Side::two, rest);

    for (Side s : both_sides)
        for (CellId c = 0; c < n; ++c)
            if (const CellId t = pairing_.partner[idx(s)][c]; t != no_id)
                pairing_.dependents[idx(s)][t].push_back(c);
}

Point CutMesh::sub_barycenter(CellId c, Side s) const
{
    const CellCut& cc = cells_.at(c);
    if (!cc.cut())
        return mesh_.center(c);
    double area = 0.0;
    Point b = Point::Zero();
    for (const auto& t : cc.tris[idx(s)]) {
        const double a = t.signed_area();
        area += a;
        b += a * t.centroid();
    }
    return area > 0.0 ? Point(b / area) : mesh_.center(c);
}

QuadratureRule CutMesh::cell_rule(CellId c, Side s, int degree) const
{
    const CellCut& cc = cells_.at(c);
    if (!cc.has(s))
        return {};
    if (!cc.cut())
        return square_rule(mesh_.corners(c)[0], mesh_.cell_width(), degree);
    return triangles_rule(cc.tris[idx(s)], degree);
}

void CutMesh::interface_rule(CellId c, int degree, QuadratureRule& rule, Eigen::Matrix2Xd& normals) const
{
    rule = QuadratureRule{};
    const CellCut& cc = cells_.at(c);
    for (std::size_t k = 0; k + 1 < cc.polyline.size(); ++k)
        rule.append(segment_rule(cc.polyline[k], cc.polyline[k + 1], degree));
    normals.resize(2, static_cast<Eigen::Index>(rule.size()));
    for (std::size_t q = 0; q < rule.size(); ++q)
        normals.col(static_cast<Eigen::Index>(q)) = ls_->normal(rule.point(q));
}

} // namespace uhho
