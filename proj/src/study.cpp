#include "uhho/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <tuple>

namespace uhho {

double energy_error(const HhoSpace& space, const Vector& x, const SidedGradient& grad_u)
{
    const CutMesh& cuts = space.cuts();
    const int degree = space.quad_degree() + 2;
    double total = 0.0;
    for (CellId c = 0; c < space.mesh().num_cells(); ++c)
        for (Side s : both_sides) {
            if (!space.has(c, s))
                continue;
            const QuadratureRule rule = cuts.cell_rule(c, s, degree);
            if (rule.empty())
                continue;
            const CellBasis& basis = space.cell_basis(c, s);
            const Vector coeffs = x.segment(static_cast<Eigen::Index>(space.cell_offset(c, s)),
                                            static_cast<Eigen::Index>(space.cell_size()));
            double local = 0.0;
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const Point p = rule.point(q);
                local += rule.weight(q) * (grad_u(p, s) - basis.eval_gradient(coeffs, p)).squaredNorm();
            }
            total += space.kappa(s) * local;
        }
    return std::sqrt(total);
}

StudyRow run_single(const RunConfig& cfg)
{
    const auto start = std::chrono::steady_clock::now();
    CaseParams cp;
    cp.kappa2 = cfg.kappa2;
    cp.patch_degree = cfg.k + 1;
    const CaseDefinition def = make_case(cfg.case_name, cp);
    require_consistent(def);

    CutOptions opts;
    opts.r = cfg.r.value_or(def.default_r);
    opts.theta = cfg.theta;
    opts.allow_boundary_contact = def.boundary_contact;
    const CutMesh cuts(CartesianMesh(cfg.level), def.level_set, opts);
    if (!cfg.dump_cuts.empty())
        dump_cuts(cuts, cfg.dump_cuts);

    HhoParams hp;
    hp.k = cfg.k;
    hp.kappa = def.kappa;
    hp.eta = cfg.eta;
    hp.face_scaling = cfg.face_scaling;
    const HhoSpace space(cuts, hp);
    const GlobalSystem sys = assemble(space, def.data());
    const SolveReport sol = solve(space, sys, cfg.solver);

    StudyRow row;
    row.case_name = cfg.case_name;
    row.k = cfg.k;
    row.level = cfg.level;
    row.r = opts.r;
    row.theta = cfg.theta;
    row.eta = cfg.eta;
    // Reported in the caller's labeling.
    row.kappa2 = def.relabeled ? def.kappa[0] : def.kappa[1];
    row.ndofs = sol.free_dofs;
    row.energy_error = energy_error(space, sol.x, def.grad_u);
    if (cfg.condition || !cfg.export_matrix.empty()) {
        const ReducedSystem red = eliminate_dirichlet(sys);
        if (!cfg.export_matrix.empty())
            export_matrix_market(red.A, cfg.export_matrix);
        if (cfg.condition)
            row.cond = condition_number(red.A, cfg.cond_cap);
    }
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

namespace {

StudyRow failed_row(const RunConfig& cfg, const std::exception& e)
{
    StudyRow row;
    row.case_name = cfg.case_name;
    row.k = cfg.k;
    row.level = cfg.level;
    row.r = cfg.r.value_or(0);
    row.theta = cfg.theta;
    row.eta = cfg.eta;
    row.kappa2 = cfg.kappa2.value_or(cfg.case_name == "sol_gN" || cfg.case_name == "sol_gD" ? 1e4 : 1.0);
    row.error = e.what();
    return row;
}

std::string sweep_label(ConditioningInterface shape, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, shape == ConditioningInterface::circle ? "circle:R=%.6g" : "square:delta=%.3g", v);
    return buf;
}

} // namespace

std::vector<StudyRow> run_convergence(const RunConfig& base, const std::vector<int>& ks, const std::vector<int>& levels)
{
    std::vector<StudyRow> rows;
    for (int k : ks)
        for (int level : levels) {
            RunConfig cfg = base;
            cfg.k = k;
            cfg.level = level;
            try {
                rows.push_back(run_single(cfg));
            } catch (const NumericalError& e) {
                rows.push_back(failed_row(cfg, e));
            }
        }
    finalize(rows);
    return rows;
}

std::vector<StudyRow> run_theta(const RunConfig& base, const std::vector<double>& thetas, const std::vector<int>& ks,
                                const std::vector<int>& levels)
{
    std::vector<StudyRow> rows;
    for (double theta : thetas) {
        RunConfig cfg = base;
        cfg.theta = theta;
        auto part = run_convergence(cfg, ks, levels);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    finalize(rows);
    return rows;
}

std::vector<StudyRow> run_contrast(const RunConfig& base, const std::vector<double>& kappa2s, const std::vector<int>& ks)
{
    std::vector<StudyRow> rows;
    for (double k2 : kappa2s) {
        RunConfig cfg = base;
        cfg.kappa2 = k2;
        auto part = run_convergence(cfg, ks, {base.level});
        rows.insert(rows.end(), part.begin(), part.end());
    }
    finalize(rows);
    return rows;
}

std::vector<StudyRow> run_conditioning(ConditioningInterface shape, const std::vector<double>& sweep,
                                       const std::vector<int>& ks, int level, const RunConfig& base)
{
    std::vector<StudyRow> rows;
    for (double v : sweep)
        for (int k : ks) {
            const auto start = std::chrono::steady_clock::now();
            StudyRow row;
            row.case_name = sweep_label(shape, v);
            row.sweep = shape == ConditioningInterface::square ? -v : v;
            row.k = k;
            row.level = level;
            row.r = base.r.value_or(8);
            row.theta = base.theta;
            row.eta = base.eta;
            row.kappa2 = 1.0;
            try {
                if (!(v > 0.0))
                    throw ConfigError("conditioning sweep values must be positive");
                const LevelSetPtr ls = shape == ConditioningInterface::circle ? make_circle(0.5, 0.5, v)
                                                                            : make_square(0.45, 0.45, v);
                CutOptions opts;
                opts.r = row.r;
                opts.theta = base.theta;
                const CutMesh cuts(CartesianMesh(level), ls, opts);
                HhoParams hp;
                hp.k = k;
                hp.eta = base.eta;
                hp.face_scaling = base.face_scaling;
                const HhoSpace space(cuts, hp);
                const GlobalSystem sys = assemble(space, ProblemData{});
                const ReducedSystem red = eliminate_dirichlet(sys);
                row.ndofs = red.free.size();
                row.cond = condition_number(red.A, base.cond_cap);
            } catch (const NumericalError& e) {
                row.error = e.what();
            }
            row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            rows.push_back(row);
        }
    finalize(rows);
    return rows;
}

void finalize(std::vector<StudyRow>& rows)
{
    auto curve = [](const StudyRow& r) { return std::tie(r.sweep, r.case_name, r.r, r.theta, r.eta, r.kappa2, r.k); };
    std::stable_sort(rows.begin(), rows.end(), [&](const StudyRow& a, const StudyRow& b) {
        return std::tuple_cat(curve(a), std::tie(a.level)) < std::tuple_cat(curve(b), std::tie(b.level));
    });
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].rate.reset();
        if (i == 0 || curve(rows[i]) != curve(rows[i - 1]) || rows[i].level != rows[i - 1].level + 1)
            continue;
        const auto& e0 = rows[i - 1].energy_error;
        const auto& e1 = rows[i].energy_error;
        if (e0 && e1 && *e0 > 0.0 && *e1 > 0.0)
            rows[i].rate = std::log2(*e0 / *e1);
    }
}

namespace {

std::string fmt_num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string optional_number(const std::optional<double>& v)
{
    return v ? fmt_num(*v) : std::string();
}

} // namespace

void write_csv(std::ostream& os, const std::vector<StudyRow>& rows, bool deterministic)
{
    os << csv_header << '\n';
    for (const auto& r : rows) {
        os << r.case_name << ',' << r.k << ',' << r.level << ',' << r.r << ',' << fmt_num(r.theta) << ','
           << fmt_num(r.eta) << ',' << fmt_num(r.kappa2) << ',';
        if (r.error.empty())
            os << r.ndofs;
        os << ',' << optional_number(r.energy_error) << ',' << optional_number(r.rate) << ','
           << optional_number(r.cond) << ',' << (deterministic ? std::string() : optional_number(r.wall_time)) << '\n';
    }
}

void dump_cuts(const CutMesh& cuts, const std::string& path)
{
    std::ofstream os(path);
    if (!os)
        throw ConfigError("cannot write cut dump to " + path);
    const CartesianMesh& mesh = cuts.mesh();
    auto kind_name = [](CellKind k) {
        switch (k) {
        case CellKind::uncut: return "uncut";
        case CellKind::well_cut: return "well_cut";
        case CellKind::ill_cut: return "ill_cut";
        }
        return "";
    };
    const bool svg = path.size() >= 4 && path.compare(path.size() - 4, 4, ".svg") == 0;
    if (!svg) {
        os << "cell,kind,side,ill1,ill2,partner1,partner2,polyline\n";
        for (CellId c = 0; c < mesh.num_cells(); ++c) {
            const CellCut& cc = cuts.cell(c);
            auto partner = [&](Side s) {
                const CellId p = cuts.pairing().of(s, c);
                return p == no_id ? std::string() : std::to_string(p);
            };
            os << c << ',' << kind_name(cc.kind) << ',' << (cc.cut() ? std::string() : std::to_string(number(cc.side))) << ','
               << cc.ill(Side::one) << ',' << cc.ill(Side::two) << ',' << partner(Side::one) << ','
               << partner(Side::two) << ',';
            for (std::size_t i = 0; i < cc.polyline.size(); ++i)
                os << (i ? " " : "") << fmt_num(cc.polyline[i].x()) << ':' << fmt_num(cc.polyline[i].y());
            os << '\n';
        }
        return;
    }
    const double scale = 800.0;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"820\" height=\"820\" viewBox=\"-10 -10 820 820\">\n";
    const double w = mesh.cell_width() * scale;
    for (CellId c = 0; c < mesh.num_cells(); ++c) {
        const CellCut& cc = cuts.cell(c);
        const Point o = mesh.corners(c)[0];
        const char* fill = cc.kind == CellKind::uncut ? (cc.side == Side::one ? "#dde8f5" : "#f5eddd")
                           : cc.kind == CellKind::well_cut ? "#b8d8b0"
                                                           : "#e8a0a0";
        os << "<rect x=\"" << fmt_num(o.x() * scale) << "\" y=\"" << fmt_num((1.0 - o.y()) * scale - w) << "\" width=\""
           << fmt_num(w) << "\" height=\"" << fmt_num(w) << "\" fill=\"" << fill
           << "\" stroke=\"#888\" stroke-width=\"0.5\"><title>cell " << c << ' ' << kind_name(cc.kind)
           << "</title></rect>\n";
    }
    for (Side s : both_sides)
        for (CellId c = 0; c < mesh.num_cells(); ++c) {
            const CellId p = cuts.pairing().of(s, c);
            if (p == no_id)
                continue;
            const Point a = mesh.center(c);
            const Point b = mesh.center(p);
            os << "<line x1=\"" << fmt_num(a.x() * scale) << "\" y1=\"" << fmt_num((1.0 - a.y()) * scale) << "\" x2=\""
               << fmt_num(b.x() * scale) << "\" y2=\"" << fmt_num((1.0 - b.y()) * scale) << "\" stroke=\""
               << (s == Side::one ? "#1f4e9c" : "#9c4e1f") << "\" stroke-width=\"1.5\"/>\n";
        }
    for (CellId c = 0; c < mesh.num_cells(); ++c) {
        const CellCut& cc = cuts.cell(c);
        if (cc.polyline.empty())
            continue;
        os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
        for (const Point& p : cc.polyline)
            os << fmt_num(p.x() * scale) << ',' << fmt_num((1.0 - p.y()) * scale) << ' ';
        os << "\"/>\n";
    }
    os << "</svg>\n";
}

} // namespace uhho
