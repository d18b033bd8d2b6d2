// Command-line driver: single solves and parameter studies, CSV on stdout or --out.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "uhho/kernels.hpp"
#include "uhho/study.hpp"

namespace {

using namespace uhho;

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        out.push_back(item);
    return out;
}

int to_int(const std::string& s)
{
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size())
        throw ConfigError("not an integer: '" + s + "'");
    return v;
}

double to_double(const std::string& s)
{
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size())
        throw ConfigError("not a number: '" + s + "'");
    return v;
}

/// "a..b" or "a,b,c".
std::vector<int> int_list(const std::string& spec)
{
    std::vector<int> out;
    for (const auto& part : split(spec, ',')) {
        const auto dots = part.find("..");
        if (dots == std::string::npos) {
            out.push_back(to_int(part));
            continue;
        }
        const int lo = to_int(part.substr(0, dots));
        const int hi = to_int(part.substr(dots + 2));
        if (hi < lo)
            throw ConfigError("empty range '" + part + "'");
        for (int v = lo; v <= hi; ++v)
            out.push_back(v);
    }
    if (out.empty())
        throw ConfigError("empty list");
    return out;
}

std::vector<double> double_list(const std::string& spec)
{
    std::vector<double> out;
    for (const auto& part : split(spec, ','))
        out.push_back(to_double(part));
    if (out.empty())
        throw ConfigError("empty list");
    return out;
}

/// Conditioning sweeps: "p=2..9" gives delta = 0.5e-p (square), "i=-4..4" gives R = 1/3 + i/32
/// (circle), anything else is a comma list of raw values.
std::vector<double> sweep_values(ConditioningInterface shape, const std::string& spec)
{
    std::vector<double> out;
    if (spec.rfind("p=", 0) == 0) {
        if (shape != ConditioningInterface::square)
            throw ConfigError("sweep p=... applies to the square interface");
        for (int p : int_list(spec.substr(2)))
            out.push_back(0.5 * std::pow(10.0, -p));
    } else if (spec.rfind("i=", 0) == 0) {
        if (shape != ConditioningInterface::circle)
            throw ConfigError("sweep i=... applies to the circle interface");
        for (int i : int_list(spec.substr(2)))
            out.push_back(1.0 / 3.0 + i / 32.0);
    } else {
        out = double_list(spec);
    }
    return out;
}

struct Common {
    std::optional<int> r;
    double theta = 0.3;
    double eta = 20.0;
    std::optional<double> kappa2;
    std::string out;
    bool deterministic = false;
    bool cond = false;
    std::string solver = "condensed";
    std::string face_scaling = "amplitude";
    std::string isa;

    void add(CLI::App& app, bool with_kappa = true)
    {
        app.add_option("--r", r, "interface subdivision exponent, 2^r segments per cut cell (default: case value)");
        app.add_option("--theta", theta, "ill-cut flagging parameter")->capture_default_str();
        app.add_option("--eta", eta, "extension stabilization weight")->capture_default_str();
        if (with_kappa)
            app.add_option("--kappa2", kappa2, "diffusivity in Omega_2 (kappa_1 = 1; default: case value)");
        app.add_option("--out", out, "CSV output file (default: stdout)");
        app.add_flag("--deterministic", deterministic, "leave wall_time_s empty for reproducible output");
        app.add_option("--solver", solver, "condensed or direct")->capture_default_str();
        app.add_option("--face-scaling", face_scaling, "plain or amplitude")->capture_default_str();
        app.add_option("--isa", isa, "force the inner-product kernels: scalar, avx2 or neon");
    }

    RunConfig config() const
    {
        RunConfig cfg;
        cfg.r = r;
        cfg.theta = theta;
        cfg.eta = eta;
        cfg.kappa2 = kappa2;
        cfg.condition = cond;
        if (solver == "condensed")
            cfg.solver = SolverKind::condensed;
        else if (solver == "direct")
            cfg.solver = SolverKind::direct;
        else
            throw ConfigError("unknown solver '" + solver + "'");
        if (face_scaling == "plain")
            cfg.face_scaling = FaceScaling::plain;
        else if (face_scaling == "amplitude")
            cfg.face_scaling = FaceScaling::amplitude;
        else
            throw ConfigError("unknown face scaling '" + face_scaling + "'");
        return cfg;
    }

    void apply_isa() const
    {
        if (isa.empty())
            return;
        if (isa == "scalar")
            kernels::force_isa(kernels::Isa::scalar);
        else if (isa == "avx2")
            kernels::force_isa(kernels::Isa::avx2);
        else if (isa == "neon")
            kernels::force_isa(kernels::Isa::neon);
        else
            throw ConfigError("unknown isa '" + isa + "'");
    }

    /// Returns false if any row failed.
    bool write(const std::vector<StudyRow>& rows) const
    {
        bool ok = true;
        for (const auto& row : rows)
            if (!row.error.empty()) {
                std::cerr << "error: " << row.case_name << " k=" << row.k << " level=" << row.level << ": "
                          << row.error << '\n';
                ok = false;
            }
        if (out.empty()) {
            write_csv(std::cout, rows, deterministic);
        } else {
            std::ofstream os(out);
            if (!os)
                throw ConfigError("cannot write " + out);
            write_csv(os, rows, deterministic);
        }
        return ok;
    }
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Unfitted HHO solver for 2D elliptic interface problems on (0,1)^2.\n"
                 "Boundary faces carry the L2 projection of the exact trace of the selected case, so cases\n"
                 "with nonzero boundary values are imposed strongly through that trace."};
    app.require_subcommand(1);

    std::string known_cases;
    for (const auto& n : case_names())
        known_cases += (known_cases.empty() ? "" : ", ") + n;

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "solve one case and print one CSV row");
    Common solve_opts;
    std::string solve_case;
    int solve_k = 1;
    int solve_level = 0;
    std::string dump, export_mtx;
    solve_cmd->add_option("--case", solve_case, "case name: " + known_cases)->required();
    solve_cmd->add_option("--k", solve_k, "face polynomial degree")->required();
    solve_cmd->add_option("--level", solve_level, "mesh level, 10*2^level cells per direction")->required();
    solve_cmd->add_option("--dump-cuts", dump, "write the cut topology (.svg, else CSV)");
    solve_cmd->add_option("--export-matrix", export_mtx, "write the reduced stiffness matrix (Matrix Market)");
    solve_cmd->add_flag("--cond", solve_opts.cond, "also compute the condition number (dense)");
    solve_opts.add(*solve_cmd);

    auto* study = app.add_subcommand("study", "parameter studies");
    study->require_subcommand(1);

    auto* conv = study->add_subcommand("convergence", "errors and rates over mesh levels");
    Common conv_opts;
    std::string conv_case, conv_k = "0..3", conv_levels = "0..4";
    conv->add_option("--case", conv_case, "case name: " + known_cases)->required();
    conv->add_option("--k", conv_k, "degrees, e.g. 0..3 or 1,2")->capture_default_str();
    conv->add_option("--levels", conv_levels, "levels, e.g. 0..4")->capture_default_str();
    conv->add_flag("--cond", conv_opts.cond, "also compute condition numbers (dense)");
    conv_opts.add(*conv);

    auto* theta = study->add_subcommand("theta", "convergence curves for several flagging parameters");
    Common theta_opts;
    std::string theta_case = "sinsin", theta_list = "0,0.1,0.2,0.3", theta_k = "3", theta_levels = "0..3";
    theta->add_option("--case", theta_case, "case name")->capture_default_str();
    theta->add_option("--theta", theta_list, "comma list of flagging parameters")->capture_default_str();
    theta->add_option("--k", theta_k, "degrees")->capture_default_str();
    theta->add_option("--levels", theta_levels, "levels")->capture_default_str();
    theta->add_option("--r", theta_opts.r, "interface subdivision exponent");
    theta->add_option("--eta", theta_opts.eta, "extension stabilization weight")->capture_default_str();
    theta->add_option("--kappa2", theta_opts.kappa2, "diffusivity in Omega_2");
    theta->add_option("--out", theta_opts.out, "CSV output file");
    theta->add_flag("--deterministic", theta_opts.deterministic, "leave wall_time_s empty");
    theta->add_option("--solver", theta_opts.solver, "condensed or direct")->capture_default_str();
    theta->add_option("--face-scaling", theta_opts.face_scaling, "plain or amplitude")->capture_default_str();
    theta->add_option("--isa", theta_opts.isa, "scalar, avx2 or neon");

    auto* contrast = study->add_subcommand("contrast", "errors at one level for kappa2 = 10^m");
    Common contrast_opts;
    std::string contrast_case = "sol_circle_contrast", contrast_m = "0..4", contrast_k = "0..3";
    int contrast_level = 2;
    contrast->add_option("--case", contrast_case, "case name")->capture_default_str();
    contrast->add_option("--m", contrast_m, "exponents m of kappa2 = 10^m")->capture_default_str();
    contrast->add_option("--k", contrast_k, "degrees")->capture_default_str();
    contrast->add_option("--level", contrast_level, "mesh level")->capture_default_str();
    contrast_opts.add(*contrast, false);

    auto* cond = study->add_subcommand("conditioning", "condition numbers on a coarse mesh");
    Common cond_opts;
    std::string cond_interface = "square", cond_sweep, cond_k = "0..3";
    int cond_level = 0;
    std::size_t cond_cap = 20000;
    cond->add_option("--interface", cond_interface, "circle or square")->capture_default_str();
    cond->add_option("--sweep", cond_sweep,
                     "p=2..9 (square, delta = 0.5e-p), i=-4..4 (circle, R = 1/3 + i/32), or a comma list of raw values");
    cond->add_option("--k", cond_k, "degrees")->capture_default_str();
    cond->add_option("--level", cond_level, "mesh level")->capture_default_str();
    cond->add_option("--max-dofs", cond_cap, "dense eigenvalue size cap")->capture_default_str();
    cond_opts.add(*cond, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    bool status = true;
    try {
        if (*solve_cmd) {
            solve_opts.apply_isa();
            RunConfig cfg = solve_opts.config();
            cfg.case_name = solve_case;
            cfg.k = solve_k;
            cfg.level = solve_level;
            cfg.dump_cuts = dump;
            cfg.export_matrix = export_mtx;
            status = solve_opts.write({run_single(cfg)});
        } else if (*conv) {
            conv_opts.apply_isa();
            RunConfig cfg = conv_opts.config();
            cfg.case_name = conv_case;
            status = conv_opts.write(run_convergence(cfg, int_list(conv_k), int_list(conv_levels)));
        } else if (*theta) {
            theta_opts.apply_isa();
            RunConfig cfg = theta_opts.config();
            cfg.case_name = theta_case;
            status = theta_opts.write(run_theta(cfg, double_list(theta_list), int_list(theta_k), int_list(theta_levels)));
        } else if (*contrast) {
            contrast_opts.apply_isa();
            RunConfig cfg = contrast_opts.config();
            cfg.case_name = contrast_case;
            cfg.level = contrast_level;
            std::vector<double> kappas;
            for (int m : int_list(contrast_m))
                kappas.push_back(std::pow(10.0, m));
            status = contrast_opts.write(run_contrast(cfg, kappas, int_list(contrast_k)));
        } else if (*cond) {
            cond_opts.apply_isa();
            RunConfig cfg = cond_opts.config();
            cfg.cond_cap = cond_cap;
            ConditioningInterface shape;
            if (cond_interface == "circle")
                shape = ConditioningInterface::circle;
            else if (cond_interface == "square")
                shape = ConditioningInterface::square;
            else
                throw ConfigError("unknown interface '" + cond_interface + "'");
            if (cond_sweep.empty())
                cond_sweep = shape == ConditioningInterface::square ? "p=2..9" : "i=-4..4";
            status = cond_opts.write(run_conditioning(shape, sweep_values(shape, cond_sweep), int_list(cond_k), cond_level, cfg));
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return status ? 0 : 3;
}
