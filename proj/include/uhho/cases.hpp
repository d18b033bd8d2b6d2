#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uhho/hho_local.hpp"
#include "uhho/level_set.hpp"

namespace uhho {

using SidedGradient = std::function<Vector2(const Point&, Side)>;

/// Manufactured interface problem: -div(kappa_i grad u_i) = f_i in Omega_i,
/// [u] = g_D and [kappa grad u] . n_Gamma = g_N on Gamma, u = u_i on the boundary.
struct CaseDefinition {
    std::string name;
    std::string interface;
    LevelSetPtr level_set;
    std::array<double, 2> kappa{1.0, 1.0};
    SidedField u;
    SidedGradient grad_u;
    SidedField f;
    ScalarField g_d;
    ScalarField g_n;
    int default_r = 8;
    bool boundary_contact = false;
    /// True when the registered sides were swapped to keep kappa_1 <= kappa_2.
    bool relabeled = false;

    ProblemData data() const;
};

struct CaseParams {
    /// Overrides the case's kappa_2 (kappa_1 stays 1).
    std::optional<double> kappa2;
    /// Polynomial degree of the patch-test solution.
    int patch_degree = 2;
};

std::vector<std::string> case_names();

/// Builds a registered case. Throws ConfigError for an unknown name or a non-positive kappa.
/// If the requested kappa_2 is smaller than kappa_1 the subdomains are relabeled.
CaseDefinition make_case(const std::string& name, const CaseParams& params = {});

struct SelfCheck {
    double pde = 0.0;        ///< max |-kappa Lap_h u - f| / (1 + |f|)
    double dirichlet = 0.0;  ///< max |u_1 - u_2 - g_D| on Gamma
    double neumann = 0.0;    ///< max |(kappa_1 grad u_1 - kappa_2 grad u_2) . n - g_N| on Gamma
    double gradient = 0.0;   ///< max |grad_h u - grad u| / (1 + |grad u|)
    bool passed(double tol = 1e-6) const { return pde <= tol && dirichlet <= tol && neumann <= tol && gradient <= tol; }
};

/// Finite-difference consistency check of a case at `samples` pseudo-random points per side.
SelfCheck self_check(const CaseDefinition& c, int samples = 100, unsigned seed = 12345);

/// Runs self_check and throws ConfigError if it fails.
void require_consistent(const CaseDefinition& c);

} // namespace uhho
