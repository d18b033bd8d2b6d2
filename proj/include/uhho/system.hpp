#pragma once

#include <string>

#include <Eigen/Sparse>

#include "uhho/hho_local.hpp"

namespace uhho {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Assembled a_h and l_h on all unknowns, including the Dirichlet ones.
struct GlobalSystem {
    SparseMatrix A;
    Vector b;
    /// Boundary-face unknowns set to Pi^k of the Dirichlet trace; zero elsewhere.
    Vector dirichlet;
    std::vector<bool> mask;
};

/// System restricted to the free unknowns.
struct ReducedSystem {
    SparseMatrix A;
    Vector b;
    std::vector<std::size_t> free;   ///< full index of each reduced unknown
};

enum class SolverKind { condensed, direct };

GlobalSystem assemble(const HhoSpace& space, const ProblemData& data);

/// Row/column deletion of the masked unknowns with their values moved to the right-hand side.
ReducedSystem eliminate_dirichlet(const GlobalSystem& sys);

/// Face-wise L2 projection of the boundary trace onto the boundary face unknowns.
Vector dirichlet_values(const HhoSpace& space, const SidedField& trace);

/// Interpolate of u: L2 projections onto every sub-face and sub-cell. The projection for an
/// ill-cut sub-cell S^i is taken on S^i united with its partner's sub-cell.
Vector interpolate(const HhoSpace& space, const SidedField& u);

struct SolveReport {
    Vector x;           ///< full solution vector (Dirichlet values included)
    double residual = 0.0;        ///< ||Ax - b|| / ||b|| on the free unknowns
    double residual_floor = 0.0;  ///< eps || |A| |x| || / ||b||, the best a double-precision x can reach
    std::size_t free_dofs = 0;
    std::size_t groups = 0;
};

/// Direct sparse LDL^T solve of the reduced system, or static condensation onto the
/// face unknowns with one dense factorization per cell group, followed by iterative refinement.
/// Throws NumericalError ("solver breakdown") if the relative residual exceeds 1e-10, or ten
/// times the rounding floor when that floor is itself above 1e-10.
SolveReport solve(const HhoSpace& space, const GlobalSystem& sys, SolverKind kind = SolverKind::condensed);

/// max|lambda| / min|lambda| of a symmetric matrix via a dense eigenvalue solve.
/// Throws ConfigError above max_dofs.
double condition_number(const SparseMatrix& a, std::size_t max_dofs = 20000);
double condition_number(const Matrix& a);

/// Matrix Market export (general coordinate real).
void export_matrix_market(const SparseMatrix& a, const std::string& path);

} // namespace uhho
