#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uhho/cases.hpp"
#include "uhho/system.hpp"

namespace uhho {

/// sqrt(sum_i kappa_i ||grad(u_i - u_{T^i})||^2_{T^i}) over all sub-cells, from the cell unknowns in x.
double energy_error(const HhoSpace& space, const Vector& x, const SidedGradient& grad_u);

struct RunConfig {
    std::string case_name = "sinsin";
    int k = 1;
    int level = 0;
    std::optional<int> r;            ///< case default when unset
    double theta = 0.3;
    double eta = 20.0;
    std::optional<double> kappa2;    ///< case default when unset
    FaceScaling face_scaling = FaceScaling::amplitude;
    SolverKind solver = SolverKind::condensed;
    bool condition = false;          ///< also compute cond(A) of the reduced system
    std::size_t cond_cap = 20000;
    std::string dump_cuts;           ///< SVG or CSV path, empty to skip
    std::string export_matrix;       ///< Matrix Market path, empty to skip
};

/// One CSV row. Optional fields are written empty when unset.
struct StudyRow {
    std::string case_name;
    int k = 0;
    int level = 0;
    int r = 0;
    double theta = 0.0;
    double eta = 0.0;
    double kappa2 = 1.0;
    std::size_t ndofs = 0;
    std::optional<double> energy_error;
    std::optional<double> rate;
    std::optional<double> cond;
    std::optional<double> wall_time;
    std::string error;               ///< failure message of a row that did not complete
    double sweep = 0.0;              ///< conditioning sweep value, used only for ordering
};

/// Solves one configuration. Exceptions propagate.
StudyRow run_single(const RunConfig& cfg);

/// Rows for every (k, level); failed rows carry their error message. Rates are filled in.
std::vector<StudyRow> run_convergence(const RunConfig& base, const std::vector<int>& ks, const std::vector<int>& levels);

/// Convergence curves for each pairing parameter.
std::vector<StudyRow> run_theta(const RunConfig& base, const std::vector<double>& thetas, const std::vector<int>& ks,
                                const std::vector<int>& levels);

/// Errors at fixed level for each kappa_2.
std::vector<StudyRow> run_contrast(const RunConfig& base, const std::vector<double>& kappa2s, const std::vector<int>& ks);

enum class ConditioningInterface { circle, square };

/// Condition numbers of the reduced stiffness matrix at `level` for each sweep value:
/// radius for the circle, delta for the square.
std::vector<StudyRow> run_conditioning(ConditioningInterface shape, const std::vector<double>& sweep,
                                       const std::vector<int>& ks, int level = 0, const RunConfig& base = {});

/// Sorts rows by (sweep, case, r, theta, eta, kappa2, k, level) and fills rate = log2(e_l / e_{l+1})
/// between consecutive levels of the same curve.
void finalize(std::vector<StudyRow>& rows);

inline constexpr const char* csv_header = "case,k,level,r,theta,eta,kappa2,ndofs,energy_error,rate,cond,wall_time_s";

/// Writes header plus rows. With deterministic set, wall time is left empty.
void write_csv(std::ostream& os, const std::vector<StudyRow>& rows, bool deterministic = false);

/// Writes the cut topology: SVG when the path ends in .svg, otherwise CSV.
void dump_cuts(const CutMesh& cuts, const std::string& path);

} // namespace uhho
