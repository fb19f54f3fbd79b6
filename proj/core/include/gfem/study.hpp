#ifndef GFEM_STUDY_HPP
#define GFEM_STUDY_HPP

#include <optional>
#include <string>

#include "gfem/norms.hpp"
#include "gfem/solver.hpp"

namespace gfem {

/// Built-in domains: "square", "lshape", "octagon", "plus".
PolygonDomain named_domain(const std::string& name);

struct ExactSolution {
    expr::Expr u, du_dx, du_dy;
};

struct StudyOutputs {
    std::string csv;             // empty = no CSV file
    std::vector<int> svg_levels; // one SVG per listed level
    std::string svg_prefix = "mesh_";
    std::optional<int> vtk_level;
    std::string vtk = "solution.vtk";
};

struct StudyConfig {
    std::shared_ptr<const PolygonDomain> polygon;
    GradingSpec grading;
    expr::Expr f;
    int levels = 3;
    std::optional<ExactSolution> exact;
    int quad_order = 2;
    double rel_tol = 1e-12;
    int max_iter = 0; // 0 = automatic
    StudyOutputs outputs;
};

/// Parse the JSON study config; schema violations are reported with the
/// offending JSON path.
StudyConfig parse_study_config(const std::string& json_text);

/// Refine/solve/measure loop over levels 0..J; writes the configured CSV,
/// SVG and VTK artifacts. Deterministic: identical configs give
/// byte-identical CSV output.
StudyReport run_study(const StudyConfig& config);

/// CSV form of a report: errors in scientific notation, rates with 4
/// decimals, '-' for undefined cells.
std::string report_to_csv(const StudyReport& report);

} // namespace gfem

#endif
