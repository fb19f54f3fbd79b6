// Batch driver: convergence studies, mesh generation/export, mesh validation.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "gfem/export.hpp"
#include "gfem/refine.hpp"
#include "gfem/study.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw gfem::Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_solver_stats(const gfem::StudyReport& report) {
    std::printf("%3s %8s %14s %14s %14s\n", "j", "cg_iter", "cg_res", "cg_true_res",
                "galerkin_max");
    for (const auto& r : report.rows)
        std::printf("%3d %8d %14.4e %14.4e %14.4e\n", r.level, r.cg_iterations,
                    r.cg_rel_residual, r.cg_true_rel_residual, r.galerkin_residual_max);
}

void print_report(const gfem::StudyReport& report) {
    std::printf("%3s %10s %10s %13s %8s %13s %8s", "j", "nodes", "triangles", "H1_err", "H1_rate",
                "L2_err", "L2_rate");
    if (report.has_exact) std::printf(" %13s %8s %13s %8s", "H1_exact", "rate", "L2_exact", "rate");
    std::printf("\n");
    auto cell_err = [](double v) {
        if (std::isnan(v)) return std::string("-");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6e", v);
        return std::string(buf);
    };
    auto cell_rate = [](double v) {
        if (std::isnan(v)) return std::string("-");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", v);
        return std::string(buf);
    };
    for (const auto& r : report.rows) {
        std::printf("%3d %10ld %10ld %13s %8s %13s %8s", r.level, r.nodes, r.triangles,
                    cell_err(r.h1_err).c_str(), cell_rate(r.h1_rate).c_str(),
                    cell_err(r.l2_err).c_str(), cell_rate(r.l2_rate).c_str());
        if (report.has_exact)
            std::printf(" %13s %8s %13s %8s", cell_err(r.h1_err_exact).c_str(),
                        cell_rate(r.h1_rate_exact).c_str(), cell_err(r.l2_err_exact).c_str(),
                        cell_rate(r.l2_rate_exact).c_str());
        std::printf("\n");
    }
    std::printf("expected rates: H1 %.4f, L2 %.4f\n", report.expected_h1_rate,
                report.expected_l2_rate);
}

int cmd_study(const std::string& config_path, bool verbose) {
    const gfem::StudyConfig cfg = gfem::parse_study_config(read_file(config_path));
    const gfem::StudyReport report = gfem::run_study(cfg);
    print_report(report);
    if (verbose) print_solver_stats(report);
    if (!cfg.outputs.csv.empty()) std::printf("wrote %s\n", cfg.outputs.csv.c_str());
    return 0;
}

int cmd_mesh(const std::string& domain, int refine_n, double kappa, const std::string& svg,
             const std::string& vtk, const std::string& out) {
    const gfem::PolygonDomain poly = gfem::named_domain(domain);
    const gfem::GradingSpec grading = gfem::GradingSpec::from_kappa(poly, kappa);
    gfem::MeshPtr mesh = gfem::triangulate_initial(poly);
    for (int i = 0; i < refine_n; ++i) mesh = gfem::refine(mesh, grading);
    std::printf("%s: level %d, %d nodes, %d triangles\n", domain.c_str(), mesh->level,
                mesh->node_count(), mesh->triangle_count());
    if (!svg.empty()) {
        gfem::export_svg(*mesh, svg);
        std::printf("wrote %s\n", svg.c_str());
    }
    if (!vtk.empty()) {
        gfem::export_vtk(*mesh, nullptr, vtk);
        std::printf("wrote %s\n", vtk.c_str());
    }
    if (!out.empty()) {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw gfem::Error("cannot open '" + out + "'");
        f << gfem::save_mesh(*mesh);
        std::printf("wrote %s\n", out.c_str());
    }
    return 0;
}

int cmd_validate(const std::string& path) {
    const gfem::MeshPtr mesh = gfem::load_mesh(read_file(path));
    const gfem::ValidationReport rep = gfem::validate(*mesh);
    std::printf("%s: %d nodes, %d triangles\n", path.c_str(), mesh->node_count(),
                mesh->triangle_count());
    std::printf("%s\n", rep.str().c_str());
    return rep.ok() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D P1 finite elements with graded mesh refinement at re-entrant corners"};
    app.require_subcommand(1);

    std::string config_path;
    bool verbose = false;
    CLI::App* study = app.add_subcommand("study", "run a convergence study from a JSON config");
    study->add_option("config", config_path, "study config (JSON)")->required();
    study->add_flag("-v,--verbose", verbose, "print per-level solver statistics");

    std::string domain = "square", svg, vtk, out;
    int refine_n = 0;
    double kappa = 0.5;
    CLI::App* mesh = app.add_subcommand("mesh", "generate and export a (graded) mesh");
    mesh->add_option("--domain", domain, "square | lshape | octagon | plus");
    mesh->add_option("--refine", refine_n, "number of refinements")->check(CLI::Range(0, 14));
    mesh->add_option("--kappa", kappa, "grading parameter in (0, 1/2]");
    mesh->add_option("--svg", svg, "write an SVG rendering");
    mesh->add_option("--vtk", vtk, "write a legacy VTK file");
    mesh->add_option("--out", out, "write the plain-text mesh");

    std::string mesh_path;
    CLI::App* val = app.add_subcommand("validate", "validate a plain-text mesh file");
    val->add_option("file", mesh_path, "mesh file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (study->parsed()) return cmd_study(config_path, verbose);
        if (mesh->parsed()) return cmd_mesh(domain, refine_n, kappa, svg, vtk, out);
        if (val->parsed()) return cmd_validate(mesh_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
