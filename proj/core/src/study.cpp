#include "gfem/study.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "json.hpp"

#include "gfem/export.hpp"
#include "gfem/refine.hpp"

namespace gfem {

using nlohmann::json;

PolygonDomain named_domain(const std::string& name) {
    if (name == "square")
        return PolygonDomain({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    if (name == "lshape")
        return PolygonDomain({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
    if (name == "octagon") {
        std::vector<Point> v;
        for (int k = 0; k < 8; ++k) {
            const double t = 2.0 * std::numbers::pi * k / 8.0;
            v.push_back({std::cos(t), std::sin(t)});
        }
        return PolygonDomain(v);
    }
    if (name == "plus")
        return PolygonDomain({{1, 0}, {2, 0}, {2, 1}, {3, 1}, {3, 2}, {2, 2},
                              {2, 3}, {1, 3}, {1, 2}, {0, 2}, {0, 1}, {1, 1}});
    throw Error("unknown domain '" + name + "' (available: square, lshape, octagon, plus)");
}

namespace {

[[noreturn]] void fail_at(const std::string& path, const std::string& msg) {
    throw Error("config error at " + path + ": " + msg);
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail_at(path, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail_at(path, "expected an integer");
    return j.get<int>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail_at(path, "expected a string");
    return j.get<std::string>();
}

expr::Expr parse_expr_field(const json& j, const std::string& path) {
    const std::string src = as_string(j, path);
    try {
        return expr::parse(src);
    } catch (const expr::ParseError& e) {
        fail_at(path, e.what());
    }
}

std::map<int, double> as_index_map(const json& j, const std::string& path) {
    if (!j.is_object()) fail_at(path, "expected an object keyed by vertex index");
    std::map<int, double> out;
    for (const auto& [key, value] : j.items()) {
        int idx = -1;
        try {
            idx = std::stoi(key);
        } catch (...) {
            fail_at(path + "." + key, "key must be a vertex index");
        }
        out[idx] = as_number(value, path + "." + key);
    }
    return out;
}

PolygonDomain polygon_from_json(const json& j, const std::string& path) {
    if (j.is_string()) return named_domain(as_string(j, path));
    if (!j.is_object()) fail_at(path, "expected a domain name or {\"vertices\": [[x,y],...]}");
    if (!j.contains("vertices")) fail_at(path, "missing \"vertices\"");
    const json& jv = j.at("vertices");
    if (!jv.is_array() || jv.size() < 3) fail_at(path + ".vertices", "expected >= 3 [x,y] pairs");
    std::vector<Point> pts;
    for (std::size_t i = 0; i < jv.size(); ++i) {
        const std::string p = path + ".vertices[" + std::to_string(i) + "]";
        const json& e = jv[i];
        if (!e.is_array() || e.size() != 2) fail_at(p, "expected [x, y]");
        pts.push_back({as_number(e[0], p + "[0]"), as_number(e[1], p + "[1]")});
    }
    try {
        return PolygonDomain(std::move(pts));
    } catch (const Error& e) {
        fail_at(path, e.what());
    }
}

GradingSpec grading_from_json(const PolygonDomain& poly, const json& j, const std::string& path) {
    const bool has_kappa = j.contains("kappa");
    const bool has_theta = j.contains("theta") || j.contains("a");
    if (has_kappa && has_theta) fail_at(path, "give either \"kappa\" or \"theta\"/\"a\", not both");
    try {
        if (has_kappa) {
            const json& jk = j.at("kappa");
            if (jk.is_number()) return GradingSpec::from_kappa(poly, jk.get<double>());
            return GradingSpec::from_kappa_map(poly, as_index_map(jk, path + ".kappa"));
        }
        if (has_theta) {
            if (!j.contains("theta")) fail_at(path, "\"a\" requires \"theta\"");
            if (!j.contains("a")) fail_at(path, "\"theta\" requires \"a\"");
            return GradingSpec::from_theta_a(poly, as_number(j.at("theta"), path + ".theta"),
                                             as_index_map(j.at("a"), path + ".a"));
        }
        return GradingSpec::uniform(poly);
    } catch (const Error& e) {
        fail_at(path, e.what());
    }
}

bool defined(double v) { return !std::isnan(v); }

std::string fmt_err(double v) {
    if (!defined(v)) return "-";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

std::string fmt_rate(double v) {
    if (!defined(v)) return "-";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

} // namespace

StudyConfig parse_study_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error("config error at $: expected an object");

    StudyConfig cfg;
    if (!j.contains("polygon")) fail_at("$", "missing \"polygon\"");
    cfg.polygon = std::make_shared<PolygonDomain>(polygon_from_json(j.at("polygon"), "polygon"));

    // grading: top level wins over polygon.grading; default uniform
    if (j.contains("kappa") || j.contains("theta") || j.contains("a")) {
        cfg.grading = grading_from_json(*cfg.polygon, j, "$");
    } else if (j.at("polygon").is_object() && j.at("polygon").contains("grading")) {
        cfg.grading =
            grading_from_json(*cfg.polygon, j.at("polygon").at("grading"), "polygon.grading");
    } else {
        cfg.grading = GradingSpec::uniform(*cfg.polygon);
    }

    if (!j.contains("f")) fail_at("$", "missing \"f\"");
    cfg.f = parse_expr_field(j.at("f"), "f");

    if (!j.contains("levels")) fail_at("$", "missing \"levels\"");
    cfg.levels = as_int(j.at("levels"), "levels");
    if (cfg.levels < 1 || cfg.levels > 14) fail_at("levels", "expected 1 <= levels <= 14");

    if (j.contains("exact")) {
        const json& je = j.at("exact");
        if (!je.is_object()) fail_at("exact", "expected an object");
        for (const char* k : {"u", "du_dx", "du_dy"})
            if (!je.contains(k)) fail_at("exact", std::string("missing \"") + k + "\"");
        cfg.exact = ExactSolution{parse_expr_field(je.at("u"), "exact.u"),
                                  parse_expr_field(je.at("du_dx"), "exact.du_dx"),
                                  parse_expr_field(je.at("du_dy"), "exact.du_dy")};
    }

    if (j.contains("quad_order")) {
        cfg.quad_order = as_int(j.at("quad_order"), "quad_order");
        if (cfg.quad_order < 1 || cfg.quad_order > 3) fail_at("quad_order", "expected 1, 2 or 3");
    }
    if (j.contains("solver")) {
        const json& js = j.at("solver");
        if (!js.is_object()) fail_at("solver", "expected an object");
        if (js.contains("rel_tol")) {
            cfg.rel_tol = as_number(js.at("rel_tol"), "solver.rel_tol");
            if (!(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0))
                fail_at("solver.rel_tol", "expected a value in (0,1)");
        }
        if (js.contains("max_iter")) cfg.max_iter = as_int(js.at("max_iter"), "solver.max_iter");
    }
    if (j.contains("outputs")) {
        const json& jo = j.at("outputs");
        if (!jo.is_object()) fail_at("outputs", "expected an object");
        if (jo.contains("csv")) cfg.outputs.csv = as_string(jo.at("csv"), "outputs.csv");
        if (jo.contains("svg_levels")) {
            const json& jl = jo.at("svg_levels");
            if (!jl.is_array()) fail_at("outputs.svg_levels", "expected an array of levels");
            for (std::size_t i = 0; i < jl.size(); ++i)
                cfg.outputs.svg_levels.push_back(
                    as_int(jl[i], "outputs.svg_levels[" + std::to_string(i) + "]"));
        }
        if (jo.contains("svg_prefix"))
            cfg.outputs.svg_prefix = as_string(jo.at("svg_prefix"), "outputs.svg_prefix");
        if (jo.contains("vtk_level"))
            cfg.outputs.vtk_level = as_int(jo.at("vtk_level"), "outputs.vtk_level");
        if (jo.contains("vtk")) cfg.outputs.vtk = as_string(jo.at("vtk"), "outputs.vtk");
    }
    return cfg;
}

StudyReport run_study(const StudyConfig& config) {
    if (!config.polygon) throw Error("run_study: no polygon");
    StudyReport report;
    report.has_exact = config.exact.has_value();
    report.expected_h1_rate = expected_theta_prime(*config.polygon, config.grading);
    report.expected_l2_rate =
        std::min(2.0 * report.expected_h1_rate, report.expected_h1_rate + 1.0);

    PoissonOptions popt;
    popt.quad_order = config.quad_order;
    popt.cg.rel_tol = config.rel_tol;
    popt.cg.max_iter = config.max_iter;

    auto wants_svg = [&](int level) {
        for (int l : config.outputs.svg_levels)
            if (l == level) return true;
        return false;
    };

    MeshPtr mesh;
    std::optional<FeFunction> prev_u;
    std::optional<FeFunction> u;

    report.rows.resize(std::size_t(config.levels) + 1);
    for (int j = 0; j <= config.levels; ++j) {
        try {
            mesh = (j == 0) ? triangulate_initial(*config.polygon)
                            : refine(mesh, config.grading); // validates its input
        } catch (const Error& e) {
            throw Error("level " + std::to_string(j) + ": " + e.what());
        }
        StudyLevelRow& row = report.rows[std::size_t(j)];
        row.level = j;
        row.nodes = mesh->node_count();
        row.triangles = mesh->triangle_count();
        row.h = mesh_size_param(j);

        bool solvable = false;
        for (std::uint8_t b : mesh->node_boundary)
            if (!b) {
                solvable = true;
                break;
            }
        if (solvable) {
            std::optional<FeFunction> lifted;
            if (prev_u) lifted = prolongate(*prev_u, mesh);
            PoissonOptions level_opt = popt;
            level_opt.initial_guess = lifted ? &*lifted : nullptr;
            PoissonResult solved;
            try {
                solved = solve_poisson(mesh, config.f, level_opt);
            } catch (const Error& e) {
                throw Error("level " + std::to_string(j) + ": " + e.what());
            }
            u = std::move(solved.u);
            row.cg_iterations = solved.cg_iterations;
            row.cg_rel_residual = solved.cg_rel_residual;
            row.cg_true_rel_residual = solved.cg_true_rel_residual;
            row.galerkin_residual_max = solved.galerkin_residual_max;
            row.load_norm = solved.load_norm;

            if (lifted) {
                FeFunction diff;
                diff.mesh = mesh;
                diff.values.resize(u->values.size());
                for (std::size_t i = 0; i < diff.values.size(); ++i)
                    diff.values[i] = u->values[i] - lifted->values[i];
                row.h1_err = h1_seminorm(diff);
                row.l2_err = l2_norm(diff);
            }
            if (config.exact) {
                const ErrorPair e = error_vs_exact(*u, config.exact->u, config.exact->du_dx,
                                                   config.exact->du_dy, 3);
                row.h1_err_exact = e.h1;
                row.l2_err_exact = e.l2;
            }
        }

        if (wants_svg(j))
            export_svg(*mesh, config.outputs.svg_prefix + std::to_string(j) + ".svg");
        if (config.outputs.vtk_level && *config.outputs.vtk_level == j)
            export_vtk(*mesh, (solvable && u) ? &*u : nullptr, config.outputs.vtk);

        prev_u = std::move(u);
        u.reset();
    }

    // final conformity check on the finest mesh (coarser levels were
    // validated as refine inputs)
    {
        const ValidationReport rep = validate(*mesh);
        if (!rep.ok())
            throw Error("level " + std::to_string(config.levels) +
                        ": validation failed: " + rep.str());
    }

    for (std::size_t j = 1; j < report.rows.size(); ++j) {
        StudyLevelRow& cur = report.rows[j];
        const StudyLevelRow& prev = report.rows[j - 1];
        if (defined(cur.h1_err) && defined(prev.h1_err))
            cur.h1_rate = std::log2(prev.h1_err / cur.h1_err);
        if (defined(cur.l2_err) && defined(prev.l2_err))
            cur.l2_rate = std::log2(prev.l2_err / cur.l2_err);
        if (defined(cur.h1_err_exact) && defined(prev.h1_err_exact))
            cur.h1_rate_exact = std::log2(prev.h1_err_exact / cur.h1_err_exact);
        if (defined(cur.l2_err_exact) && defined(prev.l2_err_exact))
            cur.l2_rate_exact = std::log2(prev.l2_err_exact / cur.l2_err_exact);
    }

    if (!config.outputs.csv.empty()) {
        std::ofstream out(config.outputs.csv, std::ios::binary);
        if (!out) throw Error("cannot open '" + config.outputs.csv + "' for writing");
        out << report_to_csv(report);
        if (!out) throw Error("write to '" + config.outputs.csv + "' failed");
    }
    return report;
}

std::string report_to_csv(const StudyReport& report) {
    std::string csv = "j,nodes,triangles,h1_err,h1_rate,l2_err,l2_rate";
    if (report.has_exact) csv += ",h1_err_exact,h1_rate_exact,l2_err_exact,l2_rate_exact";
    csv += "\n";
    for (const StudyLevelRow& r : report.rows) {
        csv += std::to_string(r.level) + "," + std::to_string(r.nodes) + "," +
               std::to_string(r.triangles) + "," + fmt_err(r.h1_err) + "," +
               fmt_rate(r.h1_rate) + "," + fmt_err(r.l2_err) + "," + fmt_rate(r.l2_rate);
        if (report.has_exact)
            csv += "," + fmt_err(r.h1_err_exact) + "," + fmt_rate(r.h1_rate_exact) + "," +
                   fmt_err(r.l2_err_exact) + "," + fmt_rate(r.l2_rate_exact);
        csv += "\n";
    }
    return csv;
}

} // namespace gfem
