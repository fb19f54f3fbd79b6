#include "gfem/export.hpp"

#include <cstdio>
#include <fstream>

namespace gfem {

namespace {

void write_file(const std::string& path, const std::string& content) {
    if (path.empty()) throw Error("export: empty output path");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("export: cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error("export: write to '" + path + "' failed");
}

} // namespace

std::string mesh_to_svg(const TriMesh& mesh) {
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const Point& p : mesh.nodes) {
        lo_x = std::min(lo_x, p.x);
        hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y);
        hi_y = std::max(hi_y, p.y);
    }
    const double w = hi_x - lo_x, h = hi_y - lo_y;
    const double pad = 0.05 * std::max(w, h);
    const double stroke = 0.002 * std::max(w, h);
    // SVG y runs downward; mirror into the viewBox
    auto flip = [&](double y) { return lo_y + hi_y - y; };

    std::string svg;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
                  "viewBox=\"%.9g %.9g %.9g %.9g\">\n",
                  lo_x - pad, lo_y - pad, w + 2 * pad, h + 2 * pad);
    svg += buf;

    for (const MeshEdge& e : build_edges(mesh)) {
        const Point a = mesh.nodes[std::size_t(e.a)];
        const Point b = mesh.nodes[std::size_t(e.b)];
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.9g\" y1=\"%.9g\" x2=\"%.9g\" y2=\"%.9g\" "
                      "stroke=\"black\" stroke-width=\"%.3g\"/>\n",
                      a.x, flip(a.y), b.x, flip(b.y), stroke);
        svg += buf;
    }
    if (mesh.polygon) {
        for (int pv : mesh.polygon->singular_vertices()) {
            const Point q = mesh.nodes[std::size_t(mesh.corner_nodes[std::size_t(pv)])];
            std::snprintf(buf, sizeof buf,
                          "<circle cx=\"%.9g\" cy=\"%.9g\" r=\"%.3g\" fill=\"red\"/>\n", q.x,
                          flip(q.y), 4.0 * stroke);
            svg += buf;
        }
    }
    svg += "</svg>\n";
    return svg;
}

void export_svg(const TriMesh& mesh, const std::string& path) {
    write_file(path, mesh_to_svg(mesh));
}

std::string to_vtk(const TriMesh& mesh, const FeFunction* solution) {
    if (solution && solution->values.size() != mesh.nodes.size())
        throw Error("to_vtk: solution size does not match the mesh");
    std::string out;
    char buf[160];
    out += "# vtk DataFile Version 3.0\n";
    out += "gradedfem mesh\n";
    out += "ASCII\n";
    out += "DATASET UNSTRUCTURED_GRID\n";
    std::snprintf(buf, sizeof buf, "POINTS %d double\n", mesh.node_count());
    out += buf;
    for (const Point& p : mesh.nodes) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", p.x, p.y);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "CELLS %d %d\n", mesh.triangle_count(),
                  4 * mesh.triangle_count());
    out += buf;
    for (const TriangleRecord& t : mesh.tris) {
        std::snprintf(buf, sizeof buf, "3 %d %d %d\n", t.v[0], t.v[1], t.v[2]);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "CELL_TYPES %d\n", mesh.triangle_count());
    out += buf;
    for (int t = 0; t < mesh.triangle_count(); ++t) out += "5\n";
    if (solution) {
        std::snprintf(buf, sizeof buf, "POINT_DATA %d\n", mesh.node_count());
        out += buf;
        out += "SCALARS u double 1\n";
        out += "LOOKUP_TABLE default\n";
        for (double v : solution->values) {
            std::snprintf(buf, sizeof buf, "%.17g\n", v);
            out += buf;
        }
    }
    return out;
}

void export_vtk(const TriMesh& mesh, const FeFunction* solution, const std::string& path) {
    write_file(path, to_vtk(mesh, solution));
}

} // namespace gfem
