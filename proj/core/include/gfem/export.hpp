#ifndef GFEM_EXPORT_HPP
#define GFEM_EXPORT_HPP

#include <string>

#include "gfem/assembly.hpp"

namespace gfem {

/// SVG with one <line> per mesh edge and a marker circle on every singular
/// vertex.
std::string mesh_to_svg(const TriMesh& mesh);
void export_svg(const TriMesh& mesh, const std::string& path);

/// Legacy ASCII VTK UNSTRUCTURED_GRID; when a solution is given it is
/// attached as POINT_DATA scalar "u".
std::string to_vtk(const TriMesh& mesh, const FeFunction* solution);
void export_vtk(const TriMesh& mesh, const FeFunction* solution, const std::string& path);

} // namespace gfem

#endif
