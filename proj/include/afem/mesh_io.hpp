#pragma once

// Plain-text mesh format:
//
//   afem2d-mesh v1
//   vertices N
//   x y                  (N lines)
//   triangles M
//   v0 v1 v2             (M lines, reference edge = (v0, v1))
//   boundary K
//   va vb D|N            (K lines)

#include <iosfwd>
#include <string>

#include "afem/mesh.hpp"

namespace afem {

/// Reads a mesh; the reference edge of every triangle is taken from the file.
Mesh read_mesh(std::istream& in);
Mesh read_mesh_file(const std::string& path);

void write_mesh(std::ostream& out, const Mesh& mesh);
void write_mesh_file(const std::string& path, const Mesh& mesh);

}  // namespace afem
