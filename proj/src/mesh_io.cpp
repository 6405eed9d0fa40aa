#include "afem/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "afem/errors.hpp"

namespace afem {
namespace {

void expect_word(std::istream& in, const std::string& word) {
  std::string w;
  if (!(in >> w) || w != word) throw InputError("mesh file: expected '" + word + "'");
}

std::size_t read_count(std::istream& in, const std::string& section) {
  expect_word(in, section);
  long long n = -1;
  if (!(in >> n) || n < 0) throw InputError("mesh file: bad count for '" + section + "'");
  return static_cast<std::size_t>(n);
}

}  // namespace

Mesh read_mesh(std::istream& in) {
  std::string magic, version;
  if (!(in >> magic >> version) || magic != "afem2d-mesh" || version != "v1") {
    throw InputError("mesh file: missing 'afem2d-mesh v1' header");
  }
  const std::size_t nv = read_count(in, "vertices");
  std::vector<Point> vertices(nv);
  for (auto& p : vertices) {
    if (!(in >> p.x >> p.y)) throw InputError("mesh file: truncated vertex list");
  }
  const std::size_t nt = read_count(in, "triangles");
  std::vector<std::array<int, 3>> tris(nt);
  for (auto& t : tris) {
    if (!(in >> t[0] >> t[1] >> t[2])) throw InputError("mesh file: truncated triangle list");
  }
  const std::size_t nb = read_count(in, "boundary");
  std::vector<BoundarySegment> boundary(nb);
  for (auto& s : boundary) {
    std::string kind;
    if (!(in >> s.a >> s.b >> kind)) throw InputError("mesh file: truncated boundary list");
    if (kind == "D") {
      s.kind = EdgeKind::dirichlet;
    } else if (kind == "N") {
      s.kind = EdgeKind::neumann;
    } else {
      throw InputError("mesh file: boundary kind must be D or N, got '" + kind + "'");
    }
  }
  try {
    return Mesh::from_triangles(std::move(vertices), tris, boundary, ReferenceEdgeRule::as_given);
  } catch (const MeshError& e) {
    throw InputError(std::string("mesh file: ") + e.what());
  }
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  std::ostringstream s;
  s << std::setprecision(std::numeric_limits<double>::max_digits10);
  s << "afem2d-mesh v1\n";
  s << "vertices " << mesh.n_vertices() << '\n';
  for (const Point& p : mesh.vertices()) s << p.x << ' ' << p.y << '\n';
  s << "triangles " << mesh.n_triangles() << '\n';
  for (const auto& t : mesh.triangles()) s << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << '\n';
  std::size_t nb = 0;
  for (const auto& e : mesh.edges()) nb += e.is_boundary() ? 1 : 0;
  s << "boundary " << nb << '\n';
  for (const auto& e : mesh.edges()) {
    if (e.is_boundary()) s << e.v[0] << ' ' << e.v[1] << ' ' << to_string(e.kind) << '\n';
  }
  out << s.str();
}

void write_mesh_file(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write mesh file '" + path + "'");
  write_mesh(out, mesh);
}

}  // namespace afem
