#include "insulopt/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace insulopt {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Minimal union-find over node ids.
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

double signed_area2(const std::array<double, 2>& a, const std::array<double, 2>& b,
                    const std::array<double, 2>& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
}

std::pair<int, int> sorted_edge(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

void Mesh::finalize() {
  const int n = node_count();
  if (dim != 1 && dim != 2)
    throw MeshValidationError("unsupported dimension " + std::to_string(dim),
                              MeshValidationError::Target::Global, -1);
  if (n == 0 || elements.empty())
    throw MeshValidationError("empty mesh", MeshValidationError::Target::Global, -1);

  const int nodes_per_element = dim + 1;
  for (int e = 0; e < element_count(); ++e) {
    for (int k = 0; k < nodes_per_element; ++k) {
      const int v = elements[e][k];
      if (v < 0 || v >= n)
        throw MeshValidationError("element node index out of range",
                                  MeshValidationError::Target::Element, e);
    }
  }

  // Consistent orientation: positive length (1d) / positive signed area (2d).
  double coord_scale = 0.0;
  for (const auto& p : nodes) coord_scale = std::max({coord_scale, std::abs(p[0]), std::abs(p[1])});
  if (coord_scale == 0.0) coord_scale = 1.0;
  for (int e = 0; e < element_count(); ++e) {
    auto& el = elements[e];
    if (dim == 1) {
      const double len = nodes[el[1]][0] - nodes[el[0]][0];
      if (std::abs(len) <= 1e-15 * coord_scale)
        throw MeshValidationError("degenerate element", MeshValidationError::Target::Element, e);
      if (len < 0.0) std::swap(el[0], el[1]);
    } else {
      const double a2 = signed_area2(nodes[el[0]], nodes[el[1]], nodes[el[2]]);
      if (std::abs(a2) <= 1e-15 * coord_scale * coord_scale)
        throw MeshValidationError("degenerate element", MeshValidationError::Target::Element, e);
      if (a2 < 0.0) std::swap(el[1], el[2]);
    }
  }

  // Boundary facet node range and duplicate detection.
  std::set<std::pair<int, int>> listed;
  for (int f = 0; f < static_cast<int>(boundary.size()); ++f) {
    const auto& bf = boundary[f];
    const int needed = (dim == 1) ? 1 : 2;
    for (int k = 0; k < needed; ++k) {
      if (bf.nodes[k] < 0 || bf.nodes[k] >= n)
        throw MeshValidationError("node index out of range", MeshValidationError::Target::Facet, f);
    }
    const auto key = (dim == 1) ? std::pair<int, int>{bf.nodes[0], -1}
                                : sorted_edge(bf.nodes[0], bf.nodes[1]);
    if (!listed.insert(key).second)
      throw MeshValidationError("duplicate boundary facet", MeshValidationError::Target::Facet, f);
  }

  // The listed boundary must equal the topological boundary.
  if (dim == 1) {
    std::vector<int> incidence(n, 0);
    for (const auto& el : elements) {
      ++incidence[el[0]];
      ++incidence[el[1]];
    }
    for (int f = 0; f < static_cast<int>(boundary.size()); ++f) {
      if (incidence[boundary[f].nodes[0]] != 1)
        throw MeshValidationError("non-boundary facet", MeshValidationError::Target::Facet, f);
    }
    for (int v = 0; v < n; ++v) {
      if (incidence[v] == 1 && listed.count({v, -1}) == 0)
        throw MeshValidationError("boundary facet missing for endpoint node " + std::to_string(v),
                                  MeshValidationError::Target::Global, -1);
    }
  } else {
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& el : elements) {
      ++edge_count[sorted_edge(el[0], el[1])];
      ++edge_count[sorted_edge(el[1], el[2])];
      ++edge_count[sorted_edge(el[2], el[0])];
    }
    for (int f = 0; f < static_cast<int>(boundary.size()); ++f) {
      const auto it = edge_count.find(sorted_edge(boundary[f].nodes[0], boundary[f].nodes[1]));
      if (it == edge_count.end() || it->second != 1)
        throw MeshValidationError("non-boundary facet", MeshValidationError::Target::Facet, f);
    }
    for (const auto& [edge, count] : edge_count) {
      if (count > 2)
        throw MeshValidationError("non-manifold edge between nodes " + std::to_string(edge.first) +
                                      " and " + std::to_string(edge.second),
                                  MeshValidationError::Target::Global, -1);
      if (count == 1 && listed.count(edge) == 0)
        throw MeshValidationError("boundary facet missing for hull edge between nodes " +
                                      std::to_string(edge.first) + " and " +
                                      std::to_string(edge.second),
                                  MeshValidationError::Target::Global, -1);
    }
  }

  // Markers: distinct values, each forming a connected piece of the boundary,
  // no node shared between two markers.
  std::set<int> marker_set;
  for (const auto& bf : boundary) marker_set.insert(bf.marker);
  boundary_markers.assign(marker_set.begin(), marker_set.end());
  component_count = static_cast<int>(boundary_markers.size());

  {
    std::map<int, int> node_marker;
    for (int f = 0; f < static_cast<int>(boundary.size()); ++f) {
      const auto& bf = boundary[f];
      const int nn = (dim == 1) ? 1 : 2;
      for (int k = 0; k < nn; ++k) {
        auto [it, inserted] = node_marker.emplace(bf.nodes[k], bf.marker);
        if (!inserted && it->second != bf.marker)
          throw MeshValidationError("node shared by two boundary markers",
                                    MeshValidationError::Target::Facet, f);
      }
    }
    if (dim == 2) {
      UnionFind uf(n);
      for (const auto& bf : boundary) uf.unite(bf.nodes[0], bf.nodes[1]);
      std::map<int, std::set<int>> roots_per_marker;
      for (const auto& bf : boundary) roots_per_marker[bf.marker].insert(uf.find(bf.nodes[0]));
      for (const auto& [marker, roots] : roots_per_marker) {
        if (roots.size() > 1)
          throw MeshValidationError("marker " + std::to_string(marker) +
                                        " does not form a connected boundary component",
                                    MeshValidationError::Target::Global, -1);
      }
    } else {
      std::map<int, int> facets_per_marker;
      for (const auto& bf : boundary) ++facets_per_marker[bf.marker];
      for (const auto& [marker, cnt] : facets_per_marker) {
        if (cnt > 1)
          throw MeshValidationError("marker " + std::to_string(marker) +
                                        " does not form a connected boundary component",
                                    MeshValidationError::Target::Global, -1);
      }
    }
  }

  // Domain components via element connectivity.
  UnionFind uf(n);
  for (const auto& el : elements) {
    uf.unite(el[0], el[1]);
    if (dim == 2) uf.unite(el[0], el[2]);
  }
  node_component.assign(n, -1);
  std::map<int, int> root_to_component;
  for (int v = 0; v < n; ++v) {
    const int root = uf.find(v);
    auto [it, inserted] = root_to_component.emplace(root, static_cast<int>(root_to_component.size()));
    node_component[v] = it->second;
  }
  domain_component_count = static_cast<int>(root_to_component.size());
}

// Generators ------------------------------------------------------------

namespace {

Mesh make_interval(const IntervalSpec& s) {
  if (!(s.b > s.a) || s.cells < 1)
    throw InvalidSpecError("interval spec requires b > a and cells >= 1");
  Mesh mesh;
  mesh.dim = 1;
  mesh.nodes.resize(s.cells + 1);
  for (int i = 0; i <= s.cells; ++i) {
    const double t = static_cast<double>(i) / s.cells;
    mesh.nodes[i] = {s.a + (s.b - s.a) * t, 0.0};
  }
  for (int i = 0; i < s.cells; ++i) mesh.elements.push_back({i, i + 1, -1});
  mesh.boundary.push_back({{0, -1}, 1});
  mesh.boundary.push_back({{s.cells, -1}, 2});
  mesh.finalize();
  return mesh;
}

// Appends one disk into `mesh`; returns nothing. Ring j in 1..rings sits at
// radius R*j/rings and carries 8j nodes, which keeps the radial step and the
// angular step within a constant factor of each other on every ring.
void append_disk(Mesh& mesh, const DiskSpec& s) {
  if (s.radius <= 0.0 || s.rings < 1)
    throw InvalidSpecError("disk spec requires radius > 0 and rings >= 1");
  const int base = static_cast<int>(mesh.nodes.size());
  const int n = s.rings;

  std::vector<std::vector<int>> ring_ids(n + 1);
  ring_ids[0] = {base};
  mesh.nodes.push_back({s.center[0], s.center[1]});
  for (int j = 1; j <= n; ++j) {
    const double r = s.radius * static_cast<double>(j) / n;
    const int count = 8 * j;
    ring_ids[j].reserve(count);
    for (int i = 0; i < count; ++i) {
      const double theta = 2.0 * kPi * i / count;
      ring_ids[j].push_back(static_cast<int>(mesh.nodes.size()));
      mesh.nodes.push_back({s.center[0] + r * std::cos(theta), s.center[1] + r * std::sin(theta)});
    }
  }

  // Center fan.
  for (int i = 0; i < 8; ++i)
    mesh.elements.push_back({ring_ids[0][0], ring_ids[1][i], ring_ids[1][(i + 1) % 8]});

  // Annuli: merge the two rings by angle ("zipper" walk).
  for (int j = 1; j < n; ++j) {
    const auto& inner = ring_ids[j];
    const auto& outer = ring_ids[j + 1];
    const int a = static_cast<int>(inner.size());
    const int b = static_cast<int>(outer.size());
    int i = 0, k = 0;
    while (i < a || k < b) {
      const double next_inner =
          (i < a) ? 2.0 * kPi * (i + 1) / a : std::numeric_limits<double>::infinity();
      const double next_outer =
          (k < b) ? 2.0 * kPi * (k + 1) / b : std::numeric_limits<double>::infinity();
      if (next_outer <= next_inner) {
        mesh.elements.push_back({outer[k % b], outer[(k + 1) % b], inner[i % a]});
        ++k;
      } else {
        mesh.elements.push_back({inner[i % a], outer[k % b], inner[(i + 1) % a]});
        ++i;
      }
    }
  }

  const auto& rim = ring_ids[n];
  const int rim_count = static_cast<int>(rim.size());
  for (int i = 0; i < rim_count; ++i)
    mesh.boundary.push_back({{rim[i], rim[(i + 1) % rim_count]}, s.marker});
}

Mesh make_disk(const DiskSpec& s) {
  Mesh mesh;
  mesh.dim = 2;
  append_disk(mesh, s);
  mesh.finalize();
  return mesh;
}

Mesh make_two_disks(const TwoDisksSpec& s) {
  if (s.radius1 <= 0.0 || s.radius2 <= 0.0 || s.rings < 1)
    throw InvalidSpecError("two-disk spec requires positive radii and rings >= 1");
  if (!(s.separation > s.radius1 + s.radius2))
    throw InvalidSpecError("two-disk spec requires separation > radius1 + radius2");
  Mesh mesh;
  mesh.dim = 2;
  append_disk(mesh, DiskSpec{s.radius1, s.rings, {0.0, 0.0}, 1});
  append_disk(mesh, DiskSpec{s.radius2, s.rings, {s.separation, 0.0}, 2});
  mesh.finalize();
  return mesh;
}

Mesh make_rectangle(const RectangleSpec& s) {
  if (s.width <= 0.0 || s.height <= 0.0 || s.nx < 1 || s.ny < 1)
    throw InvalidSpecError("rectangle spec requires positive sides and nx, ny >= 1");
  Mesh mesh;
  mesh.dim = 2;
  const auto id = [&](int i, int j) { return j * (s.nx + 1) + i; };
  for (int j = 0; j <= s.ny; ++j)
    for (int i = 0; i <= s.nx; ++i)
      mesh.nodes.push_back({s.width * i / s.nx, s.height * j / s.ny});
  for (int j = 0; j < s.ny; ++j) {
    for (int i = 0; i < s.nx; ++i) {
      mesh.elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.elements.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  for (int i = 0; i < s.nx; ++i) {
    mesh.boundary.push_back({{id(i, 0), id(i + 1, 0)}, 1});
    mesh.boundary.push_back({{id(i + 1, s.ny), id(i, s.ny)}, 1});
  }
  for (int j = 0; j < s.ny; ++j) {
    mesh.boundary.push_back({{id(s.nx, j), id(s.nx, j + 1)}, 1});
    mesh.boundary.push_back({{id(0, j + 1), id(0, j)}, 1});
  }
  mesh.finalize();
  return mesh;
}

}  // namespace

Mesh generate_mesh(const MeshSpec& spec) {
  return std::visit(
      [](const auto& s) -> Mesh {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IntervalSpec>) return make_interval(s);
        if constexpr (std::is_same_v<T, DiskSpec>) return make_disk(s);
        if constexpr (std::is_same_v<T, TwoDisksSpec>) return make_two_disks(s);
        if constexpr (std::is_same_v<T, RectangleSpec>) return make_rectangle(s);
      },
      spec);
}

// File format ------------------------------------------------------------
//
//   insulmesh 1
//   dim <d>
//   nodes <N>
//   <x> [<y>]          (N lines)
//   elements <T>
//   <v0> <v1> [<v2>]   (T lines)
//   boundary <B>
//   <v0> [<v1>] <marker>
//
// '#' starts a comment; blank lines are ignored. Reals carry 17 significant
// digits so that save/load round-trips exactly.

namespace {

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct LineReader {
  std::istream& in;
  int line_number = 0;

  // Next non-empty line with comments stripped; false on end of stream.
  bool next(std::string& out) {
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_number;
      const auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      bool blank = true;
      for (const char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) {
          blank = false;
          break;
        }
      if (!blank) {
        out = raw;
        return true;
      }
    }
    return false;
  }
};

int parse_int(std::istringstream& tokens, const char* what, int line) {
  long long v = 0;
  if (!(tokens >> v)) throw MeshParseError(std::string("expected ") + what, line);
  return static_cast<int>(v);
}

double parse_real(std::istringstream& tokens, const char* what, int line) {
  double v = 0;
  if (!(tokens >> v)) throw MeshParseError(std::string("expected ") + what, line);
  return v;
}

void expect_end(std::istringstream& tokens, int line) {
  std::string extra;
  if (tokens >> extra) throw MeshParseError("unexpected trailing token '" + extra + "'", line);
}

void expect_section(LineReader& reader, const std::string& keyword, int& count_out) {
  std::string line;
  if (!reader.next(line))
    throw MeshParseError("unexpected end of file, expected '" + keyword + "' section",
                         reader.line_number);
  std::istringstream tokens(line);
  std::string word;
  tokens >> word;
  if (word != keyword)
    throw MeshParseError("expected '" + keyword + "' section, found '" + word + "'",
                         reader.line_number);
  count_out = parse_int(tokens, "count", reader.line_number);
  expect_end(tokens, reader.line_number);
}

}  // namespace

Mesh parse_mesh(std::istream& in) {
  LineReader reader{in};
  std::string line;

  if (!reader.next(line)) throw MeshParseError("empty file", reader.line_number);
  {
    std::istringstream tokens(line);
    std::string magic;
    int version = 0;
    tokens >> magic;
    if (magic != "insulmesh") throw MeshParseError("not an insulmesh file", reader.line_number);
    version = parse_int(tokens, "format version", reader.line_number);
    if (version != 1)
      throw MeshParseError("unsupported format version " + std::to_string(version),
                           reader.line_number);
    expect_end(tokens, reader.line_number);
  }

  Mesh mesh;
  if (!reader.next(line)) throw MeshParseError("missing 'dim' line", reader.line_number);
  {
    std::istringstream tokens(line);
    std::string word;
    tokens >> word;
    if (word != "dim") throw MeshParseError("expected 'dim' line", reader.line_number);
    mesh.dim = parse_int(tokens, "dimension", reader.line_number);
    if (mesh.dim != 1 && mesh.dim != 2)
      throw MeshParseError("dimension must be 1 or 2", reader.line_number);
    expect_end(tokens, reader.line_number);
  }

  int node_count = 0;
  expect_section(reader, "nodes", node_count);
  if (node_count < 1) throw MeshParseError("node count must be positive", reader.line_number);
  mesh.nodes.reserve(node_count);
  for (int i = 0; i < node_count; ++i) {
    if (!reader.next(line)) throw MeshParseError("unexpected end of node list", reader.line_number);
    std::istringstream tokens(line);
    const double x = parse_real(tokens, "node coordinate", reader.line_number);
    const double y = (mesh.dim == 2) ? parse_real(tokens, "node coordinate", reader.line_number) : 0.0;
    expect_end(tokens, reader.line_number);
    mesh.nodes.push_back({x, y});
  }

  int element_count = 0;
  expect_section(reader, "elements", element_count);
  if (element_count < 1) throw MeshParseError("element count must be positive", reader.line_number);
  std::vector<int> element_lines(element_count);
  mesh.elements.reserve(element_count);
  for (int e = 0; e < element_count; ++e) {
    if (!reader.next(line))
      throw MeshParseError("unexpected end of element list", reader.line_number);
    element_lines[e] = reader.line_number;
    std::istringstream tokens(line);
    std::array<int, 3> el{-1, -1, -1};
    for (int k = 0; k <= mesh.dim; ++k) {
      el[k] = parse_int(tokens, "element node index", reader.line_number);
      if (el[k] < 0 || el[k] >= node_count)
        throw MeshParseError("node index out of range", reader.line_number);
    }
    expect_end(tokens, reader.line_number);
    mesh.elements.push_back(el);
  }

  int facet_count = 0;
  expect_section(reader, "boundary", facet_count);
  if (facet_count < 1) throw MeshParseError("boundary count must be positive", reader.line_number);
  std::vector<int> facet_lines(facet_count);
  mesh.boundary.reserve(facet_count);
  for (int f = 0; f < facet_count; ++f) {
    if (!reader.next(line))
      throw MeshParseError("unexpected end of boundary list", reader.line_number);
    facet_lines[f] = reader.line_number;
    std::istringstream tokens(line);
    BoundaryFacet bf;
    for (int k = 0; k < mesh.dim; ++k) {
      bf.nodes[k] = parse_int(tokens, "facet node index", reader.line_number);
      if (bf.nodes[k] < 0 || bf.nodes[k] >= node_count)
        throw MeshParseError("node index out of range", reader.line_number);
    }
    bf.marker = parse_int(tokens, "boundary marker", reader.line_number);
    expect_end(tokens, reader.line_number);
    mesh.boundary.push_back(bf);
  }
  if (reader.next(line)) throw MeshParseError("unexpected content after boundary list", reader.line_number);

  try {
    mesh.finalize();
  } catch (const MeshValidationError& err) {
    int at = reader.line_number;
    if (err.target() == MeshValidationError::Target::Element && err.index() >= 0)
      at = element_lines[err.index()];
    else if (err.target() == MeshValidationError::Target::Facet && err.index() >= 0)
      at = facet_lines[err.index()];
    throw MeshParseError(err.what(), at);
  }
  return mesh;
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  out << "insulmesh 1\n";
  out << "dim " << mesh.dim << "\n";
  out << "nodes " << mesh.node_count() << "\n";
  for (const auto& p : mesh.nodes) {
    out << format_real(p[0]);
    if (mesh.dim == 2) out << " " << format_real(p[1]);
    out << "\n";
  }
  out << "elements " << mesh.element_count() << "\n";
  for (const auto& el : mesh.elements) {
    out << el[0] << " " << el[1];
    if (mesh.dim == 2) out << " " << el[2];
    out << "\n";
  }
  out << "boundary " << mesh.boundary.size() << "\n";
  for (const auto& bf : mesh.boundary) {
    out << bf.nodes[0];
    if (mesh.dim == 2) out << " " << bf.nodes[1];
    out << " " << bf.marker << "\n";
  }
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpecError("cannot open mesh file '" + path + "'");
  return parse_mesh(in);
}

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ostringstream buffer;
  write_mesh(mesh, buffer);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp + "' for writing");
    out << buffer.str();
    if (!out) throw Error("failed writing '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw Error("failed to move '" + tmp + "' into place");
}

// Boundary geometry --------------------------------------------------------

std::vector<BoundaryLoop> boundary_loops(const Mesh& mesh) {
  if (!mesh.finalized()) throw PreconditionError("mesh is not finalized");
  std::vector<BoundaryLoop> loops;

  if (mesh.dim == 1) {
    for (const int marker : mesh.boundary_markers) {
      for (const auto& bf : mesh.boundary) {
        if (bf.marker != marker) continue;
        BoundaryLoop loop;
        loop.marker = marker;
        loop.node_ids = {bf.nodes[0]};
        loop.arclength = {0.0};
        loop.angle = {0.0};
        loop.centroid = mesh.nodes[bf.nodes[0]];
        loop.length = 1.0;  // counting measure
        loops.push_back(std::move(loop));
      }
    }
    return loops;
  }

  for (const int marker : mesh.boundary_markers) {
    // Node adjacency restricted to this marker. finalize() guarantees a
    // single closed manifold loop: every node has exactly two neighbors.
    std::map<int, std::vector<int>> adjacency;
    for (const auto& bf : mesh.boundary) {
      if (bf.marker != marker) continue;
      adjacency[bf.nodes[0]].push_back(bf.nodes[1]);
      adjacency[bf.nodes[1]].push_back(bf.nodes[0]);
    }
    for (const auto& [node, nbrs] : adjacency) {
      if (nbrs.size() != 2)
        throw MeshValidationError("boundary loop for marker " + std::to_string(marker) +
                                      " is not closed at node " + std::to_string(node),
                                  MeshValidationError::Target::Global, -1);
    }

    BoundaryLoop loop;
    loop.marker = marker;
    const int start = adjacency.begin()->first;
    int prev = -1;
    int current = start;
    do {
      loop.node_ids.push_back(current);
      const auto& nbrs = adjacency[current];
      const int next = (nbrs[0] == prev) ? nbrs[1] : nbrs[0];
      prev = current;
      current = next;
    } while (current != start);

    // Counterclockwise orientation via the polygon's signed area.
    double twice_area = 0.0;
    const int count = static_cast<int>(loop.node_ids.size());
    for (int i = 0; i < count; ++i) {
      const auto& p = mesh.nodes[loop.node_ids[i]];
      const auto& q = mesh.nodes[loop.node_ids[(i + 1) % count]];
      twice_area += p[0] * q[1] - q[0] * p[1];
    }
    if (twice_area < 0.0) std::reverse(loop.node_ids.begin() + 1, loop.node_ids.end());

    for (const int v : loop.node_ids) {
      loop.centroid[0] += mesh.nodes[v][0] / count;
      loop.centroid[1] += mesh.nodes[v][1] / count;
    }
    loop.arclength.resize(count);
    loop.angle.resize(count);
    double s = 0.0;
    for (int i = 0; i < count; ++i) {
      const auto& p = mesh.nodes[loop.node_ids[i]];
      loop.angle[i] = std::atan2(p[1] - loop.centroid[1], p[0] - loop.centroid[0]);
      loop.arclength[i] = s;
      const auto& q = mesh.nodes[loop.node_ids[(i + 1) % count]];
      s += std::hypot(q[0] - p[0], q[1] - p[1]);
    }
    loop.length = s;
    loops.push_back(std::move(loop));
  }
  return loops;
}

std::optional<double> loop_radius(const Mesh& mesh, const BoundaryLoop& loop, double rel_tol) {
  if (mesh.dim != 2 || loop.node_ids.empty()) return std::nullopt;
  double rmin = std::numeric_limits<double>::infinity();
  double rmax = 0.0;
  for (const int v : loop.node_ids) {
    const double r = std::hypot(mesh.nodes[v][0] - loop.centroid[0],
                                mesh.nodes[v][1] - loop.centroid[1]);
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  if (rmax <= 0.0 || (rmax - rmin) > rel_tol * rmax) return std::nullopt;
  return 0.5 * (rmin + rmax);
}

std::optional<double> disk_radius(const Mesh& mesh) {
  if (mesh.dim != 2) return std::nullopt;
  const auto loops = boundary_loops(mesh);
  if (loops.size() != 1) return std::nullopt;
  return loop_radius(mesh, loops.front());
}

}  // namespace insulopt
