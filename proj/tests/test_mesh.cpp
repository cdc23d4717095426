#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "doctest.h"
#include "insulopt/mesh.hpp"

using namespace insulopt;
using doctest::Approx;

namespace {
constexpr double kPi = 3.14159265358979323846;

double polygon_perimeter_chord(int sides, double radius) {
  return sides * 2.0 * radius * std::sin(kPi / sides);
}
}  // namespace

TEST_CASE("interval generator") {
  const Mesh mesh = generate_mesh(IntervalSpec{-1.0, 1.0, 10});
  CHECK(mesh.dim == 1);
  CHECK(mesh.node_count() == 11);
  CHECK(mesh.element_count() == 10);
  CHECK(mesh.boundary.size() == 2);
  CHECK(mesh.finalized());
  CHECK(mesh.nodes.front()[0] == Approx(-1.0));
  CHECK(mesh.nodes.back()[0] == Approx(1.0));
  CHECK(mesh.domain_component_count == 1);
  CHECK(mesh.component_count == 2);  // each endpoint carries its own marker
  CHECK_THROWS_AS(generate_mesh(IntervalSpec{1.0, -1.0, 10}), InvalidSpecError);
  CHECK_THROWS_AS(generate_mesh(IntervalSpec{-1.0, 1.0, 0}), InvalidSpecError);
}

TEST_CASE("disk generator: fan layout with boundary exactly on the circle") {
  DiskSpec spec;
  spec.radius = 2.0;
  spec.rings = 8;
  spec.center = {0.5, -0.25};
  const Mesh mesh = generate_mesh(spec);
  CHECK(mesh.dim == 2);
  // 1 + sum_{j=1..8} 8j = 289 nodes, 8*8 boundary nodes.
  CHECK(mesh.node_count() == 289);
  CHECK(mesh.boundary.size() == 64);
  int on_circle = 0;
  for (const BoundaryFacet& facet : mesh.boundary)
    for (int v : {facet.nodes[0], facet.nodes[1]}) {
      const double r = std::hypot(mesh.nodes[v][0] - 0.5, mesh.nodes[v][1] + 0.25);
      if (std::abs(r - 2.0) < 1e-12) ++on_circle;
    }
  CHECK(on_circle == 128);  // both endpoints of all 64 facets
  CHECK(disk_radius(mesh).has_value());
  CHECK(*disk_radius(mesh) == Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(generate_mesh(DiskSpec{1.0, 0, {0, 0}, 1}), InvalidSpecError);
}

TEST_CASE("two-disk generator keeps components apart with distinct markers") {
  const Mesh mesh = generate_mesh(TwoDisksSpec{0.5, 1.0, 3.0, 4});
  CHECK(mesh.domain_component_count == 2);
  CHECK(mesh.component_count == 2);
  CHECK(mesh.boundary_markers == std::vector<int>{1, 2});
  CHECK_FALSE(disk_radius(mesh).has_value());  // two loops, not one
  const auto loops = boundary_loops(mesh);
  REQUIRE(loops.size() == 2);
  CHECK(loops[0].marker == 1);
  CHECK(loops[1].marker == 2);
  CHECK(*loop_radius(mesh, loops[0]) == Approx(0.5).epsilon(1e-12));
  CHECK(*loop_radius(mesh, loops[1]) == Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(generate_mesh(TwoDisksSpec{1.0, 1.0, 1.5, 4}), InvalidSpecError);
}

TEST_CASE("rectangle generator is not mistaken for a disk") {
  const Mesh mesh = generate_mesh(RectangleSpec{2.0, 1.0, 6, 3});
  CHECK(mesh.node_count() == 7 * 4);
  CHECK(mesh.element_count() == 2 * 6 * 3);
  CHECK(mesh.finalized());
  CHECK_FALSE(disk_radius(mesh).has_value());
  const auto loops = boundary_loops(mesh);
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].length == Approx(6.0).epsilon(1e-12));
  CHECK_FALSE(loop_radius(mesh, loops[0]).has_value());
}

TEST_CASE("boundary loops are ordered counterclockwise with consistent arc length") {
  DiskSpec spec;
  spec.rings = 4;
  const Mesh mesh = generate_mesh(spec);
  const auto loops = boundary_loops(mesh);
  REQUIRE(loops.size() == 1);
  const BoundaryLoop& loop = loops[0];
  REQUIRE(loop.node_ids.size() == 32);
  CHECK(loop.length == Approx(polygon_perimeter_chord(32, 1.0)).epsilon(1e-12));
  // Angles advance counterclockwise with one wrap.
  int wraps = 0;
  for (std::size_t i = 1; i < loop.angle.size(); ++i) {
    const double step = loop.angle[i] - loop.angle[i - 1];
    if (step < 0.0) ++wraps;
    CHECK(std::abs(std::remainder(step, 2.0 * kPi) - 2.0 * kPi / 32.0) < 1e-12);
  }
  CHECK(wraps <= 1);
  // Cumulative arc length starts at zero and increases by the chord length.
  CHECK(loop.arclength.front() == 0.0);
  for (std::size_t i = 1; i < loop.arclength.size(); ++i)
    CHECK(loop.arclength[i] - loop.arclength[i - 1] ==
          Approx(loop.length / 32.0).epsilon(1e-12));
  CHECK(loop.centroid[0] == Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(loop.centroid[1] == Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("save/load round-trip preserves the mesh exactly") {
  const auto dir = std::filesystem::temp_directory_path() / "insulopt_mesh_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "roundtrip.msh").string();

  for (const MeshSpec& spec :
       {MeshSpec{IntervalSpec{-0.5, 2.0, 7}}, MeshSpec{DiskSpec{1.5, 3, {0.1, 0.2}, 9}},
        MeshSpec{TwoDisksSpec{0.5, 1.0, 2.5, 3}}}) {
    const Mesh original = generate_mesh(spec);
    save_mesh(original, path);
    const Mesh loaded = load_mesh(path);
    CHECK(loaded.dim == original.dim);
    REQUIRE(loaded.node_count() == original.node_count());
    REQUIRE(loaded.element_count() == original.element_count());
    REQUIRE(loaded.boundary.size() == original.boundary.size());
    for (int i = 0; i < original.node_count(); ++i) {
      CHECK(loaded.nodes[i][0] == original.nodes[i][0]);  // bitwise, 17 digits
      CHECK(loaded.nodes[i][1] == original.nodes[i][1]);
    }
    for (int e = 0; e < original.element_count(); ++e)
      CHECK(loaded.elements[e] == original.elements[e]);
    for (std::size_t f = 0; f < original.boundary.size(); ++f) {
      CHECK(loaded.boundary[f].nodes == original.boundary[f].nodes);
      CHECK(loaded.boundary[f].marker == original.boundary[f].marker);
    }
    CHECK(loaded.finalized());
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("parser reports the offending line") {
  SUBCASE("bad magic") {
    std::istringstream in("nonsense 1\n");
    CHECK_THROWS_AS(parse_mesh(in), MeshParseError);
  }
  SUBCASE("truncated node section") {
    std::istringstream in("insulmesh 1\ndim 1\nnodes 3\n0.0\n0.5\n");
    try {
      parse_mesh(in);
      FAIL("expected a parse error");
    } catch (const MeshParseError& e) {
      CHECK(e.line() == 5);
    }
  }
  SUBCASE("garbage token carries its line number") {
    std::istringstream in("insulmesh 1\ndim 1\nnodes 2\n0.0\nbogus\n");
    try {
      parse_mesh(in);
      FAIL("expected a parse error");
    } catch (const MeshParseError& e) {
      CHECK(e.line() == 5);
    }
  }
  SUBCASE("comments and blank lines do not shift reported numbers") {
    std::istringstream in(
        "# header comment\n\ninsulmesh 1\ndim 1\nnodes 2\n0.0\n1.0\nelements 1\n0 1\n"
        "boundary 2\n0 1\nbad-token 2\n");
    try {
      parse_mesh(in);
      FAIL("expected a parse error");
    } catch (const MeshParseError& e) {
      CHECK(e.line() == 12);
    }
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_mesh("/nonexistent/path.msh"), InvalidSpecError); }
}

TEST_CASE("finalize validates structure") {
  SUBCASE("incomplete boundary") {
    Mesh mesh;
    mesh.dim = 1;
    mesh.nodes = {{0.0, 0.0}, {1.0, 0.0}};
    mesh.elements = {{0, 1, -1}};
    mesh.boundary = {{{0, -1}, 1}};  // right endpoint facet missing
    CHECK_THROWS_AS(mesh.finalize(), MeshValidationError);
  }
  SUBCASE("facet on an interior edge") {
    Mesh mesh;
    mesh.dim = 2;
    mesh.nodes = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    mesh.elements = {{0, 1, 2}, {0, 2, 3}};
    mesh.boundary = {{{0, 1}, 1}, {{1, 2}, 1}, {{2, 3}, 1}, {{3, 0}, 1}, {{0, 2}, 1}};
    CHECK_THROWS_AS(mesh.finalize(), MeshValidationError);
  }
  SUBCASE("degenerate element") {
    Mesh mesh;
    mesh.dim = 2;
    mesh.nodes = {{0, 0}, {1, 0}, {2, 0}};
    mesh.elements = {{0, 1, 2}};  // collinear
    mesh.boundary = {{{0, 1}, 1}, {{1, 2}, 1}, {{2, 0}, 1}};
    CHECK_THROWS_AS(mesh.finalize(), MeshValidationError);
  }
  SUBCASE("marker spanning two disconnected pieces") {
    Mesh mesh = generate_mesh(IntervalSpec{0.0, 1.0, 4});
    mesh.node_component.clear();  // definalize
    mesh.boundary[1].marker = mesh.boundary[0].marker;  // both endpoints, one marker
    CHECK_THROWS_AS(mesh.finalize(), MeshValidationError);
  }
}

TEST_CASE("element orientation is repaired by finalize") {
  Mesh mesh;
  mesh.dim = 2;
  mesh.nodes = {{0, 0}, {1, 0}, {0, 1}};
  mesh.elements = {{0, 2, 1}};  // clockwise on purpose
  mesh.boundary = {{{0, 1}, 1}, {{1, 2}, 1}, {{2, 0}, 1}};
  mesh.finalize();
  const auto& e = mesh.elements[0];
  const double area2 = (mesh.nodes[e[1]][0] - mesh.nodes[e[0]][0]) *
                           (mesh.nodes[e[2]][1] - mesh.nodes[e[0]][1]) -
                       (mesh.nodes[e[2]][0] - mesh.nodes[e[0]][0]) *
                           (mesh.nodes[e[1]][1] - mesh.nodes[e[0]][1]);
  CHECK(area2 > 0.0);
}
