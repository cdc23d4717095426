#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "insulopt/types.hpp"

namespace insulopt {

struct BoundaryFacet {
  std::array<int, 2> nodes{-1, -1};  // second entry unused in 1d
  int marker = 0;
};

/// Simplicial mesh of an interval (1d) or of a planar domain (2d) with marked
/// boundary facets. finalize() orients elements, validates the boundary
/// description and computes connectivity; solvers expect a finalized mesh.
struct Mesh {
  int dim = 0;
  std::vector<std::array<double, 2>> nodes;  // y ignored in 1d
  std::vector<std::array<int, 3>> elements;  // third index -1 in 1d
  std::vector<BoundaryFacet> boundary;

  // Populated by finalize().
  int component_count = 0;            // number of distinct boundary markers
  std::vector<int> boundary_markers;  // sorted distinct markers
  std::vector<int> node_component;    // domain component id per node
  int domain_component_count = 0;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int element_count() const { return static_cast<int>(elements.size()); }
  bool finalized() const { return !nodes.empty() && node_component.size() == nodes.size(); }

  /// Orients elements (positive length/area), checks that the boundary list
  /// covers exactly the topological boundary, that markers partition it into
  /// connected components, and labels domain components. Throws
  /// MeshValidationError on any structural defect.
  void finalize();
};

// Generators ------------------------------------------------------------

struct IntervalSpec {
  double a = -1.0;
  double b = 1.0;
  int cells = 16;
};

/// Structured fan: concentric rings at radii R*j/rings, ring j carrying 8*j
/// nodes, so a mesh with n rings has 8n boundary nodes exactly on the circle.
struct DiskSpec {
  double radius = 1.0;
  int rings = 8;
  std::array<double, 2> center{0.0, 0.0};
  int marker = 1;
};

struct TwoDisksSpec {
  double radius1 = 1.0;
  double radius2 = 1.0;
  double separation = 3.0;  // center distance; must exceed radius1+radius2
  int rings = 8;
};

struct RectangleSpec {
  double width = 1.0;
  double height = 1.0;
  int nx = 8;
  int ny = 8;
};

using MeshSpec = std::variant<IntervalSpec, DiskSpec, TwoDisksSpec, RectangleSpec>;

Mesh generate_mesh(const MeshSpec& spec);

// File format ------------------------------------------------------------

Mesh load_mesh(const std::string& path);
void save_mesh(const Mesh& mesh, const std::string& path);
Mesh parse_mesh(std::istream& in);
void write_mesh(const Mesh& mesh, std::ostream& out);

// Boundary geometry --------------------------------------------------------

/// One marked boundary component with nodes ordered counterclockwise (2d
/// loops) and cumulative arc length. In 1d a component is a single endpoint
/// carrying counting measure 1.
struct BoundaryLoop {
  int marker = 0;
  std::vector<int> node_ids;
  std::vector<double> arclength;
  std::vector<double> angle;  // about the loop centroid, in (-pi, pi]
  std::array<double, 2> centroid{0.0, 0.0};
  double length = 0.0;
};

std::vector<BoundaryLoop> boundary_loops(const Mesh& mesh);

/// Common radius of a loop whose nodes are equidistant from the centroid
/// within rel_tol; nullopt for non-circular loops.
std::optional<double> loop_radius(const Mesh& mesh, const BoundaryLoop& loop,
                                  double rel_tol = 1e-6);

/// Radius of the boundary circle for a mesh whose boundary is a single
/// circular loop; nullopt otherwise.
std::optional<double> disk_radius(const Mesh& mesh);

}  // namespace insulopt
