#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace insulopt {

inline constexpr const char* kVersionString = "1.0.0";

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected generator argument or run configuration.
class InvalidSpecError : public Error {
 public:
  using Error::Error;
};

/// Mesh file syntax or consistency problem, reported with the offending line.
class MeshParseError : public Error {
 public:
  MeshParseError(const std::string& what, int line)
      : Error(what + " at line " + std::to_string(line)), line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

/// Structural defect found while validating a mesh. `target`/`index` identify
/// the entity so file loaders can map the defect back to a source line.
class MeshValidationError : public Error {
 public:
  enum class Target { Node, Element, Facet, Global };
  MeshValidationError(const std::string& what, Target target, int index)
      : Error(what), target_(target), index_(index) {}
  Target target() const { return target_; }
  int index() const { return index_; }

 private:
  Target target_;
  int index_;
};

/// Violated operation precondition (caller error, not a numerical failure).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Requested density recovery from a field with vanishing boundary trace.
class UndefinedDensityError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver failure; carries the iterate history for diagnostics.
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what, std::vector<double> history = {})
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

struct Mesh;

/// Nodal field over a mesh (one value per mesh node).
struct ScalarField {
  const Mesh* mesh = nullptr;
  Eigen::VectorXd values;
};

/// Insulator distribution on the boundary: one density value per boundary
/// node, aligned with AssembledOperators::boundary_node_ids, together with
/// the total mass it carries.
struct DensityField {
  Eigen::VectorXd values;
  double total_mass = 0.0;
};

}  // namespace insulopt
