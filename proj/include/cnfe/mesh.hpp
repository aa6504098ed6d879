#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cnfe {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform coarse partition of [a, b]; every mesh is a bisection refinement of one.
struct MacroMesh {
  double a = 0.0;
  double b = 1.0;
  int cells = 1;

  MacroMesh() = default;
  MacroMesh(double a_, double b_, int cells_);

  double cell_width() const { return (b - a) / cells; }
  bool operator==(const MacroMesh&) const = default;
};

/// Node of a bisection tree: macro cell, depth and dyadic position at that depth.
/// Ids stay valid under refinement elsewhere in the mesh.
struct ElementId {
  int cell = 0;
  int level = 0;
  std::uint64_t index = 0;

  bool operator==(const ElementId&) const = default;

  ElementId parent() const { return {cell, level - 1, index >> 1}; }
  ElementId child(int side) const { return {cell, level + 1, (index << 1) | std::uint64_t(side)}; }
  bool is_ancestor_of(const ElementId& other) const;
  /// Path from the macro cell root as a string of '0' (left) / '1' (right).
  std::string path() const;
};

/// Orders dyadic intervals by left endpoint, then coarser first.
bool operator<(const ElementId& lhs, const ElementId& rhs);

class Mesh1D;
using MeshPtr = std::shared_ptr<const Mesh1D>;

/// 1D mesh whose elements are leaves of one bisection tree per macro cell.
/// Immutable; the mutating operations return new meshes.
class Mesh1D {
 public:
  /// The macro mesh itself (every tree is a single root).
  explicit Mesh1D(const MacroMesh& macro);
  /// Leaves must tile every macro cell; they are sorted internally.
  Mesh1D(const MacroMesh& macro, std::vector<ElementId> leaves);

  static MeshPtr uniform(double a, double b, int elements);

  const MacroMesh& macro() const { return macro_; }
  std::size_t size() const { return leaves_.size(); }
  const std::vector<ElementId>& elements() const { return leaves_; }
  const ElementId& element(std::size_t e) const { return leaves_[e]; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  double left(std::size_t e) const { return breakpoints_[e]; }
  double right(std::size_t e) const { return breakpoints_[e + 1]; }
  double width(std::size_t e) const { return breakpoints_[e + 1] - breakpoints_[e]; }
  double a() const { return macro_.a; }
  double b() const { return macro_.b; }

  /// Position of a leaf, or -1 if the id is not a current leaf.
  std::ptrdiff_t find(const ElementId& id) const;
  /// Element containing x; the right end point belongs to the last element.
  std::size_t locate(double x) const;

  bool operator==(const Mesh1D& other) const {
    return macro_ == other.macro_ && leaves_ == other.leaves_;
  }

 private:
  void build_breakpoints();

  MacroMesh macro_;
  std::vector<ElementId> leaves_;
  std::vector<double> breakpoints_;
};

/// Coordinate of the left end of a tree node.
double node_left(const MacroMesh& macro, const ElementId& id);
double node_right(const MacroMesh& macro, const ElementId& id);

/// Bisects every marked leaf. Throws on ids that are not current leaves.
MeshPtr refine(const Mesh1D& mesh, const std::vector<ElementId>& marked);
/// Merges sibling leaf pairs whose members are both marked; one tree level per call.
MeshPtr coarsen(const Mesh1D& mesh, const std::vector<ElementId>& marked);
/// Finest common coarsening (tree intersection).
MeshPtr common_coarsening(const Mesh1D& a, const Mesh1D& b);
/// Coarsest common refinement (tree union).
MeshPtr common_refinement(const Mesh1D& a, const Mesh1D& b);
/// True if every element of `fine` lies inside an element of `coarse`.
bool is_refinement_of(const Mesh1D& fine, const Mesh1D& coarse);

/// Shared handles are compared by identity first.
inline bool same_mesh(const MeshPtr& a, const MeshPtr& b) { return a == b || *a == *b; }

nlohmann::json to_json(const Mesh1D& mesh);
MeshPtr mesh_from_json(const nlohmann::json& j);

}  // namespace cnfe
