#include "cnfe/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cnfe {

namespace {

constexpr int kMaxLevel = 60;

// Left end of a node in units of its macro cell, as a (numerator, shift) pair
// brought to a common depth.
std::uint64_t scaled_left(const ElementId& id, int depth) { return id.index << (depth - id.level); }

enum class Pick { Coarser, Finer };

// Walks two leaf sequences over the same macro mesh. Dyadic intervals are
// either nested or disjoint, so at every step one current leaf contains the
// other; the coarser or finer one is emitted and the other list skips past it.
std::vector<ElementId> merge_leaves(const Mesh1D& a, const Mesh1D& b, Pick pick) {
  if (!(a.macro() == b.macro())) throw Error("mesh: macro meshes differ");
  const auto& la = a.elements();
  const auto& lb = b.elements();
  std::vector<ElementId> out;
  out.reserve(std::max(la.size(), lb.size()));
  std::size_t i = 0, j = 0;
  while (i < la.size() && j < lb.size()) {
    const ElementId& x = la[i];
    const ElementId& y = lb[j];
    if (x == y) {
      out.push_back(x);
      ++i;
      ++j;
      continue;
    }
    const bool x_contains_y = x.is_ancestor_of(y);
    const ElementId& coarse = x_contains_y ? x : y;
    if (pick == Pick::Coarser) {
      out.push_back(coarse);
    }
    // advance the finer list until it leaves `coarse`
    auto& fine_list = x_contains_y ? lb : la;
    std::size_t& fine_pos = x_contains_y ? j : i;
    while (fine_pos < fine_list.size() && coarse.is_ancestor_of(fine_list[fine_pos])) {
      if (pick == Pick::Finer) out.push_back(fine_list[fine_pos]);
      ++fine_pos;
    }
    if (x_contains_y) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

}  // namespace

MacroMesh::MacroMesh(double a_, double b_, int cells_) : a(a_), b(b_), cells(cells_) {
  if (!(a < b)) throw Error("mesh: macro mesh needs a < b");
  if (cells < 1) throw Error("mesh: macro mesh needs at least one cell");
}

bool ElementId::is_ancestor_of(const ElementId& other) const {
  if (cell != other.cell || level > other.level) return false;
  return (other.index >> (other.level - level)) == index;
}

std::string ElementId::path() const {
  std::string p(static_cast<std::size_t>(level), '0');
  for (int d = 0; d < level; ++d) {
    if ((index >> (level - 1 - d)) & 1U) p[static_cast<std::size_t>(d)] = '1';
  }
  return p;
}

bool operator<(const ElementId& lhs, const ElementId& rhs) {
  if (lhs.cell != rhs.cell) return lhs.cell < rhs.cell;
  const int depth = std::max(lhs.level, rhs.level);
  const auto l = scaled_left(lhs, depth);
  const auto r = scaled_left(rhs, depth);
  if (l != r) return l < r;
  return lhs.level < rhs.level;
}

double node_left(const MacroMesh& macro, const ElementId& id) {
  const double frac = std::ldexp(static_cast<double>(id.index), -id.level);
  return macro.a + (id.cell + frac) * macro.cell_width();
}

double node_right(const MacroMesh& macro, const ElementId& id) {
  const double frac = std::ldexp(static_cast<double>(id.index + 1), -id.level);
  return macro.a + (id.cell + frac) * macro.cell_width();
}

Mesh1D::Mesh1D(const MacroMesh& macro) : macro_(macro) {
  leaves_.reserve(static_cast<std::size_t>(macro.cells));
  for (int c = 0; c < macro.cells; ++c) leaves_.push_back({c, 0, 0});
  build_breakpoints();
}

Mesh1D::Mesh1D(const MacroMesh& macro, std::vector<ElementId> leaves)
    : macro_(macro), leaves_(std::move(leaves)) {
  std::sort(leaves_.begin(), leaves_.end());
  // tiling check: consecutive leaves must be adjacent and cover every cell
  for (std::size_t e = 0; e < leaves_.size(); ++e) {
    const auto& id = leaves_[e];
    if (id.cell < 0 || id.cell >= macro_.cells || id.level < 0 || id.level > kMaxLevel ||
        id.index >= (std::uint64_t{1} << id.level)) {
      throw Error("mesh: invalid element id");
    }
  }
  build_breakpoints();
  const double tol = 1e-12 * (macro_.b - macro_.a);
  if (leaves_.empty() || std::abs(breakpoints_.front() - macro_.a) > tol ||
      std::abs(breakpoints_.back() - macro_.b) > tol) {
    throw Error("mesh: leaves do not tile the macro mesh");
  }
  for (std::size_t e = 0; e + 1 < leaves_.size(); ++e) {
    if (std::abs(node_right(macro_, leaves_[e]) - node_left(macro_, leaves_[e + 1])) > tol) {
      throw Error("mesh: leaves do not tile the macro mesh");
    }
  }
}

MeshPtr Mesh1D::uniform(double a, double b, int elements) {
  return std::make_shared<const Mesh1D>(MacroMesh(a, b, elements));
}

void Mesh1D::build_breakpoints() {
  breakpoints_.resize(leaves_.size() + 1);
  for (std::size_t e = 0; e < leaves_.size(); ++e) breakpoints_[e] = node_left(macro_, leaves_[e]);
  breakpoints_.back() = macro_.b;
  breakpoints_.front() = macro_.a;
}

std::ptrdiff_t Mesh1D::find(const ElementId& id) const {
  auto it = std::lower_bound(leaves_.begin(), leaves_.end(), id);
  if (it == leaves_.end() || !(*it == id)) return -1;
  return it - leaves_.begin();
}

std::size_t Mesh1D::locate(double x) const {
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  std::ptrdiff_t e = (it - breakpoints_.begin()) - 1;
  e = std::clamp<std::ptrdiff_t>(e, 0, static_cast<std::ptrdiff_t>(leaves_.size()) - 1);
  return static_cast<std::size_t>(e);
}

MeshPtr refine(const Mesh1D& mesh, const std::vector<ElementId>& marked) {
  std::vector<char> split(mesh.size(), 0);
  for (const auto& id : marked) {
    const auto pos = mesh.find(id);
    if (pos < 0) throw Error("mesh: refine: unknown element id " + std::to_string(id.cell) + ":" + id.path());
    if (id.level >= kMaxLevel) throw Error("mesh: refine: maximum tree depth reached");
    split[static_cast<std::size_t>(pos)] = 1;
  }
  std::vector<ElementId> leaves;
  leaves.reserve(mesh.size() + marked.size());
  for (std::size_t e = 0; e < mesh.size(); ++e) {
    if (split[e]) {
      leaves.push_back(mesh.element(e).child(0));
      leaves.push_back(mesh.element(e).child(1));
    } else {
      leaves.push_back(mesh.element(e));
    }
  }
  return std::make_shared<const Mesh1D>(mesh.macro(), std::move(leaves));
}

MeshPtr coarsen(const Mesh1D& mesh, const std::vector<ElementId>& marked) {
  std::vector<char> flag(mesh.size(), 0);
  for (const auto& id : marked) {
    const auto pos = mesh.find(id);
    if (pos >= 0) flag[static_cast<std::size_t>(pos)] = 1;
  }
  std::vector<ElementId> leaves;
  leaves.reserve(mesh.size());
  for (std::size_t e = 0; e < mesh.size(); ++e) {
    const auto& id = mesh.element(e);
    if (e + 1 < mesh.size() && id.level > 0 && (id.index & 1U) == 0 && flag[e] && flag[e + 1] &&
        mesh.element(e + 1) == id.parent().child(1)) {
      leaves.push_back(id.parent());
      ++e;
    } else {
      leaves.push_back(id);
    }
  }
  return std::make_shared<const Mesh1D>(mesh.macro(), std::move(leaves));
}

MeshPtr common_coarsening(const Mesh1D& a, const Mesh1D& b) {
  return std::make_shared<const Mesh1D>(a.macro(), merge_leaves(a, b, Pick::Coarser));
}

MeshPtr common_refinement(const Mesh1D& a, const Mesh1D& b) {
  return std::make_shared<const Mesh1D>(a.macro(), merge_leaves(a, b, Pick::Finer));
}

bool is_refinement_of(const Mesh1D& fine, const Mesh1D& coarse) {
  if (!(fine.macro() == coarse.macro())) return false;
  std::size_t j = 0;
  for (const auto& id : fine.elements()) {
    while (j < coarse.size() && !coarse.element(j).is_ancestor_of(id)) {
      if (id < coarse.element(j)) return false;
      ++j;
    }
    if (j == coarse.size()) return false;
  }
  return true;
}

nlohmann::json to_json(const Mesh1D& mesh) {
  nlohmann::json cells = nlohmann::json::array();
  for (int c = 0; c < mesh.macro().cells; ++c) cells.push_back(nlohmann::json::array());
  for (const auto& id : mesh.elements()) cells[static_cast<std::size_t>(id.cell)].push_back(id.path());
  return {{"macro", {{"a", mesh.a()}, {"b", mesh.b()}, {"cells", mesh.macro().cells}}},
          {"paths", std::move(cells)}};
}

MeshPtr mesh_from_json(const nlohmann::json& j) {
  const auto& m = j.at("macro");
  MacroMesh macro(m.at("a").get<double>(), m.at("b").get<double>(), m.at("cells").get<int>());
  std::vector<ElementId> leaves;
  const auto& paths = j.at("paths");
  if (paths.size() != static_cast<std::size_t>(macro.cells)) throw Error("mesh: path list size mismatch");
  for (int c = 0; c < macro.cells; ++c) {
    for (const auto& p : paths[static_cast<std::size_t>(c)]) {
      const auto s = p.get<std::string>();
      ElementId id{c, 0, 0};
      for (char ch : s) {
        if (ch != '0' && ch != '1') throw Error("mesh: malformed path '" + s + "'");
        id = id.child(ch == '1' ? 1 : 0);
      }
      leaves.push_back(id);
    }
  }
  return std::make_shared<const Mesh1D>(macro, std::move(leaves));
}

}  // namespace cnfe
