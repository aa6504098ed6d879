#include <doctest.h>

#include "cnfe/mesh.hpp"

using namespace cnfe;

namespace {

std::vector<double> bps(const Mesh1D& m) { return m.breakpoints(); }

bool coarser_or_equal(const Mesh1D& coarse, const Mesh1D& fine) { return is_refinement_of(fine, coarse); }

}  // namespace

TEST_CASE("refine single bisection and nested bisection") {
  Mesh1D root(MacroMesh(0, 1, 1));
  auto m = refine(root, {root.element(0)});
  CHECK(bps(*m) == std::vector<double>{0, 0.5, 1});
  CHECK(*refine(root, {}) == root);

  Mesh1D two(MacroMesh(0, 1, 2));
  auto a = refine(two, {two.element(0)});
  CHECK(bps(*a) == std::vector<double>{0, 0.25, 0.5, 1});
  auto b = refine(*a, {a->element(0)});
  CHECK(bps(*b) == std::vector<double>{0, 0.125, 0.25, 0.5, 1});
  CHECK_THROWS_AS(refine(two, {ElementId{0, 3, 1}}), Error);
}

TEST_CASE("coarsen merges sibling pairs one level per call") {
  Mesh1D two(MacroMesh(0, 1, 2));
  Mesh1D q(MacroMesh(0, 1, 2), {{0, 2, 0}, {0, 2, 1}, {0, 1, 1}, {1, 0, 0}});
  CHECK(bps(q) == std::vector<double>{0, 0.125, 0.25, 0.5, 1});
  Mesh1D p(MacroMesh(0, 1, 2), {{0, 1, 0}, {0, 1, 1}, {1, 0, 0}});
  CHECK(*coarsen(p, {p.element(0), p.element(1)}) == two);
  CHECK(*coarsen(p, {p.element(0)}) == p);

  Mesh1D four(MacroMesh(0, 1, 1), {{0, 2, 0}, {0, 2, 1}, {0, 2, 2}, {0, 2, 3}});
  auto once = coarsen(four, four.elements());
  CHECK(bps(*once) == std::vector<double>{0, 0.5, 1});
}

TEST_CASE("refine then coarsen with the same marks is the identity") {
  Mesh1D m(MacroMesh(-1, 2, 3), {{0, 1, 0}, {0, 1, 1}, {1, 0, 0}, {2, 2, 0}, {2, 2, 1}, {2, 1, 1}});
  auto r = refine(m, {m.element(1), m.element(3)});
  std::vector<ElementId> kids;
  for (const auto& id : {m.element(1), m.element(3)}) {
    kids.push_back(id.child(0));
    kids.push_back(id.child(1));
  }
  CHECK(*coarsen(*r, kids) == m);
}

TEST_CASE("common coarsening and refinement") {
  Mesh1D two(MacroMesh(0, 1, 2));
  auto left = refine(two, {two.element(0)});
  auto right = refine(two, {two.element(1)});
  CHECK(*common_coarsening(*left, *left) == *left);
  CHECK(*common_coarsening(*left, *right) == two);
  auto left2 = refine(*left, {left->element(0), left->element(1)});
  CHECK(*common_coarsening(*left2, *left) == *left);

  CHECK(*common_refinement(*left, *left) == *left);
  auto both = common_refinement(*left, *right);
  CHECK(bps(*both) == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  auto all = refine(two, two.elements());
  CHECK(*common_refinement(two, *all) == *all);

  CHECK(coarser_or_equal(*common_coarsening(*left2, *right), *left2));
  CHECK(coarser_or_equal(*common_coarsening(*left2, *right), *right));
  CHECK(coarser_or_equal(*left2, *common_refinement(*left2, *right)));
  CHECK(*common_coarsening(*common_refinement(*left2, *right), *left2) == *left2);

  Mesh1D other(MacroMesh(0, 1, 3));
  CHECK_THROWS_AS(common_refinement(two, other), Error);
}

TEST_CASE("mesh JSON round trip and locate") {
  Mesh1D m(MacroMesh(-2, 2, 2), {{0, 1, 0}, {0, 2, 2}, {0, 2, 3}, {1, 0, 0}});
  auto back = mesh_from_json(to_json(m));
  CHECK(*back == m);
  CHECK(to_json(m)["paths"][0][1] == "10");
  CHECK(m.locate(-2.0) == 0);
  CHECK(m.locate(2.0) == 3);
  CHECK(m.locate(-0.5) == 2);
  CHECK(m.width(1) == doctest::Approx(0.5));
}
