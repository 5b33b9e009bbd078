#include <catch2/catch_amalgamated.hpp>

#include "spreach/box_set.hpp"
#include "test_helpers.hpp"

using namespace spreach;
using spreach::testing::vecn;

TEST_CASE("box set validates bounds") {
  CHECK_THROWS_AS(BoxSet(vecn({1.0}), vecn({0.0})), Error);
  CHECK_THROWS_AS(BoxSet(vecn({0.0, 0.0}), vecn({1.0})), Error);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(BoxSet(vecn({0.0}), vecn({inf})), Error);
  CHECK_THROWS_AS(BoxSet(vecn({0.0}), vecn({1.0}), 1), Error);
  CHECK_NOTHROW(BoxSet(vecn({0.5}), vecn({0.5})));  // degenerate is allowed
}

TEST_CASE("lattice contains every vertex and endpoints are exact") {
  const BoxSet box(vecn({0.1, -2.0}), vecn({1.0, 3.0}), 5);
  std::vector<Eigen::VectorXd> points;
  for (long k = 0; k < box.lattice_size(); ++k) points.push_back(box.lattice_point(k));
  REQUIRE(box.lattice_size() == 25);
  for (unsigned m = 0; m < box.vertex_count(); ++m) {
    const Eigen::VectorXd v = box.vertex(m);
    bool found = false;
    for (const auto& p : points)
      if (p == v) found = true;  // exact equality required, not approximate
    CHECK(found);
  }
}

TEST_CASE("lattice ordering is row-major with the last dimension fastest") {
  const BoxSet box(vecn({0.0, 10.0}), vecn({1.0, 11.0}), 2);
  CHECK(box.lattice_point(0) == vecn({0.0, 10.0}));
  CHECK(box.lattice_point(1) == vecn({0.0, 11.0}));
  CHECK(box.lattice_point(2) == vecn({1.0, 10.0}));
  CHECK(box.lattice_point(3) == vecn({1.0, 11.0}));
}

TEST_CASE("contains honours tolerance") {
  const BoxSet box(vecn({0.0}), vecn({1.0}));
  CHECK(box.contains(vecn({0.5})));
  CHECK(box.contains(vecn({1.0 + 1e-13}), 1e-12));
  CHECK_FALSE(box.contains(vecn({1.1})));
  CHECK_FALSE(box.contains(vecn({0.5, 0.5})));
}
