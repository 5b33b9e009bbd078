#include <catch2/catch_amalgamated.hpp>

#include "spreach/grid.hpp"
#include "spreach/value_field.hpp"
#include "test_helpers.hpp"

using namespace spreach;
using spreach::testing::vecn;

namespace {

ValueField sampled_field(const Grid& grid, const std::function<double(const Eigen::VectorXd&)>& f) {
  ValueField field;
  field.grid = grid;
  field.values.resize(grid.size());
  for (long i = 0; i < grid.size(); ++i) field.values[i] = f(grid.point(i));
  return field;
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(Grid::uniform({0.0}, {1.0}, {2}), Error);
  CHECK_THROWS_AS(Grid::uniform({1.0}, {1.0}, {5}), Error);
  CHECK_THROWS_AS(Grid(std::vector<GridAxis>{}), Error);
}

TEST_CASE("row-major linearization round-trips") {
  const Grid g = Grid::uniform({0.0, 0.0, 0.0}, {1.0, 2.0, 3.0}, {3, 4, 5});
  CHECK(g.size() == 60);
  CHECK(g.stride(2) == 1);
  CHECK(g.stride(1) == 5);
  CHECK(g.stride(0) == 20);
  std::vector<int> multi;
  for (long i = 0; i < g.size(); ++i) {
    g.unindex(i, multi);
    CHECK(g.index(multi) == i);
  }
  CHECK(g.coord(2, 4) == 3.0);  // endpoints exact
  CHECK(g.coord(0, 0) == 0.0);
}

TEST_CASE("interpolation reproduces node values and linear fields") {
  const Grid g = Grid::uniform({0.0, 0.0}, {1.0, 1.0}, {11, 11});
  const auto lin = sampled_field(g, [](const Eigen::VectorXd& z) { return 3 * z[0] - 2 * z[1]; });
  for (long i : {0L, 37L, 120L}) {
    CHECK(interpolate_value(lin, g.point(i)) == lin.values[i]);
  }
  CHECK(interpolate_value(lin, vecn({0.55, 0.35})) ==
        Catch::Approx(3 * 0.55 - 2 * 0.35).margin(1e-13));
}

TEST_CASE("bilinear cell-centre value from corners") {
  const Grid g = Grid::uniform({0.0, 0.0}, {1.0, 1.0}, {3, 3});
  ValueField f;
  f.grid = g;
  f.values.assign(g.size(), 0.0);
  // corners of the first cell: (0,0)->0, (0,1)->1, (1,0)->1, (1,1)->0
  f.values[g.index({0, 0})] = 0.0;
  f.values[g.index({0, 1})] = 1.0;
  f.values[g.index({1, 0})] = 1.0;
  f.values[g.index({1, 1})] = 0.0;
  CHECK(interpolate_value(f, vecn({0.25, 0.25})) == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("interpolation rejects out-of-bounds points naming the axis") {
  const Grid g = Grid::uniform({0.0, -1.0}, {1.0, 1.0}, {5, 5});
  const auto f = sampled_field(g, [](const Eigen::VectorXd&) { return 0.0; });
  CHECK_THROWS_WITH(interpolate_value(f, vecn({1.5, 0.0})),
                    Catch::Matchers::ContainsSubstring("x0"));
  CHECK_THROWS_WITH(interpolate_value(f, vecn({0.5, -1.2})),
                    Catch::Matchers::ContainsSubstring("x1"));
}

TEST_CASE("gradient of constant and linear fields") {
  const Grid g = Grid::uniform({0.0, 0.0}, {1.0, 1.0}, {21, 21});
  const auto c = sampled_field(g, [](const Eigen::VectorXd&) { return 7.0; });
  CHECK(gradient_at(c, vecn({0.5, 0.5})).norm() == 0.0);
  const auto lin = sampled_field(g, [](const Eigen::VectorXd& z) { return 3 * z[0] - 2 * z[1]; });
  const Eigen::VectorXd grad = gradient_at(lin, vecn({0.43, 0.61}));
  CHECK(grad[0] == Catch::Approx(3.0).margin(1e-12));
  CHECK(grad[1] == Catch::Approx(-2.0).margin(1e-12));
}

TEST_CASE("central difference is exact for quadratics at nodes") {
  const Grid g = Grid::uniform({0.0}, {1.0}, {101});  // spacing 0.01
  const auto q = sampled_field(g, [](const Eigen::VectorXd& z) { return z[0] * z[0]; });
  CHECK(gradient_at(q, vecn({0.5}))[0] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("gradient requires one interior cell") {
  const Grid g = Grid::uniform({0.0}, {1.0}, {11});
  const auto f = sampled_field(g, [](const Eigen::VectorXd&) { return 0.0; });
  CHECK_THROWS_AS(gradient_at(f, vecn({0.05})), Error);
  CHECK_NOTHROW(gradient_at(f, vecn({0.1})));
}

TEST_CASE("gap over the fast axis of a broadcast field is zero") {
  const Grid zg = Grid::uniform({0.0}, {1.0}, {11}, "z");
  const Grid fg({{"z0", 11, 0.0, 1.0}, {"y0", 7, 0.0, 1.0}});
  const auto vbar = sampled_field(zg, [](const Eigen::VectorXd& z) { return z[0] - 0.3; });
  const auto vfull = sampled_field(fg, [](const Eigen::VectorXd& x) { return x[0] - 0.3; });
  CHECK(max_abs_gap_over_y(vfull, vbar) == 0.0);

  const auto shifted = sampled_field(fg, [](const Eigen::VectorXd& x) {
    return x[0] - 0.3 + 0.25 * x[1];
  });
  CHECK(max_abs_gap_over_y(shifted, vbar) == Catch::Approx(0.25).margin(1e-15));
}
