#include <catch2/catch_amalgamated.hpp>

#include "spreach/contour.hpp"
#include "test_helpers.hpp"

using namespace spreach;
using spreach::testing::vecn;

namespace {

ValueField sampled(const Grid& grid, const std::function<double(const Eigen::VectorXd&)>& f) {
  ValueField out;
  out.grid = grid;
  out.values.resize(grid.size());
  for (long i = 0; i < grid.size(); ++i) out.values[i] = f(grid.point(i));
  return out;
}

}  // namespace

TEST_CASE("constant field has no contours") {
  const Grid g = Grid::uniform({0.0, 0.0}, {1.0, 1.0}, {11, 11});
  const auto f = sampled(g, [](const Eigen::VectorXd&) { return 2.0; });
  CHECK(extract_contours(f, 0.0).empty());
  CHECK(extract_contours(f, 1.999).empty());
}

TEST_CASE("circle contour stays within two cells of the analytic radius") {
  const Grid g = Grid::uniform({-1.0, -1.0}, {1.0, 1.0}, {81, 81});
  const auto f = sampled(g, [](const Eigen::VectorXd& z) {
    return z[0] * z[0] + z[1] * z[1];
  });
  const auto lines = extract_contours(f, 0.25);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].closed);
  const double dx = g.spacing(0);
  for (const auto& p : lines[0].pts) {
    const double r = std::hypot(p[0], p[1]);
    CHECK(std::abs(r - 0.5) <= 2.0 * dx);
  }
}

TEST_CASE("contour vertices sit on the level set of the interpolant") {
  const Grid g = Grid::uniform({-1.0, -1.0}, {1.0, 1.0}, {41, 41});
  const auto f = sampled(g, [](const Eigen::VectorXd& z) {
    return std::sin(3 * z[0]) + 0.7 * std::cos(2 * z[1]);
  });
  const double level = 0.35;
  for (const auto& pl : extract_contours(f, level))
    for (const auto& p : pl.pts)
      CHECK(std::abs(interpolate_value(f, vecn({p[0], p[1]})) - level) <= 1e-9);
}

TEST_CASE("contour extraction is deterministic") {
  const Grid g = Grid::uniform({-1.0, -1.0}, {1.0, 1.0}, {33, 33});
  const auto f = sampled(g, [](const Eigen::VectorXd& z) {
    return z[0] * z[0] - z[1] * z[1];  // saddle through the origin
  });
  const auto a = extract_contours(f, 0.1);
  const auto b = extract_contours(f, 0.1);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].pts == b[i].pts);
}

TEST_CASE("slicing pins the remaining dimensions to nodes") {
  const Grid g = Grid::uniform({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, {11, 11, 11});
  const auto f = sampled(g, [](const Eigen::VectorXd& z) {
    return z[1] * z[1] + z[2] * z[2] - 0.25 + 0.0 * z[0];
  });
  const auto lines = extract_contours(f, 0.0, {{0, 0.5}});
  REQUIRE_FALSE(lines.empty());
  CHECK(lines[0].dim_a == 1);
  CHECK(lines[0].dim_b == 2);
  CHECK_THROWS_AS(extract_contours(f, 0.0, {{0, 0.517}}), Error);  // off-grid
  CHECK_THROWS_AS(extract_contours(f, 0.0), Error);  // three free dims
}

TEST_CASE("1d level crossings with linear interpolation") {
  const Grid g = Grid::uniform({0.0}, {1.0}, {11}, "z");
  const auto f = sampled(g, [](const Eigen::VectorXd& z) { return z[0] - 0.55; });
  const auto xs = level_crossings_1d(f, 0.0);
  REQUIRE(xs.size() == 1);
  CHECK(xs[0] == Catch::Approx(0.55).margin(1e-12));
}
