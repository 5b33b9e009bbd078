#include <catch2/catch_amalgamated.hpp>

#include "spreach/hj_solver.hpp"
#include "spreach/models.hpp"
#include "test_helpers.hpp"

using namespace spreach;
using spreach::testing::analytic_1d_value;
using spreach::testing::single_integrator;
using spreach::testing::vec1;
using spreach::testing::vecn;

namespace {

PayoffFn analytic_payoff() {
  return build_payoff_box(vec1(-0.25), vec1(0.25), 1.0, 3.0);
}

double max_error_vs_analytic(const ValueField& f, double t) {
  double err = 0.0;
  for (long i = 0; i < f.grid.size(); ++i)
    err = std::max(err, std::abs(f.values[i] - analytic_1d_value(t, f.grid.coord(0, i))));
  return err;
}

}  // namespace

TEST_CASE("terminal condition passthrough at t = 0") {
  const auto red = single_integrator();
  const auto ell = analytic_payoff();
  const Grid grid = Grid::uniform({-1.0}, {1.0}, {51}, "z");
  SolveOptions opts;
  opts.track_extremes = true;
  const auto field = solve_reduced_value(red, ell, grid, 0.0, opts);
  CHECK(field.stats.steps == 0);
  for (long i = 0; i < grid.size(); ++i) {
    CHECK(field.values[i] == ell(grid.point(i)));
    CHECK(field.running_min[i] == field.values[i]);
    CHECK(field.running_max[i] == field.values[i]);
  }
}

TEST_CASE("1d controlled eikonal problem against the analytic solution") {
  const auto red = single_integrator();
  const auto ell = analytic_payoff();
  const Grid grid = Grid::uniform({-1.0}, {1.0}, {401}, "z");
  const auto field = solve_reduced_value(red, ell, grid, -0.5);
  CHECK(max_error_vs_analytic(field, -0.5) <= 0.02);
  CHECK(std::abs(interpolate_value(field, vec1(0.25)) - (-0.25)) <= 0.02);
}

TEST_CASE("grid refinement roughly halves the error") {
  const auto red = single_integrator();
  const auto ell = analytic_payoff();
  const auto coarse =
      solve_reduced_value(red, ell, Grid::uniform({-1.0}, {1.0}, {201}, "z"), -0.5);
  const auto fine =
      solve_reduced_value(red, ell, Grid::uniform({-1.0}, {1.0}, {401}, "z"), -0.5);
  const double e1 = max_error_vs_analytic(coarse, -0.5);
  const double e2 = max_error_vs_analytic(fine, -0.5);
  CHECK(e1 / e2 >= 1.4);
  CHECK(e1 / e2 <= 2.6);
}

TEST_CASE("rk2 stepping stays close to the analytic solution") {
  const auto red = single_integrator();
  const auto ell = analytic_payoff();
  SolveOptions opts;
  opts.scheme = SolveOptions::Scheme::rk2;
  const auto field =
      solve_reduced_value(red, ell, Grid::uniform({-1.0}, {1.0}, {401}, "z"), -0.5, opts);
  CHECK(max_error_vs_analytic(field, -0.5) <= 0.03);
  CHECK(field.stats.scheme == "rk2");
}

TEST_CASE("symmetric problem keeps an even value field") {
  const auto red = single_integrator();
  const auto ell = analytic_payoff();
  const Grid grid = Grid::uniform({-1.0}, {1.0}, {201}, "z");
  const auto field = solve_reduced_value(red, ell, grid, -0.4);
  const int n = grid.axis(0).nodes;
  for (int i = 0; i < n; ++i)
    CHECK(std::abs(field.values[i] - field.values[n - 1 - i]) <= 1e-10);
}

TEST_CASE("discrete maximum principle on the genetic circuit") {
  const auto red = derive_reduced(make_genetic_circuit(1.0));
  const auto ell = build_payoff_box(vec1(0.25), vec1(0.75), 10.0, 3.0);
  const Grid grid = Grid::uniform({0.0}, {1.0}, {101}, "z");
  SolveOptions opts;
  opts.track_extremes = true;
  const auto field = solve_reduced_value(red, ell, grid, -0.5, opts);
  double lo = 1e300, hi = -1e300;
  for (long i = 0; i < grid.size(); ++i) {
    lo = std::min(lo, ell(grid.point(i)));
    hi = std::max(hi, ell(grid.point(i)));
  }
  // running extremes cover every accepted step and bracket the final values
  for (long i = 0; i < grid.size(); ++i) {
    CHECK(field.running_min[i] >= lo - 1e-3);
    CHECK(field.running_max[i] <= hi + 1e-3);
    CHECK(field.running_min[i] <= field.values[i]);
    CHECK(field.values[i] <= field.running_max[i]);
  }
}

TEST_CASE("identical inputs give bit-identical fields") {
  const auto red = derive_reduced(make_genetic_circuit(1.0));
  const auto ell = build_payoff_box(vec1(0.25), vec1(0.75), 10.0, 3.0);
  const Grid grid = Grid::uniform({0.0}, {1.0}, {51}, "z");
  const auto a = solve_reduced_value(red, ell, grid, -0.3);
  const auto b = solve_reduced_value(red, ell, grid, -0.3);
  CHECK(a.values == b.values);
}

TEST_CASE("dynamics cache does not change a single bit") {
  const auto red = derive_reduced(make_genetic_circuit(1.0));
  const auto ell = build_payoff_box(vec1(0.25), vec1(0.75), 10.0, 3.0);
  const Grid grid = Grid::uniform({0.0}, {1.0}, {51}, "z");
  SolveOptions cached, uncached;
  uncached.cache_dynamics = false;
  const auto a = solve_reduced_value(red, ell, grid, -0.3, cached);
  const auto b = solve_reduced_value(red, ell, grid, -0.3, uncached);
  CHECK(a.values == b.values);
}

TEST_CASE("full solve on a decoupled system matches the generic path exactly") {
  // SP system whose joint dynamics equal a handwritten 2-d model at eps = 1
  SPSystem sys;
  sys.name = "decoupled";
  sys.n_z = 1;
  sys.n_y = 1;
  sys.u_set = BoxSet::cube(-1, 1, 1, 2);
  sys.d_set = BoxSet::cube(0, 0, 1, 2);
  sys.f = [](const Eigen::VectorXd&, const Eigen::VectorXd& u, const Eigen::VectorXd&) {
    return u;
  };
  sys.g = [](const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::VectorXd::Zero(1);
  };
  sys.M = [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(1, 1); };
  sys.A = [](const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Constant(1, 1, -1.0);
  };

  ReducedSystem hand;
  hand.n_z = 2;
  hand.u_set = sys.u_set;
  hand.d_set = sys.d_set;
  hand.provenance = "handwritten:decoupled2d";
  hand.F = [](const Eigen::VectorXd& x, const Eigen::VectorXd& u, const Eigen::VectorXd&) {
    Eigen::VectorXd out(2);
    out[0] = u[0] + 0.0 * (-1.0) * x[1];
    out[1] = (0.0 + -x[1]) / 1.0;
    return out;
  };

  const auto ell = build_payoff_box(vec1(-0.25), vec1(0.25), 1.0, 3.0);
  const Grid grid({{"z0", 41, -1.0, 1.0}, {"y0", 41, -1.0, 1.0}});
  const auto via_full = solve_full_value(sys, 1.0, ell, grid, -0.25);
  const auto via_generic = solve_value(hand, ell, grid, -0.25);
  for (long i = 0; i < grid.size(); ++i)
    CHECK(std::abs(via_full.values[i] - via_generic.values[i]) <= 1e-12);
}

TEST_CASE("running extremes are monotone in the horizon") {
  const auto red = single_integrator();
  const auto ell = analytic_payoff();
  const Grid grid = Grid::uniform({-1.0}, {1.0}, {101}, "z");
  SolveOptions opts;
  opts.track_extremes = true;
  const auto shorter = solve_reduced_value(red, ell, grid, -0.25, opts);
  const auto longer = solve_reduced_value(red, ell, grid, -0.5, opts);
  for (long i = 0; i < grid.size(); ++i) {
    CHECK(longer.running_min[i] <= shorter.running_min[i] + 1e-14);
    CHECK(longer.running_max[i] >= shorter.running_max[i] - 1e-14);
  }
}

TEST_CASE("snapshots land on the requested times") {
  const auto red = single_integrator();
  const auto ell = analytic_payoff();
  const Grid grid = Grid::uniform({-1.0}, {1.0}, {101}, "z");
  SolveOptions opts;
  opts.track_extremes = true;
  opts.snapshot_extremes = true;
  opts.snapshot_times = {0.0, -0.1, -0.25, -0.5};
  const auto field = solve_reduced_value(red, ell, grid, -0.5, opts);
  REQUIRE(field.snapshots.size() == 4);
  CHECK(field.snapshots[0].time == 0.0);
  CHECK(field.snapshots[1].time == Catch::Approx(-0.1).margin(1e-12));
  CHECK(field.snapshots[3].time == Catch::Approx(-0.5).margin(1e-12));
  // final snapshot equals the returned field
  CHECK(field.snapshots[3].values == field.values);
  // snapshot at 0 is the payoff
  for (long i = 0; i < grid.size(); ++i)
    CHECK(field.snapshots[0].values[i] == ell(grid.point(i)));
}

TEST_CASE("solver input validation") {
  const auto red = single_integrator();
  const auto ell = analytic_payoff();
  const Grid grid = Grid::uniform({-1.0}, {1.0}, {51}, "z");
  CHECK_THROWS_AS(solve_reduced_value(red, ell, grid, 0.5), Error);
  SolveOptions bad;
  bad.cfl = 1.5;
  CHECK_THROWS_AS(solve_reduced_value(red, ell, grid, -0.1, bad), Error);
  const Grid wrong = Grid::uniform({-1.0, -1.0}, {1.0, 1.0}, {5, 5});
  CHECK_THROWS_AS(solve_reduced_value(red, ell, wrong, -0.1), Error);
}

TEST_CASE("full solve enforces the desk-scale dimension guard") {
  MrnNetwork net;
  net.n_metabolites = 2;
  net.edges = {{0, 1, 1.0}, {1, 2, 1.0}};
  const auto sys = make_mrn(net);  // n_z + n_y = 5
  const auto ell = build_payoff_box(vecn({0.4, 0.4, 0.4}), vecn({0.6, 0.6, 0.6}), 10.0, 4.0);
  const Grid grid = Grid::uniform({0, 0, 0, 0, 0}, {1, 1, 1, 1, 1}, {3, 3, 3, 3, 3});
  CHECK_THROWS_AS(solve_full_value(sys, 0.1, ell, grid, -0.1), Error);
}
