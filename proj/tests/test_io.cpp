#include <catch2/catch_amalgamated.hpp>

#include "spreach/field_io.hpp"
#include "spreach/hj_solver.hpp"
#include "spreach/models.hpp"
#include "spreach/svg.hpp"
#include "test_helpers.hpp"

using namespace spreach;
using spreach::testing::vec1;

namespace {

ValueField solved_field(bool extremes) {
  const auto red = derive_reduced(make_genetic_circuit(1.0));
  const auto ell = build_payoff_box(vec1(0.25), vec1(0.75), 10.0, 3.0);
  SolveOptions opts;
  opts.track_extremes = extremes;
  return solve_reduced_value(red, ell, Grid::uniform({0.0}, {1.0}, {51}, "z"), -0.3, opts);
}

}  // namespace

TEST_CASE("csv round-trip restores the field exactly") {
  const auto field = solved_field(true);
  const auto back = field_from_csv(field_to_csv(field));
  CHECK(back.grid == field.grid);
  CHECK(back.time == field.time);
  CHECK(back.values == field.values);       // bitwise
  CHECK(back.running_min == field.running_min);
  CHECK(back.running_max == field.running_max);
  CHECK(back.grid.axis(0).name == "z0");
}

TEST_CASE("csv round-trip without extremes") {
  const auto field = solved_field(false);
  const auto back = field_from_csv(field_to_csv(field));
  CHECK(back.values == field.values);
  CHECK_FALSE(back.has_extremes());
}

TEST_CASE("binary round-trip restores the field exactly") {
  const auto field = solved_field(true);
  const auto back = field_from_binary(field_to_binary(field));
  CHECK(back.grid == field.grid);
  CHECK(back.time == field.time);
  CHECK(back.values == field.values);
  CHECK(back.running_min == field.running_min);
  CHECK(back.running_max == field.running_max);
}

TEST_CASE("two-dimensional fields round-trip through both formats") {
  const auto sys = make_genetic_circuit(1.0);
  const auto ell = build_payoff_box(vec1(0.25), vec1(0.75), 10.0, 3.0);
  const Grid grid({{"z0", 21, 0.0, 1.0}, {"y0", 17, 0.0, 1.0}});
  const auto field = solve_full_value(sys, 0.5, ell, grid, -0.05);
  const auto via_csv = field_from_csv(field_to_csv(field));
  const auto via_bin = field_from_binary(field_to_binary(field));
  CHECK(via_csv.values == field.values);
  CHECK(via_bin.values == field.values);
  CHECK(via_csv.grid == field.grid);
  CHECK(via_bin.grid.axis(1).name == "y0");
}

TEST_CASE("binary reader rejects corrupted containers") {
  const auto field = solved_field(false);
  std::string bytes = field_to_binary(field);
  CHECK_THROWS_AS(field_from_binary(bytes.substr(0, 20)), Error);
  std::string wrong = bytes;
  wrong[0] = 'X';
  CHECK_THROWS_AS(field_from_binary(wrong), Error);
}

TEST_CASE("mask csv carries coordinates, source values and flags") {
  const auto field = solved_field(false);
  const auto rb = brs_bounds(field, 0.1);
  const std::string csv = masks_to_csv(rb);
  CHECK(csv.find("z0,source_value,inner,outer") != std::string::npos);
  CHECK(csv.find("# eta 0.1") != std::string::npos);
  // one row per node plus metadata and header
  long rows = 0;
  for (char c : csv)
    if (c == '\n') ++rows;
  CHECK(rows == field.grid.size() + 5);
}

TEST_CASE("trajectory csv has one row per sample") {
  const auto red = derive_reduced(make_genetic_circuit(1.0));
  const auto traj = integrate_reduced(red, vec1(0.5), SignalSpec::constant(vec1(1.0), 0.1),
                                      SignalSpec::constant(spreach::testing::vecn({1, 1, 1}), 0.1),
                                      -0.5);
  const std::string csv = trajectory_to_csv(traj);
  CHECK(csv.find("time,z0,u0,d0,d1,d2") != std::string::npos);
  long rows = 0;
  for (char c : csv)
    if (c == '\n') ++rows;
  CHECK(rows == static_cast<long>(traj.times.size()) + 2);
}

TEST_CASE("double formatting round-trips exactly") {
  for (double v : {0.1, -0.25, 1.0 / 3.0, 1e-17, 123456.789, 0.0}) {
    CHECK(parse_double(fmt_double(v)) == v);
  }
}

TEST_CASE("fingerprints are stable and content-sensitive") {
  CHECK(fingerprint_hex("abc") == fingerprint_hex("abc"));
  CHECK(fingerprint_hex("abc") != fingerprint_hex("abd"));
  CHECK(fingerprint_hex("").size() == 16);
}

TEST_CASE("svg rendering is deterministic") {
  auto render = [] {
    SvgCanvas canvas(0.0, 1.0, 0.0, 1.0, "z", "y");
    canvas.add_vline(0.25, "gold");
    canvas.add_rect(0.4, 0.4, 0.6, 0.6, "grey", 1.0, "4,2");
    canvas.add_polyline({{0.1, 0.1}, {0.5, 0.7}, {0.9, 0.2}}, "steelblue");
    canvas.add_circle_marker(0.1, 0.1, "steelblue");
    canvas.add_cross_marker(0.9, 0.2, "steelblue");
    return canvas.render();
  };
  const std::string a = render(), b = render();
  CHECK(a == b);
  CHECK(a.find("<svg") == 0);
  CHECK(a.find("</svg>") != std::string::npos);
}
