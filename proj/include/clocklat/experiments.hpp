#pragma once

// Study drivers: the sin^2 inequality sweep, prefactor tables, cell-problem
// sandwich ladders, oblique rasterization ladders and log-log rate fits.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "clocklat/core.hpp"
#include "clocklat/solvers.hpp"

namespace clocklat {

struct LemmaReport {
  int k_max = 1;
  int grid_points = 0;
  std::size_t evaluations = 0;
  double min_gap = 0.0;
  int argmin_k = 1;
  double argmin_theta = 0.0;
  // restricted to k >= 2 and theta > 0, where the inequality is not an identity
  double nontrivial_min_gap = 0.0;
  int nontrivial_argmin_k = 0;
  double nontrivial_argmin_theta = 0.0;
  double k1_max_abs_gap = 0.0;
  std::vector<std::pair<int, double>> equality_nodes;  // k >= 2, theta > 0, |gap| <= tol
};

/// Evaluates sin_lemma_gap(k, theta) for k = 1..k_max on grid_points equispaced
/// angles of [0, pi/k] (both ends included).
LemmaReport run_lemma_sweep(int k_max, int grid_points, double tol = kDefaultTol);

struct TableRow {
  double parameter = 0.0;
  double lower = 0.0;
  double estimate = 0.0;
  double upper = 0.0;
  double analytic = 0.0;
  double gap = 0.0;  // estimate - analytic
  double seconds = 0.0;
};

struct RateFit {
  double exponent = 0.0;
  double residual = 0.0;  // root mean square of the log-log residuals
  std::size_t used = 0;
  std::vector<std::size_t> excluded;  // rows with zero or non-finite gap
};

struct ConvergenceTable {
  std::string name;
  std::vector<TableRow> rows;
  std::vector<std::string> notes;  // one per row (method used, ...), may be empty
  std::optional<RateFit> rate;     // unset when fewer than three usable rows
};

/// Least-squares slope of log|gap| against log(parameter).
std::optional<RateFit> fit_rate(const std::vector<TableRow>& rows);

struct SandwichConfig {
  PhaseIndex s{0};
  PhaseIndex r{1};
  Direction normal = Direction::axis(2, 1);
  int states = 2;
  std::vector<double> ladder{0.125, 0.0625, 0.03125};
  CellMethod method = CellMethod::Auto;
  CellStart start = CellStart::Staircase;
  AnnealSchedule schedule;
  unsigned threads = 1;
};

ConvergenceTable run_gamma_sandwich(const SandwichConfig& config);

ConvergenceTable run_prefactor_limit(const std::vector<int>& ladder);

struct RasterConfig {
  Direction normal = Direction::from_integers({1, 1});
  CircleValue a{0.0};
  CircleValue b{kPi};
  std::vector<double> ladder{1.0 / 16, 1.0 / 32, 1.0 / 64};
};

/// Rasterizes the line through (1/2, 1/2) with normal nu on the unit square at each
/// lambda and reports jump energy per unit of true interface length.
ConvergenceTable run_oblique_raster(const RasterConfig& config);

/// Length of the segment of {x : (x - (1/2, 1/2)) . nu = 0} inside [0,1]^2.
double unit_square_chord(const Direction& normal);

/// Fixed header followed by one line per row; seconds written as 0 when timing is off.
std::string to_csv(const ConvergenceTable& table, bool timing = true);

std::vector<double> dyadic_ladder(int first_power, int last_power);

}  // namespace clocklat
