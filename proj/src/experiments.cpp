#include "clocklat/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "clocklat/continuum.hpp"
#include "clocklat/parallel.hpp"
#include "clocklat/rng.hpp"

namespace clocklat {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void sort_rows(ConvergenceTable& table) {
  std::vector<std::size_t> idx(table.rows.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return table.rows[a].parameter < table.rows[b].parameter; });
  std::vector<TableRow> rows;
  std::vector<std::string> notes;
  for (auto i : idx) {
    rows.push_back(table.rows[i]);
    if (!table.notes.empty()) notes.push_back(table.notes[i]);
  }
  table.rows = std::move(rows);
  table.notes = std::move(notes);
}

}  // namespace

LemmaReport run_lemma_sweep(int k_max, int grid_points, double tol) {
  if (k_max < 1) throw Error(ErrorKind::InvalidParameter, "k_max", "k_max must be >= 1");
  if (grid_points < 2) throw Error(ErrorKind::InvalidParameter, "grid", "grid needs at least two points");
  LemmaReport rep;
  rep.k_max = k_max;
  rep.grid_points = grid_points;
  rep.min_gap = std::numeric_limits<double>::infinity();
  rep.nontrivial_min_gap = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= k_max; ++k) {
    const double top = kPi / k;
    for (int j = 0; j < grid_points; ++j) {
      // the last node is pi/k itself, not a rounded multiple of the step
      const double t = j + 1 == grid_points ? top : top * j / (grid_points - 1);
      const double g = sin_lemma_gap(k, t, 0.0);
      ++rep.evaluations;
      if (g < rep.min_gap) {
        rep.min_gap = g;
        rep.argmin_k = k;
        rep.argmin_theta = t;
      }
      if (k == 1) {
        rep.k1_max_abs_gap = std::max(rep.k1_max_abs_gap, std::abs(g));
        continue;
      }
      if (j == 0) continue;
      if (g < rep.nontrivial_min_gap) {
        rep.nontrivial_min_gap = g;
        rep.nontrivial_argmin_k = k;
        rep.nontrivial_argmin_theta = t;
      }
      if (std::abs(g) <= tol) rep.equality_nodes.emplace_back(k, t);
    }
  }
  if (k_max == 1) rep.nontrivial_min_gap = 0.0;
  return rep;
}

std::optional<RateFit> fit_rate(const std::vector<TableRow>& rows) {
  RateFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double g = std::abs(rows[i].gap);
    if (!(g > 0.0) || !std::isfinite(g) || !(rows[i].parameter > 0.0)) {
      fit.excluded.push_back(i);
      continue;
    }
    xs.push_back(std::log(rows[i].parameter));
    ys.push_back(std::log(g));
  }
  if (xs.size() < 3) return std::nullopt;
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  fit.exponent = sxy / sxx;
  const double icpt = my - fit.exponent * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (icpt + fit.exponent * xs[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  fit.used = xs.size();
  return fit;
}

ConvergenceTable run_gamma_sandwich(const SandwichConfig& config) {
  require_states(config.states);
  if (config.ladder.empty()) throw Error(ErrorKind::InvalidParameter, "ladder", "ladder must not be empty");
  ConvergenceTable table;
  table.name = "sandwich";
  table.rows.resize(config.ladder.size());
  table.notes.resize(config.ladder.size());
  parallel_for(config.ladder.size(), config.threads, [&](std::size_t i) {
    const auto t0 = Clock::now();
    CellProblemSpec spec;
    spec.s = config.s;
    spec.r = config.r;
    spec.normal = config.normal;
    spec.eps = config.ladder[i];
    spec.states = config.states;
    spec.method = config.method;
    spec.start = config.start;
    spec.schedule = config.schedule;
    spec.schedule.seed = mix64(config.schedule.seed + i);
    spec.threads = 1;
    const auto est = cell_formula_estimate(spec);
    table.rows[i] = {spec.eps, est.lower, est.estimate, est.upper, est.analytic, est.estimate - est.analytic,
                     seconds_since(t0)};
    table.notes[i] = est.method;
  });
  sort_rows(table);
  table.rate = fit_rate(table.rows);
  return table;
}

ConvergenceTable run_prefactor_limit(const std::vector<int>& ladder) {
  ConvergenceTable table;
  table.name = "prefactor";
  for (int n : ladder) {
    const auto t0 = Clock::now();
    require_states(n);
    const double x = kPi / n;
    const double p = prefactor(n);
    table.rows.push_back({static_cast<double>(n), 1.0 - x * x / 3.0, p, 1.0, 1.0, p - 1.0, seconds_since(t0)});
  }
  sort_rows(table);
  table.rate = fit_rate(table.rows);
  return table;
}

double unit_square_chord(const Direction& normal) {
  if (normal.dim() != 2) throw Error(ErrorKind::InvalidParameter, "normal", "raster studies are two-dimensional");
  const double tx = -normal[1];
  const double ty = normal[0];
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (double t : {tx, ty}) {
    if (std::abs(t) < 1e-15) continue;
    const double a = -0.5 / t;
    const double b = 0.5 / t;
    lo = std::max(lo, std::min(a, b));
    hi = std::min(hi, std::max(a, b));
  }
  return hi - lo;
}

ConvergenceTable run_oblique_raster(const RasterConfig& config) {
  const auto& nu = config.normal;
  const double chord = unit_square_chord(nu);
  const double analytic = geodesic_distance_S1(config.a, config.b) * nu.norm1();
  ConvergenceTable table;
  table.name = "raster";
  for (double lambda : config.ladder) {
    const auto t0 = Clock::now();
    const double cells = 1.0 / lambda;
    const auto n = static_cast<int>(std::lround(cells));
    if (!(lambda > 0.0) || n < 1 || std::abs(cells - n) > 1e-9 * cells) {
      throw Error(ErrorKind::InvalidParameter, "lambda", "1/lambda must be a whole number of cells");
    }
    std::vector<CircleValue> values(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        // side of the cell center relative to the line through the middle of the square
        bool plus = false;
        if (nu.is_rational()) {
          const auto w = nu.integers();
          plus = (2LL * i + 1 - n) * w[0] + (2LL * j + 1 - n) * w[1] > 0;
        } else {
          plus = (2.0 * i + 1 - n) * nu[0] + (2.0 * j + 1 - n) * nu[1] > 0.0;
        }
        values[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] =
            plus ? config.b : config.a;
      }
    }
    const auto field = GridPartitionField::circle(lambda, {n, n}, std::move(values));
    const double estimate = jump_energy_direct(field) / chord;
    table.rows.push_back({lambda, estimate, estimate, estimate, analytic, estimate - analytic, seconds_since(t0)});
  }
  sort_rows(table);
  table.rate = fit_rate(table.rows);
  return table;
}

std::string to_csv(const ConvergenceTable& table, bool timing) {
  std::string out = "parameter,lower,estimate,upper,analytic,gap,seconds\n";
  char buf[512];
  for (const auto& r : table.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.6f\n", r.parameter, r.lower, r.estimate,
                  r.upper, r.analytic, r.gap, timing ? r.seconds : 0.0);
    out += buf;
  }
  return out;
}

std::vector<double> dyadic_ladder(int first_power, int last_power) {
  std::vector<double> out;
  for (int p = first_power; p <= last_power; ++p) out.push_back(std::ldexp(1.0, -p));
  return out;
}

}  // namespace clocklat
