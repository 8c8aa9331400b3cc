#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "clocklat/experiments.hpp"

using namespace clocklat;

namespace {

std::vector<TableRow> synthetic(double c, double power, std::vector<double> params) {
  std::vector<TableRow> rows;
  for (double p : params) {
    TableRow r;
    r.parameter = p;
    r.analytic = 1.0;
    r.estimate = 1.0 + c * std::pow(p, power);
    r.gap = r.estimate - r.analytic;
    rows.push_back(r);
  }
  return rows;
}

void check_rows(const ConvergenceTable& t) {
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    CHECK(r.lower <= r.estimate + 1e-12);
    CHECK(r.estimate <= r.upper + 1e-12);
    CHECK(r.gap == r.estimate - r.analytic);
    if (i > 0) {
      CHECK(t.rows[i - 1].parameter < r.parameter);
      CHECK(t.rows[i - 1].analytic == r.analytic);
    }
  }
}

std::string csv_body(const std::string& csv) {
  // drop the seconds column
  std::istringstream in(csv);
  std::string line;
  std::string out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

}  // namespace

TEST_CASE("lemma sweep") {
  const auto one = run_lemma_sweep(1, 100);
  CHECK(std::abs(one.min_gap) <= 1e-15);
  CHECK(one.k1_max_abs_gap <= 1e-15);
  CHECK(one.equality_nodes.empty());

  const auto two = run_lemma_sweep(2, 3);  // nodes 0, pi/4, pi/2 for k = 2
  REQUIRE(two.equality_nodes.size() == 1);
  CHECK(two.equality_nodes[0].first == 2);
  CHECK(two.equality_nodes[0].second == kPi / 2);
  CHECK(std::abs(sin_lemma_gap(2, kPi / 2, 0.0)) <= 1e-15);

  const auto full = run_lemma_sweep(64, 10000);
  CHECK(full.evaluations == 640000);
  CHECK(full.min_gap >= -1e-12);
  CHECK(full.nontrivial_min_gap >= -1e-12);
  CHECK(full.nontrivial_min_gap <= 1e-12);
  CHECK(full.nontrivial_argmin_k == 2);
  CHECK(std::abs(full.nontrivial_argmin_theta - kPi / 2) <= 1e-12);
  // the only nontrivial equality is the k = 2 endpoint
  for (const auto& [k, t] : full.equality_nodes) {
    CHECK(k == 2);
    CHECK(t == doctest::Approx(kPi / 2));
  }
  CHECK_THROWS_AS(run_lemma_sweep(0, 10), Error);
}

TEST_CASE("rate fits on synthetic gaps") {
  const auto ladder = dyadic_ladder(3, 7);
  REQUIRE(ladder.size() == 5);
  CHECK(ladder[0] == 0.125);
  const auto lin = fit_rate(synthetic(0.7, 1.0, ladder));
  REQUIRE(lin);
  CHECK(std::abs(lin->exponent - 1.0) <= 1e-6);
  CHECK(lin->residual <= 1e-9);
  CHECK(lin->used == 5);
  const auto quad = fit_rate(synthetic(-3.0, 2.0, ladder));
  REQUIRE(quad);
  CHECK(std::abs(quad->exponent - 2.0) <= 1e-6);

  auto rows = synthetic(1.0, 1.0, ladder);
  rows[2].gap = 0.0;
  rows[4].gap = std::nan("");
  const auto partial = fit_rate(rows);
  REQUIRE(partial);
  CHECK(partial->used == 3);
  CHECK(partial->excluded == std::vector<std::size_t>{2, 4});
  rows[1].gap = 0.0;
  CHECK(!fit_rate(rows));

  // noisy gaps: a residual comes back, no claim on the exponent
  auto noisy = synthetic(1.0, 1.5, ladder);
  for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i].gap *= (i % 2 ? 1.3 : 0.8);
  const auto n = fit_rate(noisy);
  REQUIRE(n);
  CHECK(n->residual > 0.0);
}

TEST_CASE("prefactor limit table") {
  const auto t = run_prefactor_limit({2, 4, 1000, 8});
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows[0].parameter == 2);
  CHECK(t.rows[0].estimate == doctest::Approx(4.0 / (kPi * kPi)).epsilon(1e-14));
  CHECK(1.0 - t.rows[3].estimate <= 3.3e-6);
  CHECK(1.0 - t.rows[3].estimate >= 0.0);
  for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(t.rows[i].estimate > t.rows[i - 1].estimate);
  check_rows(t);

  std::vector<int> ladder;
  for (int n = 8; n <= 8192; n *= 2) ladder.push_back(n);
  const auto dy = run_prefactor_limit(ladder);
  REQUIRE(dy.rate);
  CHECK(std::abs(dy.rate->exponent + 2.0) <= 0.1);
  CHECK(!run_prefactor_limit({16}).rate);
}

TEST_CASE("oblique raster") {
  CHECK(unit_square_chord(Direction::axis(2, 1)) == doctest::Approx(1.0));
  CHECK(unit_square_chord(Direction::from_integers({1, 1})) == doctest::Approx(std::sqrt(2.0)));
  CHECK(unit_square_chord(Direction::from_integers({1, 2})) == doctest::Approx(std::sqrt(5.0) / 2));

  RasterConfig axis;
  axis.normal = Direction::axis(2, 1);
  const auto flat = run_oblique_raster(axis);
  for (const auto& r : flat.rows) {
    CHECK(r.analytic == doctest::Approx(kPi));
    CHECK(r.estimate == doctest::Approx(kPi).epsilon(1e-14));
  }

  const auto diag = run_oblique_raster(RasterConfig{});
  REQUIRE(diag.rows.size() == 3);
  check_rows(diag);
  const auto& finest = diag.rows.front();
  CHECK(finest.parameter == 1.0 / 64);
  CHECK(finest.analytic == doctest::Approx(kPi * std::sqrt(2.0)));
  CHECK(std::abs(finest.gap) / finest.analytic <= 0.02);
  // the staircase undercounts by one face per side, relative gap 1/n
  for (const auto& r : diag.rows) CHECK(std::abs(r.gap) / r.analytic == doctest::Approx(r.parameter).epsilon(1e-9));

  RasterConfig same;
  same.b = same.a;
  for (const auto& r : run_oblique_raster(same).rows) CHECK(r.estimate == 0.0);
}

TEST_CASE("gamma sandwich tables") {
  SandwichConfig flat;
  flat.s = {1};
  flat.r = {1};
  flat.ladder = {0.125, 0.0625};
  flat.schedule.sweeps = 20;
  flat.schedule.chains = 2;
  for (const auto& r : run_gamma_sandwich(flat).rows) {
    CHECK(r.lower == 0.0);
    CHECK(r.estimate == 0.0);
    CHECK(r.upper == 0.0);
    CHECK(r.analytic == 0.0);
  }

  SandwichConfig axis;
  axis.schedule.chains = 8;
  axis.schedule.sweeps = 200;
  axis.threads = 2;
  const auto t = run_gamma_sandwich(axis);
  REQUIRE(t.rows.size() == 3);
  check_rows(t);
  CHECK(t.rows[0].parameter == 1.0 / 32);
  CHECK(t.rows[0].analytic == doctest::Approx(4.0 / kPi));
  CHECK(std::abs(t.rows[0].gap) <= 0.05);
  CHECK(t.notes.size() == 3);
  CHECK(t.notes.back() == "enumerate");

  SandwichConfig oblique;
  oblique.states = 4;
  oblique.s = {2};
  oblique.r = {0};
  oblique.normal = Direction::from_integers({1, 1});
  oblique.ladder = {0.125};
  oblique.schedule.chains = 2;
  oblique.schedule.sweeps = 30;
  const auto o = run_gamma_sandwich(oblique);
  CHECK(o.rows[0].analytic == doctest::Approx(prefactor(4) * kPi * std::sqrt(2.0)));
  check_rows(o);

  // a row's result does not depend on the thread count
  axis.threads = 1;
  const auto serial = run_gamma_sandwich(axis);
  for (std::size_t i = 0; i < t.rows.size(); ++i) CHECK(serial.rows[i].estimate == t.rows[i].estimate);
}

TEST_CASE("csv output") {
  const auto t = run_prefactor_limit({2, 3, 4});
  const auto csv = to_csv(t, false);
  CHECK(csv.rfind("parameter,lower,estimate,upper,analytic,gap,seconds\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 4);
  CHECK(csv == to_csv(run_prefactor_limit({4, 2, 3}), false));
  CHECK(csv.find(",0.000000\n") != std::string::npos);
  // timing only changes the last column
  CHECK(csv_body(to_csv(t, true)) == csv_body(csv));

  // annealed tables rerun bit for bit
  SandwichConfig cfg;
  cfg.ladder = {0.0625};
  cfg.start = CellStart::Random;
  cfg.schedule.chains = 4;
  cfg.schedule.sweeps = 50;
  cfg.schedule.seed = 77;
  CHECK(to_csv(run_gamma_sandwich(cfg), false) == to_csv(run_gamma_sandwich(cfg), false));
}
