#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>

#include "clocklat/core.hpp"
#include "clocklat/rng.hpp"

using namespace clocklat;

namespace {

std::complex<double> unit(double angle) { return std::polar(1.0, angle); }

// independent oracle: angle between plane vectors through acos of the dot product
double acos_distance(double a, double b) {
  const double dot = std::cos(a) * std::cos(b) + std::sin(a) * std::sin(b);
  return std::acos(std::clamp(dot, -1.0, 1.0));
}

}  // namespace

TEST_CASE("geodesic distance on S_N") {
  CHECK(geodesic_distance_SN({0}, {0}, 4) == 0.0);
  CHECK(geodesic_distance_SN({0}, {1}, 4) == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(geodesic_distance_SN({0}, {3}, 4) == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(index_distance({1}, {6}, 8) == 3);
  CHECK(index_distance({0}, {4}, 8) == 4);
}

TEST_CASE("geodesic distance on S_N is symmetric, bounded by pi and matches acos") {
  for (int n = 2; n <= 24; ++n) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const double d = geodesic_distance_SN({a}, {b}, n);
        CHECK(d == geodesic_distance_SN({b}, {a}, n));
        CHECK(d >= 0.0);
        CHECK(d <= kPi + 1e-15);
        CHECK((d == 0.0) == (a == b));
        CHECK(std::abs(d - acos_distance(kTwoPi * a / n, kTwoPi * b / n)) < 1e-7);
      }
    }
  }
}

TEST_CASE("triangle inequality on S_N, exhaustive for N <= 16") {
  for (int n = 2; n <= 16; ++n) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          CHECK(index_distance({a}, {c}, n) <= index_distance({a}, {b}, n) + index_distance({b}, {c}, n));
        }
  }
}

TEST_CASE("geodesic distance on S^1") {
  CHECK(geodesic_distance_S1(CircleValue(0.0), CircleValue(kPi)) == doctest::Approx(kPi));
  CHECK(euclidean_distance(CircleValue(0.0), CircleValue(kPi)) == doctest::Approx(2.0));
  CHECK(geodesic_distance_S1(CircleValue(0.3), CircleValue(0.3)) == 0.0);
  CHECK(geodesic_distance_S1(CircleValue(0.0), CircleValue(kPi / 2)) == doctest::Approx(kPi / 2));
  // wraparound
  CHECK(geodesic_distance_S1(CircleValue(0.1), CircleValue(kTwoPi - 0.1)) == doctest::Approx(0.2));
}

TEST_CASE("half chord equals sine of half geodesic") {
  CounterRng rng(7, {1});
  for (int i = 0; i < 2000; ++i) {
    const CircleValue a(kTwoPi * rng.uniform());
    const CircleValue b(kTwoPi * rng.uniform());
    const double chord = std::abs(unit(a.angle()) - unit(b.angle()));
    CHECK(std::abs(0.5 * chord - std::sin(0.5 * geodesic_distance_S1(a, b))) < 1e-12);
    CHECK(std::abs(euclidean_distance(a, b) - chord) < 1e-12);
  }
}

TEST_CASE("canonical angles") {
  CHECK(CircleValue(kTwoPi).angle() == 0.0);
  CHECK(CircleValue(-kPi / 2).angle() == doctest::Approx(1.5 * kPi));
  CHECK(CircleValue(5 * kPi).angle() == doctest::Approx(kPi));
  for (double a : {-10.0, -1e-17, 0.0, 3.0, 6.28, 100.0}) {
    const double c = CircleValue(a).angle();
    CHECK(c >= 0.0);
    CHECK(c < kTwoPi);
    CHECK(std::hypot(CircleValue(a).x(), CircleValue(a).y()) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("bond energies") {
  CHECK(bond_energy_sq({0}, {2}, 4) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(bond_energy_sq({0}, {1}, 4) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(bond_energy_sq({5}, {5}, 8) == 0.0);
  for (int n = 2; n <= 20; ++n) {
    const auto table = bond_cost_table(n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const double plane = std::norm(unit(kTwoPi * a / n) - unit(kTwoPi * b / n));
        const double e = bond_energy_sq({a}, {b}, n);
        CHECK(std::abs(e - plane) < 1e-12);
        CHECK(e == 4.0 * std::pow(std::sin(geodesic_distance_SN({a}, {b}, n) / 2), 2));
        CHECK(table[static_cast<std::size_t>(a * n + b)] == e);
        CHECK(e >= 0.0);
        CHECK(e <= 4.0 + 1e-15);
      }
    }
  }
}

TEST_CASE("prefactor values and monotonicity") {
  CHECK(prefactor(2) == doctest::Approx(4.0 / (kPi * kPi)).epsilon(1e-15));
  CHECK(prefactor(4) == doctest::Approx(8.0 / (kPi * kPi)).epsilon(1e-15));
  CHECK(std::abs(prefactor(1000000) - 1.0) < 1e-10);
  for (int n = 2; n < 10000; ++n) {
    CHECK(prefactor(n) < prefactor(n + 1));
    const double x = kPi / n;
    CHECK(1.0 - prefactor(n) <= x * x / 3.0 + 1e-12);
  }
  CHECK(prefactor(3) == doctest::Approx(std::pow(std::sin(kPi / 3) / (kPi / 3), 2)).epsilon(1e-15));
}

TEST_CASE("norms") {
  const std::vector<double> v{1.0, -1.0};
  CHECK(norm_1(v) == 2.0);
  CHECK(norm_21(Matrix::identity(2)) == 2.0);
  const std::vector<double> g{3.0, 4.0};
  const std::vector<double> nu{1.0, -1.0};
  CHECK(norm_21(Matrix::outer(g, nu)) == doctest::Approx(10.0));
  Matrix diag(3, 3);
  diag(0, 0) = -2;
  diag(1, 1) = 0.5;
  diag(2, 2) = 3;
  CHECK(norm_21(diag) == doctest::Approx(5.5));
}

TEST_CASE("sin^2 inequality gap") {
  CHECK(sin_lemma_gap(1, 0.7) == 0.0);
  CHECK(std::abs(sin_lemma_gap(2, kPi / 2)) < 1e-15);
  CHECK(sin_lemma_gap(3, kPi / 6) == doctest::Approx(0.2990381));
  CHECK_THROWS_AS(sin_lemma_gap(2, 2.0), Error);
  CHECK_THROWS_AS(sin_lemma_gap(1, -0.1), Error);
  try {
    sin_lemma_gap(3, 1.5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidParameter);
  }
}

TEST_CASE("state count validation names N") {
  try {
    geodesic_distance_SN({0}, {0}, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidParameter);
    CHECK(e.field() == "N");
  }
  CHECK_THROWS_AS(require_phase({4}, 4), Error);
  CHECK_THROWS_AS(require_phase({-1}, 4), Error);
}

TEST_CASE("directions") {
  CHECK_THROWS_AS(Direction::from_unit({1.0, 1.0}), Error);
  const auto d = Direction::from_integers({1, 1});
  CHECK(d[0] == doctest::Approx(std::sqrt(0.5)));
  CHECK(d.norm1() == doctest::Approx(std::sqrt(2.0)));
  CHECK(d.is_rational());
  CHECK(!d.axis_index());
  CHECK(Direction::axis(3, 2, -1).axis_index() == 2);
  CHECK(Direction::from_integers({0, -3}).axis_index() == 1);
  CHECK(Direction::normalized({3.0, 4.0})[1] == doctest::Approx(0.8));
  CHECK_THROWS_AS(Direction::from_integers({0, 0}), Error);
}

TEST_CASE("exact floors and signs for rational directions") {
  // oracle: i . w compared against k * |w| via integer squares, done by brute force in long double
  const std::vector<std::vector<std::int64_t>> dirs{{1, 1}, {1, 2}, {-3, 4}, {2, -1}, {1, 0}, {1, 1, 1}, {1, -2, 2}};
  for (const auto& w : dirs) {
    const auto nu = Direction::from_integers(w);
    long double norm = 0;
    for (auto x : w) norm += static_cast<long double>(x) * x;
    norm = std::sqrt(norm);
    for (int a = -9; a <= 9; ++a) {
      for (int b = -9; b <= 9; ++b) {
        std::vector<int> site{a, b};
        if (w.size() == 3) site.push_back(a - b);
        long double dot = 0;
        for (std::size_t l = 0; l < w.size(); ++l) dot += static_cast<long double>(site[l]) * w[l];
        const auto expected_floor = static_cast<std::int64_t>(std::floor(dot / norm));
        // skip near-integer values where long double itself is unreliable; exact sqrt cases still count
        const long double q = dot / norm;
        if (std::abs(q - std::round(q)) > 1e-12L || std::abs(norm - std::round(norm)) == 0) {
          CHECK(nu.floor_dot(site) == expected_floor);
        }
        const int sign = dot > 0 ? 1 : (dot < 0 ? -1 : 0);
        CHECK(nu.sign_of_dot(site) == sign);
      }
    }
  }
}

TEST_CASE("floor at exact integer values") {
  // (1,1)/sqrt2: i = (1,1) gives sqrt2, floor 1; (3,4)/5 with i = (3,4) gives exactly 5
  CHECK(Direction::from_integers({3, 4}).floor_dot(std::vector<int>{3, 4}) == 5);
  CHECK(Direction::from_integers({3, 4}).floor_dot(std::vector<int>{-3, -4}) == -5);
  CHECK(Direction::from_integers({1, 1}).floor_dot(std::vector<int>{1, 1}) == 1);
  CHECK(Direction::from_integers({1, 1}).floor_dot(std::vector<int>{1, -1}) == 0);
}

TEST_CASE("orthonormal bases") {
  for (const auto& w : std::vector<std::vector<double>>{{1, 0}, {1, 1}, {0.3, -0.7}, {1, 2, 3}, {0, 0, 1}, {1, -1, 0}}) {
    const auto nu = Direction::normalized(w);
    const auto basis = nu.orthonormal_basis();
    REQUIRE(basis.size() == w.size());
    for (std::size_t l = 0; l < w.size(); ++l) CHECK(basis[0][l] == doctest::Approx(nu[l]));
    for (std::size_t a = 0; a < basis.size(); ++a) {
      for (std::size_t b = 0; b < basis.size(); ++b) {
        double dot = 0;
        for (std::size_t l = 0; l < w.size(); ++l) dot += basis[a][l] * basis[b][l];
        CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-12);
      }
    }
  }
}

TEST_CASE("counter rng is keyed and reproducible") {
  CounterRng a(42, {1, 2});
  CounterRng b(42, {1, 2});
  CounterRng c(42, {2, 1});
  std::set<std::uint64_t> seen;
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    differs = differs || x != c.next();
    seen.insert(x);
  }
  CHECK(differs);
  CHECK(seen.size() == 100);
  CounterRng r(1, {0});
  std::vector<int> hist(5, 0);
  for (int i = 0; i < 50000; ++i) {
    const auto k = r.below(5);
    REQUIRE(k < 5);
    ++hist[k];
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
  CHECK(derive_seed(1, "cell") != derive_seed(1, "volume"));
  CHECK(derive_seed(1, "cell") == derive_seed(1, "cell"));
}
