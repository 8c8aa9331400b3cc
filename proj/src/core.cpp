#include "clocklat/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace clocklat {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InvalidSpec: return "invalid-spec";
    case ErrorKind::SearchTooLarge: return "search-too-large";
    case ErrorKind::Io: return "io";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

double canonical_angle(double angle) {
  if (!std::isfinite(angle)) {
    throw Error(ErrorKind::InvalidInput, "angle", "angle must be finite");
  }
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  // fmod of a tiny negative value lands on exactly 2 pi after the shift.
  if (a >= kTwoPi) a = 0.0;
  return a;
}

CircleValue::CircleValue(double angle) : angle_(canonical_angle(angle)) {}

CircleValue CircleValue::from_phase(PhaseIndex k, int states) {
  require_phase(k, states);
  return CircleValue(kTwoPi * static_cast<double>(k.value) / static_cast<double>(states));
}

double CircleValue::x() const { return std::cos(angle_); }
double CircleValue::y() const { return std::sin(angle_); }

// ---------------------------------------------------------------------------
// Direction

Direction Direction::from_unit(std::vector<double> components, double tol) {
  if (components.size() < 2) {
    throw Error(ErrorKind::InvalidParameter, "normal", "direction needs dimension >= 2");
  }
  double n2 = 0.0;
  for (double c : components) n2 += c * c;
  if (std::abs(std::sqrt(n2) - 1.0) > tol) {
    throw Error(ErrorKind::InvalidParameter, "normal", "direction is not a unit vector");
  }
  Direction d;
  d.components_ = std::move(components);
  return d;
}

Direction Direction::normalized(std::vector<double> components) {
  double n2 = 0.0;
  for (double c : components) n2 += c * c;
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw Error(ErrorKind::InvalidParameter, "normal", "direction must be a nonzero finite vector");
  }
  const double n = std::sqrt(n2);
  for (double& c : components) c /= n;
  return from_unit(std::move(components));
}

Direction Direction::from_integers(std::vector<std::int64_t> components) {
  std::vector<double> real(components.begin(), components.end());
  Direction d = normalized(std::move(real));
  d.integers_ = std::move(components);
  return d;
}

Direction Direction::axis(int dim, int axis, int sign) {
  if (dim < 2 || axis < 0 || axis >= dim || (sign != 1 && sign != -1)) {
    throw Error(ErrorKind::InvalidParameter, "normal", "invalid coordinate axis");
  }
  std::vector<std::int64_t> c(static_cast<std::size_t>(dim), 0);
  c[static_cast<std::size_t>(axis)] = sign;
  return from_integers(std::move(c));
}

std::span<const std::int64_t> Direction::integers() const {
  if (!integers_) {
    throw Error(ErrorKind::InvalidInput, "normal", "direction has no integer representation");
  }
  return *integers_;
}

std::int64_t Direction::integer_norm_sq() const {
  std::int64_t s = 0;
  for (auto c : integers()) s += c * c;
  return s;
}

std::optional<int> Direction::axis_index() const {
  int found = -1;
  for (int l = 0; l < dim(); ++l) {
    const double c = components_[static_cast<std::size_t>(l)];
    if (c == 0.0) continue;
    if (std::abs(std::abs(c) - 1.0) > kDefaultTol || found >= 0) return std::nullopt;
    found = l;
  }
  if (found < 0) return std::nullopt;
  return found;
}

double Direction::norm1() const { return norm_1(components_); }

double Direction::dot(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t l = 0; l < components_.size(); ++l) s += components_[l] * x[l];
  return s;
}

namespace {

std::int64_t integer_dot(std::span<const std::int64_t> n, std::span<const int> site) {
  std::int64_t p = 0;
  for (std::size_t l = 0; l < n.size(); ++l) p += n[l] * static_cast<std::int64_t>(site[l]);
  return p;
}

// q * sqrt(s2) <= p, decided in integers.
bool scaled_le(std::int64_t q, std::int64_t s2, std::int64_t p) {
  __extension__ typedef __int128 wide;
  if (q <= 0 && p >= 0) return true;
  if (q >= 0 && p < 0) return false;
  if (q >= 0) return static_cast<wide>(q) * q * s2 <= static_cast<wide>(p) * p;
  // q < 0 and p < 0: |q| sqrt(s2) >= |p|
  return static_cast<wide>(q) * q * s2 >= static_cast<wide>(p) * p;
}

}  // namespace

int Direction::sign_of_dot(std::span<const int> site) const {
  if (integers_) {
    const auto p = integer_dot(*integers_, site);
    return (p > 0) - (p < 0);
  }
  double s = 0.0;
  for (std::size_t l = 0; l < components_.size(); ++l) s += components_[l] * site[l];
  return (s > 0.0) - (s < 0.0);
}

std::int64_t Direction::floor_dot(std::span<const int> site) const {
  if (integers_) {
    const auto p = integer_dot(*integers_, site);
    const auto s2 = integer_norm_sq();
    auto q = static_cast<std::int64_t>(std::floor(static_cast<double>(p) / std::sqrt(static_cast<double>(s2))));
    while (!scaled_le(q, s2, p)) --q;
    while (scaled_le(q + 1, s2, p)) ++q;
    return q;
  }
  double s = 0.0;
  for (std::size_t l = 0; l < components_.size(); ++l) s += components_[l] * site[l];
  return static_cast<std::int64_t>(std::floor(s));
}

std::vector<std::vector<double>> Direction::orthonormal_basis() const {
  const auto d = static_cast<std::size_t>(dim());
  std::vector<std::vector<double>> basis{components_};
  if (d == 2) {
    basis.push_back({-components_[1], components_[0]});
    return basis;
  }
  // Gram-Schmidt over the standard basis, most orthogonal candidates first.
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(components_[a]) < std::abs(components_[b]);
  });
  for (std::size_t e : order) {
    if (basis.size() == d) break;
    std::vector<double> v(d, 0.0);
    v[e] = 1.0;
    for (const auto& b : basis) {
      double p = 0.0;
      for (std::size_t l = 0; l < d; ++l) p += v[l] * b[l];
      for (std::size_t l = 0; l < d; ++l) v[l] -= p * b[l];
    }
    double n2 = 0.0;
    for (double c : v) n2 += c * c;
    if (n2 < 1e-8) continue;
    const double n = std::sqrt(n2);
    for (double& c : v) c /= n;
    basis.push_back(std::move(v));
  }
  return basis;
}

// ---------------------------------------------------------------------------
// Matrix

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::outer(std::span<const double> column, std::span<const double> row) {
  Matrix m(column.size(), row.size());
  for (std::size_t r = 0; r < column.size(); ++r)
    for (std::size_t c = 0; c < row.size(); ++c) m(r, c) = column[r] * row[c];
  return m;
}

// ---------------------------------------------------------------------------
// Scalars

double theta(int states) {
  require_states(states);
  return kTwoPi / static_cast<double>(states);
}

void require_states(int states, const char* field) {
  if (states < 2) {
    std::ostringstream msg;
    msg << field << " must satisfy N >= 2 (got " << states << ")";
    throw Error(ErrorKind::InvalidParameter, field, msg.str());
  }
}

void require_phase(PhaseIndex k, int states) {
  require_states(states);
  if (k.value < 0 || k.value >= states) {
    std::ostringstream msg;
    msg << "phase index " << k.value << " outside [0, " << states << ")";
    throw Error(ErrorKind::InvalidInput, "phase", msg.str());
  }
}

int index_distance(PhaseIndex a, PhaseIndex b, int states) {
  require_states(states);
  const int diff = std::abs(a.value - b.value) % states;
  return std::min(diff, states - diff);
}

double geodesic_distance_SN(PhaseIndex a, PhaseIndex b, int states) {
  return theta(states) * index_distance(a, b, states);
}

double geodesic_distance_S1(CircleValue a, CircleValue b) {
  const double diff = std::abs(a.angle() - b.angle());
  return std::min(diff, kTwoPi - diff);
}

double euclidean_distance(CircleValue a, CircleValue b) {
  return std::hypot(a.x() - b.x(), a.y() - b.y());
}

double bond_energy_sq(PhaseIndex a, PhaseIndex b, int states) {
  const int k = index_distance(a, b, states);
  if (k == 0) return 0.0;
  const double s = std::sin(0.5 * k * theta(states));
  return 4.0 * s * s;
}

double prefactor(int states) {
  const double half = 0.5 * theta(states);
  const double s = std::sin(half) / half;
  return s * s;
}

double norm_1(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += std::abs(c);
  return s;
}

double norm_21(const Matrix& a) {
  double total = 0.0;
  for (std::size_t c = 0; c < a.cols; ++c) {
    double col = 0.0;
    for (std::size_t r = 0; r < a.rows; ++r) col += a(r, c) * a(r, c);
    total += std::sqrt(col);
  }
  return total;
}

double sin_lemma_gap(int k, double angle, double tol) {
  if (k < 1) throw Error(ErrorKind::InvalidParameter, "k", "k must be >= 1");
  if (!(angle >= -tol) || !(angle <= kPi / k + tol)) {
    std::ostringstream msg;
    msg << "angle " << angle << " outside [0, pi/" << k << "]";
    throw Error(ErrorKind::InvalidParameter, "theta", msg.str());
  }
  const double big = std::sin(0.5 * k * angle);
  const double small = std::sin(0.5 * angle);
  return big * big - k * small * small;
}

std::vector<double> bond_cost_table(int states) {
  std::vector<double> table(static_cast<std::size_t>(states) * states);
  for (int a = 0; a < states; ++a)
    for (int b = 0; b < states; ++b)
      table[static_cast<std::size_t>(a) * states + b] = bond_energy_sq({a}, {b}, states);
  return table;
}

}  // namespace clocklat
