#pragma once

// Circle arithmetic for the N-clock model: exact phase indices on S_N,
// canonical angles on S^1, geodesic distances and the anisotropic norms
// used by the limit functionals.

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clocklat {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kDefaultTol = 1e-12;

enum class ErrorKind {
  InvalidParameter,
  InvalidInput,
  InvalidSpec,
  SearchTooLarge,
  Io,
  Config,
};

const char* to_string(ErrorKind kind);

/// Library error. `field()` names the offending parameter when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string field, const std::string& message)
      : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorKind kind_;
  std::string field_;
};

/// A state of S_N stored as its integer index k, standing for exp(i 2 pi k / N).
/// The number of states N is carried by the owning container.
struct PhaseIndex {
  int value = 0;

  friend constexpr bool operator==(PhaseIndex, PhaseIndex) = default;
  friend constexpr auto operator<=>(PhaseIndex, PhaseIndex) = default;
};

/// A point of S^1 given by its angle, canonicalized into [0, 2 pi).
class CircleValue {
 public:
  CircleValue() = default;
  explicit CircleValue(double angle);

  static CircleValue from_phase(PhaseIndex k, int states);

  double angle() const noexcept { return angle_; }
  double x() const;
  double y() const;

  friend bool operator==(CircleValue, CircleValue) = default;

 private:
  double angle_ = 0.0;
};

double canonical_angle(double angle);

/// Unit vector nu in R^d. When built from integer components the exact
/// integers are kept so that signs and floors of i . nu can be decided exactly.
class Direction {
 public:
  static Direction from_unit(std::vector<double> components, double tol = kDefaultTol);
  static Direction normalized(std::vector<double> components);
  static Direction from_integers(std::vector<std::int64_t> components);
  static Direction axis(int dim, int axis, int sign = 1);

  int dim() const noexcept { return static_cast<int>(components_.size()); }
  std::span<const double> components() const noexcept { return components_; }
  double operator[](std::size_t i) const { return components_[i]; }

  bool is_rational() const noexcept { return integers_.has_value(); }
  std::span<const std::int64_t> integers() const;
  std::int64_t integer_norm_sq() const;

  /// Index of the axis when nu = +-e_l, otherwise nullopt.
  std::optional<int> axis_index() const;

  double norm1() const;
  double dot(std::span<const double> x) const;

  /// Sign of i . nu for an integer site, exact for rational directions.
  int sign_of_dot(std::span<const int> site) const;
  /// floor(i . nu) for an integer site, exact for rational directions.
  std::int64_t floor_dot(std::span<const int> site) const;

  /// Orthonormal basis (nu, nu_2, ..., nu_d) with nu first.
  std::vector<std::vector<double>> orthonormal_basis() const;

 private:
  std::vector<double> components_;
  std::optional<std::vector<std::int64_t>> integers_;
};

/// Small dense matrix, row-major.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

  static Matrix identity(std::size_t n);
  static Matrix outer(std::span<const double> column, std::span<const double> row);
};

double theta(int states);
void require_states(int states, const char* field = "N");
void require_phase(PhaseIndex k, int states);

/// Integer geodesic distance min(|a-b|, N-|a-b|) between S_N states.
int index_distance(PhaseIndex a, PhaseIndex b, int states);

double geodesic_distance_SN(PhaseIndex a, PhaseIndex b, int states);
double geodesic_distance_S1(CircleValue a, CircleValue b);
double euclidean_distance(CircleValue a, CircleValue b);

/// |u(a) - u(b)|^2 = 4 sin^2(k theta_N / 2) with k the index distance.
double bond_energy_sq(PhaseIndex a, PhaseIndex b, int states);

/// 4 sin^2(theta_N/2) / theta_N^2.
double prefactor(int states);

double norm_1(std::span<const double> v);
double norm_21(const Matrix& a);

/// sin^2(k theta/2) - k sin^2(theta/2), defined for theta in [0, pi/k].
double sin_lemma_gap(int k, double angle, double tol = kDefaultTol);

/// Table of bond_energy_sq for all index pairs, row-major N x N.
std::vector<double> bond_cost_table(int states);

}  // namespace clocklat
