#pragma once

// Limit functionals on representable BV fields: piecewise constant fields on
// a lambda-grid (jump part) and smooth fields away from a codimension-2
// singular set (absolutely continuous part). Cantor parts are not representable.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "clocklat/core.hpp"

namespace clocklat {

enum class ValueMode { Circle, Clock };

/// Field constant on the half-open cells lambda z + lambda [0,1)^d,
/// z in origin + [0, extent). Values live on S^1 or, when tagged, on S_N.
class GridPartitionField {
 public:
  static GridPartitionField circle(double lambda, std::vector<int> extent, std::vector<CircleValue> values,
                                   std::vector<int> origin = {});
  static GridPartitionField clock(double lambda, std::vector<int> extent, int states,
                                  std::vector<PhaseIndex> values, std::vector<int> origin = {});

  int dim() const noexcept { return static_cast<int>(extent_.size()); }
  double cell_size() const noexcept { return lambda_; }
  std::span<const int> extent() const noexcept { return extent_; }
  std::span<const int> origin() const noexcept { return origin_; }
  std::size_t cell_count() const noexcept { return count_; }

  ValueMode mode() const noexcept { return mode_; }
  int states() const noexcept { return states_; }

  CircleValue value(std::size_t cell) const;
  PhaseIndex phase(std::size_t cell) const;
  std::span<const CircleValue> circle_values() const noexcept { return circle_; }
  std::span<const PhaseIndex> phases() const noexcept { return phases_; }
  void set_value(std::size_t cell, CircleValue v);
  void set_phase(std::size_t cell, PhaseIndex k);

  /// Geodesic distance between the values of two cells, exact multiples of theta_N in clock mode.
  double distance(std::size_t a, std::size_t b) const;

  std::vector<int> cell_coords(std::size_t cell) const;
  std::optional<std::size_t> cell_index(std::span<const int> z) const;
  std::vector<double> cell_lower(std::size_t cell) const;
  std::vector<double> cell_center(std::size_t cell) const;
  /// Cell whose half-open cube contains x.
  std::optional<std::size_t> cell_containing(std::span<const double> x) const;

  /// Row-major stride of axis l.
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

 private:
  GridPartitionField(double lambda, std::vector<int> extent, std::vector<int> origin);

  double lambda_;
  std::vector<int> extent_;
  std::vector<int> origin_;
  std::vector<std::size_t> strides_;
  std::size_t count_ = 0;
  ValueMode mode_ = ValueMode::Circle;
  int states_ = 0;
  std::vector<CircleValue> circle_;
  std::vector<PhaseIndex> phases_;
};

/// Sum of lambda^{d-1} d_S1 over interior faces separating unequal values.
double jump_energy_direct(const GridPartitionField& field);

/// Same quantity assembled from one-dimensional jump sums along every
/// coordinate line, integrated over the cross-sections.
double jump_energy_sliced(const GridPartitionField& field);

/// Total variation of a sequence of circle values on a line (sum of jumps).
double line_variation(std::span<const CircleValue> line);

/// H^{d-1} of the jump set: lambda^{d-1} times the number of faces with unequal values.
double interface_area(const GridPartitionField& field);

/// Interpret the field as S_N-valued for the given N. Circle fields must have every
/// angle within tol of an S_N state; clock fields must have N divisible by their own N.
GridPartitionField as_clock_field(const GridPartitionField& field, int states, double tol = 1e-9);

/// prefactor(N) * jump_energy_direct for an S_N-valued field.
double limit_energy_EN(const GridPartitionField& field, int states);

/// Union of points (d = 2) or segments (d = 3) where a smooth field may be singular.
struct SingularSet {
  struct Piece {
    std::vector<double> a;
    std::vector<double> b;  // equal to a for a point
  };
  std::vector<Piece> pieces;

  bool empty() const noexcept { return pieces.empty(); }
  double distance(std::span<const double> x) const;
  /// Whether the closed box [lower, upper] meets the set.
  bool meets_box(std::span<const double> lower, std::span<const double> upper) const;
};

/// S^1-valued field exp(i phi) smooth outside a singular set.
struct SmoothFieldSpec {
  int dim = 2;
  std::function<double(std::span<const double>)> angle;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  SingularSet singular;
  double guard = 0.0;  // quadrature nodes closer than this to the singular set are skipped

  static SmoothFieldSpec constant(int dim, double angle);
  static SmoothFieldSpec affine(std::vector<double> slope, double offset = 0.0);
  /// arg(x - center) in d = 2.
  static SmoothFieldSpec vortex(std::vector<double> center, double guard);
};

struct AxisBox {
  std::vector<double> lower;
  std::vector<double> upper;

  static AxisBox unit(int dim);
  double volume() const;
};

struct QuadratureReport {
  double value = 0.0;
  std::size_t nodes = 0;
  std::size_t skipped = 0;
  double skipped_measure = 0.0;
};

/// Midpoint rule for the integral of |grad u|_{2,1} on M^d cells of the box.
/// Nodes inside the guard are skipped and their measure reported, not redistributed.
QuadratureReport gradient_energy(const SmoothFieldSpec& spec, const AxisBox& box, int cells_per_axis);

/// Smooth part of a limit-energy input together with its quadrature setup.
struct SmoothPart {
  SmoothFieldSpec spec;
  AxisBox box;
  int cells_per_axis = 256;
};

struct LimitEnergy {
  double gradient = 0.0;
  double jump = 0.0;
  double total = 0.0;
  std::optional<QuadratureReport> quadrature;
};

/// E(u) for fields with an absolutely continuous part, a jump part, or both.
LimitEnergy limit_energy_E(const SmoothPart& smooth);
LimitEnergy limit_energy_E(const GridPartitionField& partition);
LimitEnergy limit_energy_E(const SmoothPart& smooth, const GridPartitionField& partition);

}  // namespace clocklat
