#pragma once

// Lattice domains Omega ∩ eps Z^d, spin fields on them and the discrete
// clock energy E_eps^N together with its N/(2 pi eps) scaling.

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clocklat/core.hpp"

namespace clocklat {

/// Nearest-neighbor pair, stored once. `axis` is the coordinate direction of b - a.
struct Bond {
  std::size_t a = 0;
  std::size_t b = 0;
  int axis = 0;
};

enum class ShapeKind { Grid, Box, Cube, Predicate };

/// Distance to the boundary for interior points; values <= 0 mean "outside".
using InteriorDistance = std::function<double(std::span<const double>)>;

struct Shape {
  ShapeKind kind = ShapeKind::Grid;
  std::vector<double> lower;   // Box
  std::vector<double> upper;   // Box
  std::optional<Direction> normal;  // Cube
  std::string label;
};

class LatticeDomain {
 public:
  /// Sites i with origin_l <= i_l < origin_l + extent_l. The region covered is the
  /// box of half-open unit cells around the sites, so end sites sit eps/2 from the boundary.
  static LatticeDomain grid(double eps, std::vector<int> extent, std::vector<bool> periodic = {},
                            std::vector<int> origin = {});
  /// Sites strictly inside the open box (lower, upper), with a 1e-9 eps inset.
  static LatticeDomain box(double eps, std::vector<double> lower, std::vector<double> upper,
                           std::vector<bool> periodic = {});
  /// Unit cube Q_nu centered at the origin with two faces orthogonal to nu.
  static LatticeDomain unit_cube(const Direction& normal, double eps);
  /// General domain: sites in the integer box [lo, hi] whose interior distance exceeds the inset.
  static LatticeDomain from_predicate(double eps, std::vector<int> lo, std::vector<int> hi,
                                      InteriorDistance distance, std::string label);

  int dim() const noexcept { return dim_; }
  double spacing() const noexcept { return eps_; }
  std::size_t size() const noexcept { return boundary_distance_.size(); }

  std::span<const int> site(std::size_t s) const {
    return {coords_.data() + s * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  std::vector<double> position(std::size_t s) const;
  std::optional<std::size_t> find(std::span<const int> coord) const;

  /// Euclidean distance from eps*i to the domain boundary (periodic axes excluded).
  double boundary_distance(std::size_t s) const { return boundary_distance_[s]; }

  const std::vector<Bond>& bonds() const noexcept { return bonds_; }
  std::span<const std::size_t> neighbors(std::size_t s) const {
    return {adjacency_.data() + adjacency_offsets_[s], adjacency_offsets_[s + 1] - adjacency_offsets_[s]};
  }

  std::span<const int> origin() const noexcept { return origin_; }
  std::span<const int> extent() const noexcept { return extent_; }
  const std::vector<bool>& periodic() const noexcept { return periodic_; }
  const Shape& shape() const noexcept { return shape_; }

  /// Row-major index of site s in the bounding box.
  std::size_t box_index(std::size_t s) const { return box_index_[s]; }
  std::size_t box_size() const noexcept { return site_of_box_.size(); }
  std::optional<std::size_t> site_at_box_index(std::size_t index) const;

 private:
  LatticeDomain() = default;
  void build(const std::function<bool(std::span<const int>, std::span<const double>)>& member,
             const std::function<double(std::span<const double>)>& distance);

  int dim_ = 0;
  double eps_ = 0.0;
  std::vector<int> origin_;
  std::vector<int> extent_;
  std::vector<bool> periodic_;
  Shape shape_;

  std::vector<int> coords_;
  std::vector<std::size_t> box_index_;
  std::vector<std::size_t> site_of_box_;  // npos outside
  std::vector<double> boundary_distance_;
  std::vector<Bond> bonds_;
  std::vector<std::size_t> adjacency_offsets_;
  std::vector<std::size_t> adjacency_;
};

inline constexpr std::size_t kNoSite = std::numeric_limits<std::size_t>::max();

/// Subset A of the lattice used by the localized energy E(u, A).
class Region {
 public:
  static Region all(const LatticeDomain& domain);
  static Region from_sites(const LatticeDomain& domain, std::span<const std::size_t> sites, std::string label);
  static Region from_predicate(const LatticeDomain& domain,
                               const std::function<bool(std::span<const double>)>& inside, std::string label);

  bool contains(std::size_t s) const { return member_[s] != 0; }
  std::size_t size() const noexcept { return member_.size(); }
  const std::string& label() const noexcept { return label_; }

 private:
  std::vector<char> member_;
  std::string label_;
};

class SpinField {
 public:
  SpinField(std::shared_ptr<const LatticeDomain> domain, int states, PhaseIndex fill = {});

  const LatticeDomain& domain() const noexcept { return *domain_; }
  const std::shared_ptr<const LatticeDomain>& domain_ptr() const noexcept { return domain_; }
  int states() const noexcept { return states_; }
  std::size_t size() const noexcept { return phases_.size(); }

  PhaseIndex operator[](std::size_t s) const { return phases_[s]; }
  void set(std::size_t s, PhaseIndex k);
  std::span<const PhaseIndex> phases() const noexcept { return phases_; }

  bool frozen(std::size_t s) const { return frozen_[s] != 0; }
  void freeze(std::size_t s, bool value = true) { frozen_[s] = value ? 1 : 0; }
  std::vector<std::size_t> frozen_sites() const;
  std::vector<std::size_t> free_sites() const;

  /// Number of sites carrying each phase.
  std::vector<std::size_t> phase_counts() const;

  friend bool operator==(const SpinField& a, const SpinField& b) {
    return a.states_ == b.states_ && a.phases_ == b.phases_ && a.frozen_ == b.frozen_;
  }

 private:
  std::shared_ptr<const LatticeDomain> domain_;
  int states_;
  std::vector<PhaseIndex> phases_;
  std::vector<char> frozen_;
};

struct EnergyReport {
  double raw = 0.0;     // E_eps^N
  double scaled = 0.0;  // N/(2 pi eps) * raw
  std::size_t bond_count = 0;
  std::string region;
};

/// N / (2 pi eps).
double energy_scale(int states, double eps);

std::vector<Bond> enumerate_bonds(const LatticeDomain& domain, const Region* region = nullptr);

/// Sum of |u_i - u_j|^2 over unordered bonds, without the eps^d weight.
double bond_sum(const SpinField& field, const Region* region = nullptr);

EnergyReport discrete_energy(const SpinField& field, const Region* region = nullptr);

/// Sites whose distance to the domain boundary is <= width (inclusive up to tol).
std::vector<std::size_t> boundary_layer(const LatticeDomain& domain, double width, double tol = kDefaultTol);

/// Writes u_nu^{s,r} (s where eps i . nu > 0, r otherwise) on the layer and freezes it.
SpinField apply_jump_datum(SpinField field, PhaseIndex s, PhaseIndex r, const Direction& normal,
                           std::span<const std::size_t> layer);

}  // namespace clocklat
