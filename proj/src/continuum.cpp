#include "clocklat/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace clocklat {

GridPartitionField::GridPartitionField(double lambda, std::vector<int> extent, std::vector<int> origin)
    : lambda_(lambda), extent_(std::move(extent)), origin_(std::move(origin)) {
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) {
    throw Error(ErrorKind::InvalidParameter, "lambda", "cell size must be positive");
  }
  if (extent_.empty()) throw Error(ErrorKind::InvalidParameter, "extent", "partition needs at least one axis");
  if (origin_.empty()) origin_.assign(extent_.size(), 0);
  if (origin_.size() != extent_.size()) {
    throw Error(ErrorKind::InvalidParameter, "origin", "origin must match extent");
  }
  strides_.assign(extent_.size(), 1);
  count_ = 1;
  for (std::size_t l = extent_.size(); l-- > 0;) {
    if (extent_[l] < 1) throw Error(ErrorKind::InvalidParameter, "extent", "extent must be >= 1");
    strides_[l] = count_;
    count_ *= static_cast<std::size_t>(extent_[l]);
  }
}

GridPartitionField GridPartitionField::circle(double lambda, std::vector<int> extent, std::vector<CircleValue> values,
                                              std::vector<int> origin) {
  GridPartitionField f(lambda, std::move(extent), std::move(origin));
  if (values.size() != f.count_) {
    throw Error(ErrorKind::InvalidInput, "values", "one value per cell is required");
  }
  f.mode_ = ValueMode::Circle;
  f.circle_ = std::move(values);
  return f;
}

GridPartitionField GridPartitionField::clock(double lambda, std::vector<int> extent, int states,
                                             std::vector<PhaseIndex> values, std::vector<int> origin) {
  GridPartitionField f(lambda, std::move(extent), std::move(origin));
  require_states(states);
  if (values.size() != f.count_) {
    throw Error(ErrorKind::InvalidInput, "values", "one value per cell is required");
  }
  for (auto k : values) require_phase(k, states);
  f.mode_ = ValueMode::Clock;
  f.states_ = states;
  f.phases_ = std::move(values);
  return f;
}

CircleValue GridPartitionField::value(std::size_t cell) const {
  if (mode_ == ValueMode::Clock) return CircleValue::from_phase(phases_[cell], states_);
  return circle_[cell];
}

PhaseIndex GridPartitionField::phase(std::size_t cell) const {
  if (mode_ != ValueMode::Clock) {
    throw Error(ErrorKind::InvalidInput, "value_mode", "field is not S_N-valued");
  }
  return phases_[cell];
}

void GridPartitionField::set_value(std::size_t cell, CircleValue v) {
  if (mode_ != ValueMode::Circle) throw Error(ErrorKind::InvalidInput, "value_mode", "field is S_N-valued");
  circle_[cell] = v;
}

void GridPartitionField::set_phase(std::size_t cell, PhaseIndex k) {
  if (mode_ != ValueMode::Clock) throw Error(ErrorKind::InvalidInput, "value_mode", "field is not S_N-valued");
  require_phase(k, states_);
  phases_[cell] = k;
}

double GridPartitionField::distance(std::size_t a, std::size_t b) const {
  if (mode_ == ValueMode::Clock) return geodesic_distance_SN(phases_[a], phases_[b], states_);
  return geodesic_distance_S1(circle_[a], circle_[b]);
}

std::vector<int> GridPartitionField::cell_coords(std::size_t cell) const {
  std::vector<int> z(extent_.size());
  for (std::size_t l = 0; l < extent_.size(); ++l) {
    z[l] = origin_[l] + static_cast<int>((cell / strides_[l]) % static_cast<std::size_t>(extent_[l]));
  }
  return z;
}

std::optional<std::size_t> GridPartitionField::cell_index(std::span<const int> z) const {
  std::size_t index = 0;
  for (std::size_t l = 0; l < extent_.size(); ++l) {
    const int rel = z[l] - origin_[l];
    if (rel < 0 || rel >= extent_[l]) return std::nullopt;
    index += static_cast<std::size_t>(rel) * strides_[l];
  }
  return index;
}

std::vector<double> GridPartitionField::cell_lower(std::size_t cell) const {
  auto z = cell_coords(cell);
  std::vector<double> x(z.size());
  for (std::size_t l = 0; l < z.size(); ++l) x[l] = lambda_ * z[l];
  return x;
}

std::vector<double> GridPartitionField::cell_center(std::size_t cell) const {
  auto z = cell_coords(cell);
  std::vector<double> x(z.size());
  for (std::size_t l = 0; l < z.size(); ++l) x[l] = lambda_ * (z[l] + 0.5);
  return x;
}

std::optional<std::size_t> GridPartitionField::cell_containing(std::span<const double> x) const {
  if (x.size() != extent_.size()) return std::nullopt;
  std::vector<int> z(x.size());
  for (std::size_t l = 0; l < x.size(); ++l) z[l] = static_cast<int>(std::floor(x[l] / lambda_));
  return cell_index(z);
}

// ---------------------------------------------------------------------------

double jump_energy_direct(const GridPartitionField& field) {
  const int d = field.dim();
  const double face = std::pow(field.cell_size(), d - 1);
  double total = 0.0;
  for (std::size_t cell = 0; cell < field.cell_count(); ++cell) {
    const auto z = field.cell_coords(cell);
    for (int l = 0; l < d; ++l) {
      const auto ul = static_cast<std::size_t>(l);
      if (z[ul] + 1 >= field.origin()[ul] + field.extent()[ul]) continue;
      total += face * field.distance(cell, cell + field.stride(l));
    }
  }
  return total;
}

double line_variation(std::span<const CircleValue> line) {
  double v = 0.0;
  for (std::size_t t = 1; t < line.size(); ++t) v += geodesic_distance_S1(line[t - 1], line[t]);
  return v;
}

double jump_energy_sliced(const GridPartitionField& field) {
  const int d = field.dim();
  const double cross_section = std::pow(field.cell_size(), d - 1);
  double total = 0.0;
  std::vector<CircleValue> line;
  for (int l = 0; l < d; ++l) {
    const auto ul = static_cast<std::size_t>(l);
    const auto n = static_cast<std::size_t>(field.extent()[ul]);
    double integral = 0.0;
    // Every cell with z_l at the origin starts one line parallel to e_l.
    for (std::size_t cell = 0; cell < field.cell_count(); ++cell) {
      if ((cell / field.stride(l)) % n != 0) continue;
      line.clear();
      for (std::size_t t = 0; t < n; ++t) line.push_back(field.value(cell + t * field.stride(l)));
      integral += cross_section * line_variation(line);
    }
    total += integral;
  }
  return total;
}

double interface_area(const GridPartitionField& field) {
  const int d = field.dim();
  const double face = std::pow(field.cell_size(), d - 1);
  std::size_t faces = 0;
  for (std::size_t cell = 0; cell < field.cell_count(); ++cell) {
    const auto z = field.cell_coords(cell);
    for (int l = 0; l < d; ++l) {
      const auto ul = static_cast<std::size_t>(l);
      if (z[ul] + 1 >= field.origin()[ul] + field.extent()[ul]) continue;
      const auto other = cell + field.stride(l);
      const bool differ = field.mode() == ValueMode::Clock ? field.phase(cell) != field.phase(other)
                                                           : field.value(cell) != field.value(other);
      if (differ) ++faces;
    }
  }
  return face * static_cast<double>(faces);
}

GridPartitionField as_clock_field(const GridPartitionField& field, int states, double tol) {
  require_states(states);
  std::vector<int> extent(field.extent().begin(), field.extent().end());
  std::vector<int> origin(field.origin().begin(), field.origin().end());
  std::vector<PhaseIndex> phases(field.cell_count());
  if (field.mode() == ValueMode::Clock) {
    if (field.states() == states) return field;
    if (states % field.states() != 0) {
      throw Error(ErrorKind::InvalidInput, "N", "field values do not lie in S_N for the requested N");
    }
    const int factor = states / field.states();
    for (std::size_t c = 0; c < field.cell_count(); ++c) phases[c] = {field.phase(c).value * factor};
  } else {
    const double step = theta(states);
    for (std::size_t c = 0; c < field.cell_count(); ++c) {
      const double q = field.value(c).angle() / step;
      const double k = std::round(q);
      if (std::abs(q - k) * step > tol) {
        throw Error(ErrorKind::InvalidInput, "values", "field has a value outside S_N");
      }
      phases[c] = {static_cast<int>(k) % states};
    }
  }
  return GridPartitionField::clock(field.cell_size(), std::move(extent), states, std::move(phases), std::move(origin));
}

double limit_energy_EN(const GridPartitionField& field, int states) {
  return prefactor(states) * jump_energy_direct(as_clock_field(field, states));
}

// ---------------------------------------------------------------------------

double SingularSet::distance(std::span<const double> x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : pieces) {
    const auto d = x.size();
    double len2 = 0.0;
    double proj = 0.0;
    for (std::size_t l = 0; l < d; ++l) {
      const double dir = p.b[l] - p.a[l];
      len2 += dir * dir;
      proj += (x[l] - p.a[l]) * dir;
    }
    const double t = len2 > 0.0 ? std::clamp(proj / len2, 0.0, 1.0) : 0.0;
    double dist2 = 0.0;
    for (std::size_t l = 0; l < d; ++l) {
      const double q = p.a[l] + t * (p.b[l] - p.a[l]) - x[l];
      dist2 += q * q;
    }
    best = std::min(best, std::sqrt(dist2));
  }
  return best;
}

bool SingularSet::meets_box(std::span<const double> lower, std::span<const double> upper) const {
  for (const auto& p : pieces) {
    double t0 = 0.0;
    double t1 = 1.0;
    bool hit = true;
    for (std::size_t l = 0; l < lower.size() && hit; ++l) {
      const double dir = p.b[l] - p.a[l];
      if (dir == 0.0) {
        hit = p.a[l] >= lower[l] && p.a[l] <= upper[l];
        continue;
      }
      double ta = (lower[l] - p.a[l]) / dir;
      double tb = (upper[l] - p.a[l]) / dir;
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      hit = t0 <= t1;
    }
    if (hit) return true;
  }
  return false;
}

SmoothFieldSpec SmoothFieldSpec::constant(int dim, double angle) {
  SmoothFieldSpec s;
  s.dim = dim;
  s.angle = [angle](std::span<const double>) { return angle; };
  s.gradient = [](std::span<const double>, std::span<double> g) { std::fill(g.begin(), g.end(), 0.0); };
  return s;
}

SmoothFieldSpec SmoothFieldSpec::affine(std::vector<double> slope, double offset) {
  SmoothFieldSpec s;
  s.dim = static_cast<int>(slope.size());
  s.angle = [slope, offset](std::span<const double> x) {
    double v = offset;
    for (std::size_t l = 0; l < slope.size(); ++l) v += slope[l] * x[l];
    return v;
  };
  s.gradient = [slope](std::span<const double>, std::span<double> g) { std::copy(slope.begin(), slope.end(), g.begin()); };
  return s;
}

SmoothFieldSpec SmoothFieldSpec::vortex(std::vector<double> center, double guard) {
  if (center.size() != 2) throw Error(ErrorKind::InvalidParameter, "center", "vortex fields are two-dimensional");
  SmoothFieldSpec s;
  s.dim = 2;
  const double cx = center[0];
  const double cy = center[1];
  s.angle = [cx, cy](std::span<const double> x) { return std::atan2(x[1] - cy, x[0] - cx); };
  s.gradient = [cx, cy](std::span<const double> x, std::span<double> g) {
    const double dx = x[0] - cx;
    const double dy = x[1] - cy;
    const double r2 = dx * dx + dy * dy;
    g[0] = -dy / r2;
    g[1] = dx / r2;
  };
  s.singular.pieces.push_back({center, center});
  s.guard = guard;
  return s;
}

AxisBox AxisBox::unit(int dim) {
  return {std::vector<double>(static_cast<std::size_t>(dim), 0.0), std::vector<double>(static_cast<std::size_t>(dim), 1.0)};
}

double AxisBox::volume() const {
  double v = 1.0;
  for (std::size_t l = 0; l < lower.size(); ++l) v *= upper[l] - lower[l];
  return v;
}

QuadratureReport gradient_energy(const SmoothFieldSpec& spec, const AxisBox& box, int cells_per_axis) {
  if (cells_per_axis < 1) throw Error(ErrorKind::InvalidParameter, "M", "quadrature needs at least one cell");
  const auto d = static_cast<std::size_t>(spec.dim);
  if (box.lower.size() != d || box.upper.size() != d) {
    throw Error(ErrorKind::InvalidParameter, "box", "box dimension does not match the field");
  }
  std::vector<double> h(d);
  double cell_volume = 1.0;
  for (std::size_t l = 0; l < d; ++l) {
    h[l] = (box.upper[l] - box.lower[l]) / cells_per_axis;
    cell_volume *= h[l];
  }

  QuadratureReport rep;
  std::vector<int> idx(d, 0);
  std::vector<double> x(d);
  std::vector<double> grad(d);
  Matrix du(2, d);
  std::size_t total = 1;
  for (std::size_t l = 0; l < d; ++l) total *= static_cast<std::size_t>(cells_per_axis);
  for (std::size_t n = 0; n < total; ++n) {
    for (std::size_t l = 0; l < d; ++l) x[l] = box.lower[l] + (idx[l] + 0.5) * h[l];
    ++rep.nodes;
    if (!spec.singular.empty() && spec.singular.distance(x) < spec.guard) {
      ++rep.skipped;
      rep.skipped_measure += cell_volume;
    } else {
      const double phi = spec.angle(x);
      spec.gradient(x, grad);
      const double s = std::sin(phi);
      const double c = std::cos(phi);
      for (std::size_t l = 0; l < d; ++l) {
        du(0, l) = -s * grad[l];
        du(1, l) = c * grad[l];
      }
      rep.value += norm_21(du) * cell_volume;
    }
    for (std::size_t l = d; l-- > 0;) {
      if (++idx[l] < cells_per_axis) break;
      idx[l] = 0;
    }
  }
  return rep;
}

LimitEnergy limit_energy_E(const SmoothPart& smooth) {
  LimitEnergy e;
  e.quadrature = gradient_energy(smooth.spec, smooth.box, smooth.cells_per_axis);
  e.gradient = e.quadrature->value;
  e.total = e.gradient;
  return e;
}

LimitEnergy limit_energy_E(const GridPartitionField& partition) {
  LimitEnergy e;
  e.jump = jump_energy_direct(partition);
  e.total = e.jump;
  return e;
}

LimitEnergy limit_energy_E(const SmoothPart& smooth, const GridPartitionField& partition) {
  LimitEnergy e = limit_energy_E(smooth);
  e.jump = jump_energy_direct(partition);
  e.total = e.gradient + e.jump;
  return e;
}

}  // namespace clocklat
