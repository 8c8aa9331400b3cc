#include "clocklat/constructions.hpp"

#include <algorithm>
#include <cmath>

namespace clocklat {

PhaseIndex StaircaseReduction::phase_at(std::int64_t level, int states) const {
  const auto k = (static_cast<std::int64_t>(base.value) + orientation * level) % states;
  return {static_cast<int>(k < 0 ? k + states : k)};
}

StaircaseReduction reduce_staircase(const StaircaseSpec& spec) {
  require_phase(spec.s, spec.states);
  require_phase(spec.r, spec.states);
  StaircaseReduction red;
  red.base = spec.r;
  const int up = ((spec.s.value - spec.r.value) % spec.states + spec.states) % spec.states;
  // Rotation takes r to 0; a reflection is added when the short way round is negative.
  if (2 * up <= spec.states) {
    red.orientation = 1;
    red.steps = up;
  } else {
    red.orientation = -1;
    red.steps = spec.states - up;
  }
  if (red.steps * theta(spec.states) > kPi + kDefaultTol) {
    throw Error(ErrorKind::InvalidSpec, "s", "reduced jump exceeds pi");
  }
  return red;
}

std::shared_ptr<const LatticeDomain> staircase_domain(const StaircaseSpec& spec) {
  if (spec.domain == StaircaseDomain::Cube) {
    return std::make_shared<const LatticeDomain>(LatticeDomain::unit_cube(spec.normal, spec.eps));
  }
  const auto axis = spec.normal.axis_index();
  if (!axis) {
    throw Error(ErrorKind::InvalidSpec, "normal", "periodic slabs need a coordinate normal");
  }
  if (spec.cross_section < 2) {
    throw Error(ErrorKind::InvalidSpec, "cross_section", "cross-section needs at least two sites");
  }
  const int steps = reduce_staircase(spec).steps;
  const int reach = steps + 3;
  const auto d = static_cast<std::size_t>(spec.normal.dim());
  std::vector<int> extent(d, spec.cross_section);
  std::vector<int> origin(d, 0);
  std::vector<bool> periodic(d, true);
  const auto l = static_cast<std::size_t>(*axis);
  extent[l] = 2 * reach + 1;
  origin[l] = -reach;
  periodic[l] = false;
  return std::make_shared<const LatticeDomain>(
      LatticeDomain::grid(spec.eps, std::move(extent), std::move(periodic), std::move(origin)));
}

SpinField staircase_recovery(const StaircaseSpec& spec) { return staircase_recovery(spec, staircase_domain(spec)); }

SpinField staircase_recovery(const StaircaseSpec& spec, std::shared_ptr<const LatticeDomain> domain) {
  const auto red = reduce_staircase(spec);
  if (domain->dim() != spec.normal.dim()) {
    throw Error(ErrorKind::InvalidSpec, "normal", "direction dimension does not match the lattice");
  }
  SpinField field(domain, spec.states, spec.r);
  const auto& dom = field.domain();
  for (std::size_t s = 0; s < dom.size(); ++s) {
    const auto level = std::clamp<std::int64_t>(spec.normal.floor_dot(dom.site(s)), 0, red.steps);
    field.set(s, red.phase_at(level, spec.states));
  }
  const auto layer = boundary_layer(dom, 2.0 * dom.spacing());
  return apply_jump_datum(std::move(field), spec.s, spec.r, spec.normal, layer);
}

double staircase_slab_energy(const StaircaseSpec& spec) {
  const auto red = reduce_staircase(spec);
  const double side = spec.cross_section * spec.eps;
  return prefactor(spec.states) * red.steps * theta(spec.states) * std::pow(side, spec.normal.dim() - 1);
}

PhaseIndex project_to_SN(CircleValue a, int states, double tol) {
  const double q = a.angle() / theta(states);
  auto k = static_cast<int>(std::floor(q + tol));
  return {((k % states) + states) % states};
}

SampledPartition sample_piecewise(const SmoothFieldSpec& spec, double lambda, std::vector<int> extent,
                                  std::vector<int> origin) {
  const auto d = static_cast<std::size_t>(spec.dim);
  if (extent.size() != d) throw Error(ErrorKind::InvalidParameter, "extent", "extent must match the field dimension");
  if (origin.empty()) origin.assign(d, 0);
  std::size_t cells = 1;
  for (int n : extent) cells *= static_cast<std::size_t>(std::max(n, 0));
  SampledPartition out{GridPartitionField::circle(lambda, extent, std::vector<CircleValue>(cells), origin), 0, 0};
  auto& field = out.field;

  constexpr int kNodes = 4;  // midpoint nodes per axis
  std::size_t per_cell = 1;
  for (std::size_t l = 0; l < d; ++l) per_cell *= kNodes;
  std::vector<double> lower(d);
  std::vector<double> upper(d);
  std::vector<double> x(d);
  std::vector<int> node(d);

  for (std::size_t cell = 0; cell < field.cell_count(); ++cell) {
    lower = field.cell_lower(cell);
    for (std::size_t l = 0; l < d; ++l) upper[l] = lower[l] + lambda;
    if (spec.singular.meets_box(lower, upper)) {
      ++out.singular_cells;
      field.set_value(cell, CircleValue(0.0));
      continue;
    }
    std::fill(node.begin(), node.end(), 0);
    double first = 0.0;
    double sum = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t n = 0; n < per_cell; ++n) {
      for (std::size_t l = 0; l < d; ++l) x[l] = lower[l] + (node[l] + 0.5) * lambda / kNodes;
      double phi = spec.angle(x);
      if (n == 0) {
        first = phi;
        lo = hi = phi;
      } else {
        // continuous local lifting relative to the first node
        phi = first + std::remainder(phi - first, kTwoPi);
        lo = std::min(lo, phi);
        hi = std::max(hi, phi);
      }
      sum += phi;
      for (std::size_t l = d; l-- > 0;) {
        if (++node[l] < kNodes) break;
        node[l] = 0;
      }
    }
    if (hi - lo >= kPi) {
      ++out.winding_cells;
      field.set_value(cell, CircleValue(0.0));
      continue;
    }
    field.set_value(cell, CircleValue(sum / static_cast<double>(per_cell)));
  }
  return out;
}

GridPartitionField discretize_field(const GridPartitionField& field, int states) {
  require_states(states);
  if (field.mode() == ValueMode::Clock && field.states() == states) return field;
  std::vector<PhaseIndex> phases(field.cell_count());
  for (std::size_t c = 0; c < field.cell_count(); ++c) phases[c] = project_to_SN(field.value(c), states);
  return GridPartitionField::clock(field.cell_size(), {field.extent().begin(), field.extent().end()}, states,
                                   std::move(phases), {field.origin().begin(), field.origin().end()});
}

SpinField pointwise_sample(const GridPartitionField& field, std::shared_ptr<const LatticeDomain> domain, int states) {
  require_states(states);
  if (domain->dim() != field.dim()) {
    throw Error(ErrorKind::InvalidParameter, "d", "partition and lattice dimensions differ");
  }
  if (domain->spacing() > 0.5 * field.cell_size() * (1.0 + 1e-12)) {
    throw Error(ErrorKind::InvalidParameter, "eps", "sampling needs eps <= lambda / 2");
  }
  const bool same_states = field.mode() == ValueMode::Clock && field.states() == states;
  SpinField out(domain, states);
  for (std::size_t s = 0; s < domain->size(); ++s) {
    const auto x = domain->position(s);
    const auto cell = field.cell_containing(x);
    if (!cell) throw Error(ErrorKind::InvalidInput, "partition", "lattice site outside the partition");
    out.set(s, same_states ? field.phase(*cell) : project_to_SN(field.value(*cell), states));
  }
  return out;
}

SpinField pointwise_sample(const SmoothFieldSpec& spec, std::shared_ptr<const LatticeDomain> domain, int states) {
  if (domain->dim() != spec.dim) {
    throw Error(ErrorKind::InvalidParameter, "d", "field and lattice dimensions differ");
  }
  SpinField out(domain, states);
  for (std::size_t s = 0; s < domain->size(); ++s) {
    out.set(s, project_to_SN(CircleValue(spec.angle(domain->position(s))), states));
  }
  return out;
}

}  // namespace clocklat
