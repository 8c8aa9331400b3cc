#pragma once

// Explicit maps between the discrete and continuum settings: the staircase
// recovery sequence, the projection S^1 -> S_N, piecewise constant sampling of
// smooth fields and pointwise sampling onto lattices.

#include <cstddef>
#include <memory>
#include <vector>

#include "clocklat/continuum.hpp"
#include "clocklat/core.hpp"
#include "clocklat/lattice.hpp"

namespace clocklat {

enum class StaircaseDomain {
  Cube,          // Q_nu with the 2 eps jump datum on its boundary layer
  PeriodicSlab,  // nu = +-e_l, periodic cross-section of `cross_section` sites per axis
};

struct StaircaseSpec {
  PhaseIndex s;
  PhaseIndex r;
  Direction normal = Direction::axis(2, 1);
  double eps = 0.125;
  int states = 4;
  StaircaseDomain domain = StaircaseDomain::Cube;
  int cross_section = 8;
};

/// Codomain reduction to r = 0: phases are r + orientation * level with
/// 0 <= level <= steps, where steps is the index distance between s and r.
struct StaircaseReduction {
  PhaseIndex base;
  int orientation = 1;
  int steps = 0;

  PhaseIndex phase_at(std::int64_t level, int states) const;
};

StaircaseReduction reduce_staircase(const StaircaseSpec& spec);

std::shared_ptr<const LatticeDomain> staircase_domain(const StaircaseSpec& spec);

/// Staircase recovery field on staircase_domain(spec); boundary layer frozen.
SpinField staircase_recovery(const StaircaseSpec& spec);
/// Same construction on a caller-provided domain.
SpinField staircase_recovery(const StaircaseSpec& spec, std::shared_ptr<const LatticeDomain> domain);

/// Scaled energy predicted for a periodic slab: prefactor(N) * k_s * theta_N * (m eps)^{d-1}.
double staircase_slab_energy(const StaircaseSpec& spec);

/// exp(i theta_N floor(angle / theta_N)). Angles within tol (in units of theta_N)
/// below a state snap to it, so S_N values are fixed points.
PhaseIndex project_to_SN(CircleValue a, int states, double tol = kDefaultTol);

struct SampledPartition {
  GridPartitionField field;
  std::size_t singular_cells = 0;
  std::size_t winding_cells = 0;
};

/// Piecewise constant S^1 field on cells lambda z + lambda [0,1)^d (z in origin + [0, extent)):
/// exp(i mean lifting) on cells whose closure avoids the singular set, e_1 elsewhere.
SampledPartition sample_piecewise(const SmoothFieldSpec& spec, double lambda, std::vector<int> extent,
                                  std::vector<int> origin = {});

/// Cellwise projection to S_N.
GridPartitionField discretize_field(const GridPartitionField& field, int states);

/// u(eps i) read from the cell containing eps i, projected to S_N when needed.
SpinField pointwise_sample(const GridPartitionField& field, std::shared_ptr<const LatticeDomain> domain, int states);
SpinField pointwise_sample(const SmoothFieldSpec& spec, std::shared_ptr<const LatticeDomain> domain, int states);

}  // namespace clocklat
