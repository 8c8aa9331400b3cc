#pragma once

// Minimization engines for the discrete energy: chain and layered dynamic
// programming, exhaustive branch-and-bound enumeration, Metropolis annealing
// with free-spin or count-preserving moves, and the cell-problem estimator.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clocklat/core.hpp"
#include "clocklat/lattice.hpp"

namespace clocklat {

struct AnnealSchedule {
  double t_initial = 2.0;
  double t_final = 0.01;
  double cooling = 0.95;
  int sweeps = 200;
  std::uint64_t seed = 0;
  int chains = 1;
  unsigned threads = 1;

  void validate() const;
  /// max(t_final, t_initial * cooling^sweep). Temperatures are in units of |u_i - u_j|^2.
  double temperature(int sweep) const;
};

struct ChainPath {
  double energy = 0.0;             // sum of |u_m - u_{m-1}|^2
  std::vector<PhaseIndex> path;    // M + 1 entries, first k_start, last k_end
};

/// Minimal sum over M steps of 4 sin^2(Delta theta_N / 2) from k_start to k_end.
ChainPath chain_dp(int states, PhaseIndex start, PhaseIndex end, int steps);

/// Exact minimum of sum_c unary[c][p_c] + sum_c weight[c] cost(p_c, p_{c+1}) over layer labels.
struct LayeredSolution {
  double energy = 0.0;
  std::vector<PhaseIndex> labels;
};
LayeredSolution layered_dp(int states, const std::vector<std::vector<double>>& unary,
                           const std::vector<double>& weights);

struct SearchResult {
  double energy = 0.0;  // scaled
  SpinField field;
  std::uint64_t visited = 0;  // nodes of the search tree
};

inline constexpr double kMaxSearchBits = 26.0;

/// Exact global minimum over all assignments of the free sites.
SearchResult enumerate_min(const SpinField& field, unsigned threads = 1, double max_bits = kMaxSearchBits);
/// Same, restricted to fields with the given number of sites per phase (frozen sites included).
SearchResult enumerate_min_constrained(const SpinField& field, std::span<const std::size_t> counts,
                                       unsigned threads = 1, double max_bits = kMaxSearchBits);

struct AnnealResult {
  double energy = 0.0;  // scaled, best of chains
  SpinField field;
  std::vector<double> chain_energies;  // scaled best per chain
  std::uint64_t accepted = 0;
  std::uint64_t proposed = 0;
};

AnnealResult anneal_glauber(const SpinField& initial, const AnnealSchedule& schedule);
/// Swap moves between unequal free sites. `verify_counts` recounts phases after every sweep.
AnnealResult anneal_kawasaki(const SpinField& initial, std::span<const std::size_t> counts,
                             const AnnealSchedule& schedule, bool verify_counts = false);

/// Phase counts from volume fractions; fractions must sum to 1 and give integers within tol.
std::vector<std::size_t> counts_from_fractions(std::span<const double> fractions, std::size_t sites,
                                               double tol = 1e-9);
/// Field meeting the counts: frozen sites kept, free sites filled in site order by phase.
SpinField arrange_with_counts(const SpinField& base, std::span<const std::size_t> counts);
/// Random permutation of the free-site values (counts preserved).
SpinField shuffle_free_sites(const SpinField& field, std::uint64_t seed);

/// Sum over bonds of prefactor(N) * d_S1(u_i, u_j) * eps^{d-1}; never above the scaled energy.
double bond_lower_bound_energy(const SpinField& field, const Region* region = nullptr);

enum class CellMethod { Auto, Enumerate, Anneal, LayeredDP };
enum class CellStart { Staircase, Datum, Random };

const char* to_string(CellMethod m);
const char* to_string(CellStart s);
CellMethod parse_cell_method(const std::string& text);
CellStart parse_cell_start(const std::string& text);

struct CellProblemSpec {
  PhaseIndex s;
  PhaseIndex r;
  Direction normal = Direction::axis(2, 1);
  double eps = 0.125;
  int states = 2;
  CellMethod method = CellMethod::Auto;
  AnnealSchedule schedule;
  CellStart start = CellStart::Staircase;
  unsigned threads = 1;

  void validate() const;
};

struct CellEstimate {
  double estimate = 0.0;       // best scaled energy found, staircase included as a competitor
  double search_energy = 0.0;  // what the chosen method alone returned
  double lower = 0.0;          // bond lower bound of the reported field
  double upper = 0.0;          // staircase recovery energy
  double analytic = 0.0;       // prefactor(N) d_S1(s, r) |nu|_1
  std::string method;          // method actually used
  std::size_t free_sites = 0;
  SpinField field;
};

CellEstimate cell_formula_estimate(const CellProblemSpec& spec);

}  // namespace clocklat
