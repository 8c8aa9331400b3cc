#include "clocklat/solvers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>

#include "clocklat/constructions.hpp"
#include "clocklat/parallel.hpp"
#include "clocklat/rng.hpp"

namespace clocklat {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double to_scaled(const SpinField& field, double bond_total) {
  const auto& dom = field.domain();
  return energy_scale(field.states(), dom.spacing()) * std::pow(dom.spacing(), dom.dim()) * bond_total;
}

double raw_bond_sum(const LatticeDomain& dom, const std::vector<int>& phases, const std::vector<double>& table,
                    int states) {
  double total = 0.0;
  for (const auto& b : dom.bonds()) {
    total += table[static_cast<std::size_t>(phases[b.a] * states + phases[b.b])];
  }
  return total;
}

std::vector<int> phase_values(const SpinField& field) {
  std::vector<int> out(field.size());
  for (std::size_t s = 0; s < field.size(); ++s) out[s] = field[s].value;
  return out;
}

SpinField with_phases(const SpinField& base, const std::vector<int>& phases) {
  SpinField out = base;
  for (std::size_t s = 0; s < phases.size(); ++s) {
    if (!out.frozen(s)) out.set(s, {phases[s]});
  }
  return out;
}

// Branch-and-bound over free sites in site order. Costs from frozen neighbors
// are folded into a unary table; the remaining-sites bound is the sum of unary minima.
class Enumerator {
 public:
  Enumerator(const SpinField& field, const std::vector<std::size_t>* counts)
      : field_(field), states_(field.states()), table_(bond_cost_table(field.states())) {
    const auto& dom = field.domain();
    free_ = field.free_sites();
    std::vector<std::size_t> order(field.size(), kNoSite);
    for (std::size_t t = 0; t < free_.size(); ++t) order[free_[t]] = t;

    const auto n = free_.size();
    const auto N = static_cast<std::size_t>(states_);
    unary_.assign(n * N, 0.0);
    earlier_.assign(n, {});
    for (const auto& b : dom.bonds()) {
      const bool fa = field.frozen(b.a);
      const bool fb = field.frozen(b.b);
      if (fa && fb) {
        fixed_ += cost(field[b.a].value, field[b.b].value);
      } else if (fa || fb) {
        const auto v = fa ? b.b : b.a;
        const auto w = fa ? b.a : b.b;
        for (std::size_t p = 0; p < N; ++p) unary_[order[v] * N + p] += cost(static_cast<int>(p), field[w].value);
      } else {
        const auto ta = order[b.a];
        const auto tb = order[b.b];
        earlier_[std::max(ta, tb)].push_back(std::min(ta, tb));
      }
    }
    suffix_.assign(n + 1, 0.0);
    for (std::size_t t = n; t-- > 0;) {
      const auto first = unary_.begin() + static_cast<std::ptrdiff_t>(t * N);
      suffix_[t] = suffix_[t + 1] + *std::min_element(first, first + static_cast<std::ptrdiff_t>(N));
    }
    if (counts) {
      need_.assign(N, 0);
      auto have = field.phase_counts();
      std::size_t total = 0;
      for (std::size_t p = 0; p < N; ++p) {
        const auto frozen_here = have[p] - free_count(field, p);
        if ((*counts)[p] < frozen_here) {
          throw Error(ErrorKind::InvalidParameter, "counts", "counts below the frozen sites of a phase");
        }
        need_[p] = static_cast<long>((*counts)[p] - frozen_here);
        total += (*counts)[p];
      }
      if (total != field.size()) throw Error(ErrorKind::InvalidParameter, "counts", "counts must sum to the site count");
      constrained_ = true;
    }
  }

  std::size_t free_count() const { return free_.size(); }

  double search_bits() const {
    if (!constrained_) return static_cast<double>(free_.size()) * std::log2(static_cast<double>(states_));
    double bits = std::lgamma(static_cast<double>(free_.size()) + 1.0);
    for (long k : need_) bits -= std::lgamma(static_cast<double>(k) + 1.0);
    return bits / std::log(2.0);
  }

  double fixed() const { return fixed_; }

  struct TaskResult {
    double energy = kInf;
    std::vector<int> labels;
    std::uint64_t visited = 0;
  };

  // Searches assignments whose first free site takes `lead`.
  TaskResult run(int lead, std::atomic<double>& shared_bound) {
    TaskResult res;
    const auto n = free_.size();
    labels_.assign(n, 0);
    auto need = need_;
    if (constrained_) {
      if (need[static_cast<std::size_t>(lead)] <= 0) return res;
      --need[static_cast<std::size_t>(lead)];
    }
    labels_[0] = lead;
    const double c0 = local(0, lead);
    dfs(1, c0, need, shared_bound, res);
    return res;
  }

 private:
  static std::size_t free_count(const SpinField& field, std::size_t p) {
    std::size_t c = 0;
    for (std::size_t s = 0; s < field.size(); ++s) {
      if (!field.frozen(s) && static_cast<std::size_t>(field[s].value) == p) ++c;
    }
    return c;
  }

  double cost(int a, int b) const { return table_[static_cast<std::size_t>(a * states_ + b)]; }

  double local(std::size_t t, int p) const {
    double c = unary_[t * static_cast<std::size_t>(states_) + static_cast<std::size_t>(p)];
    for (auto u : earlier_[t]) c += cost(p, labels_[u]);
    return c;
  }

  void dfs(std::size_t t, double partial, std::vector<long>& need, std::atomic<double>& bound, TaskResult& res) {
    ++res.visited;
    const double limit = std::min(bound.load(std::memory_order_relaxed), res.energy);
    // strict pruning keeps ties alive, so the reported argmin does not depend on scheduling
    if (partial + suffix_[t] > limit + 1e-9) return;
    if (t == free_.size()) {
      if (partial < res.energy - 1e-12) {
        res.energy = partial;
        res.labels = labels_;
        double cur = bound.load();
        while (partial < cur && !bound.compare_exchange_weak(cur, partial)) {
        }
      }
      return;
    }
    for (int p = 0; p < states_; ++p) {
      if (constrained_) {
        if (need[static_cast<std::size_t>(p)] <= 0) continue;
        --need[static_cast<std::size_t>(p)];
      }
      labels_[t] = p;
      dfs(t + 1, partial + local(t, p), need, bound, res);
      if (constrained_) ++need[static_cast<std::size_t>(p)];
    }
  }

  const SpinField& field_;
  int states_;
  std::vector<double> table_;
  std::vector<std::size_t> free_;
  std::vector<double> unary_;
  std::vector<std::vector<std::size_t>> earlier_;
  std::vector<double> suffix_;
  double fixed_ = 0.0;
  bool constrained_ = false;
  std::vector<long> need_;
  std::vector<int> labels_;

 public:
  const std::vector<std::size_t>& free_sites() const { return free_; }
};

SearchResult run_enumeration(const SpinField& field, const std::vector<std::size_t>* counts, unsigned threads,
                             double max_bits) {
  Enumerator probe(field, counts);
  const double bits = probe.search_bits();
  if (bits > max_bits + 1e-9) {
    throw Error(ErrorKind::SearchTooLarge, "free_sites",
                "search space of " + std::to_string(probe.free_count()) + " free sites is 2^" +
                    std::to_string(bits) + " configurations, above the 2^" + std::to_string(max_bits) + " limit");
  }
  if (probe.free_count() == 0) {
    if (counts && field.phase_counts() != *counts) {
      throw Error(ErrorKind::InvalidParameter, "counts", "frozen sites do not meet the counts");
    }
    return {to_scaled(field, probe.fixed()), field, 1};
  }
  const auto N = static_cast<std::size_t>(field.states());
  std::atomic<double> bound{kInf};
  std::vector<Enumerator::TaskResult> results(N);
  parallel_for(N, threads, [&](std::size_t p) {
    Enumerator task(field, counts);
    results[p] = task.run(static_cast<int>(p), bound);
  });
  std::size_t best = N;
  std::uint64_t visited = 0;
  for (std::size_t p = 0; p < N; ++p) {
    visited += results[p].visited;
    if (results[p].labels.empty()) continue;
    if (best == N || results[p].energy < results[best].energy - 1e-12) best = p;
  }
  if (best == N) throw Error(ErrorKind::InvalidParameter, "counts", "no configuration meets the counts");
  SpinField out = field;
  const auto& free = probe.free_sites();
  for (std::size_t t = 0; t < free.size(); ++t) out.set(free[t], {results[best].labels[t]});
  const double total = bond_sum(out);
  return {to_scaled(out, total), std::move(out), visited};
}

template <class ChainFn>
AnnealResult run_chains(const SpinField& initial, const AnnealSchedule& schedule, ChainFn&& chain) {
  schedule.validate();
  const auto chains = static_cast<std::size_t>(schedule.chains);
  std::vector<std::vector<int>> best(chains);
  std::vector<double> best_energy(chains, kInf);
  std::vector<std::uint64_t> accepted(chains, 0);
  std::vector<std::uint64_t> proposed(chains, 0);
  parallel_for(chains, schedule.threads, [&](std::size_t c) {
    chain(c, best[c], best_energy[c], accepted[c], proposed[c]);
  });
  std::size_t pick = 0;
  for (std::size_t c = 1; c < chains; ++c) {
    if (best_energy[c] < best_energy[pick] - 1e-12) pick = c;
  }
  AnnealResult out{0.0, with_phases(initial, best[pick]), {}, 0, 0};
  out.energy = to_scaled(out.field, bond_sum(out.field));
  for (std::size_t c = 0; c < chains; ++c) {
    out.chain_energies.push_back(to_scaled(initial, best_energy[c]));
    out.accepted += accepted[c];
    out.proposed += proposed[c];
  }
  return out;
}

}  // namespace

void AnnealSchedule::validate() const {
  if (!(t_initial > 0.0)) throw Error(ErrorKind::InvalidParameter, "t_initial", "temperatures must be positive");
  if (!(t_final > 0.0)) throw Error(ErrorKind::InvalidParameter, "t_final", "temperatures must be positive");
  if (!(cooling > 0.0 && cooling < 1.0)) {
    throw Error(ErrorKind::InvalidParameter, "cooling", "cooling ratio must lie in (0, 1)");
  }
  if (sweeps < 1) throw Error(ErrorKind::InvalidParameter, "sweeps", "sweeps must be >= 1");
  if (chains < 1) throw Error(ErrorKind::InvalidParameter, "chains", "chains must be >= 1");
}

double AnnealSchedule::temperature(int sweep) const {
  return std::max(t_final, t_initial * std::pow(cooling, sweep));
}

LayeredSolution layered_dp(int states, const std::vector<std::vector<double>>& unary,
                           const std::vector<double>& weights) {
  require_states(states);
  const auto layers = unary.size();
  const auto N = static_cast<std::size_t>(states);
  if (layers == 0) return {};
  if (weights.size() + 1 != layers) {
    throw Error(ErrorKind::InvalidParameter, "weights", "need one weight between consecutive layers");
  }
  const auto table = bond_cost_table(states);
  std::vector<double> value(N);
  std::vector<std::vector<std::size_t>> from(layers, std::vector<std::size_t>(N, 0));
  for (std::size_t p = 0; p < N; ++p) value[p] = unary[0].empty() ? 0.0 : unary[0][p];
  std::vector<double> next(N);
  for (std::size_t c = 1; c < layers; ++c) {
    for (std::size_t p = 0; p < N; ++p) {
      double best = kInf;
      std::size_t arg = 0;
      for (std::size_t q = 0; q < N; ++q) {
        const double v = value[q] + weights[c - 1] * table[q * N + p];
        if (v < best) {
          best = v;
          arg = q;
        }
      }
      next[p] = best + (unary[c].empty() ? 0.0 : unary[c][p]);
      from[c][p] = arg;
    }
    value.swap(next);
  }
  LayeredSolution out;
  auto p = static_cast<std::size_t>(std::min_element(value.begin(), value.end()) - value.begin());
  out.energy = value[p];
  out.labels.resize(layers);
  for (std::size_t c = layers; c-- > 0;) {
    out.labels[c] = {static_cast<int>(p)};
    if (c > 0) p = from[c][p];
  }
  return out;
}

ChainPath chain_dp(int states, PhaseIndex start, PhaseIndex end, int steps) {
  require_states(states);
  require_phase(start, states);
  require_phase(end, states);
  if (steps < 1) throw Error(ErrorKind::InvalidParameter, "M", "step count must be >= 1");
  const auto N = static_cast<std::size_t>(states);
  std::vector<std::vector<double>> unary(static_cast<std::size_t>(steps) + 1);
  unary.front().assign(N, kInf);
  unary.front()[static_cast<std::size_t>(start.value)] = 0.0;
  unary.back().assign(N, kInf);
  unary.back()[static_cast<std::size_t>(end.value)] = 0.0;
  const auto sol = layered_dp(states, unary, std::vector<double>(static_cast<std::size_t>(steps), 1.0));
  return {sol.energy, sol.labels};
}

SearchResult enumerate_min(const SpinField& field, unsigned threads, double max_bits) {
  return run_enumeration(field, nullptr, threads, max_bits);
}

SearchResult enumerate_min_constrained(const SpinField& field, std::span<const std::size_t> counts, unsigned threads,
                                       double max_bits) {
  if (counts.size() != static_cast<std::size_t>(field.states())) {
    throw Error(ErrorKind::InvalidParameter, "counts", "need one count per phase");
  }
  const std::vector<std::size_t> c(counts.begin(), counts.end());
  return run_enumeration(field, &c, threads, max_bits);
}

AnnealResult anneal_glauber(const SpinField& initial, const AnnealSchedule& schedule) {
  const auto& dom = initial.domain();
  const int N = initial.states();
  const auto table = bond_cost_table(N);
  const auto free = initial.free_sites();
  const auto start = phase_values(initial);
  const double start_energy = raw_bond_sum(dom, start, table, N);

  return run_chains(initial, schedule, [&](std::size_t chain, std::vector<int>& best, double& best_energy,
                                           std::uint64_t& accepted, std::uint64_t& proposed) {
    auto cur = start;
    double energy = start_energy;
    best = cur;
    best_energy = energy;
    if (free.empty()) return;
    for (int sweep = 0; sweep < schedule.sweeps; ++sweep) {
      const double t = schedule.temperature(sweep);
      CounterRng rng(schedule.seed, {chain, static_cast<std::uint64_t>(sweep)});
      for (std::size_t m = 0; m < free.size(); ++m) {
        const auto v = free[rng.below(free.size())];
        const int old = cur[v];
        int proposal = old;
        switch (rng.below(3)) {
          case 0: proposal = (old + 1) % N; break;
          case 1: proposal = (old + N - 1) % N; break;
          default: proposal = static_cast<int>(rng.below(static_cast<std::uint64_t>(N))); break;
        }
        ++proposed;
        if (proposal == old) continue;
        double delta = 0.0;
        for (auto w : dom.neighbors(v)) {
          const auto uw = static_cast<std::size_t>(cur[w]);
          delta += table[static_cast<std::size_t>(proposal) * static_cast<std::size_t>(N) + uw] -
                   table[static_cast<std::size_t>(old) * static_cast<std::size_t>(N) + uw];
        }
        if (delta <= 0.0 || rng.uniform() < std::exp(-delta / t)) {
          cur[v] = proposal;
          energy += delta;
          ++accepted;
        }
      }
      if (energy < best_energy - 1e-9) {
        energy = raw_bond_sum(dom, cur, table, N);  // drop accumulated rounding
        if (energy < best_energy - 1e-12) {
          best_energy = energy;
          best = cur;
        }
      }
    }
  });
}

AnnealResult anneal_kawasaki(const SpinField& initial, std::span<const std::size_t> counts,
                             const AnnealSchedule& schedule, bool verify_counts) {
  const int N = initial.states();
  if (counts.size() != static_cast<std::size_t>(N)) {
    throw Error(ErrorKind::InvalidParameter, "counts", "need one count per phase");
  }
  const auto have = initial.phase_counts();
  if (!std::equal(have.begin(), have.end(), counts.begin())) {
    throw Error(ErrorKind::InvalidParameter, "counts", "initial field does not meet the phase counts");
  }
  const auto& dom = initial.domain();
  const auto table = bond_cost_table(N);
  const auto free = initial.free_sites();
  const auto start = phase_values(initial);
  const double start_energy = raw_bond_sum(dom, start, table, N);
  bool movable = false;
  for (auto v : free) movable = movable || start[v] != start[free.front()];

  auto local = [&](const std::vector<int>& cur, std::size_t v) {
    double c = 0.0;
    const auto uv = static_cast<std::size_t>(cur[v]) * static_cast<std::size_t>(N);
    for (auto w : dom.neighbors(v)) c += table[uv + static_cast<std::size_t>(cur[w])];
    return c;
  };

  return run_chains(initial, schedule, [&](std::size_t chain, std::vector<int>& best, double& best_energy,
                                           std::uint64_t& accepted, std::uint64_t& proposed) {
    auto cur = start;
    double energy = start_energy;
    best = cur;
    best_energy = energy;
    if (!movable) return;
    std::vector<std::size_t> tally(static_cast<std::size_t>(N));
    for (int sweep = 0; sweep < schedule.sweeps; ++sweep) {
      const double t = schedule.temperature(sweep);
      CounterRng rng(schedule.seed, {chain, static_cast<std::uint64_t>(sweep)});
      for (std::size_t m = 0; m < free.size(); ++m) {
        std::size_t a = 0;
        std::size_t b = 0;
        bool found = false;
        for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
          a = free[rng.below(free.size())];
          b = free[rng.below(free.size())];
          found = cur[a] != cur[b];
        }
        ++proposed;
        if (!found) continue;
        // a bond between a and b costs the same after the swap, so it cancels here
        const double before = local(cur, a) + local(cur, b);
        std::swap(cur[a], cur[b]);
        const double delta = local(cur, a) + local(cur, b) - before;
        if (delta <= 0.0 || rng.uniform() < std::exp(-delta / t)) {
          energy += delta;
          ++accepted;
        } else {
          std::swap(cur[a], cur[b]);
        }
      }
      if (verify_counts) {
        std::fill(tally.begin(), tally.end(), 0);
        for (int p : cur) ++tally[static_cast<std::size_t>(p)];
        if (!std::equal(tally.begin(), tally.end(), counts.begin())) {
          throw Error(ErrorKind::InvalidInput, "counts", "swap dynamics changed the phase counts");
        }
      }
      if (energy < best_energy - 1e-9) {
        energy = raw_bond_sum(dom, cur, table, N);
        if (energy < best_energy - 1e-12) {
          best_energy = energy;
          best = cur;
        }
      }
    }
  });
}

std::vector<std::size_t> counts_from_fractions(std::span<const double> fractions, std::size_t sites, double tol) {
  std::vector<std::size_t> out;
  double sum = 0.0;
  std::size_t total = 0;
  for (double f : fractions) {
    if (!(f >= 0.0 && f <= 1.0)) throw Error(ErrorKind::InvalidParameter, "V", "volume fractions must lie in [0, 1]");
    const double c = f * static_cast<double>(sites);
    const double rounded = std::round(c);
    if (std::abs(c - rounded) > tol * std::max(1.0, c)) {
      throw Error(ErrorKind::InvalidParameter, "V", "volume fractions must give whole site counts");
    }
    out.push_back(static_cast<std::size_t>(rounded));
    sum += f;
    total += out.back();
  }
  if (std::abs(sum - 1.0) > tol || total != sites) {
    throw Error(ErrorKind::InvalidParameter, "V", "volume fractions must sum to 1");
  }
  return out;
}

SpinField arrange_with_counts(const SpinField& base, std::span<const std::size_t> counts) {
  const int N = base.states();
  if (counts.size() != static_cast<std::size_t>(N)) {
    throw Error(ErrorKind::InvalidParameter, "counts", "need one count per phase");
  }
  std::vector<long> need(counts.begin(), counts.end());
  for (auto s : base.frozen_sites()) --need[static_cast<std::size_t>(base[s].value)];
  const auto free = base.free_sites();
  long total = 0;
  for (long k : need) {
    if (k < 0) throw Error(ErrorKind::InvalidParameter, "counts", "counts below the frozen sites of a phase");
    total += k;
  }
  if (static_cast<std::size_t>(total) != free.size()) {
    throw Error(ErrorKind::InvalidParameter, "counts", "counts must sum to the site count");
  }
  SpinField out = base;
  std::size_t t = 0;
  for (int p = 0; p < N; ++p) {
    for (long k = 0; k < need[static_cast<std::size_t>(p)]; ++k) out.set(free[t++], {p});
  }
  return out;
}

SpinField shuffle_free_sites(const SpinField& field, std::uint64_t seed) {
  const auto free = field.free_sites();
  std::vector<PhaseIndex> values;
  values.reserve(free.size());
  for (auto v : free) values.push_back(field[v]);
  CounterRng rng(derive_seed(seed, "shuffle"), {0});
  for (std::size_t i = values.size(); i > 1; --i) std::swap(values[i - 1], values[rng.below(i)]);
  SpinField out = field;
  for (std::size_t t = 0; t < free.size(); ++t) out.set(free[t], values[t]);
  return out;
}

double bond_lower_bound_energy(const SpinField& field, const Region* region) {
  const auto& dom = field.domain();
  const int N = field.states();
  const double per_step = prefactor(N) * theta(N) * std::pow(dom.spacing(), dom.dim() - 1);
  long steps = 0;
  for (const auto& b : enumerate_bonds(dom, region)) steps += index_distance(field[b.a], field[b.b], N);
  return per_step * static_cast<double>(steps);
}

const char* to_string(CellMethod m) {
  switch (m) {
    case CellMethod::Auto: return "auto";
    case CellMethod::Enumerate: return "enumerate";
    case CellMethod::Anneal: return "anneal";
    case CellMethod::LayeredDP: return "dp-reduction";
  }
  return "?";
}

const char* to_string(CellStart s) {
  switch (s) {
    case CellStart::Staircase: return "staircase";
    case CellStart::Datum: return "datum";
    case CellStart::Random: return "random";
  }
  return "?";
}

CellMethod parse_cell_method(const std::string& text) {
  for (auto m : {CellMethod::Auto, CellMethod::Enumerate, CellMethod::Anneal, CellMethod::LayeredDP}) {
    if (text == to_string(m)) return m;
  }
  throw Error(ErrorKind::InvalidParameter, "method", "unknown method '" + text + "'");
}

CellStart parse_cell_start(const std::string& text) {
  for (auto s : {CellStart::Staircase, CellStart::Datum, CellStart::Random}) {
    if (text == to_string(s)) return s;
  }
  throw Error(ErrorKind::InvalidParameter, "initial", "unknown initial state '" + text + "'");
}

void CellProblemSpec::validate() const {
  require_states(states);
  require_phase(s, states);
  require_phase(r, states);
  if (!(eps > 0.0 && eps < 0.25)) throw Error(ErrorKind::InvalidParameter, "eps", "cell problems need 0 < eps < 1/4");
  if (method == CellMethod::Anneal || method == CellMethod::Auto) schedule.validate();
  if (method == CellMethod::LayeredDP && !normal.axis_index()) {
    throw Error(ErrorKind::InvalidSpec, "normal", "dp-reduction needs a coordinate normal");
  }
}

namespace {

SpinField layered_minimum(const SpinField& start, const Direction& normal) {
  const auto& dom = start.domain();
  const int N = start.states();
  const auto table = bond_cost_table(N);
  const auto free = start.free_sites();
  if (free.empty()) return start;
  std::vector<std::int64_t> layer(start.size(), 0);
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t hi = std::numeric_limits<std::int64_t>::min();
  for (auto v : free) {
    layer[v] = normal.floor_dot(dom.site(v));
    lo = std::min(lo, layer[v]);
    hi = std::max(hi, layer[v]);
  }
  const auto layers = static_cast<std::size_t>(hi - lo + 1);
  const auto Nz = static_cast<std::size_t>(N);
  std::vector<std::vector<double>> unary(layers, std::vector<double>(Nz, 0.0));
  std::vector<double> weights(layers - 1, 0.0);
  for (const auto& b : dom.bonds()) {
    const bool fa = start.frozen(b.a);
    const bool fb = start.frozen(b.b);
    if (fa && fb) continue;
    if (fa || fb) {
      const auto v = fa ? b.b : b.a;
      const auto w = static_cast<std::size_t>(start[fa ? b.a : b.b].value);
      auto& row = unary[static_cast<std::size_t>(layer[v] - lo)];
      for (std::size_t p = 0; p < Nz; ++p) row[p] += table[p * Nz + w];
      continue;
    }
    const auto la = layer[b.a];
    const auto lb = layer[b.b];
    if (la == lb) continue;
    if (std::abs(la - lb) != 1) throw Error(ErrorKind::InvalidInput, "normal", "bond skips a layer");
    weights[static_cast<std::size_t>(std::min(la, lb) - lo)] += 1.0;
  }
  const auto sol = layered_dp(N, unary, weights);
  SpinField out = start;
  for (auto v : free) out.set(v, sol.labels[static_cast<std::size_t>(layer[v] - lo)]);
  return out;
}

}  // namespace

CellEstimate cell_formula_estimate(const CellProblemSpec& spec) {
  spec.validate();
  StaircaseSpec st;
  st.s = spec.s;
  st.r = spec.r;
  st.normal = spec.normal;
  st.eps = spec.eps;
  st.states = spec.states;
  st.domain = StaircaseDomain::Cube;
  const auto domain = staircase_domain(st);
  const SpinField stair = staircase_recovery(st, domain);
  const auto& dom = stair.domain();

  CellEstimate out{0.0, 0.0, 0.0, discrete_energy(stair).scaled, 0.0, "", 0, stair};
  out.analytic = prefactor(spec.states) * geodesic_distance_SN(spec.s, spec.r, spec.states) * spec.normal.norm1();
  const auto free = stair.free_sites();
  out.free_sites = free.size();

  SpinField start = stair;
  if (spec.start == CellStart::Datum) {
    for (auto v : free) start.set(v, spec.normal.sign_of_dot(dom.site(v)) > 0 ? spec.s : spec.r);
  } else if (spec.start == CellStart::Random) {
    CounterRng rng(derive_seed(spec.schedule.seed, "cell-start"), {0});
    for (auto v : free) start.set(v, {static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.states)))});
  }

  auto method = spec.method;
  if (method == CellMethod::Auto) {
    const double bits = static_cast<double>(free.size()) * std::log2(static_cast<double>(spec.states));
    method = bits <= kMaxSearchBits ? CellMethod::Enumerate : CellMethod::Anneal;
  }
  SpinField found = start;
  switch (method) {
    case CellMethod::Enumerate:
      found = enumerate_min(start, spec.threads).field;
      out.method = "enumerate";
      break;
    case CellMethod::Anneal: {
      auto schedule = spec.schedule;
      schedule.threads = spec.threads;
      found = anneal_glauber(start, schedule).field;
      out.method = "anneal";
      break;
    }
    case CellMethod::LayeredDP:
      found = layered_minimum(start, spec.normal);
      out.method = "upper (layered)";
      break;
    case CellMethod::Auto: break;
  }
  out.search_energy = discrete_energy(found).scaled;
  if (out.upper < out.search_energy - 1e-12) {
    out.estimate = out.upper;
    out.field = stair;
  } else {
    out.estimate = out.search_energy;
    out.field = std::move(found);
  }
  out.lower = bond_lower_bound_energy(out.field);
  return out;
}

}  // namespace clocklat
