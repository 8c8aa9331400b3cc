#include "clocklat/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace clocklat {

namespace {

constexpr double kInset = 1e-9;

void require_spacing(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error(ErrorKind::InvalidParameter, "eps", "lattice spacing must be positive");
  }
}

std::vector<bool> resolve_periodic(std::vector<bool> periodic, std::size_t dim) {
  if (periodic.empty()) periodic.assign(dim, false);
  if (periodic.size() != dim) {
    throw Error(ErrorKind::InvalidParameter, "periodic", "periodic flags must have one entry per axis");
  }
  return periodic;
}

}  // namespace

LatticeDomain LatticeDomain::grid(double eps, std::vector<int> extent, std::vector<bool> periodic,
                                  std::vector<int> origin) {
  require_spacing(eps);
  const auto d = extent.size();
  if (d < 2) throw Error(ErrorKind::InvalidParameter, "extent", "lattice dimension must be >= 2");
  if (origin.empty()) origin.assign(d, 0);
  if (origin.size() != d) throw Error(ErrorKind::InvalidParameter, "origin", "origin must match extent");
  for (int n : extent) {
    if (n < 1) throw Error(ErrorKind::InvalidParameter, "extent", "extent must be >= 1");
  }

  LatticeDomain dom;
  dom.dim_ = static_cast<int>(d);
  dom.eps_ = eps;
  dom.origin_ = std::move(origin);
  dom.extent_ = std::move(extent);
  dom.periodic_ = resolve_periodic(std::move(periodic), d);
  dom.shape_.kind = ShapeKind::Grid;
  dom.shape_.label = "grid";
  for (std::size_t l = 0; l < d; ++l) {
    dom.shape_.lower.push_back(eps * (dom.origin_[l] - 0.5));
    dom.shape_.upper.push_back(eps * (dom.origin_[l] + dom.extent_[l] - 0.5));
  }
  const auto lower = dom.shape_.lower;
  const auto upper = dom.shape_.upper;
  const auto per = dom.periodic_;
  dom.build([](std::span<const int>, std::span<const double>) { return true; },
            [lower, upper, per](std::span<const double> x) {
              double best = std::numeric_limits<double>::infinity();
              for (std::size_t l = 0; l < x.size(); ++l) {
                if (per[l]) continue;
                best = std::min({best, x[l] - lower[l], upper[l] - x[l]});
              }
              return best;
            });
  return dom;
}

LatticeDomain LatticeDomain::box(double eps, std::vector<double> lower, std::vector<double> upper,
                                 std::vector<bool> periodic) {
  require_spacing(eps);
  const auto d = lower.size();
  if (d < 2 || upper.size() != d) {
    throw Error(ErrorKind::InvalidParameter, "box", "box bounds must share a dimension >= 2");
  }
  LatticeDomain dom;
  dom.dim_ = static_cast<int>(d);
  dom.eps_ = eps;
  dom.periodic_ = resolve_periodic(std::move(periodic), d);
  for (std::size_t l = 0; l < d; ++l) {
    if (!(upper[l] > lower[l])) throw Error(ErrorKind::InvalidParameter, "box", "empty box");
    const double inset = kInset * eps;
    auto inside = [&](int i) { return eps * i > lower[l] + inset && eps * i < upper[l] - inset; };
    int lo = static_cast<int>(std::floor((lower[l] + inset) / eps)) + 1;
    while (inside(lo - 1)) --lo;
    while (!inside(lo) && eps * lo <= lower[l] + inset) ++lo;
    int hi = static_cast<int>(std::ceil((upper[l] - inset) / eps)) - 1;
    while (inside(hi + 1)) ++hi;
    while (!inside(hi) && eps * hi >= upper[l] - inset) --hi;
    if (hi < lo) throw Error(ErrorKind::InvalidParameter, "box", "box contains no lattice sites");
    dom.origin_.push_back(lo);
    dom.extent_.push_back(hi - lo + 1);
  }
  dom.shape_.kind = ShapeKind::Box;
  dom.shape_.lower = lower;
  dom.shape_.upper = upper;
  dom.shape_.label = "box";
  const auto per = dom.periodic_;
  dom.build(
      [lower, upper, eps](std::span<const int>, std::span<const double> x) {
        for (std::size_t l = 0; l < x.size(); ++l) {
          if (!(x[l] > lower[l] + kInset * eps && x[l] < upper[l] - kInset * eps)) return false;
        }
        return true;
      },
      [lower, upper, per](std::span<const double> x) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < x.size(); ++l) {
          if (per[l]) continue;
          best = std::min({best, x[l] - lower[l], upper[l] - x[l]});
        }
        return best;
      });
  return dom;
}

LatticeDomain LatticeDomain::unit_cube(const Direction& normal, double eps) {
  require_spacing(eps);
  const auto d = static_cast<std::size_t>(normal.dim());
  const auto basis = normal.orthonormal_basis();
  // Q_nu fits in the ball of radius sqrt(d)/2.
  const int reach = static_cast<int>(std::ceil(0.5 * std::sqrt(static_cast<double>(d)) / eps)) + 1;

  LatticeDomain dom;
  dom.dim_ = static_cast<int>(d);
  dom.eps_ = eps;
  dom.origin_.assign(d, -reach);
  dom.extent_.assign(d, 2 * reach + 1);
  dom.periodic_.assign(d, false);
  dom.shape_.kind = ShapeKind::Cube;
  dom.shape_.normal = normal;
  dom.shape_.label = "cube";
  auto distance = [basis](std::span<const double> x) {
    double worst = 0.0;
    for (const auto& b : basis) {
      double p = 0.0;
      for (std::size_t l = 0; l < x.size(); ++l) p += b[l] * x[l];
      worst = std::max(worst, std::abs(p));
    }
    return 0.5 - worst;
  };
  dom.build([distance, eps](std::span<const int>, std::span<const double> x) { return distance(x) > kInset * eps; },
            distance);
  return dom;
}

LatticeDomain LatticeDomain::from_predicate(double eps, std::vector<int> lo, std::vector<int> hi,
                                            InteriorDistance distance, std::string label) {
  require_spacing(eps);
  const auto d = lo.size();
  if (d < 2 || hi.size() != d) {
    throw Error(ErrorKind::InvalidParameter, "bounds", "bounding box must share a dimension >= 2");
  }
  LatticeDomain dom;
  dom.dim_ = static_cast<int>(d);
  dom.eps_ = eps;
  dom.origin_ = lo;
  for (std::size_t l = 0; l < d; ++l) {
    if (hi[l] < lo[l]) throw Error(ErrorKind::InvalidParameter, "bounds", "empty bounding box");
    dom.extent_.push_back(hi[l] - lo[l] + 1);
  }
  dom.periodic_.assign(d, false);
  dom.shape_.kind = ShapeKind::Predicate;
  dom.shape_.label = std::move(label);
  dom.build([distance, eps](std::span<const int>, std::span<const double> x) { return distance(x) > kInset * eps; },
            distance);
  return dom;
}

void LatticeDomain::build(const std::function<bool(std::span<const int>, std::span<const double>)>& member,
                          const std::function<double(std::span<const double>)>& distance) {
  const auto d = static_cast<std::size_t>(dim_);
  for (std::size_t l = 0; l < d; ++l) {
    if (periodic_[l] && extent_[l] < 2) {
      throw Error(ErrorKind::InvalidParameter, "periodic", "periodic axes need at least two sites");
    }
  }
  std::size_t total = 1;
  for (int n : extent_) total *= static_cast<std::size_t>(n);
  site_of_box_.assign(total, kNoSite);

  std::vector<int> c(origin_);
  std::vector<double> x(d);
  for (std::size_t index = 0; index < total; ++index) {
    for (std::size_t l = 0; l < d; ++l) x[l] = eps_ * c[l];
    if (member(c, x)) {
      site_of_box_[index] = box_index_.size();
      box_index_.push_back(index);
      coords_.insert(coords_.end(), c.begin(), c.end());
      boundary_distance_.push_back(distance(x));
    }
    // lexicographic increment, last axis fastest
    for (std::size_t l = d; l-- > 0;) {
      if (++c[l] < origin_[l] + extent_[l]) break;
      c[l] = origin_[l];
    }
  }

  std::vector<int> next(d);
  for (std::size_t s = 0; s < size(); ++s) {
    auto here = site(s);
    for (std::size_t l = 0; l < d; ++l) {
      std::copy(here.begin(), here.end(), next.begin());
      next[l] += 1;
      if (next[l] >= origin_[l] + extent_[l]) {
        if (!periodic_[l]) continue;
        next[l] = origin_[l];
      }
      if (auto t = find(next)) bonds_.push_back({s, *t, static_cast<int>(l)});
    }
  }

  adjacency_offsets_.assign(size() + 1, 0);
  for (const auto& b : bonds_) {
    ++adjacency_offsets_[b.a + 1];
    ++adjacency_offsets_[b.b + 1];
  }
  for (std::size_t s = 0; s < size(); ++s) adjacency_offsets_[s + 1] += adjacency_offsets_[s];
  adjacency_.assign(adjacency_offsets_.back(), 0);
  std::vector<std::size_t> fill(adjacency_offsets_.begin(), adjacency_offsets_.end() - 1);
  for (const auto& b : bonds_) {
    adjacency_[fill[b.a]++] = b.b;
    adjacency_[fill[b.b]++] = b.a;
  }
}

std::vector<double> LatticeDomain::position(std::size_t s) const {
  auto c = site(s);
  std::vector<double> x(c.size());
  for (std::size_t l = 0; l < c.size(); ++l) x[l] = eps_ * c[l];
  return x;
}

std::optional<std::size_t> LatticeDomain::find(std::span<const int> coord) const {
  std::size_t index = 0;
  for (std::size_t l = 0; l < static_cast<std::size_t>(dim_); ++l) {
    const int rel = coord[l] - origin_[l];
    if (rel < 0 || rel >= extent_[l]) return std::nullopt;
    index = index * static_cast<std::size_t>(extent_[l]) + static_cast<std::size_t>(rel);
  }
  return site_at_box_index(index);
}

std::optional<std::size_t> LatticeDomain::site_at_box_index(std::size_t index) const {
  if (index >= site_of_box_.size() || site_of_box_[index] == kNoSite) return std::nullopt;
  return site_of_box_[index];
}

// ---------------------------------------------------------------------------

Region Region::all(const LatticeDomain& domain) {
  Region r;
  r.member_.assign(domain.size(), 1);
  r.label_ = "all";
  return r;
}

Region Region::from_sites(const LatticeDomain& domain, std::span<const std::size_t> sites, std::string label) {
  Region r;
  r.member_.assign(domain.size(), 0);
  for (auto s : sites) {
    if (s >= domain.size()) throw Error(ErrorKind::InvalidInput, "region", "site index out of range");
    r.member_[s] = 1;
  }
  r.label_ = std::move(label);
  return r;
}

Region Region::from_predicate(const LatticeDomain& domain,
                              const std::function<bool(std::span<const double>)>& inside, std::string label) {
  Region r;
  r.member_.resize(domain.size());
  for (std::size_t s = 0; s < domain.size(); ++s) r.member_[s] = inside(domain.position(s)) ? 1 : 0;
  r.label_ = std::move(label);
  return r;
}

// ---------------------------------------------------------------------------

SpinField::SpinField(std::shared_ptr<const LatticeDomain> domain, int states, PhaseIndex fill)
    : domain_(std::move(domain)), states_(states) {
  if (!domain_) throw Error(ErrorKind::InvalidInput, "domain", "spin field needs a domain");
  require_phase(fill, states_);
  phases_.assign(domain_->size(), fill);
  frozen_.assign(domain_->size(), 0);
}

void SpinField::set(std::size_t s, PhaseIndex k) {
  require_phase(k, states_);
  phases_[s] = k;
}

std::vector<std::size_t> SpinField::frozen_sites() const {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < frozen_.size(); ++s)
    if (frozen_[s]) out.push_back(s);
  return out;
}

std::vector<std::size_t> SpinField::free_sites() const {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < frozen_.size(); ++s)
    if (!frozen_[s]) out.push_back(s);
  return out;
}

std::vector<std::size_t> SpinField::phase_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(states_), 0);
  for (auto k : phases_) ++counts[static_cast<std::size_t>(k.value)];
  return counts;
}

// ---------------------------------------------------------------------------

double energy_scale(int states, double eps) {
  require_states(states);
  return static_cast<double>(states) / (kTwoPi * eps);
}

std::vector<Bond> enumerate_bonds(const LatticeDomain& domain, const Region* region) {
  if (!region) return domain.bonds();
  if (region->size() != domain.size()) {
    throw Error(ErrorKind::InvalidInput, "region", "region does not match the domain");
  }
  std::vector<Bond> out;
  for (const auto& b : domain.bonds())
    if (region->contains(b.a) && region->contains(b.b)) out.push_back(b);
  return out;
}

double bond_sum(const SpinField& field, const Region* region) {
  const auto costs = bond_cost_table(field.states());
  const auto n = static_cast<std::size_t>(field.states());
  double total = 0.0;
  for (const auto& b : field.domain().bonds()) {
    if (region && !(region->contains(b.a) && region->contains(b.b))) continue;
    total += costs[static_cast<std::size_t>(field[b.a].value) * n + static_cast<std::size_t>(field[b.b].value)];
  }
  return total;
}

EnergyReport discrete_energy(const SpinField& field, const Region* region) {
  const auto& dom = field.domain();
  if (region && region->size() != dom.size()) {
    throw Error(ErrorKind::InvalidInput, "region", "region does not match the domain");
  }
  EnergyReport rep;
  rep.region = region ? region->label() : "all";
  for (const auto& b : dom.bonds())
    if (!region || (region->contains(b.a) && region->contains(b.b))) ++rep.bond_count;
  rep.raw = std::pow(dom.spacing(), dom.dim()) * bond_sum(field, region);
  rep.scaled = energy_scale(field.states(), dom.spacing()) * rep.raw;
  return rep;
}

std::vector<std::size_t> boundary_layer(const LatticeDomain& domain, double width, double tol) {
  if (!(width >= 0.0)) throw Error(ErrorKind::InvalidParameter, "width", "layer width must be >= 0");
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < domain.size(); ++s)
    if (domain.boundary_distance(s) <= width + tol) out.push_back(s);
  return out;
}

SpinField apply_jump_datum(SpinField field, PhaseIndex s, PhaseIndex r, const Direction& normal,
                           std::span<const std::size_t> layer) {
  require_phase(s, field.states());
  require_phase(r, field.states());
  const auto& dom = field.domain();
  if (normal.dim() != dom.dim()) {
    throw Error(ErrorKind::InvalidParameter, "normal", "direction dimension does not match the lattice");
  }
  for (auto site : layer) {
    if (site >= dom.size()) throw Error(ErrorKind::InvalidInput, "layer", "layer site out of range");
    field.set(site, normal.sign_of_dot(dom.site(site)) > 0 ? s : r);
    field.freeze(site);
  }
  return field;
}

}  // namespace clocklat
