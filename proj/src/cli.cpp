#include "clocklat/cli.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <map>

#include <CLI11.hpp>

#include "clocklat/constructions.hpp"
#include "clocklat/experiments.hpp"
#include "clocklat/rng.hpp"
#include "clocklat/solvers.hpp"

namespace clocklat {
namespace {

namespace fs = std::filesystem;

const char* const kShared[] = {"command", "seed", "threads", "out", "timing"};

Json schedule_defaults() {
  return {{"t_initial", 2.0}, {"t_final", 0.01}, {"cooling", 0.95}, {"sweeps", 200}, {"chains", 32}};
}

Json merged(Json a, const Json& b) {
  for (const auto& [k, v] : b.items()) a[k] = v;
  return a;
}

const std::map<std::string, Json>& defaults_table() {
  static const std::map<std::string, Json> table = [] {
    std::map<std::string, Json> t;
    std::vector<int> prefactor_ladder;
    for (int n = 8; n <= 8192; n *= 2) prefactor_ladder.push_back(n);
    t["lemma"] = {{"k_max", 64}, {"grid", 10000}, {"tol", 1e-12}};
    t["sandwich"] = merged({{"N", 2},
                            {"s", 0},
                            {"r", 1},
                            {"normal", {0, 1}},
                            {"ladder", {0.125, 0.0625, 0.03125}},
                            {"method", "auto"},
                            {"initial", "staircase"}},
                           schedule_defaults());
    t["prefactor"] = {{"ladder", prefactor_ladder}};
    t["raster"] = {{"normal", {1, 1}}, {"a", 0.0}, {"b", kPi}, {"ladder", {0.0625, 0.03125, 0.015625}}};
    t["cell"] = merged({{"N", 2},
                        {"s", 0},
                        {"r", 1},
                        {"normal", {0, 1}},
                        {"eps", 0.125},
                        {"method", "auto"},
                        {"initial", "staircase"}},
                       schedule_defaults());
    t["volume"] = merged({{"N", 2},
                          {"extent", {4, 4}},
                          {"eps", 0.25},
                          {"periodic", false},
                          {"V", {0.5, 0.5}},
                          {"method", "auto"},
                          {"initial", "shuffled"}},
                         merged(schedule_defaults(), {{"sweeps", 1000}}));
    t["dirichlet"] = merged(
        {{"datum", ""}, {"N", 4}, {"eps", 0.0625}, {"omega", nullptr}, {"layer", 2.0}, {"method", "auto"}},
        schedule_defaults());
    t["recover"] = {{"N", 4},          {"s", 2},          {"r", 0},
                    {"normal", {0, 1}}, {"eps", 0.125},     {"domain", "cube"},
                    {"cross_section", 8}};
    t["energy"] = {{"field", ""}};
    return t;
  }();
  return table;
}

[[noreturn]] void config_error(const std::string& field, const std::string& message) {
  throw Error(ErrorKind::Config, field, message);
}

bool compatible(const Json& def, const Json& v) {
  if (def.is_null()) return v.is_null() || v.is_object();
  if (def.is_number_integer()) return v.is_number_integer();
  if (def.is_number()) return v.is_number();
  if (def.is_boolean()) return v.is_boolean();
  if (def.is_string()) return v.is_string();
  if (def.is_array()) return v.is_array();
  return def.type() == v.type();
}

int get_int(const Json& p, const char* key) { return p.at(key).get<int>(); }
double get_double(const Json& p, const char* key) { return p.at(key).get<double>(); }

void require_states_field(const Json& p) {
  if (get_int(p, "N") < 2) config_error("N", "N must satisfy N >= 2");
}

PhaseIndex phase_field(const Json& p, const char* key) {
  const int k = get_int(p, key);
  if (k < 0 || k >= get_int(p, "N")) config_error(key, std::string(key) + " must satisfy 0 <= " + key + " < N");
  return {k};
}

Direction normal_field(const Json& p) {
  try {
    return direction_from_json(p.at("normal"), "normal");
  } catch (const Error& e) {
    config_error("normal", e.what());
  }
}

AnnealSchedule schedule_field(const Json& p, std::uint64_t seed, unsigned threads) {
  AnnealSchedule s;
  s.t_initial = get_double(p, "t_initial");
  s.t_final = get_double(p, "t_final");
  s.cooling = get_double(p, "cooling");
  s.sweeps = get_int(p, "sweeps");
  s.chains = get_int(p, "chains");
  s.seed = seed;
  s.threads = threads;
  try {
    s.validate();
  } catch (const Error& e) {
    config_error(e.field(), e.what());
  }
  return s;
}

std::vector<double> ladder_field(const Json& p) {
  std::vector<double> out;
  for (const auto& v : p.at("ladder")) {
    if (!v.is_number() || !(v.get<double>() > 0.0)) config_error("ladder", "ladder entries must be positive numbers");
    out.push_back(v.get<double>());
  }
  if (out.empty()) config_error("ladder", "ladder must not be empty");
  return out;
}

CellProblemSpec cell_spec(const ExperimentConfig& c) {
  const auto& p = c.params;
  require_states_field(p);
  CellProblemSpec spec;
  spec.states = get_int(p, "N");
  spec.s = phase_field(p, "s");
  spec.r = phase_field(p, "r");
  spec.normal = normal_field(p);
  spec.eps = get_double(p, "eps");
  if (!(spec.eps > 0.0 && spec.eps < 0.25)) config_error("eps", "cell problems need 0 < eps < 1/4");
  try {
    spec.method = parse_cell_method(p.at("method").get<std::string>());
    spec.start = parse_cell_start(p.at("initial").get<std::string>());
    spec.schedule = schedule_field(p, derive_seed(c.seed, "cell"), 1);
    spec.threads = c.threads;
    spec.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    config_error(e.field(), e.what());
  }
  return spec;
}

SandwichConfig sandwich_spec(const ExperimentConfig& c) {
  const auto& p = c.params;
  require_states_field(p);
  SandwichConfig cfg;
  cfg.states = get_int(p, "N");
  cfg.s = phase_field(p, "s");
  cfg.r = phase_field(p, "r");
  cfg.normal = normal_field(p);
  cfg.ladder = ladder_field(p);
  for (double e : cfg.ladder) {
    if (e >= 0.25) config_error("ladder", "cell problems need eps < 1/4");
  }
  try {
    cfg.method = parse_cell_method(p.at("method").get<std::string>());
    cfg.start = parse_cell_start(p.at("initial").get<std::string>());
  } catch (const Error& e) {
    config_error(e.field(), e.what());
  }
  cfg.schedule = schedule_field(p, derive_seed(c.seed, "sandwich"), 1);
  cfg.threads = c.threads;
  return cfg;
}

StaircaseSpec recover_spec(const ExperimentConfig& c) {
  const auto& p = c.params;
  require_states_field(p);
  StaircaseSpec spec;
  spec.states = get_int(p, "N");
  spec.s = phase_field(p, "s");
  spec.r = phase_field(p, "r");
  spec.normal = normal_field(p);
  spec.eps = get_double(p, "eps");
  if (!(spec.eps > 0.0 && spec.eps < 0.25)) config_error("eps", "eps must satisfy 0 < eps < 1/4");
  const auto dom = p.at("domain").get<std::string>();
  if (dom == "cube") {
    spec.domain = StaircaseDomain::Cube;
  } else if (dom == "slab") {
    spec.domain = StaircaseDomain::PeriodicSlab;
    if (!spec.normal.axis_index()) config_error("normal", "slab domains need a coordinate normal");
  } else {
    config_error("domain", "domain must be \"cube\" or \"slab\"");
  }
  spec.cross_section = get_int(p, "cross_section");
  if (spec.cross_section < 2) config_error("cross_section", "cross_section must be >= 2");
  return spec;
}

void validate_command(const ExperimentConfig& c) {
  const auto& p = c.params;
  if (c.command == "lemma") {
    if (get_int(p, "k_max") < 1) config_error("k_max", "k_max must be >= 1");
    if (get_int(p, "grid") < 2) config_error("grid", "grid must be >= 2");
    if (!(get_double(p, "tol") >= 0.0)) config_error("tol", "tol must be >= 0");
  } else if (c.command == "sandwich") {
    sandwich_spec(c);
  } else if (c.command == "prefactor") {
    for (const auto& v : p.at("ladder")) {
      if (!v.is_number_integer() || v.get<long long>() < 2) config_error("N", "N must satisfy N >= 2");
    }
    if (p.at("ladder").empty()) config_error("ladder", "ladder must not be empty");
  } else if (c.command == "raster") {
    const auto nu = normal_field(p);
    if (nu.dim() != 2) config_error("normal", "raster studies are two-dimensional");
    for (double l : ladder_field(p)) {
      const double n = 1.0 / l;
      if (std::abs(n - std::round(n)) > 1e-9 * n) config_error("ladder", "1/lambda must be a whole number");
    }
  } else if (c.command == "cell") {
    cell_spec(c);
  } else if (c.command == "volume") {
    require_states_field(p);
    if (!(get_double(p, "eps") > 0.0)) config_error("eps", "eps must be positive");
    const auto& ext = p.at("extent");
    if (ext.empty()) config_error("extent", "extent must not be empty");
    for (const auto& v : ext) {
      if (!v.is_number_integer() || v.get<int>() < 1) config_error("extent", "extent entries must be >= 1");
    }
    if (p.at("V").size() != static_cast<std::size_t>(get_int(p, "N"))) config_error("V", "V needs one fraction per phase");
    std::size_t sites = 1;
    for (const auto& v : ext) sites *= v.get<std::size_t>();
    try {
      counts_from_fractions(p.at("V").get<std::vector<double>>(), sites);
    } catch (const Error& e) {
      config_error("V", e.what());
    }
    const auto m = p.at("method").get<std::string>();
    if (m != "auto" && m != "enumerate" && m != "anneal") config_error("method", "method must be auto, enumerate or anneal");
    const auto init = p.at("initial").get<std::string>();
    if (init != "shuffled" && init != "ordered") config_error("initial", "initial must be \"shuffled\" or \"ordered\"");
    schedule_field(p, 0, 1);
  } else if (c.command == "dirichlet") {
    require_states_field(p);
    if (p.at("datum").get<std::string>().empty()) config_error("datum", "datum file is required");
    if (!(get_double(p, "eps") > 0.0)) config_error("eps", "eps must be positive");
    if (!(get_double(p, "layer") > 0.0)) config_error("layer", "layer must be positive");
    const auto m = p.at("method").get<std::string>();
    if (m != "auto" && m != "enumerate" && m != "anneal") config_error("method", "method must be auto, enumerate or anneal");
    if (p.at("omega").is_object()) {
      for (const char* k : {"lower", "upper"}) {
        if (!p.at("omega").contains(k) || !p.at("omega").at(k).is_array()) config_error("omega", "omega needs lower and upper arrays");
      }
      for (const auto& [k, v] : p.at("omega").items()) {
        if (k != "lower" && k != "upper") config_error("omega." + k, "unknown key '" + k + "'");
      }
    }
    schedule_field(p, 0, 1);
  } else if (c.command == "recover") {
    recover_spec(c);
  } else if (c.command == "energy") {
    if (p.at("field").get<std::string>().empty()) config_error("field", "field file is required");
  }
}

fs::path resolve_input(const ExperimentConfig& c, const std::string& name) {
  const fs::path p(name);
  return p.is_absolute() ? p : c.base_dir / p;
}

std::string stamp_csv(const std::string& csv, const std::string& hash) { return csv + "# config_hash: " + hash + "\n"; }

Json table_summary(const ConvergenceTable& t) {
  Json j;
  j["name"] = t.name;
  if (t.rate) {
    j["rate"] = {{"exponent", t.rate->exponent}, {"residual", t.rate->residual}, {"rows_used", t.rate->used},
                 {"rows_excluded", t.rate->excluded}};
  } else {
    j["rate"] = nullptr;
    j["rate_skipped"] = true;
  }
  if (!t.notes.empty()) j["row_methods"] = t.notes;
  return j;
}

std::vector<fs::path> write_table(const ExperimentConfig& c, const ConvergenceTable& t, std::ostream& log) {
  const auto csv = c.out_dir / (t.name + ".csv");
  const auto meta = c.out_dir / (t.name + "_summary.json");
  write_text_file(csv, stamp_csv(to_csv(t, c.timing), c.hash()));
  auto j = table_summary(t);
  j["config_hash"] = c.hash();
  write_json_file(meta, j);
  for (const auto& r : t.rows) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "  %-12.6g lower %.9f  estimate %.9f  upper %.9f  analytic %.9f  gap %+.3e\n",
                  r.parameter, r.lower, r.estimate, r.upper, r.analytic, r.gap);
    log << buf;
  }
  if (t.rate) log << "  fitted exponent " << t.rate->exponent << " (rms residual " << t.rate->residual << ")\n";
  return {csv, meta};
}

std::vector<fs::path> run_lemma(const ExperimentConfig& c, std::ostream& log) {
  const auto& p = c.params;
  const auto rep = run_lemma_sweep(get_int(p, "k_max"), get_int(p, "grid"), get_double(p, "tol"));
  Json j;
  j["k_max"] = rep.k_max;
  j["grid"] = rep.grid_points;
  j["evaluations"] = rep.evaluations;
  j["min_gap"] = rep.min_gap;
  j["argmin"] = {{"k", rep.argmin_k}, {"theta", rep.argmin_theta}};
  j["nontrivial_min_gap"] = rep.nontrivial_min_gap;
  j["nontrivial_argmin"] = {{"k", rep.nontrivial_argmin_k}, {"theta", rep.nontrivial_argmin_theta}};
  j["k1_max_abs_gap"] = rep.k1_max_abs_gap;
  Json nodes = Json::array();
  for (const auto& [k, t] : rep.equality_nodes) nodes.push_back({{"k", k}, {"theta", t}});
  j["equality_nodes"] = nodes;
  j["config_hash"] = c.hash();
  const auto path = c.out_dir / "lemma_report.json";
  write_json_file(path, j);
  log << "lemma sweep: min gap " << rep.min_gap << ", nontrivial minimum " << rep.nontrivial_min_gap << " at k="
      << rep.nontrivial_argmin_k << " theta=" << rep.nontrivial_argmin_theta << "\n";
  return {path};
}

std::vector<fs::path> run_sandwich(const ExperimentConfig& c, std::ostream& log) {
  log << "sandwich ladder\n";
  return write_table(c, run_gamma_sandwich(sandwich_spec(c)), log);
}

std::vector<fs::path> run_prefactor(const ExperimentConfig& c, std::ostream& log) {
  log << "prefactor ladder\n";
  return write_table(c, run_prefactor_limit(c.params.at("ladder").get<std::vector<int>>()), log);
}

std::vector<fs::path> run_raster(const ExperimentConfig& c, std::ostream& log) {
  RasterConfig cfg;
  cfg.normal = normal_field(c.params);
  cfg.a = CircleValue(get_double(c.params, "a"));
  cfg.b = CircleValue(get_double(c.params, "b"));
  cfg.ladder = ladder_field(c.params);
  log << "oblique raster ladder\n";
  return write_table(c, run_oblique_raster(cfg), log);
}

std::vector<fs::path> write_result(const ExperimentConfig& c, const std::string& stem, SolverRecord rec,
                                   const SpinField& field, Json extra, std::ostream& log) {
  const auto field_path = c.out_dir / (stem + "_field.json");
  auto fj = spin_field_to_json(field);
  fj["config_hash"] = c.hash();
  write_json_file(field_path, fj);
  rec.field_file = field_path.filename().string();
  rec.config_hash = c.hash();
  auto j = solver_record_to_json(rec);
  for (const auto& [k, v] : extra.items()) j[k] = v;
  const auto result_path = c.out_dir / (stem + "_result.json");
  write_json_file(result_path, j);
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s: energy %.12f (lower %.12f, upper %.12f, analytic %.12f)\n", rec.method.c_str(),
                rec.energy, rec.lower, rec.upper, rec.analytic);
  log << buf;
  return {result_path, field_path};
}

std::vector<fs::path> run_cell(const ExperimentConfig& c, std::ostream& log) {
  const auto spec = cell_spec(c);
  const auto est = cell_formula_estimate(spec);
  SolverRecord rec;
  rec.method = est.method;
  rec.energy = est.estimate;
  rec.lower = est.lower;
  rec.upper = est.upper;
  rec.analytic = est.analytic;
  rec.seed = spec.schedule.seed;
  const bool annealed = est.method == "anneal";
  rec.chains = annealed ? spec.schedule.chains : 0;
  rec.sweeps = annealed ? spec.schedule.sweeps : 0;
  Json extra = {{"search_energy", est.search_energy}, {"free_sites", est.free_sites}, {"eps", spec.eps}};
  return write_result(c, "cell", rec, est.field, extra, log);
}

std::vector<fs::path> run_volume(const ExperimentConfig& c, std::ostream& log) {
  const auto& p = c.params;
  const int N = get_int(p, "N");
  const double eps = get_double(p, "eps");
  const auto extent = p.at("extent").get<std::vector<int>>();
  const bool periodic = p.at("periodic").get<bool>();
  auto dom = std::make_shared<const LatticeDomain>(
      LatticeDomain::grid(eps, extent, std::vector<bool>(extent.size(), periodic)));
  std::vector<std::size_t> counts;
  try {
    counts = counts_from_fractions(p.at("V").get<std::vector<double>>(), dom->size());
  } catch (const Error& e) {
    config_error("V", e.what());
  }
  const SpinField base(dom, N);
  auto method = p.at("method").get<std::string>();
  const double bits = [&] {
    double b = std::lgamma(static_cast<double>(dom->size()) + 1.0);
    for (auto k : counts) b -= std::lgamma(static_cast<double>(k) + 1.0);
    return b / std::log(2.0);
  }();
  if (method == "auto") method = bits <= kMaxSearchBits ? "enumerate" : "anneal";
  const auto schedule = schedule_field(p, derive_seed(c.seed, "volume"), c.threads);
  SolverRecord rec;
  rec.seed = schedule.seed;
  std::optional<SpinField> best;
  if (method == "enumerate") {
    auto res = enumerate_min_constrained(base, counts, c.threads);
    rec.method = "enumerate";
    rec.energy = res.energy;
    best = std::move(res.field);
  } else {
    auto start = arrange_with_counts(base, counts);
    if (p.at("initial").get<std::string>() == "shuffled") start = shuffle_free_sites(start, schedule.seed);
    auto res = anneal_kawasaki(start, counts, schedule);
    rec.method = "anneal";
    rec.energy = res.energy;
    rec.chains = schedule.chains;
    rec.sweeps = schedule.sweeps;
    best = std::move(res.field);
  }
  rec.lower = bond_lower_bound_energy(*best);
  rec.upper = rec.energy;
  rec.analytic = std::numeric_limits<double>::quiet_NaN();
  Json extra = {{"counts", counts}, {"search_bits", bits}};
  return write_result(c, "volume", rec, *best, extra, log);
}

std::vector<fs::path> run_dirichlet(const ExperimentConfig& c, std::ostream& log) {
  const auto& p = c.params;
  const int N = get_int(p, "N");
  const double eps = get_double(p, "eps");
  const auto datum = partition_from_json(read_json_file(resolve_input(c, p.at("datum").get<std::string>())));
  const auto d = static_cast<std::size_t>(datum.dim());
  std::vector<double> lower(d);
  std::vector<double> upper(d);
  for (std::size_t l = 0; l < d; ++l) {
    lower[l] = datum.cell_size() * datum.origin()[l];
    upper[l] = datum.cell_size() * (datum.origin()[l] + datum.extent()[l]);
  }
  if (p.at("omega").is_object()) {
    lower = p.at("omega").at("lower").get<std::vector<double>>();
    upper = p.at("omega").at("upper").get<std::vector<double>>();
    if (lower.size() != d || upper.size() != d) config_error("omega", "omega must match the datum dimension");
  }
  auto dom = std::make_shared<const LatticeDomain>(LatticeDomain::box(eps, lower, upper));
  auto field = pointwise_sample(datum, dom, N);
  for (auto s : boundary_layer(*dom, get_double(p, "layer") * eps)) field.freeze(s);

  // jump faces of the datum strictly inside Omega
  std::size_t interior_faces = 0;
  for (std::size_t cell = 0; cell < datum.cell_count(); ++cell) {
    const auto z = datum.cell_coords(cell);
    for (std::size_t l = 0; l < d; ++l) {
      auto w = z;
      ++w[l];
      const auto other = datum.cell_index(w);
      if (!other || datum.distance(cell, *other) == 0.0) continue;
      auto center = datum.cell_center(cell);
      center[l] += 0.5 * datum.cell_size();
      bool inside = true;
      for (std::size_t m = 0; m < d; ++m) inside = inside && center[m] > lower[m] + 1e-12 && center[m] < upper[m] - 1e-12;
      if (inside) ++interior_faces;
    }
  }
  Json warnings = Json::array();
  if (interior_faces > 0) {
    const std::string w = "datum jumps inside omega on " + std::to_string(interior_faces) + " faces";
    warnings.push_back(w);
    log << "warning: " << w << "\n";
  }

  const double upper_energy = discrete_energy(field).scaled;
  auto method = p.at("method").get<std::string>();
  const double bits = static_cast<double>(field.free_sites().size()) * std::log2(static_cast<double>(N));
  if (method == "auto") method = bits <= kMaxSearchBits ? "enumerate" : "anneal";
  const auto schedule = schedule_field(p, derive_seed(c.seed, "dirichlet"), c.threads);
  SolverRecord rec;
  rec.seed = schedule.seed;
  std::optional<SpinField> best;
  if (method == "enumerate") {
    auto res = enumerate_min(field, c.threads);
    rec.method = "enumerate";
    rec.energy = res.energy;
    best = std::move(res.field);
  } else {
    auto res = anneal_glauber(field, schedule);
    rec.method = "anneal";
    rec.energy = res.energy;
    rec.chains = schedule.chains;
    rec.sweeps = schedule.sweeps;
    best = std::move(res.field);
  }
  rec.lower = bond_lower_bound_energy(*best);
  rec.upper = upper_energy;
  rec.analytic = std::numeric_limits<double>::quiet_NaN();
  Json extra = {{"warnings", warnings}, {"free_sites", best->free_sites().size()}};
  return write_result(c, "dirichlet", rec, *best, extra, log);
}

std::vector<fs::path> run_recover(const ExperimentConfig& c, std::ostream& log) {
  const auto spec = recover_spec(c);
  const auto field = staircase_recovery(spec);
  const auto rep = discrete_energy(field);
  SolverRecord rec;
  rec.method = "staircase";
  rec.energy = rep.scaled;
  rec.lower = bond_lower_bound_energy(field);
  rec.upper = rep.scaled;
  rec.analytic = prefactor(spec.states) * geodesic_distance_SN(spec.s, spec.r, spec.states) * spec.normal.norm1();
  Json extra = {{"steps", reduce_staircase(spec).steps}, {"raw", rep.raw}, {"bonds", rep.bond_count}};
  if (spec.domain == StaircaseDomain::PeriodicSlab) extra["slab_prediction"] = staircase_slab_energy(spec);
  return write_result(c, "recover", rec, field, extra, log);
}

std::vector<fs::path> run_energy(const ExperimentConfig& c, std::ostream& log) {
  const auto field = spin_field_from_json(read_json_file(resolve_input(c, c.params.at("field").get<std::string>())));
  const auto rep = discrete_energy(field);
  Json j;
  j["raw"] = rep.raw;
  j["scaled"] = rep.scaled;
  j["bonds"] = rep.bond_count;
  j["lower_bound"] = bond_lower_bound_energy(field);
  j["config_hash"] = c.hash();
  const auto path = c.out_dir / "energy_report.json";
  write_json_file(path, j);
  log << "energy: raw " << rep.raw << ", scaled " << rep.scaled << "\n";
  return {path};
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config:
    case ErrorKind::InvalidParameter:
    case ErrorKind::InvalidInput:
    case ErrorKind::InvalidSpec: return 2;
    case ErrorKind::SearchTooLarge: return 3;
    case ErrorKind::Io: return 1;
  }
  return 1;
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& field, const std::string& message) {
  Json j;
  j["error"] = kind;
  if (!field.empty()) j["field"] = field;
  j["message"] = message;
  err << j.dump() << "\n";
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"lemma", "sandwich", "prefactor", "raster",  "cell",
                                                 "volume", "dirichlet", "recover", "energy"};
  return names;
}

Json command_defaults(const std::string& command) {
  const auto& t = defaults_table();
  const auto it = t.find(command);
  if (it == t.end()) config_error("command", "unknown command '" + command + "'");
  Json j;
  j["command"] = command;
  j["seed"] = 0;
  j["threads"] = 1;
  j["out"] = "clocklat_out";
  j["timing"] = true;
  for (const auto& [k, v] : it->second.items()) j[k] = v;
  return j;
}

Json ExperimentConfig::resolved() const {
  Json j;
  j["command"] = command;
  j["seed"] = seed;
  j["timing"] = timing;
  for (const auto& [k, v] : params.items()) j[k] = v;
  return j;
}

std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_string(resolved().dump())));
  return buf;
}

ExperimentConfig parse_config(const std::string& command, const Json& raw, const CliOverrides& overrides,
                              const fs::path& base_dir) {
  if (!raw.is_object()) config_error("config", "config must be a JSON object");
  const auto defaults = command_defaults(command);
  if (raw.contains("command") && raw.at("command") != command) {
    config_error("command", "config is for '" + raw.at("command").dump() + "', not '" + command + "'");
  }
  std::vector<std::string> unknown;
  for (const auto& [k, v] : raw.items()) {
    if (!defaults.contains(k)) unknown.push_back(k);
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
    config_error(unknown.front(), "unknown key(s): " + list);
  }
  Json all = defaults;
  for (const auto& [k, v] : raw.items()) {
    if (!compatible(defaults.at(k), v)) config_error(k, "key '" + k + "' has the wrong type");
    all[k] = v;
  }
  ExperimentConfig c;
  c.command = command;
  c.base_dir = base_dir;
  if (all.at("seed").is_number_integer() && all.at("seed").get<long long>() < 0) config_error("seed", "seed must be >= 0");
  c.seed = overrides.seed ? *overrides.seed : all.at("seed").get<std::uint64_t>();
  const long long threads = overrides.threads ? static_cast<long long>(*overrides.threads) : all.at("threads").get<long long>();
  if (threads < 1) config_error("threads", "threads must be >= 1");
  c.threads = static_cast<unsigned>(threads);
  c.out_dir = overrides.out ? *overrides.out : fs::path(all.at("out").get<std::string>());
  c.timing = all.at("timing").get<bool>();
  c.params = Json::object();
  for (const auto& [k, v] : all.items()) {
    if (std::find(std::begin(kShared), std::end(kShared), k) == std::end(kShared)) c.params[k] = v;
  }
  validate_command(c);
  return c;
}

ExperimentConfig parse_config_file(const std::string& command, const fs::path& path, const CliOverrides& overrides) {
  if (!fs::exists(path)) throw Error(ErrorKind::Config, "config", "config file not found: " + path.string());
  Json raw;
  try {
    raw = Json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Config, "config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(command, raw, overrides, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

std::vector<fs::path> dispatch(const ExperimentConfig& c, std::ostream& log) {
  fs::create_directories(c.out_dir);
  std::vector<fs::path> files;
  if (c.command == "lemma") files = run_lemma(c, log);
  else if (c.command == "sandwich") files = run_sandwich(c, log);
  else if (c.command == "prefactor") files = run_prefactor(c, log);
  else if (c.command == "raster") files = run_raster(c, log);
  else if (c.command == "cell") files = run_cell(c, log);
  else if (c.command == "volume") files = run_volume(c, log);
  else if (c.command == "dirichlet") files = run_dirichlet(c, log);
  else if (c.command == "recover") files = run_recover(c, log);
  else if (c.command == "energy") files = run_energy(c, log);
  else config_error("command", "unknown command '" + c.command + "'");
  auto resolved = c.resolved();
  resolved["config_hash"] = c.hash();
  const auto rc = c.out_dir / "resolved_config.json";
  write_json_file(rc, resolved);
  files.push_back(rc);
  return files;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lattice variational engine for the N-clock model"};
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out_dir;
  std::string names;
  for (const auto& n : command_names()) names += (names.empty() ? "" : " | ") + n;
  app.add_option("command", command, names)->required();
  app.add_option("--config", config_path, "JSON experiment config")->required();
  app.add_option("--seed", seed, "global seed (overrides the config)");
  app.add_option("--threads", threads, "worker threads (overrides the config)");
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage", "", e.what());
    return 2;
  }
  try {
    CliOverrides ov;
    ov.seed = seed;
    ov.threads = threads;
    if (out_dir) ov.out = fs::path(*out_dir);
    const auto config = parse_config_file(command, config_path, ov);
    const auto files = dispatch(config, out);
    for (const auto& f : files) out << "wrote " << f.string() << "\n";
    return 0;
  } catch (const Error& e) {
    emit_error(err, to_string(e.kind()), e.field(), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    emit_error(err, "internal", "", e.what());
    return 1;
  }
}

}  // namespace clocklat
