#include "clocklat/io.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace clocklat {
namespace {

template <class T>
T get_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::InvalidInput, key, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::InvalidInput, key, std::string("field '") + key + "' has the wrong type");
  }
}

const char* shape_name(ShapeKind k) {
  switch (k) {
    case ShapeKind::Grid: return "grid";
    case ShapeKind::Box: return "box";
    case ShapeKind::Cube: return "cube";
    case ShapeKind::Predicate: return "predicate";
  }
  return "?";
}

}  // namespace

Json direction_to_json(const Direction& nu) {
  if (nu.is_rational()) {
    const auto w = nu.integers();
    return Json(std::vector<std::int64_t>(w.begin(), w.end()));
  }
  const auto c = nu.components();
  return Json(std::vector<double>(c.begin(), c.end()));
}

Direction direction_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::InvalidInput, field, "direction must be a non-empty array");
  bool integral = true;
  for (const auto& x : j) {
    if (!x.is_number()) throw Error(ErrorKind::InvalidInput, field, "direction entries must be numbers");
    integral = integral && x.is_number_integer();
  }
  if (integral) return Direction::from_integers(j.get<std::vector<std::int64_t>>());
  return Direction::normalized(j.get<std::vector<double>>());
}

Json spin_field_to_json(const SpinField& field) {
  const auto& dom = field.domain();
  const auto& shape = dom.shape();
  if (shape.kind == ShapeKind::Predicate) {
    throw Error(ErrorKind::InvalidInput, "shape", "predicate domains cannot be serialized");
  }
  Json j;
  j["d"] = dom.dim();
  j["eps"] = dom.spacing();
  j["N"] = field.states();
  j["origin"] = std::vector<int>(dom.origin().begin(), dom.origin().end());
  j["extent"] = std::vector<int>(dom.extent().begin(), dom.extent().end());
  j["periodic"] = dom.periodic();
  Json s;
  s["kind"] = shape_name(shape.kind);
  if (shape.kind == ShapeKind::Box) {
    s["lower"] = shape.lower;
    s["upper"] = shape.upper;
  }
  if (shape.kind == ShapeKind::Cube) s["normal"] = direction_to_json(*shape.normal);
  j["shape"] = s;
  std::vector<int> phases(dom.box_size(), -1);
  std::vector<std::size_t> frozen;
  for (std::size_t v = 0; v < field.size(); ++v) {
    phases[dom.box_index(v)] = field[v].value;
    if (field.frozen(v)) frozen.push_back(dom.box_index(v));
  }
  j["phases"] = phases;
  j["frozen"] = frozen;
  return j;
}

SpinField spin_field_from_json(const Json& j) {
  const int d = get_field<int>(j, "d");
  const double eps = get_field<double>(j, "eps");
  const int states = get_field<int>(j, "N");
  require_states(states);
  const auto origin = get_field<std::vector<int>>(j, "origin");
  const auto extent = get_field<std::vector<int>>(j, "extent");
  const auto periodic = get_field<std::vector<bool>>(j, "periodic");
  const auto& shape = j.at("shape");
  const auto kind = get_field<std::string>(shape, "kind");
  if (origin.size() != static_cast<std::size_t>(d) || extent.size() != static_cast<std::size_t>(d)) {
    throw Error(ErrorKind::InvalidInput, "extent", "origin and extent must have d entries");
  }
  std::shared_ptr<const LatticeDomain> dom;
  if (kind == "grid") {
    dom = std::make_shared<const LatticeDomain>(LatticeDomain::grid(eps, extent, periodic, origin));
  } else if (kind == "box") {
    dom = std::make_shared<const LatticeDomain>(LatticeDomain::box(eps, get_field<std::vector<double>>(shape, "lower"),
                                                                   get_field<std::vector<double>>(shape, "upper"),
                                                                   periodic));
  } else if (kind == "cube") {
    dom = std::make_shared<const LatticeDomain>(LatticeDomain::unit_cube(direction_from_json(shape.at("normal")), eps));
  } else {
    throw Error(ErrorKind::InvalidInput, "shape", "unknown shape kind '" + kind + "'");
  }
  const auto phases = get_field<std::vector<int>>(j, "phases");
  if (phases.size() != dom->box_size()) throw Error(ErrorKind::InvalidInput, "phases", "phase array size mismatch");
  SpinField field(dom, states);
  for (std::size_t b = 0; b < phases.size(); ++b) {
    const auto site = dom->site_at_box_index(b);
    if (!site) {
      if (phases[b] != -1) throw Error(ErrorKind::InvalidInput, "phases", "value given outside the domain");
      continue;
    }
    if (phases[b] < 0 || phases[b] >= states) throw Error(ErrorKind::InvalidInput, "phases", "phase out of range");
    field.set(*site, {phases[b]});
  }
  if (j.contains("frozen")) {
    for (auto b : get_field<std::vector<std::size_t>>(j, "frozen")) {
      const auto site = b < dom->box_size() ? dom->site_at_box_index(b) : std::nullopt;
      if (!site) throw Error(ErrorKind::InvalidInput, "frozen", "frozen index outside the domain");
      field.freeze(*site);
    }
  }
  return field;
}

Json partition_to_json(const GridPartitionField& field) {
  Json j;
  j["d"] = field.dim();
  j["lambda"] = field.cell_size();
  j["origin"] = std::vector<int>(field.origin().begin(), field.origin().end());
  j["extent"] = std::vector<int>(field.extent().begin(), field.extent().end());
  if (field.mode() == ValueMode::Clock) {
    j["value_mode"] = "SN";
    j["N"] = field.states();
    std::vector<int> values;
    for (auto p : field.phases()) values.push_back(p.value);
    j["values"] = values;
  } else {
    j["value_mode"] = "S1";
    std::vector<double> values;
    for (auto v : field.circle_values()) values.push_back(v.angle());
    j["values"] = values;
  }
  return j;
}

GridPartitionField partition_from_json(const Json& j) {
  const int d = get_field<int>(j, "d");
  const double lambda = get_field<double>(j, "lambda");
  const auto extent = get_field<std::vector<int>>(j, "extent");
  auto origin = j.contains("origin") ? get_field<std::vector<int>>(j, "origin") : std::vector<int>(extent.size(), 0);
  if (extent.size() != static_cast<std::size_t>(d)) throw Error(ErrorKind::InvalidInput, "extent", "extent must have d entries");
  const auto mode = get_field<std::string>(j, "value_mode");
  if (mode == "SN") {
    const int states = get_field<int>(j, "N");
    std::vector<PhaseIndex> values;
    for (int v : get_field<std::vector<int>>(j, "values")) values.push_back({v});
    return GridPartitionField::clock(lambda, extent, states, std::move(values), std::move(origin));
  }
  if (mode == "S1") {
    std::vector<CircleValue> values;
    for (double a : get_field<std::vector<double>>(j, "values")) {
      if (!std::isfinite(a)) throw Error(ErrorKind::InvalidInput, "values", "angles must be finite");
      values.emplace_back(a);
    }
    return GridPartitionField::circle(lambda, extent, std::move(values), std::move(origin));
  }
  throw Error(ErrorKind::InvalidInput, "value_mode", "value_mode must be \"S1\" or \"SN\"");
}

Json solver_record_to_json(const SolverRecord& rec) {
  Json j;
  j["method"] = rec.method;
  j["energy"] = rec.energy;
  j["bounds"] = {{"lower", rec.lower}, {"upper", rec.upper}, {"analytic", rec.analytic}};
  j["seed"] = rec.seed;
  j["chains"] = rec.chains;
  j["sweeps"] = rec.sweeps;
  j["field_file"] = rec.field_file;
  j["config_hash"] = rec.config_hash;
  return j;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "path", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json read_json_file(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::InvalidInput, "json", path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "path", "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "path", "write failed for " + path.string());
}

void write_json_file(const std::filesystem::path& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace clocklat
