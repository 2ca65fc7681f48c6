#include "msflow/config.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace msflow {

using json = nlohmann::json;

namespace {

/// Object reader that remembers which keys were consumed, so leftovers can be rejected.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    if (!j_.contains(key)) throw ConfigError(child(key) + ": missing required field");
    seen_.insert(key);
    return j_.at(key);
  }

  const json* get(const std::string& key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    return &j_.at(key);
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError(child(key) + ": unknown field");
  }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError((path_.empty() ? "<root>" : path_) + ": " + what); }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path + ": expected true or false");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path + ": expected a string");
  return j.get<std::string>();
}

std::size_t as_count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(path + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return j.get<int>();
}

std::vector<double> as_numbers(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Vec2 as_vec2(const json& j, const std::string& path) {
  const auto v = as_numbers(j, path);
  if (v.size() != 2) throw ConfigError(path + ": expected two numbers");
  return {v[0], v[1]};
}

Mat2 as_mat2(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path + ": expected a 2x2 matrix");
  Mat2 m;
  for (int r = 0; r < 2; ++r) {
    const Vec2 row = as_vec2(j[r], path + "[" + std::to_string(r) + "]");
    m(r, 0) = row.x();
    m(r, 1) = row.y();
  }
  return m;
}

json to_json(const Vec2& v) { return json::array({v.x(), v.y()}); }
json to_json(const Mat2& m) { return json::array({json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})}); }

DoubleBubbleSpec parse_bubble(const json& j, const std::string& path) {
  Reader r(j, path);
  DoubleBubbleSpec b;
  const auto areas = as_numbers(r.at("areas"), r.child("areas"));
  if (areas.size() != 2) throw ConfigError(r.child("areas") + ": expected two areas (left, right)");
  b.areas = {areas[0], areas[1]};
  if (const json* c = r.get("center")) b.center = as_vec2(*c, r.child("center"));
  r.finish();
  return b;
}

DiskSpec parse_disk(const json& j, const std::string& path) {
  Reader r(j, path);
  DiskSpec d;
  d.radius = as_number(r.at("radius"), r.child("radius"));
  if (const json* c = r.get("center")) d.center = as_vec2(*c, r.child("center"));
  r.finish();
  return d;
}

GeometrySpec parse_geometry(const json& j, const std::string& path) {
  Reader r(j, path);
  GeometrySpec g;
  g.type = geometry_type_from_string(as_string(r.at("type"), r.child("type")));
  if (const json* v = r.get("vertices_per_curve")) g.vertices_per_curve = as_count(*v, r.child("vertices_per_curve"));
  if (const json* b = r.get("bubbles")) {
    if (!b->is_array()) throw ConfigError(r.child("bubbles") + ": expected an array");
    for (std::size_t i = 0; i < b->size(); ++i) g.bubbles.push_back(parse_bubble((*b)[i], r.child("bubbles") + "[" + std::to_string(i) + "]"));
  }
  if (const json* d = r.get("disks")) {
    if (!d->is_array()) throw ConfigError(r.child("disks") + ": expected an array");
    for (std::size_t i = 0; i < d->size(); ++i) g.disks.push_back(parse_disk((*d)[i], r.child("disks") + "[" + std::to_string(i) + "]"));
  }
  if (const json* cs = r.get("curves")) {
    if (!cs->is_array()) throw ConfigError(r.child("curves") + ": expected an array");
    for (std::size_t i = 0; i < cs->size(); ++i) {
      Reader cr((*cs)[i], r.child("curves") + "[" + std::to_string(i) + "]");
      Curve c;
      if (const json* cl = cr.get("closed")) c.closed = as_bool(*cl, cr.child("closed"));
      const json& verts = cr.at("vertices");
      if (!verts.is_array()) throw ConfigError(cr.child("vertices") + ": expected an array");
      for (std::size_t k = 0; k < verts.size(); ++k) c.vertices.push_back(as_vec2(verts[k], cr.child("vertices") + "[" + std::to_string(k) + "]"));
      cr.finish();
      g.curves.push_back(std::move(c));
    }
  }
  if (const json* js = r.get("junctions")) {
    if (!js->is_array()) throw ConfigError(r.child("junctions") + ": expected an array");
    for (std::size_t i = 0; i < js->size(); ++i) {
      Reader jr((*js)[i], r.child("junctions") + "[" + std::to_string(i) + "]");
      JunctionMap J;
      const json& curves = jr.at("curves");
      const json& verts = jr.at("vertices");
      if (!curves.is_array() || curves.size() != 3 || !verts.is_array() || verts.size() != 3) {
        throw ConfigError(jr.child("curves") + ": junctions need three curves and three vertices");
      }
      for (int k = 0; k < 3; ++k) {
        J.curves[k] = as_count(curves[k], jr.child("curves"));
        J.vertices[k] = as_count(verts[k], jr.child("vertices"));
      }
      jr.finish();
      g.junctions.push_back(J);
    }
  }
  r.finish();
  if (g.type == GeometryType::SeedDoubleBubble || g.type == GeometryType::DoubleBubble) {
    if (g.bubbles.size() != 1 || !g.disks.empty()) throw ConfigError(path + ": expects exactly one bubble and no disks");
  } else if (g.type == GeometryType::DoubleBubblePlusDisk) {
    if (g.bubbles.size() != 1 || g.disks.size() != 1) throw ConfigError(path + ": expects one bubble and one disk");
  } else if (g.type == GeometryType::TwoDoubleBubbles) {
    if (g.bubbles.size() != 2 || !g.disks.empty()) throw ConfigError(path + ": expects two bubbles (lower, upper)");
  } else if (g.curves.empty()) {
    throw ConfigError(path + ": polyline geometry needs curves");
  }
  return g;
}

AnisotropySpec parse_anisotropy(const json& j, const std::string& path) {
  Reader r(j, path);
  AnisotropySpec a;
  a.type = as_string(r.at("type"), r.child("type"));
  if (a.type != "isotropic" && a.type != "hex2d" && a.type != "matrices") {
    throw ConfigError(r.child("type") + ": expected isotropic, hex2d or matrices");
  }
  if (const json* d = r.get("delta")) a.delta = as_number(*d, r.child("delta"));
  if (const json* s = r.get("scale")) a.scale = as_number(*s, r.child("scale"));
  if (const json* m = r.get("matrices")) {
    if (!m->is_array()) throw ConfigError(r.child("matrices") + ": expected an array of 2x2 matrices");
    for (std::size_t i = 0; i < m->size(); ++i) a.matrices.push_back(as_mat2((*m)[i], r.child("matrices") + "[" + std::to_string(i) + "]"));
  }
  r.finish();
  if (a.type == "matrices" && a.matrices.empty()) throw ConfigError(path + ": type 'matrices' needs at least one matrix");
  if (!(a.scale > 0.0)) throw ConfigError(r.child("scale") + ": must be positive");
  if (a.type == "hex2d" && !(a.delta > 0.0 && a.delta <= 1.0)) throw ConfigError(r.child("delta") + ": must lie in (0, 1]");
  return a;
}

json anisotropy_json(const AnisotropySpec& a) {
  json j = {{"type", a.type}, {"scale", a.scale}};
  if (a.type == "hex2d") j["delta"] = a.delta;
  if (a.type == "matrices") {
    j["matrices"] = json::array();
    for (const auto& m : a.matrices) j["matrices"].push_back(to_json(m));
  }
  return j;
}

Quadrature quadrature_from_string(const std::string& s, const std::string& path) {
  if (s == "exact") return Quadrature::Exact;
  if (s == "lumped") return Quadrature::Lumped;
  throw ConfigError(path + ": expected exact or lumped");
}

RunConfig parse_document(const json& doc) {
  Reader r(doc, "");
  RunConfig c;
  if (const json* v = r.get("name")) c.name = as_string(*v, "name");
  if (const json* v = r.get("description")) c.description = as_string(*v, "description");
  c.geometry = parse_geometry(r.at("geometry"), "geometry");
  if (const json* v = r.get("orientation")) {
    if (!v->is_array()) throw ConfigError("orientation: expected an array of rows");
    std::vector<std::vector<int>> rows;
    for (std::size_t l = 0; l < v->size(); ++l) {
      const std::string p = "orientation[" + std::to_string(l) + "]";
      if (!(*v)[l].is_array()) throw ConfigError(p + ": expected an array");
      std::vector<int> row;
      for (const auto& e : (*v)[l]) row.push_back(as_int(e, p));
      rows.push_back(std::move(row));
    }
    c.orientation = std::move(rows);
  }
  if (const json* v = r.get("exterior_phase")) c.exterior_phase = as_count(*v, "exterior_phase");
  if (const json* v = r.get("anisotropy")) {
    c.anisotropy.clear();
    if (v->is_array()) {
      for (std::size_t i = 0; i < v->size(); ++i) c.anisotropy.push_back(parse_anisotropy((*v)[i], "anisotropy[" + std::to_string(i) + "]"));
    } else {
      c.anisotropy.push_back(parse_anisotropy(*v, "anisotropy"));
    }
  }
  if (const json* v = r.get("rho")) c.rho = v->is_array() ? as_numbers(*v, "rho") : std::vector<double>{as_number(*v, "rho")};
  if (const json* v = r.get("mobility")) {
    Reader mr(*v, "mobility");
    c.mobility.type = as_string(mr.at("type"), "mobility.type");
    if (const json* x = mr.get("value")) c.mobility.value = as_number(*x, "mobility.value");
    if (const json* x = mr.get("matrix")) c.mobility.matrix = as_mat2(*x, "mobility.matrix");
    mr.finish();
    if (c.mobility.type != "constant" && c.mobility.type != "quadratic") {
      throw ConfigError("mobility.type: expected constant or quadratic");
    }
  }
  if (const json* v = r.get("boundary")) {
    Reader br(*v, "boundary");
    if (const json* x = br.get("dirichlet")) c.boundary.side = dirichlet_side_from_string(as_string(*x, "boundary.dirichlet"));
    if (const json* x = br.get("w_D")) c.boundary.w_D = as_numbers(*x, "boundary.w_D");
    br.finish();
  }
  if (const json* v = r.get("time")) {
    Reader tr(*v, "time");
    if (const json* x = tr.get("tau")) c.tau = as_number(*x, "time.tau");
    if (const json* x = tr.get("T")) c.T = as_number(*x, "time.T");
    tr.finish();
  }
  if (const json* v = r.get("mesh")) {
    Reader mr(*v, "mesh");
    if (const json* x = mr.get("coarse_level")) c.mesh.coarse_level = as_int(*x, "mesh.coarse_level");
    if (const json* x = mr.get("h_fine")) c.mesh.h_fine = as_number(*x, "mesh.h_fine");
    if (const json* x = mr.get("band_width")) c.mesh.band_width = as_number(*x, "mesh.band_width");
    else c.mesh.band_width = 2.0 * c.mesh.h_fine;
    mr.finish();
  }
  if (const json* v = r.get("solver")) {
    Reader sr(*v, "solver");
    if (const json* x = sr.get("method")) c.solver.method = solver_method_from_string(as_string(*x, "solver.method"));
    if (const json* x = sr.get("tol")) c.solver.tol = as_number(*x, "solver.tol");
    if (const json* x = sr.get("max_iterations")) c.solver.max_iterations = as_int(*x, "solver.max_iterations");
    if (const json* x = sr.get("restart")) c.solver.restart = as_int(*x, "solver.restart");
    if (const json* x = sr.get("fallback")) c.solver.fallback = as_bool(*x, "solver.fallback");
    if (const json* x = sr.get("reuse_preconditioner")) {
      c.solver.reuse_preconditioner = as_bool(*x, "solver.reuse_preconditioner");
    }
    sr.finish();
  }
  if (const json* v = r.get("quadrature")) c.quadrature = quadrature_from_string(as_string(*v, "quadrature"), "quadrature");
  if (const json* v = r.get("surgery")) {
    Reader sr(*v, "surgery");
    if (const json* x = sr.get("enabled")) c.surgery.enabled = as_bool(*x, "surgery.enabled");
    if (const json* x = sr.get("min_length_factor")) c.surgery.min_length_factor = as_number(*x, "surgery.min_length_factor");
    if (const json* x = sr.get("min_vertices")) c.surgery.min_vertices = as_count(*x, "surgery.min_vertices");
    sr.finish();
  }
  if (const json* v = r.get("output")) {
    Reader orr(*v, "output");
    if (const json* x = orr.get("times")) c.output.times = as_numbers(*x, "output.times");
    if (const json* x = orr.get("directory")) c.output.directory = as_string(*x, "output.directory");
    if (const json* x = orr.get("bulk")) c.output.bulk = as_bool(*x, "output.bulk");
    if (const json* x = orr.get("timing")) c.output.timing = as_bool(*x, "output.timing");
    orr.finish();
  }
  r.finish();
  validate(c);
  return c;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

json preset_document(const std::string& name, const std::string& dir) {
  const std::filesystem::path p = std::filesystem::path(dir) / (name + ".json");
  if (!std::filesystem::exists(p)) throw ConfigError("unknown preset '" + name + "' (looked in " + dir + ")");
  json j = parse_json(read_file(p));
  if (!j.contains("name")) j["name"] = name;
  return j;
}

/// Expands a "preset" key by merging the remaining document onto the preset.
json expand_preset(json doc, const std::string& dir) {
  if (!doc.is_object() || !doc.contains("preset")) return doc;
  if (!doc["preset"].is_string()) throw ConfigError("preset: expected a string");
  const std::string name = doc["preset"].get<std::string>();
  doc.erase("preset");
  json base = preset_document(name, dir);
  base.merge_patch(doc);
  return base;
}

void apply_override(json& doc, const std::string& item) {
  const auto eq = item.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + item + "': expected key=value");
  const std::string path = item.substr(0, eq);
  const std::string text = item.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;  // bare strings need no quotes
  }
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("override '" + item + "': empty path component");
    if (!node->is_object()) throw ConfigError("override '" + item + "': '" + key + "' is not inside an object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

}  // namespace

Anisotropy AnisotropySpec::build() const {
  if (type == "isotropic") return Anisotropy::isotropic(scale);
  if (type == "hex2d") return Anisotropy::hex2d(delta, scale);
  std::vector<AnisotropyComponent> comps;
  for (const auto& m : matrices) comps.emplace_back(m);
  return Anisotropy(std::move(comps), scale);
}

Mobility MobilitySpec::build() const {
  if (type == "quadratic") return Mobility::quadratic(matrix);
  return Mobility::constant(value);
}

bool RunConfig::operator==(const RunConfig& o) const {
  return name == o.name && description == o.description && geometry == o.geometry && orientation == o.orientation &&
         exterior_phase == o.exterior_phase && anisotropy == o.anisotropy && rho == o.rho && mobility == o.mobility &&
         boundary.side == o.boundary.side && boundary.w_D == o.boundary.w_D && tau == o.tau && T == o.T &&
         mesh.coarse_level == o.mesh.coarse_level && mesh.h_fine == o.mesh.h_fine &&
         mesh.band_width == o.mesh.band_width && solver.method == o.solver.method && solver.tol == o.solver.tol &&
         solver.max_iterations == o.solver.max_iterations && solver.restart == o.solver.restart &&
         solver.fallback == o.solver.fallback && solver.reuse_preconditioner == o.solver.reuse_preconditioner &&
         quadrature == o.quadrature && surgery.enabled == o.surgery.enabled &&
         surgery.min_length_factor == o.surgery.min_length_factor && surgery.min_vertices == o.surgery.min_vertices &&
         output == o.output;
}

std::string default_preset_dir() {
  if (const char* env = std::getenv("MSFLOW_PRESET_DIR")) return env;
  return MSFLOW_DEFAULT_PRESET_DIR;
}

std::vector<std::string> list_presets(const std::string& dir) {
  std::vector<std::string> names;
  if (!std::filesystem::is_directory(dir)) return names;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

RunConfig parse_config(const std::string& text, const std::string& preset_dir) {
  return parse_document(expand_preset(parse_json(text), preset_dir));
}

RunConfig load_preset(const std::string& name, const std::string& preset_dir) {
  return parse_document(preset_document(name, preset_dir));
}

RunConfig resolve_config(const std::optional<std::string>& text, const std::optional<std::string>& preset,
                         const std::vector<std::string>& overrides, const std::string& preset_dir) {
  json doc = json::object();
  if (preset) doc = preset_document(*preset, preset_dir);
  if (text) {
    json user = expand_preset(parse_json(*text), preset_dir);
    if (preset) doc.merge_patch(user);
    else doc = std::move(user);
  }
  if (!preset && !text) throw ConfigError("either a config file or a preset is required");
  for (const auto& o : overrides) apply_override(doc, o);
  return parse_document(doc);
}

std::string serialize_config(const RunConfig& c) {
  json j;
  j["name"] = c.name;
  if (!c.description.empty()) j["description"] = c.description;
  json g = {{"type", to_string(c.geometry.type)}, {"vertices_per_curve", c.geometry.vertices_per_curve}};
  if (!c.geometry.bubbles.empty()) {
    g["bubbles"] = json::array();
    for (const auto& b : c.geometry.bubbles)
      g["bubbles"].push_back({{"areas", json::array({b.areas[0], b.areas[1]})}, {"center", to_json(b.center)}});
  }
  if (!c.geometry.disks.empty()) {
    g["disks"] = json::array();
    for (const auto& d : c.geometry.disks) g["disks"].push_back({{"radius", d.radius}, {"center", to_json(d.center)}});
  }
  if (!c.geometry.curves.empty()) {
    g["curves"] = json::array();
    for (const auto& cv : c.geometry.curves) {
      json verts = json::array();
      for (const auto& v : cv.vertices) verts.push_back(to_json(v));
      g["curves"].push_back({{"closed", cv.closed}, {"vertices", verts}});
    }
  }
  if (!c.geometry.junctions.empty()) {
    g["junctions"] = json::array();
    for (const auto& J : c.geometry.junctions) {
      g["junctions"].push_back({{"curves", json::array({J.curves[0], J.curves[1], J.curves[2]})},
                                {"vertices", json::array({J.vertices[0], J.vertices[1], J.vertices[2]})}});
    }
  }
  j["geometry"] = g;
  if (c.orientation) j["orientation"] = *c.orientation;
  j["exterior_phase"] = c.exterior_phase;
  if (c.anisotropy.size() == 1) {
    j["anisotropy"] = anisotropy_json(c.anisotropy.front());
  } else {
    j["anisotropy"] = json::array();
    for (const auto& a : c.anisotropy) j["anisotropy"].push_back(anisotropy_json(a));
  }
  j["rho"] = c.rho.size() == 1 ? json(c.rho.front()) : json(c.rho);
  j["mobility"] = {{"type", c.mobility.type}, {"value", c.mobility.value}, {"matrix", to_json(c.mobility.matrix)}};
  j["boundary"] = {{"dirichlet", to_string(c.boundary.side)}, {"w_D", c.boundary.w_D}};
  j["time"] = {{"tau", c.tau}, {"T", c.T}};
  j["mesh"] = {{"coarse_level", c.mesh.coarse_level}, {"h_fine", c.mesh.h_fine}, {"band_width", c.mesh.band_width}};
  j["solver"] = {{"method", to_string(c.solver.method)},
                 {"tol", c.solver.tol},
                 {"max_iterations", c.solver.max_iterations},
                 {"restart", c.solver.restart},
                 {"fallback", c.solver.fallback},
                 {"reuse_preconditioner", c.solver.reuse_preconditioner}};
  j["quadrature"] = c.quadrature == Quadrature::Exact ? "exact" : "lumped";
  j["surgery"] = {{"enabled", c.surgery.enabled},
                  {"min_length_factor", c.surgery.min_length_factor},
                  {"min_vertices", c.surgery.min_vertices}};
  j["output"] = {{"times", c.output.times},
                 {"directory", c.output.directory},
                 {"bulk", c.output.bulk},
                 {"timing", c.output.timing}};
  return j.dump(2) + "\n";
}

void validate(const RunConfig& c) {
  if (!(c.tau > 0.0)) throw ConfigError("time.tau: must be positive");
  if (!(c.T >= 0.0)) throw ConfigError("time.T: must be non-negative");
  if (c.geometry.vertices_per_curve < 3) throw ConfigError("geometry.vertices_per_curve: must be at least 3");
  if (c.mesh.coarse_level < 1 || c.mesh.coarse_level > 10) throw ConfigError("mesh.coarse_level: must lie in [1, 10]");
  if (!(c.mesh.h_fine > 0.0)) throw ConfigError("mesh.h_fine: must be positive");
  if (c.mesh.band_width < 0.0) throw ConfigError("mesh.band_width: must be non-negative");
  if (!(c.solver.tol > 0.0)) throw ConfigError("solver.tol: must be positive");
  if (c.solver.restart < 1 || c.solver.max_iterations < 1) throw ConfigError("solver: restart and max_iterations must be positive");
  for (double r : c.rho)
    if (r < 0.0) throw ConfigError("rho: must be non-negative");
  if (c.mobility.type == "constant" && !(c.mobility.value > 0.0)) throw ConfigError("mobility.value: must be positive");
  if (c.surgery.min_length_factor < 0.0) throw ConfigError("surgery.min_length_factor: must be non-negative");
  std::size_t phases = 3;
  if (c.orientation) {
    const auto O = OrientationMatrix::from_rows(*c.orientation);
    O.validate();
    phases = O.phases();
  } else if (c.geometry.type == GeometryType::Polylines) {
    throw ConfigError("orientation: required for polyline geometry");
  }
  if (c.exterior_phase >= phases) throw ConfigError("exterior_phase: out of range");
  if (c.boundary.side != DirichletSide::None || !c.boundary.w_D.empty()) {
    BoundarySpec check = c.boundary;
    check.side = DirichletSide::All;
    check.validate(phases);
  }
  for (double t : c.output.times)
    if (t < 0.0 || t > c.T + 0.5 * c.tau) throw ConfigError("output.times: must lie in [0, T]");
}

CurveNetwork build_network(const RunConfig& c) {
  std::optional<OrientationMatrix> O;
  if (c.orientation) O = OrientationMatrix::from_rows(*c.orientation);
  return make_initial(c.geometry, O ? &*O : nullptr, c.exterior_phase);
}

std::vector<CurveParams> build_curve_params(const RunConfig& c, std::size_t curves) {
  if (c.anisotropy.size() != 1 && c.anisotropy.size() != curves) {
    throw ConfigError("anisotropy: give one entry or one per curve (" + std::to_string(curves) + ")");
  }
  if (c.rho.size() != 1 && c.rho.size() != curves) {
    throw ConfigError("rho: give one value or one per curve (" + std::to_string(curves) + ")");
  }
  std::vector<CurveParams> out;
  for (std::size_t i = 0; i < curves; ++i) {
    CurveParams p;
    p.gamma = c.anisotropy[c.anisotropy.size() == 1 ? 0 : i].build();
    p.rho = c.rho[c.rho.size() == 1 ? 0 : i];
    p.beta = c.mobility.build();
    out.push_back(std::move(p));
  }
  return out;
}

SimulationConfig to_simulation_config(const RunConfig& c) {
  SimulationConfig s;
  s.assembly.tau = c.tau;
  s.assembly.quadrature = c.quadrature;
  s.assembly.boundary = c.boundary;
  s.mesh = c.mesh;
  s.solver = c.solver;
  s.surgery = c.surgery;
  s.T = c.T;
  s.timing = c.output.timing;
  return s;
}

}  // namespace msflow
