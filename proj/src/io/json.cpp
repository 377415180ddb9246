#include "pillowkit/io/json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pillowkit/errors.hpp"
#include "pillowkit/torus/fourier.hpp"

namespace pillowkit::io {

std::string format_double(double v) {
  if (!std::isfinite(v)) throw std::domain_error("cannot serialize a non-finite number");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  // Keep it a float in the JSON sense so integers and floats stay distinct.
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

namespace {

void write(std::ostringstream& out, const json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ',' << nl;
        first = false;
        out << pad << json(it.key()).dump() << (indent > 0 ? ": " : ":");
        write(out, it.value(), indent, depth + 1);
      }
      out << nl << close << '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      // Short numeric arrays stay on one line.
      const bool flat = j.size() <= 4 && std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_number(); });
      if (flat || indent == 0) {
        out << '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out << (indent > 0 ? ", " : ",");
          write(out, j[i], indent, depth + 1);
        }
        out << ']';
        return;
      }
      out << '[' << nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ',' << nl;
        out << pad;
        write(out, j[i], indent, depth + 1);
      }
      out << nl << close << ']';
      return;
    }
    case json::value_t::number_float:
      out << format_double(j.get<double>());
      return;
    default:
      out << j.dump();
  }
}

}  // namespace

std::string dump(const json& j, int indent) {
  std::ostringstream out;
  write(out, j, indent, 0);
  return out.str();
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
}

json read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return parse(s.str());
}

ObjectReader::ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
  if (!j.is_object()) throw SchemaError(where_ + ": expected an object");
}

bool ObjectReader::has(const std::string& key) const { return j_.contains(key); }

const json& ObjectReader::at(const std::string& key) {
  if (!j_.contains(key)) throw SchemaError(where_ + ": missing key \"" + key + "\"");
  seen_.push_back(key);
  return j_.at(key);
}

double ObjectReader::number(const std::string& key) { return as_number(at(key), where_ + "." + key); }
double ObjectReader::number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }
long ObjectReader::integer(const std::string& key) { return as_integer(at(key), where_ + "." + key); }
long ObjectReader::integer(const std::string& key, long fallback) { return has(key) ? integer(key) : fallback; }

std::string ObjectReader::string(const std::string& key) {
  const json& v = at(key);
  if (!v.is_string()) throw SchemaError(where_ + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::string ObjectReader::string(const std::string& key, const std::string& fallback) {
  return has(key) ? string(key) : fallback;
}

bool ObjectReader::boolean(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const json& v = at(key);
  if (!v.is_boolean()) throw SchemaError(where_ + "." + key + ": expected true or false");
  return v.get<bool>();
}

void ObjectReader::allow(std::initializer_list<const char*> keys) {
  for (const char* k : keys) seen_.emplace_back(k);
}

void ObjectReader::finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) {
      throw SchemaError(where_ + ": unknown key \"" + it.key() + "\"");
    }
  }
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where + ": expected a number");
  return j.get<double>();
}

long as_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw SchemaError(where + ": expected an integer");
  return j.get<long>();
}

namespace {

const json& array_of(const json& j, const std::string& where, std::size_t size = 0) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array");
  if (size && j.size() != size) throw SchemaError(where + ": expected " + std::to_string(size) + " entries");
  return j;
}

void check_version(ObjectReader& r) {
  if (r.has("version") && r.integer("version") != kFormatVersion) {
    throw SchemaError(r.where() + ": unsupported version");
  }
}

}  // namespace

json to_json(const torus::Vec2& v) { return json::array({v.x, v.y}); }

torus::Vec2 vec2_from_json(const json& j, const std::string& where) {
  array_of(j, where, 2);
  return {as_number(j[0], where + "[0]"), as_number(j[1], where + "[1]")};
}

torus::Int2 int2_from_json(const json& j, const std::string& where) {
  array_of(j, where, 2);
  return {as_integer(j[0], where + "[0]"), as_integer(j[1], where + "[1]")};
}

json to_json(const torus::FourierField& f) {
  json terms = json::array();
  for (const auto& t : f.terms()) {
    terms.push_back({{"k", {t.k.a, t.k.b}}, {"u_sin", to_json(t.u_sin())}, {"u_cos", to_json(t.u_cos())}});
  }
  return {{"terms", terms}, {"mean", to_json(f.mean())}};
}

torus::FourierField fourier_field_from_json(const json& j, const std::string& where, double div_tol) {
  ObjectReader r(j, where);
  std::vector<torus::FourierField::RawTerm> raw;
  const json& terms = array_of(r.at("terms"), where + ".terms");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string w = where + ".terms[" + std::to_string(i) + "]";
    ObjectReader t(terms[i], w);
    torus::FourierField::RawTerm term;
    term.k = int2_from_json(t.at("k"), w + ".k");
    if (term.k == torus::Int2{0, 0}) throw SchemaError(w + ".k: the zero wavevector belongs in \"mean\"");
    term.u_sin = t.has("u_sin") ? vec2_from_json(t.at("u_sin"), w + ".u_sin") : torus::Vec2{};
    term.u_cos = t.has("u_cos") ? vec2_from_json(t.at("u_cos"), w + ".u_cos") : torus::Vec2{};
    t.finish();
    raw.push_back(term);
  }
  const torus::Vec2 mean = r.has("mean") ? vec2_from_json(r.at("mean"), where + ".mean") : torus::Vec2{};
  r.finish();
  double residual = 0.0;
  auto field = torus::FourierField::from_raw(raw, mean, &residual);
  if (residual > div_tol) {
    std::ostringstream msg;
    msg << where << ": amplitude along k is " << residual << ", field is not divergence-free";
    throw DivergenceTooLarge(msg.str());
  }
  return field;
}

torus::TimeField time_field_from_json(const json& j, double div_tol) {
  ObjectReader r(j, "field");
  const std::string type = r.string("type");
  const int grid = static_cast<int>(r.integer("grid", 64));
  const int samples = static_cast<int>(r.integer("time_samples", 21));
  if (grid < 4 || samples < 2) throw SchemaError("field: grid must be >= 4 and time_samples >= 2");
  torus::TimeField out;
  if (type == "fourier") {
    out = torus::autonomous_field(fourier_field_from_json(r.at("field"), "field.field", div_tol), grid);
  } else if (type == "blend") {
    out = torus::blend_field(fourier_field_from_json(r.at("from"), "field.from", div_tol),
                             fourier_field_from_json(r.at("to"), "field.to", div_tol), grid, samples);
  } else if (type == "named") {
    const std::string name = r.string("name");
    const double s = r.number("scale", 1.0);
    const torus::FourierField sin_y({{{0, 1}, s, 0.0}}), sin_x({{{1, 0}, -s, 0.0}});
    if (name == "sin_y_sin_x") {
      // (sin y, sin x)
      out = torus::autonomous_field(torus::FourierField({{{0, 1}, s, 0.0}, {{1, 0}, -s, 0.0}}), grid);
    } else if (name == "blend_example") {
      // (1 - t) (sin y, 0) + t (0, sin x)
      out = torus::blend_field(sin_y, sin_x, grid, samples);
    } else {
      throw SchemaError("field.name: unknown named field \"" + name + "\"");
    }
  } else if (type == "gridded") {
    const int n = static_cast<int>(r.integer("n"));
    const int radius = static_cast<int>(r.integer("radius"));
    const bool eq = r.boolean("equivariant", false);
    const json& values = array_of(r.at("values"), "field.values");
    if (n < 4 || values.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
      throw SchemaError("field.values: expected n * n samples");
    }
    torus::GridField g;
    g.n = n;
    for (std::size_t i = 0; i < values.size(); ++i) {
      g.values.push_back(vec2_from_json(values[i], "field.values[" + std::to_string(i) + "]"));
    }
    if (n < 4 * radius) throw SchemaError("field.radius: needs n >= 4 radius");
    out = torus::autonomous_field(torus::fourier_decompose(g, radius, div_tol, eq).field, grid);
  } else {
    throw SchemaError("field.type: unknown field type \"" + type + "\"");
  }
  r.allow({"grid", "time_samples"});
  r.finish();
  return out;
}

json to_json(const torus::ShearingProfile& f) {
  json s = json::array(), c = json::array();
  for (const auto& h : f.sines()) s.push_back(json::array({h.m, h.coeff}));
  for (const auto& h : f.cosines()) c.push_back(json::array({h.m, h.coeff}));
  return {{"sines", s}, {"cosines", c}};
}

torus::ShearingProfile profile_from_json(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  auto harmonics = [&](const char* key) {
    std::vector<torus::Harmonic> out;
    if (!r.has(key)) return out;
    const json& a = array_of(r.at(key), where + "." + key);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string w = where + "." + key + "[" + std::to_string(i) + "]";
      array_of(a[i], w, 2);
      out.push_back({as_integer(a[i][0], w), as_number(a[i][1], w)});
    }
    return out;
  };
  auto s = harmonics("sines");
  auto c = harmonics("cosines");
  r.finish();
  try {
    return torus::ShearingProfile(std::move(s), std::move(c));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

json to_json(const torus::ShearingMap& m) {
  return {{"v", {m.direction().a, m.direction().b}},
          {"w", {m.normal().a, m.normal().b}},
          {"profile", to_json(m.profile())}};
}

torus::ShearingMap shearing_map_from_json(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  const auto v = int2_from_json(r.at("v"), where + ".v");
  const auto w = int2_from_json(r.at("w"), where + ".w");
  const auto f = profile_from_json(r.at("profile"), where + ".profile");
  r.finish();
  try {
    return torus::ShearingMap(v, w, f);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

json to_json(const torus::ShearingProgram& p) {
  json blocks = json::array();
  for (const auto& b : p.blocks()) {
    json maps = json::array();
    for (const auto& m : b.maps) maps.push_back(to_json(m));
    blocks.push_back({{"maps", maps}, {"repeat", b.repeat}, {"step_duration", b.step_duration}, {"speed", b.speed}});
  }
  return {{"version", kFormatVersion}, {"step_count", p.step_count()}, {"blocks", blocks}};
}

torus::ShearingProgram program_from_json(const json& j) {
  ObjectReader r(j, "program");
  check_version(r);
  const json& blocks = array_of(r.at("blocks"), "program.blocks");
  std::vector<torus::ProgramBlock> out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::string w = "program.blocks[" + std::to_string(i) + "]";
    ObjectReader b(blocks[i], w);
    torus::ProgramBlock block;
    const json& maps = array_of(b.at("maps"), w + ".maps");
    for (std::size_t k = 0; k < maps.size(); ++k) {
      block.maps.push_back(shearing_map_from_json(maps[k], w + ".maps[" + std::to_string(k) + "]"));
    }
    block.repeat = b.integer("repeat", 1);
    block.step_duration = b.number("step_duration");
    block.speed = b.number("speed", 1.0);
    b.finish();
    out.push_back(std::move(block));
  }
  r.allow({"step_count"});
  r.finish();
  try {
    return torus::ShearingProgram(std::move(out));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("program: ") + e.what());
  }
}

json to_json(const torus::ErrorCertificate& c) {
  json slices = json::array();
  for (const auto& s : c.slices) {
    slices.push_back({{"time_variation", s.time_variation},
                      {"truncation_error", s.truncation_error},
                      {"z_sup", s.z_sup},
                      {"w_sup_sum", s.w_sup_sum},
                      {"splitting_c", s.splitting_c},
                      {"radius", s.radius},
                      {"fineness", s.fineness},
                      {"terms", s.terms}});
  }
  return {{"version", kFormatVersion}, {"eps", c.eps},     {"eps1", c.eps1},     {"eps2", c.eps2},
          {"eps3", c.eps3},            {"total", c.total}, {"lipschitz", c.lipschitz}, {"n", c.n},
          {"slices", slices},          {"note", c.note}};
}

json to_json(const knots::Presentation& p) {
  json out = {{"generators", p.generators}, {"relators", p.relators}};
  if (!p.names.empty()) out["names"] = p.names;
  return out;
}

namespace {

knots::Word word_from_json(const json& j, const std::string& where) {
  array_of(j, where);
  knots::Word w;
  for (std::size_t i = 0; i < j.size(); ++i) {
    w.push_back(static_cast<int>(as_integer(j[i], where + "[" + std::to_string(i) + "]")));
  }
  return w;
}

}  // namespace

knots::Presentation presentation_from_json(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  knots::Presentation p;
  p.generators = static_cast<int>(r.integer("generators"));
  const json& rel = array_of(r.at("relators"), where + ".relators");
  for (std::size_t i = 0; i < rel.size(); ++i) {
    p.relators.push_back(word_from_json(rel[i], where + ".relators[" + std::to_string(i) + "]"));
  }
  if (r.has("names")) {
    for (const auto& n : array_of(r.at("names"), where + ".names")) {
      if (!n.is_string()) throw SchemaError(where + ".names: expected strings");
      p.names.push_back(n.get<std::string>());
    }
  }
  r.finish();
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(where + ": " + e.what());
  }
  return p;
}

json to_json(const knots::KnotSpec& s) {
  switch (s.kind) {
    case knots::KnotSpec::Kind::Unknot:
      return {{"type", "unknot"}};
    case knots::KnotSpec::Kind::TorusKnot:
      return {{"type", "torus"}, {"p", s.p}, {"q", s.q}};
    case knots::KnotSpec::Kind::Custom:
      break;
  }
  json out = {{"type", "custom"}, {"name", s.id()}};
  if (s.custom) {
    out["presentation"] = to_json(s.custom->presentation);
    out["meridian"] = s.custom->meridian;
    out["longitude"] = s.custom->longitude;
  }
  return out;
}

knots::KnotSpec knot_spec_from_json(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  const std::string type = r.string("type");
  knots::KnotSpec s;
  if (type == "unknot") {
    s = knots::KnotSpec::unknot();
  } else if (type == "torus") {
    s = knots::KnotSpec::torus(static_cast<int>(r.integer("p")), static_cast<int>(r.integer("q")));
  } else if (type == "custom") {
    s.kind = knots::KnotSpec::Kind::Custom;
    s.name = r.string("name", "custom");
    knots::KnotGroup g;
    g.presentation = presentation_from_json(r.at("presentation"), where + ".presentation");
    g.meridian = word_from_json(r.at("meridian"), where + ".meridian");
    g.longitude = word_from_json(r.at("longitude"), where + ".longitude");
    s.custom = g;
  } else {
    throw SchemaError(where + ".type: unknown knot type \"" + type + "\"");
  }
  r.finish();
  return s;
}

json to_json(const knots::SU2& q) { return json::array({q.w, q.x, q.y, q.z}); }

json to_json(const knots::RepAssignment& r) {
  json images = json::array();
  for (const auto& q : r.images) images.push_back(to_json(q));
  return {{"images", images}, {"residual", r.residual}};
}

json to_json(const pillowcase::CylinderCurve& c) {
  json v = json::array();
  for (const auto& p : c.vertices) v.push_back(to_json(p));
  return {{"vertices", v}, {"closed", c.closed}};
}

pillowcase::CylinderCurve curve_from_json(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  pillowcase::CylinderCurve c;
  const json& v = array_of(r.at("vertices"), where + ".vertices");
  for (std::size_t i = 0; i < v.size(); ++i) {
    c.vertices.push_back(vec2_from_json(v[i], where + ".vertices[" + std::to_string(i) + "]"));
  }
  c.closed = r.boolean("closed", false);
  r.finish();
  if (c.vertices.size() < 2) throw SchemaError(where + ": a curve needs at least two vertices");
  return c;
}

json to_json(const knots::ImageCurve& c) {
  json arcs = json::array();
  for (const auto& a : c.arcs) {
    json w = json::array();
    for (const auto& r : a.witnesses) w.push_back(to_json(r));
    arcs.push_back({{"curve", to_json(a.curve)}, {"witnesses", w}});
  }
  return {{"arcs", arcs},
          {"reducible_line", to_json(c.reducible_line)},
          {"gaps", c.gaps},
          {"grid_step", c.grid_step},
          {"delta", c.delta}};
}

json to_json(const knots::SliceHit& h) {
  return {{"alpha", h.angles.alpha},
          {"beta", h.angles.beta},
          {"arc", h.arc},
          {"segment", h.segment},
          {"rep", to_json(h.rep)}};
}

json to_json(const knots::SpliceRep& r) {
  return {{"presentation", to_json(r.presentation)},
          {"assignment", to_json(r.assignment)},
          {"split", r.split},
          {"residual_first", r.residual_first},
          {"residual_second", r.residual_second},
          {"irreducible", r.irreducible},
          {"irreducible_first", r.irreducible_first},
          {"irreducible_second", r.irreducible_second},
          {"first", {{"alpha", r.first.alpha}, {"beta", r.first.beta}}},
          {"second", {{"alpha", r.second.alpha}, {"beta", r.second.beta}}}};
}

json to_json(const cert::Certificate& c) {
  json images = json::array();
  for (const auto& m : c.images) images.push_back(json::array({m.a, m.b, m.c, m.d}));
  return {{"version", kFormatVersion},
          {"presentation_id", c.presentation_id},
          {"p", std::to_string(c.p)},
          {"images", images}};
}

cert::Certificate certificate_from_json(const json& j) {
  ObjectReader r(j, "certificate");
  check_version(r);
  cert::Certificate c;
  c.presentation_id = r.string("presentation_id", "");
  const std::string p = r.string("p");
  const auto [end, ec] = std::from_chars(p.data(), p.data() + p.size(), c.p);
  if (ec != std::errc() || end != p.data() + p.size() || p.empty()) {
    throw SchemaError("certificate.p: expected a decimal string fitting in 64 bits");
  }
  const json& images = array_of(r.at("images"), "certificate.images");
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string w = "certificate.images[" + std::to_string(i) + "]";
    array_of(images[i], w, 4);
    std::uint64_t e[4];
    for (int k = 0; k < 4; ++k) {
      if (!images[i][k].is_number_unsigned() && !(images[i][k].is_number_integer() && images[i][k].get<long>() >= 0)) {
        throw SchemaError(w + ": entries must be nonnegative integers");
      }
      e[k] = images[i][k].get<std::uint64_t>();
    }
    c.images.push_back({e[0], e[1], e[2], e[3], c.p});
  }
  r.finish();
  return c;
}

}  // namespace pillowkit::io
