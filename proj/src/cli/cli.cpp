#include "pillowkit/cli/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "pillowkit/cert/cert.hpp"
#include "pillowkit/errors.hpp"
#include "pillowkit/io/json.hpp"
#include "pillowkit/knots/reps.hpp"
#include "pillowkit/pillowcase/pillowcase.hpp"
#include "pillowkit/torus/moser.hpp"
#include "pillowkit/torus/program.hpp"

namespace pillowkit::cli {

namespace fs = std::filesystem;
using io::json;
using io::ObjectReader;

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

namespace {

const std::vector<std::string> kSubcommands = {"approx-isotopy", "pillowcase-image", "slice-reps", "splice-rep",
                                               "verify-cert",    "search-cert",      "moser"};

struct JobConfig {
  std::string subcommand;
  std::string input;
  std::string out_dir = ".";
  std::optional<double> eps;
  std::optional<int> resolution;
  std::optional<int> samples;
  std::vector<std::uint64_t> primes;
  std::optional<std::uint64_t> seed;
  bool reproducible = false;
  std::map<std::string, double> tol;
};

// Which flags and tolerance keys each subcommand accepts.
struct Accepts {
  std::set<std::string> flags;
  std::set<std::string> tol;
};

const std::map<std::string, Accepts>& accepts() {
  static const std::map<std::string, Accepts> a = {
      {"approx-isotopy", {{"eps", "resolution"}, {"div_tol"}}},
      {"pillowcase-image", {{"resolution", "samples"}, {"rep_tol", "newton_tol", "irreducible_tol"}}},
      {"slice-reps", {{"samples"}, {"rep_tol", "newton_tol", "irreducible_tol"}}},
      {"splice-rep", {{"samples"}, {"rep_tol", "newton_tol", "irreducible_tol"}}},
      {"verify-cert", {{}, {}}},
      {"search-cert", {{"primes"}, {}}},
      {"moser", {{"resolution"}, {"poisson_tol", "form_floor", "area_tol", "curve_tol"}}},
  };
  return a;
}

class Job {
 public:
  Job(JobConfig cfg, std::ostream& out) : cfg_(std::move(cfg)), out_(out) {}
  int execute();

 private:
  int approx_isotopy(const json& in);
  int pillowcase_image(const json& in);
  int slice_reps(const json& in);
  int splice_rep(const json& in);
  int verify_cert(const json& in);
  int search_cert(const json& in);
  int moser(const json& in);

  void write(const std::string& name, const std::string& text);
  void write_json(const std::string& name, const json& j) { write(name, io::dump(j) + "\n"); }
  double tol(const std::string& key, double fallback) const {
    const auto it = cfg_.tol.find(key);
    return it == cfg_.tol.end() ? fallback : it->second;
  }
  knots::SolverOptions solver_options() const;

  JobConfig cfg_;
  std::ostream& out_;
  json parameters_ = json::object();
  json summary_ = json::object();
  std::vector<std::pair<std::string, std::string>> outputs_;  // name, sha256
};

void Job::write(const std::string& name, const std::string& text) {
  const fs::path path = fs::path(cfg_.out_dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SchemaError("cannot write " + path.string());
  f << text;
  if (!f) throw SchemaError("write failed for " + path.string());
  outputs_.emplace_back(name, sha256_hex(text));
}

knots::SolverOptions Job::solver_options() const {
  knots::SolverOptions opt;
  opt.rep_tol = tol("rep_tol", opt.rep_tol);
  opt.newton_tol = tol("newton_tol", opt.newton_tol);
  opt.irreducible_tol = tol("irreducible_tol", opt.irreducible_tol);
  if (cfg_.seed) opt.seed = *cfg_.seed;
  return opt;
}

std::string csv_row(std::initializer_list<double> v) {
  std::string s;
  for (double x : v) {
    if (!s.empty()) s += ',';
    s += io::format_double(x);
  }
  return s + "\n";
}

int Job::execute() {
  const auto start = std::chrono::steady_clock::now();
  std::string text;
  {
    std::ifstream in(cfg_.input, std::ios::binary);
    if (!in) throw SchemaError("cannot read input " + cfg_.input);
    std::ostringstream s;
    s << in.rdbuf();
    text = s.str();
  }
  const json in = io::parse(text);
  std::error_code ec;
  fs::create_directories(cfg_.out_dir, ec);
  if (ec) throw SchemaError("cannot create output directory " + cfg_.out_dir + ": " + ec.message());

  int code = 0;
  const std::string& s = cfg_.subcommand;
  if (s == "approx-isotopy") code = approx_isotopy(in);
  if (s == "pillowcase-image") code = pillowcase_image(in);
  if (s == "slice-reps") code = slice_reps(in);
  if (s == "splice-rep") code = splice_rep(in);
  if (s == "verify-cert") code = verify_cert(in);
  if (s == "search-cert") code = search_cert(in);
  if (s == "moser") code = moser(in);

  json outputs = json::array();
  for (const auto& [name, hash] : outputs_) outputs.push_back({{"file", name}, {"sha256", hash}});
  json tol = json::object();
  for (const auto& [k, v] : cfg_.tol) tol[k] = v;
  parameters_["tol"] = tol;
  json manifest = {{"version", io::kFormatVersion},
                   {"tool", "pillowkit"},
                   {"tool_version", kToolVersion},
                   {"subcommand", s},
                   {"input", {{"path", cfg_.input}, {"sha256", sha256_hex(text)}}},
                   {"parameters", parameters_},
                   {"seed", cfg_.seed ? json(*cfg_.seed) : json(nullptr)},
                   {"reproducible", cfg_.reproducible},
                   {"outputs", outputs},
                   {"summary", summary_},
                   {"exit_code", code}};
  // Wall time is the one nondeterministic field; reproducible runs omit it.
  if (!cfg_.reproducible) {
    manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  write("manifest.json", io::dump(manifest) + "\n");
  out_ << io::dump(summary_) << "\n";
  return code;
}

int Job::approx_isotopy(const json& in) {
  ObjectReader r(in, "input");
  const double div_tol = tol("div_tol", 1e-8);
  const torus::TimeField field = io::time_field_from_json(r.at("field"), div_tol);
  double eps = r.number("eps", 0.05);
  if (cfg_.eps) eps = *cfg_.eps;
  if (!(eps > 0.0)) throw SchemaError("eps must be positive");
  torus::BuildOptions opt;
  opt.div_tol = div_tol;
  if (r.has("overrides")) {
    ObjectReader o(r.at("overrides"), "input.overrides");
    if (o.has("n")) opt.n = static_cast<int>(o.integer("n"));
    if (o.has("radius")) opt.radius = static_cast<int>(o.integer("radius"));
    if (o.has("fineness")) opt.fineness = o.integer("fineness");
    o.finish();
  }
  int grid = 64, times = 21;
  if (r.has("verify")) {
    ObjectReader v(r.at("verify"), "input.verify");
    grid = static_cast<int>(v.integer("grid", grid));
    times = static_cast<int>(v.integer("time_samples", times));
    v.finish();
  }
  if (cfg_.resolution) grid = *cfg_.resolution;
  if (grid < 2 || times < 2) throw SchemaError("verification grid and time samples must be at least 2");
  r.finish();
  parameters_ = {{"eps", eps}, {"verify_grid", grid}, {"verify_times", times}, {"div_tol", div_tol}};

  const auto built = torus::build_shearing_program(field, eps, opt);
  const auto dev = torus::measure_deviation(built.program, field, grid, times);
  write_json("program.json", io::to_json(built.program));
  write_json("certificate.json", io::to_json(built.certificate));
  std::string csv = "t,max_deviation\n";
  for (std::size_t i = 0; i < dev.times.size(); ++i) csv += csv_row({dev.times[i], dev.per_time[i]});
  write("deviation.csv", csv);
  const bool sound = dev.max <= built.certificate.total;
  summary_ = {{"steps", built.program.step_count()},
              {"n", built.certificate.n},
              {"certificate_total", built.certificate.total},
              {"measured_deviation", dev.max},
              {"within_certificate", sound}};
  return sound ? 0 : 1;
}

int Job::pillowcase_image(const json& in) {
  ObjectReader r(in, "input");
  const auto spec = io::knot_spec_from_json(r.at("knot"), "input.knot");
  int samples = static_cast<int>(r.integer("samples", 400));
  if (cfg_.samples) samples = *cfg_.samples;
  int resolution = static_cast<int>(r.integer("resolution", 512));
  if (cfg_.resolution) resolution = *cfg_.resolution;
  r.finish();
  if (samples < 4 || resolution < 16) throw SchemaError("samples must be >= 4 and resolution >= 16");
  const auto opt = solver_options();
  parameters_ = {{"samples", samples}, {"resolution", resolution}, {"solver_seed", opt.seed}};

  const auto image = knots::sample_image_curve(spec, samples, opt);
  const auto graph = image.graph();
  write_json("image.json", io::to_json(image));
  std::ostringstream svg, csv;
  pillowcase::write_svg(svg, graph, spec.id());
  pillowcase::write_csv(csv, graph);
  write("image.svg", svg.str());
  write("arcs.csv", csv.str());

  json arcs = json::array();
  for (const auto& a : image.arcs) {
    const auto& v = a.curve.vertices;
    json pieces = json::array();
    for (const auto& p : knots::split_on_reducible(a.curve)) pieces.push_back(pillowcase::winding_number(p));
    arcs.push_back({{"alpha_start", v.front().x},
                    {"alpha_end", v.back().x},
                    {"vertices", v.size()},
                    {"closure_winding", pillowcase::winding_number(knots::close_on_reducible(a.curve))},
                    {"piece_windings", pieces}});
  }
  bool separated = false;
  if (!image.arcs.empty()) separated = pillowcase::separates(graph, {0.0, pillowcase::kPi}, {pillowcase::kPi, pillowcase::kPi}, resolution);
  summary_ = {{"knot", spec.id()},
              {"arcs", arcs},
              {"gaps", image.gaps.size()},
              {"delta", image.delta},
              {"alexander_angles", knots::alexander_endpoint_angles(spec)},
              {"separates", separated}};
  return 0;
}

pillowcase::CylinderCurve slice_from_json(const json& j) {
  if (j.is_object() && j.contains("vertices")) return io::curve_from_json(j, "input.slice");
  ObjectReader r(j, "input.slice");
  const double beta = r.number("beta");
  const int points = static_cast<int>(r.integer("points", 64));
  r.finish();
  if (points < 2) throw SchemaError("input.slice.points must be at least 2");
  pillowcase::CylinderCurve c;
  for (int k = 0; k <= points; ++k) c.vertices.push_back({pillowcase::kPi * k / points, beta});
  return c;
}

int Job::slice_reps(const json& in) {
  ObjectReader r(in, "input");
  const auto spec = io::knot_spec_from_json(r.at("knot"), "input.knot");
  const auto slice = slice_from_json(r.at("slice"));
  int samples = static_cast<int>(r.integer("samples", 400));
  if (cfg_.samples) samples = *cfg_.samples;
  r.finish();
  const auto opt = solver_options();
  parameters_ = {{"samples", samples}, {"solver_seed", opt.seed}};
  const auto hits = knots::solve_rep_on_slice(spec, slice, samples, opt);
  json list = json::array();
  for (const auto& h : hits) list.push_back(io::to_json(h));
  write_json("slice.json", {{"knot", spec.id()}, {"slice", io::to_json(slice)}, {"hits", list}});
  json angles = json::array();
  for (const auto& h : hits) angles.push_back(io::to_json(torus::Vec2{h.angles.alpha, h.angles.beta}));
  summary_ = {{"knot", spec.id()}, {"hits", hits.size()}, {"angles", angles}};
  return 0;
}

int Job::splice_rep(const json& in) {
  ObjectReader r(in, "input");
  const auto k1 = io::knot_spec_from_json(r.at("first"), "input.first");
  const auto k2 = io::knot_spec_from_json(r.at("second"), "input.second");
  int samples = static_cast<int>(r.integer("samples", 400));
  if (cfg_.samples) samples = *cfg_.samples;
  r.finish();
  const auto opt = solver_options();
  parameters_ = {{"samples", samples}, {"solver_seed", opt.seed}};
  const auto rep = knots::find_splice_rep(k1, k2, samples, opt);
  write_json("splice.json", io::to_json(rep));
  const bool ok = rep.assignment.residual <= opt.rep_tol && rep.irreducible && rep.irreducible_first &&
                  rep.irreducible_second;
  summary_ = {{"first", k1.id()},
              {"second", k2.id()},
              {"residual", rep.assignment.residual},
              {"irreducible", rep.irreducible},
              {"irreducible_first", rep.irreducible_first},
              {"irreducible_second", rep.irreducible_second},
              {"alpha", rep.first.alpha},
              {"beta", rep.first.beta}};
  return ok ? 0 : 1;
}

struct Group {
  knots::Presentation presentation;
  std::string id;
};

Group group_from(ObjectReader& r) {
  const int given = int(r.has("presentation")) + int(r.has("knot")) + int(r.has("splice"));
  if (given != 1) throw SchemaError("input: give exactly one of \"presentation\", \"knot\", \"splice\"");
  Group g;
  if (r.has("presentation")) {
    g.presentation = io::presentation_from_json(r.at("presentation"), "input.presentation");
    g.id = r.string("id", "presentation");
  } else if (r.has("knot")) {
    const auto spec = io::knot_spec_from_json(r.at("knot"), "input.knot");
    g.presentation = knots::knot_group(spec).presentation;
    g.id = spec.id();
  } else {
    const json& s = r.at("splice");
    if (!s.is_array() || s.size() != 2) throw SchemaError("input.splice: expected two knot specs");
    const auto a = io::knot_spec_from_json(s[0], "input.splice[0]");
    const auto b = io::knot_spec_from_json(s[1], "input.splice[1]");
    g.presentation = knots::splice_presentation(a, b);
    g.id = "splice(" + a.id() + "," + b.id() + ")";
  }
  return g;
}

int Job::verify_cert(const json& in) {
  ObjectReader r(in, "input");
  const Group g = group_from(r);
  const auto c = io::certificate_from_json(r.at("certificate"));
  r.finish();
  const auto v = cert::verify_certificate(g.presentation, c);
  summary_ = {{"presentation_id", g.id},
              {"p", std::to_string(c.p)},
              {"accepted", v.accepted},
              {"reason", v.reason},
              {"relator_length", g.presentation.total_length()}};
  if (!c.presentation_id.empty() && c.presentation_id != g.id) summary_["presentation_id_mismatch"] = c.presentation_id;
  write_json("verdict.json", summary_);
  return v.accepted ? 0 : 1;
}

int Job::search_cert(const json& in) {
  ObjectReader r(in, "input");
  const Group g = group_from(r);
  std::vector<std::uint64_t> primes = cfg_.primes;
  if (primes.empty() && r.has("primes")) {
    const json& p = r.at("primes");
    if (!p.is_array()) throw SchemaError("input.primes: expected an array");
    for (const auto& x : p) {
      if (!x.is_number_unsigned()) throw SchemaError("input.primes: expected positive integers");
      primes.push_back(x.get<std::uint64_t>());
    }
  }
  r.allow({"primes"});
  if (primes.empty()) primes = {2, 3, 5, 7, 11, 13};
  cert::SearchOptions opt;
  const std::string mode = r.string("mode", "exhaustive");
  if (mode == "randomized") {
    opt.mode = cert::SearchOptions::Mode::Randomized;
  } else if (mode != "exhaustive") {
    throw SchemaError("input.mode: expected \"exhaustive\" or \"randomized\"");
  }
  opt.max_trials = static_cast<std::uint64_t>(r.integer("max_trials", static_cast<long>(opt.max_trials)));
  if (cfg_.seed) opt.seed = *cfg_.seed;
  opt.reproducible = cfg_.reproducible || r.boolean("reproducible", true);
  r.finish();
  json plist = json::array();
  for (auto p : primes) plist.push_back(p);
  parameters_ = {{"primes", plist}, {"mode", mode}, {"max_trials", opt.max_trials}, {"search_seed", opt.seed}};

  cert::SearchStats stats;
  const auto found = cert::search_certificate(g.presentation, primes, opt, &stats, g.id);
  summary_ = {{"presentation_id", g.id}, {"found", found.has_value()}, {"assignments", stats.assignments}};
  if (found) {
    summary_["p"] = std::to_string(found->p);
    write_json("certificate.json", io::to_json(*found));
  }
  return found ? 0 : 1;
}

torus::Isotopy isotopy_from_json(const json& j, json& described) {
  ObjectReader r(j, "input.isotopy");
  const std::string type = r.string("type");
  described = {{"type", type}};
  torus::Isotopy phi;
  if (type == "identity") {
    phi = [](double, const torus::Vec2& p) { return p; };
  } else if (type == "translation") {
    const auto v = io::vec2_from_json(r.at("vector"), "input.isotopy.vector");
    described["vector"] = io::to_json(v);
    phi = [v](double t, const torus::Vec2& p) { return torus::Vec2{p.x + t * v.x, p.y + t * v.y}; };
  } else if (type == "shear") {
    const double a = r.number("amplitude", 1.0);
    described["amplitude"] = a;
    phi = [a](double t, const torus::Vec2& p) { return torus::Vec2{p.x + t * a * std::sin(p.y), p.y}; };
  } else if (type == "bump") {
    // Pushes y = pi up by a (1 + m sin x); not area-preserving.
    const double a = r.number("amplitude", 0.3), m = r.number("modulation", 0.5);
    if (std::fabs(a) * (1.0 + std::fabs(m)) >= 2.0) throw SchemaError("input.isotopy: bump too large to be a diffeomorphism");
    described["amplitude"] = a;
    described["modulation"] = m;
    phi = [a, m](double t, const torus::Vec2& p) {
      return torus::Vec2{p.x, p.y + t * a * (1.0 + m * std::sin(p.x)) * (1.0 - std::cos(p.y)) / 2.0};
    };
  } else {
    throw SchemaError("input.isotopy.type: unknown isotopy \"" + type + "\"");
  }
  r.finish();
  return phi;
}

int Job::moser(const json& in) {
  ObjectReader r(in, "input");
  json described;
  const torus::Isotopy phi = isotopy_from_json(r.at("isotopy"), described);
  torus::MoserOptions opt;
  opt.grid = static_cast<int>(r.integer("grid", opt.grid));
  if (cfg_.resolution) opt.grid = *cfg_.resolution;
  opt.time_samples = static_cast<int>(r.integer("time_samples", opt.time_samples));
  opt.bump_width = r.number("bump_width", opt.bump_width);
  opt.equivariant = r.boolean("equivariant", opt.equivariant);
  opt.poisson_tol = tol("poisson_tol", opt.poisson_tol);
  opt.form_floor = tol("form_floor", opt.form_floor);
  const int check_grid = static_cast<int>(r.integer("check_grid", 32));
  const int curve_samples = static_cast<int>(r.integer("curve_samples", 1024));
  r.finish();
  if (opt.grid < 8 || opt.time_samples < 2 || check_grid < 2 || curve_samples < 8) {
    throw SchemaError("input: grid >= 8, time_samples >= 2, check_grid >= 2, curve_samples >= 8 required");
  }
  const double area_tol = tol("area_tol", 1e-3), curve_tol = tol("curve_tol", 1e-3);
  parameters_ = {{"isotopy", described},   {"grid", opt.grid},         {"time_samples", opt.time_samples},
                 {"bump_width", opt.bump_width}, {"equivariant", opt.equivariant}, {"check_grid", check_grid},
                 {"curve_samples", curve_samples}, {"area_tol", area_tol},     {"curve_tol", curve_tol}};

  const auto psi = torus::moser_correct(phi, opt);
  const auto rep = torus::check_moser(*psi, check_grid, curve_samples);
  const bool ok = rep.area_defect <= area_tol && rep.curve_distance <= curve_tol;
  summary_ = {{"area_defect", rep.area_defect},
              {"curve_distance", rep.curve_distance},
              {"equivariance_defect", rep.equivariance_defect},
              {"poisson_residual", rep.poisson_residual},
              {"max_deviation", rep.max_deviation},
              {"passed", ok}};
  write_json("report.json", summary_);
  std::string csv = "t,x,y,psi_x,psi_y\n";
  constexpr int n = 8;
  for (double t : psi->times()) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const torus::Vec2 p{torus::kTwoPi * i / n, torus::kTwoPi * j / n};
        const torus::Vec2 q = (*psi)(t, p);
        csv += csv_row({t, p.x, p.y, q.x, q.y});
      }
    }
  }
  write("samples.csv", csv);
  return ok ? 0 : 1;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << io::dump(json{{"error", kind}, {"message", message}}, 0) << "\n";
}

std::vector<std::uint64_t> parse_primes(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw SchemaError("--primes: \"" + item + "\" is not an integer");
    out.push_back(v);
  }
  if (out.empty()) throw SchemaError("--primes: empty list");
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  JobConfig cfg;
  std::vector<std::string> rest;
  try {
    // --tol.KEY=VAL is not expressible as a CLI11 option; peel it off first.
    for (std::size_t i = 0; i < args.size(); ++i) {
      const std::string& a = args[i];
      if (i > 0 && a.rfind("--tol.", 0) == 0) {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 6) throw SchemaError("expected --tol.KEY=VALUE, got " + a);
        const std::string key = a.substr(6, eq - 6), val = a.substr(eq + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(val, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != val.size() || !(v > 0.0)) throw SchemaError("--tol." + key + ": not a positive number");
        cfg.tol[key] = v;
      } else {
        rest.push_back(a);
      }
    }

    CLI::App app{"pillowkit: torus isotopies, pillowcase images, SU(2) representations, SL(2, Z/p) certificates"};
    app.add_option("subcommand", cfg.subcommand, "one of: approx-isotopy pillowcase-image slice-reps splice-rep "
                                                 "verify-cert search-cert moser")
        ->required()
        ->check(CLI::IsMember(kSubcommands));
    app.add_option("--input", cfg.input, "input JSON")->required();
    app.add_option("--out", cfg.out_dir, "output directory");
    double eps = 0.0;
    int resolution = 0, samples = 0;
    std::string primes;
    std::uint64_t seed = 0;
    auto* o_eps = app.add_option("--eps", eps, "target C0 accuracy (approx-isotopy)");
    auto* o_res = app.add_option("--resolution", resolution, "raster or spectral grid size");
    auto* o_samples = app.add_option("--samples", samples, "alpha samples for knot image curves");
    auto* o_primes = app.add_option("--primes", primes, "comma-separated primes (search-cert)");
    auto* o_seed = app.add_option("--seed", seed, "random seed");
    app.add_flag("--reproducible", cfg.reproducible, "deterministic scheduling, no wall time in the manifest");

    std::vector<const char*> argv;
    for (const auto& a : rest) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return 0;
    } catch (const CLI::ParseError& e) {
      throw SchemaError(e.what());
    }

    const Accepts& ok = accepts().at(cfg.subcommand);
    auto take = [&](CLI::Option* o, const char* name) {
      if (o->count() == 0) return false;
      if (!ok.flags.count(name)) throw SchemaError(std::string("--") + name + " does not apply to " + cfg.subcommand);
      return true;
    };
    if (take(o_eps, "eps")) cfg.eps = eps;
    if (take(o_res, "resolution")) cfg.resolution = resolution;
    if (take(o_samples, "samples")) cfg.samples = samples;
    if (take(o_primes, "primes")) cfg.primes = parse_primes(primes);
    if (o_seed->count()) cfg.seed = seed;
    for (const auto& [k, v] : cfg.tol) {
      if (!ok.tol.count(k)) throw SchemaError("--tol." + k + " is not a tolerance of " + cfg.subcommand);
    }
    if (cfg.eps && !(*cfg.eps > 0.0)) throw SchemaError("--eps must be positive");
    if (cfg.resolution && *cfg.resolution < 2) throw SchemaError("--resolution must be at least 2");
    if (cfg.samples && *cfg.samples < 4) throw SchemaError("--samples must be at least 4");

    return Job(cfg, out).execute();
  } catch (const Error& e) {
    report_error(err, e.kind(), e.what());
  } catch (const std::invalid_argument& e) {
    report_error(err, "InvalidArgument", e.what());
  } catch (const std::exception& e) {
    report_error(err, "InternalError", e.what());
  }
  return 2;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace pillowkit::cli
