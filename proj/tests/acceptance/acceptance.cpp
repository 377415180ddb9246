// Acceptance run: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pillowkit/cert/cert.hpp"
#include "pillowkit/cli/cli.hpp"
#include "pillowkit/knots/reps.hpp"
#include "pillowkit/pillowcase/pillowcase.hpp"
#include "pillowkit/torus/flow.hpp"
#include "pillowkit/torus/fourier.hpp"
#include "pillowkit/torus/moser.hpp"
#include "pillowkit/torus/perturbation.hpp"
#include "pillowkit/torus/program.hpp"
#include "pillowkit/torus/time_field.hpp"

#ifndef PILLOWKIT_INPUTS_DIR
#define PILLOWKIT_INPUTS_DIR "inputs"
#endif

using namespace pillowkit;
using namespace pillowkit::torus;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(),
              seconds_since(t0));
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Int2 primitive(std::mt19937_64& rng, int range) {
  std::uniform_int_distribution<int> d(-range, range);
  Int2 v{0, 0};
  while (v == Int2{0, 0} || gcd(v.a, v.b) != 1) v = {d(rng), d(rng)};
  return v;
}

ShearingProgram random_program(std::mt19937_64& rng, int steps, bool odd) {
  std::uniform_real_distribution<double> coef(-0.6, 0.6), dur(0.2, 1.0);
  std::uniform_int_distribution<int> freq(1, 3);
  std::vector<double> d(static_cast<std::size_t>(steps));
  double total = 0.0;
  for (auto& x : d) total += (x = dur(rng));
  std::vector<ProgramBlock> blocks;
  for (int s = 0; s < steps; ++s) {
    std::vector<Harmonic> cosines;
    std::vector<Harmonic> sines{{freq(rng), coef(rng)}};
    if (!odd) cosines.push_back({freq(rng) - 1, coef(rng)});
    ProgramBlock b;
    b.maps = {ShearingMap(primitive(rng, 3), ShearingProfile(sines, cosines))};
    b.step_duration = d[static_cast<std::size_t>(s)] / total;
    b.speed = 1.0 + 0.5 * coef(rng);
    blocks.push_back(b);
  }
  return ShearingProgram(std::move(blocks));
}

Outcome shearing_exactness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, kTwoPi), ut(0.0, 1.0);
  double worst_det = 0.0, worst_inv = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ShearingProgram prog = random_program(rng, 1 + static_cast<int>(rng() % 6), rng() % 2 == 0);
    const double t = ut(rng);
    const Vec2 p{u(rng), u(rng)};
    const Isotopy f = [&](double s, const Vec2& q) { return prog.eval_lifted(s, q); };
    worst_det = std::max(worst_det, std::fabs(isotopy_det(f, t, p, 1e-6) - 1.0));

    // Undo every complete step with the inverse shear, last step first.
    Vec2 q = prog.apply_steps(prog.step_count(), p);
    for (std::size_t k = prog.step_count(); k-- > 0;) {
      const auto st = prog.step(k);
      q = st.map->inverse().apply_lifted(q, st.speed * st.duration);
    }
    worst_inv = std::max(worst_inv, norm(q - p));
  }
  const double secs = seconds_since(t0);
  return {worst_det <= 1e-6 && worst_inv <= 1e-12 && secs < 5.0,
          fmt("max |det-1| %.2e, max inverse error %.2e, %.2f s for 1000 programs", worst_det, worst_inv, secs)};
}

Outcome fourier_soundness() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  double worst = 0.0;
  bool div_zero = true, shape = true;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<FourierTerm> terms;
    for (long a = 0; a <= 5; ++a) {
      for (long b = -5; b <= 5; ++b) {
        if (is_canonical_wavevector({a, b}) && rng() % 3 != 0) terms.push_back({{a, b}, c(rng), c(rng)});
      }
    }
    const FourierField truth(terms, {c(rng), c(rng)});
    const auto g = GridField::sample(128, [&](const Vec2& p) { return truth(p); });
    const auto d = fourier_decompose(g, 8);
    // Oracle: every sampled coefficient by wavevector, zero elsewhere.
    for (const auto& t : d.field.terms()) {
      div_zero = div_zero && t.divergence_sin() == 0.0 && t.divergence_cos() == 0.0 &&
                 idot(t.direction(), t.k) == 0;
      const auto it = std::find_if(terms.begin(), terms.end(), [&](const FourierTerm& x) { return x.k == t.k; });
      const double cs = it == terms.end() ? 0.0 : it->c_sin, cc = it == terms.end() ? 0.0 : it->c_cos;
      worst = std::max({worst, std::fabs(t.c_sin - cs), std::fabs(t.c_cos - cc)});
    }
    for (const auto& t : terms) {
      shape = shape && std::any_of(d.field.terms().begin(), d.field.terms().end(),
                                   [&](const FourierTerm& x) { return x.k == t.k; });
    }
    worst = std::max({worst, std::fabs(d.field.mean().x - truth.mean().x), std::fabs(d.field.mean().y - truth.mean().y)});
  }
  return {worst <= 1e-10 && div_zero && shape,
          fmt("max coefficient error %.2e at N = 128", worst) + ", u.k = 0 on every term: " + (div_zero ? "yes" : "no")};
}

Outcome bound_soundness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> c(-1.0, 1.0), small(-0.15, 0.15);
  const int grid = 16;
  double worst_ratio = 0.0;
  int violations = 0;
  for (int f = 0; f < 50; ++f) {
    std::vector<FourierTerm> terms;
    while (terms.size() < 2) {
      Int2 k = primitive(rng, 2);
      if (!is_canonical_wavevector(k)) k = {-k.a, -k.b};
      if (!terms.empty() && terms[0].k == k) continue;
      terms.push_back({k, c(rng), 0.0});
    }
    const FourierField x(terms);
    std::vector<FourierTerm> near = terms;
    for (auto& t : near) t.c_sin += small(rng);
    const FourierField y(near);
    const std::vector<ShearingMap> w{terms[0].as_shearing(), terms[1].as_shearing()};

    const FieldFn fx = [&](double, const Vec2& p) { return x(p); };
    const FieldFn fy = [&](double, const Vec2& p) { return y(p); };
    const double lip = std::max(estimate_lipschitz(autonomous_field(x)), estimate_lipschitz(autonomous_field(y)));
    const double sup = 1.1 * grid_sup_norm([&](double, const Vec2& p) { return x(p) - y(p); }, 0.0, 64);
    const double cs = splitting_constant(w, 1.0, 32, 16);
    for (double t : {0.25, 0.5, 1.0}) {
      double gw = 0.0, sp = 0.0;
      for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
          const Vec2 p{kTwoPi * (i + 0.5) / grid, kTwoPi * (j + 0.5) / grid};
          const Vec2 ex = rk4_flow(fx, p, 0.0, t, 400);
          gw = std::max(gw, torus_distance(ex, rk4_flow(fy, p, 0.0, t, 400)));
          sp = std::max(sp, torus_distance(ex, compose_shear_flows(w, t, p)));
        }
      }
      const double gb = gronwall_bound(t, sup, lip), sb = splitting_bound(t, cs, lip);
      if (gw > gb) ++violations;
      if (sp > sb) ++violations;
      worst_ratio = std::max({worst_ratio, gw / gb, sb > 0.0 ? sp / sb : 0.0});
    }
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < 60.0,
          fmt("%.0f violations over 50 fields x 3 times, worst measured/bound %.3f", violations, worst_ratio)};
}

Outcome end_to_end() {
  const FourierField sin_y({{{0, 1}, 1.0, 0.0}}), sin_x({{{1, 0}, -1.0, 0.0}});
  const std::vector<std::pair<std::string, TimeField>> fields{
      {"(sin y, sin x)", autonomous_field(FourierField({{{0, 1}, 1.0, 0.0}, {{1, 0}, -1.0, 0.0}}))},
      {"blend", blend_field(sin_y, sin_x)}};
  bool ok = true;
  std::string detail;
  for (const auto& [name, f] : fields) {
    const auto t0 = Clock::now();
    const auto [prog, cert] = build_shearing_program(f, 0.05);
    const Deviation dev = measure_deviation(prog, f, 64, 21);
    const bool pass = cert.total <= 0.05 && dev.max <= cert.total;
    ok = ok && pass;
    if (!detail.empty()) detail += "; ";
    detail += name + fmt(": n = %.0f, total %.4g, deviation %.4g", cert.n, cert.total, dev.max) +
              fmt(" (%.1f s)", seconds_since(t0));
  }
  return {ok, detail};
}

Outcome perturbation_round_trip() {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  double worst = 0.0;
  for (int r = 0; r < 20; ++r) {
    const ShearingProgram prog = random_program(rng, 2 + r % 7, r % 2 == 0);
    const auto steps = program_to_perturbation(prog);
    const auto bp = prog.breakpoints();
    const double n = static_cast<double>(steps.size());
    for (int s = 0; s < 10; ++s) {
      const Vec2 p{u(rng), u(rng)};
      for (std::size_t i = 0; i < bp.size(); ++i) {
        const Vec2 a = perturbation_to_map(steps, static_cast<double>(i) / n, p);
        worst = std::max(worst, torus_distance(a, prog.eval_lifted(bp[i], p)));
      }
    }
  }
  return {worst <= 1e-12, fmt("max breakpoint mismatch %.2e over 20 programs", worst)};
}

Outcome moser() {
  MoserOptions opt;
  opt.grid = 128;
  struct Case {
    std::string name;
    Isotopy phi;
    bool reproduce;
  };
  const std::vector<Case> cases{
      {"identity", [](double, const Vec2& p) { return p; }, true},
      {"translation", [](double t, const Vec2& p) { return Vec2{p.x + 0.7 * t, p.y + 0.3 * t}; }, true},
      {"bump",
       [](double t, const Vec2& p) {
         return Vec2{p.x, p.y + t * 0.3 * (1.0 + 0.5 * std::sin(p.x)) * (1.0 - std::cos(p.y)) / 2.0};
       },
       false}};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto psi = moser_correct(c.phi, opt);
    const auto r = check_moser(*psi, 32, 1024);
    const bool pass = r.area_defect <= 1e-3 && r.curve_distance <= 1e-3 && (!c.reproduce || r.max_deviation <= 1e-6);
    ok = ok && pass;
    if (!detail.empty()) detail += "; ";
    detail += c.name + fmt(": |det-1| %.1e, curve %.1e, |psi-phi| %.1e", r.area_defect, r.curve_distance,
                           r.max_deviation);
  }
  return {ok, detail};
}

Outcome trefoil_geometry() {
  const auto t0 = Clock::now();
  const auto image = knots::sample_image_curve(knots::KnotSpec::torus(2, 3), 400);
  if (image.arcs.size() != 1) return {false, fmt("expected one arc, got %.0f", image.arcs.size())};
  // Roots of t^2 - t + 1 at t = e^{2 i alpha}: alpha = pi/6, 5pi/6.
  const auto& v = image.arcs[0].curve.vertices;
  const double e0 = std::fabs(v.front().x - kPi / 6), e1 = std::fabs(v.back().x - 5 * kPi / 6);
  const long w = pillowcase::winding_number(knots::close_on_reducible(image.arcs[0].curve));
  const auto graph = image.graph();
  const pillowcase::PillowcasePoint p{0.0, kPi}, q{kPi, kPi};
  const bool s512 = pillowcase::separates(graph, p, q, 512);
  const bool s1024 = pillowcase::separates(graph, p, q, 1024);
  const double secs = seconds_since(t0);
  return {e0 <= 1e-6 && e1 <= 1e-6 && w != 0 && s512 && s1024 && secs < 120.0,
          fmt("endpoint errors %.1e, %.1e; closure winding %.0f", e0, e1, static_cast<double>(w)) +
              "; separates at 512: " + (s512 ? "yes" : "no") + ", at 1024: " + (s1024 ? "yes" : "no")};
}

Outcome splice() {
  bool ok = true;
  std::string detail;
  for (int q : {3, 5}) {
    const auto t0 = Clock::now();
    const auto r = knots::find_splice_rep(knots::KnotSpec::torus(2, 3), knots::KnotSpec::torus(2, q));
    const double res = knots::relator_residual(r.presentation, r.assignment.images);
    const double secs = seconds_since(t0);
    const bool pass = res <= 1e-9 && r.residual_first <= 1e-9 && r.residual_second <= 1e-9 && r.irreducible &&
                      r.irreducible_first && r.irreducible_second && secs < 120.0;
    ok = ok && pass;
    if (!detail.empty()) detail += "; ";
    detail += fmt("T(2,3) x T(2,%.0f): residual %.1e, %.1f s", q, res, secs) +
              (r.irreducible && r.irreducible_first && r.irreducible_second ? ", irreducible" : ", REDUCIBLE");
  }
  return {ok, detail};
}

// Plain integer oracle for SL(2, Z/p) certificates.
struct Mat {
  long a, b, c, d;
};

Mat mul(const Mat& x, const Mat& y, long p) {
  return {(x.a * y.a + x.b * y.c) % p, (x.a * y.b + x.b * y.d) % p, (x.c * y.a + x.d * y.c) % p,
          (x.c * y.b + x.d * y.d) % p};
}

bool oracle_accepts(const knots::Presentation& pres, const std::vector<Mat>& m, long p) {
  std::vector<Mat> inv;
  for (const auto& x : m) {
    if (((x.a * x.d - x.b * x.c) % p + p) % p != 1) return false;
    inv.push_back({x.d, (p - x.b) % p, (p - x.c) % p, x.a});
  }
  for (const auto& r : pres.relators) {
    Mat acc{1, 0, 0, 1};
    for (int g : r) acc = mul(acc, g > 0 ? m[g - 1] : inv[-g - 1], p);
    if (acc.a != 1 || acc.b != 0 || acc.c != 0 || acc.d != 1) return false;
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      const Mat x = mul(m[i], m[j], p), y = mul(m[j], m[i], p);
      if (x.a != y.a || x.b != y.b || x.c != y.c || x.d != y.d) return true;
    }
  }
  return false;
}

Outcome verifier() {
  using namespace pillowkit::cert;
  knots::Presentation tref;
  tref.generators = 2;
  tref.relators = {{1, 2, 1, -2, -1, -2}};
  const Certificate good{"trefoil", 5, {ModMatrix::make(1, 1, 0, 1, 5), ModMatrix::make(1, 0, 4, 1, 5)}};
  const bool accepts = verify_certificate(tref, good).accepted;

  // Random tamperings: perturb one to four entries by nonzero amounts.
  std::mt19937_64 rng(909);
  int tampered = 0, wrongly_accepted = 0, disagreements = 0;
  while (tampered < 10000) {
    Certificate c = good;
    const int count = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < count; ++k) {
      auto& m = c.images[rng() % 2];
      std::uint64_t* e[] = {&m.a, &m.b, &m.c, &m.d};
      auto& x = *e[rng() % 4];
      x = (x + 1 + rng() % 4) % 5;
    }
    std::vector<Mat> m;
    for (const auto& x : c.images) {
      m.push_back({static_cast<long>(x.a), static_cast<long>(x.b), static_cast<long>(x.c), static_cast<long>(x.d)});
    }
    const bool truth = oracle_accepts(tref, m, 5);
    const bool got = verify_certificate(tref, c).accepted;
    if (truth != got) ++disagreements;
    if (c.images == good.images || truth) continue;  // not a tampering
    ++tampered;
    if (got) ++wrongly_accepted;
  }

  knots::Presentation unknot;
  unknot.generators = 1;
  int unknot_accepts = 0;
  for (std::uint64_t i = 0; i < sl2_order(5); ++i) {
    if (verify_certificate(unknot, {"unknot", 5, {sl2_element(5, i)}}).accepted) ++unknot_accepts;
  }

  // Verifier time against relator length: powers of the relator padded with
  // cancelling pairs, so every length still Accepts.
  std::vector<double> lengths, times;
  for (long len : {10L, 31L, 100L, 316L, 1000L, 3162L, 10000L}) {
    knots::Presentation big;
    big.generators = 2;
    knots::Word w;
    while (static_cast<long>(w.size()) + 6 <= len) w.insert(w.end(), tref.relators[0].begin(), tref.relators[0].end());
    while (static_cast<long>(w.size()) + 2 <= len) w.insert(w.end(), {1, -1});
    big.relators = {w};
    if (!verify_certificate(big, good).accepted) return {false, "padded relator rejected"};
    const long reps = std::max(1L, 2'000'000L / len);
    double best = 1e300;
    for (int trial = 0; trial < 7; ++trial) {
      const auto t0 = Clock::now();
      int acc = 0;
      for (long r = 0; r < reps; ++r) acc += verify_certificate(big, good).accepted;
      best = std::min(best, seconds_since(t0) / static_cast<double>(reps));
      if (acc != reps) return {false, "verifier not deterministic"};
    }
    lengths.push_back(static_cast<double>(w.size()));
    times.push_back(best);
  }
  // Least-squares slope over the range against the per-letter slope of each
  // consecutive pair.
  const std::size_t n = lengths.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += lengths[i] / n, my += times[i] / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) sxy += (lengths[i] - mx) * (times[i] - my), sxx += (lengths[i] - mx) * (lengths[i] - mx);
  const double slope = sxy / sxx;
  const double upper = (times[n - 1] - times[n - 3]) / (lengths[n - 1] - lengths[n - 3]);
  const double lower = (times[n / 2] - times[0]) / (lengths[n / 2] - lengths[0]);
  const double spread = std::max(std::fabs(upper / slope - 1.0), std::fabs(lower / slope - 1.0));

  const auto t0 = Clock::now();
  SearchStats stats;
  SearchOptions opt;
  const auto found = search_certificate(tref, {2, 3, 5}, opt, &stats, "trefoil");
  const double search_s = seconds_since(t0);
  const bool search_ok = found && found->p <= 5 && verify_certificate(tref, *found).accepted && search_s < 30.0;

  const bool ok = accepts && wrongly_accepted == 0 && disagreements == 0 && unknot_accepts == 0 && spread <= 0.2 &&
                  search_ok;
  return {ok, std::string("p = 5 ") + (accepts ? "Accept" : "Reject") +
                  fmt("; %.0f of 10000 tamperings accepted; unknot accepted %.0f of %.0f", wrongly_accepted,
                      unknot_accepts, static_cast<double>(sl2_order(5))) +
                  fmt("; %.1f ns/letter, per-letter slope spread %.1f%%", slope * 1e9, spread * 100.0) +
                  (found ? fmt("; exhaustive search found p = %.0f in %.2f s", static_cast<double>(found->p), search_s)
                         : std::string("; exhaustive search found nothing"))};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome reproducibility() {
  const fs::path inputs = PILLOWKIT_INPUTS_DIR;
  const fs::path scratch = fs::temp_directory_path() / "pillowkit_acceptance";
  fs::remove_all(scratch);
  const std::vector<std::pair<std::string, std::string>> jobs{
      {"approx-isotopy", "sin_field.json"},  {"pillowcase-image", "trefoil_image.json"},
      {"slice-reps", "trefoil_slice.json"},  {"splice-rep", "splice_t23_t25.json"},
      {"verify-cert", "trefoil_cert.json"},  {"search-cert", "trefoil_search.json"},
      {"moser", "moser_bump.json"}};
  int files = 0;
  std::string mismatch;
  for (const auto& [cmd, in] : jobs) {
    std::string out[2];
    int code[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path dir = scratch / (cmd + "_" + std::to_string(k));
      std::ostringstream o, e;
      code[k] = cli::run({"pillowkit", cmd, "--input", (inputs / in).string(), "--out", dir.string(), "--reproducible",
                          "--seed", "7"},
                         o, e);
      out[k] = o.str();
      if (code[k] == 2) return {false, cmd + " failed: " + e.str()};
    }
    if (code[0] != code[1] || out[0] != out[1]) mismatch += " " + cmd + "(stdout)";
    for (const auto& e : fs::directory_iterator(scratch / (cmd + "_0"))) {
      ++files;
      if (slurp(e.path()) != slurp(scratch / (cmd + "_1") / e.path().filename())) {
        mismatch += " " + cmd + "/" + e.path().filename().string();
      }
    }
  }
  fs::remove_all(scratch);
  return {mismatch.empty() && files > 0,
          fmt("%.0f output files over 7 subcommands compared byte for byte", files) +
              (mismatch.empty() ? "" : "; differing:" + mismatch)};
}

}  // namespace

int main() {
  report(1, "shearing exactness and area", shearing_exactness);
  report(2, "fourier soundness", fourier_soundness);
  report(3, "gronwall and splitting bounds", bound_soundness);
  report(4, "certified approximation end to end", end_to_end);
  report(5, "program/perturbation round trip", perturbation_round_trip);
  report(6, "moser correction", moser);
  report(7, "trefoil geometry", trefoil_geometry);
  report(8, "splice representations", splice);
  report(9, "certificate verifier and search", verifier);
  report(10, "reproducibility", reproducibility);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
