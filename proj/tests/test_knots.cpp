#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <map>
#include <random>

#include "pillowkit/errors.hpp"
#include "pillowkit/knots/reps.hpp"

using namespace pillowkit;
using namespace pillowkit::knots;
using pillowcase::kPi;
using pillowcase::kTwoPi;

namespace {

using C = std::complex<double>;
using M2 = std::array<C, 4>;

// Independent oracle: the 2x2 complex matrix of a unit quaternion.
M2 matrix(const SU2& q) { return {C(q.w, q.x), C(q.y, q.z), C(-q.y, q.z), C(q.w, -q.x)}; }
M2 mul(const M2& a, const M2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}
double mdist(const M2& a, const M2& b) {
  double d = 0.0;
  for (int i = 0; i < 4; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

SU2 random_su2(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return SU2{n(rng), n(rng), n(rng), n(rng)}.normalized();
}

Word random_word(std::mt19937_64& rng, int gens, int len) {
  std::uniform_int_distribution<int> g(1, gens), s(0, 1);
  Word w;
  for (int i = 0; i < len; ++i) w.push_back(s(rng) ? g(rng) : -g(rng));
  return w;
}

// Fox derivative d/dx_1 of a word, abelianized with every generator -> t.
// Returns Laurent coefficients keyed by exponent.
std::map<int, long> fox_x(const Word& w) {
  std::map<int, long> out;
  int e = 0;
  for (int k : w) {
    if (k == 1) out[e] += 1;
    if (k == -1) out[e - 1] -= 1;
    e += k > 0 ? 1 : -1;
  }
  for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

// Laurent polynomial normalized to start at t^0 with positive lead.
std::vector<long> normalized(const std::map<int, long>& p) {
  std::vector<long> out;
  if (p.empty()) return out;
  const int lo = p.begin()->first, hi = p.rbegin()->first;
  out.assign(static_cast<std::size_t>(hi - lo + 1), 0);
  for (auto [e, c] : p) out[static_cast<std::size_t>(e - lo)] = c;
  if (out.back() < 0) {
    for (auto& c : out) c = -c;
  }
  return out;
}

// Explicit trefoil representation: u^2 = v^3 = -1 with axes at angle theta.
std::vector<SU2> trefoil_rep(double theta) {
  const SU2 u{0.0, 1.0, 0.0, 0.0};
  const double c = std::cos(kPi / 3), s = std::sin(kPi / 3);
  const SU2 v{c, s * std::cos(theta), s * std::sin(theta), 0.0};
  return {u, v};
}

const ImageCurve& trefoil_curve() {
  static const ImageCurve c = sample_image_curve(KnotSpec::torus(2, 3), 400);
  return c;
}

const ImageCurve& t25_curve() {
  static const ImageCurve c = sample_image_curve(KnotSpec::torus(2, 5), 400);
  return c;
}

}  // namespace

TEST_CASE("word helpers") {
  CHECK(inverse({1, -2, 3}) == Word{-3, 2, -1});
  CHECK(power({1, 2}, -2) == Word{-2, -1, -2, -1});
  CHECK(reduce({1, 2, -2, -1, 3}) == Word{3});
  CHECK(exponent_sums({1, 1, -2, 1}, 2) == std::vector<long>{3, -1});
  Presentation bad;
  bad.generators = 1;
  bad.relators = {{2}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("knot groups") {
  const KnotGroup u = knot_group(KnotSpec::unknot());
  CHECK(u.presentation.generators == 1);
  CHECK(u.presentation.relators.empty());
  CHECK(u.meridian == Word{1});
  CHECK(u.longitude.empty());

  CHECK(meridian_exponents(2, 3) == std::pair<long, long>{2, 1});
  for (auto [p, q] : {std::pair{2, 3}, {2, 5}, {3, 4}, {3, 5}, {5, 2}, {-2, 3}}) {
    const auto [r, s] = meridian_exponents(p, q);
    CHECK(r * p - s * q == 1);
  }

  const KnotGroup t = knot_group(KnotSpec::torus(2, 3));
  CHECK(t.presentation.relators.front() == Word{1, 1, -2, -2, -2});
  CHECK(t.meridian == Word{-1, 2, 2});
  // u -> 3, v -> 2 in H1 = Z.
  const auto em = exponent_sums(t.meridian, 2);
  CHECK(3 * em[0] + 2 * em[1] == 1);
  const auto el = exponent_sums(t.longitude, 2);
  CHECK(3 * el[0] + 2 * el[1] == 0);

  CHECK_THROWS_AS(knot_group(KnotSpec::torus(2, 4)), std::invalid_argument);
  CHECK_THROWS_AS(knot_group(KnotSpec::torus(1, 3)), std::invalid_argument);

  KnotSpec custom;
  custom.kind = KnotSpec::Kind::Custom;
  KnotGroup wrong = t;
  wrong.meridian = {1};  // maps to 3
  custom.custom = wrong;
  CHECK_THROWS_AS(knot_group(custom), InvalidPeripheral);
  wrong = t;
  wrong.longitude = {1};
  custom.custom = wrong;
  CHECK_THROWS_AS(knot_group(custom), InvalidPeripheral);
  custom.custom = t;
  CHECK(knot_group(custom).meridian == t.meridian);
}

TEST_CASE("abelianization") {
  Presentation p;
  p.generators = 1;
  p.relators = {{1, 1, 1, 1, 1, 1}, {1, 1, 1, 1}};
  auto a = abelianize(p);
  CHECK(a.free_rank == 0);
  CHECK(a.torsion == std::vector<std::int64_t>{2});

  p.generators = 3;
  p.relators = {{1, 1, -2}, {2, 2, 2, -3}};
  a = abelianize(p);
  CHECK(a.free_rank == 1);
  CHECK(a.torsion.empty());

  CHECK(abelianize(knot_group(KnotSpec::torus(3, 5)).presentation).free_rank == 1);
}

TEST_CASE("splice presentations") {
  const auto uu = splice_presentation(KnotSpec::unknot(), KnotSpec::unknot());
  CHECK(uu.generators == 2);
  CHECK(uu.relators == std::vector<Word>{{1}, {-2}});

  const auto tt = splice_presentation(KnotSpec::torus(2, 3), KnotSpec::torus(2, 3));
  CHECK(tt.generators == 4);
  CHECK(tt.relators.size() == 4);
  CHECK(abelianize(tt).trivial());
  CHECK(abelianize(splice_presentation(KnotSpec::torus(2, 3), KnotSpec::torus(2, 5))).trivial());

  // Gluing meridian to meridian and longitude to longitude leaves H1 = Z.
  KnotGroup k = knot_group(KnotSpec::torus(2, 3));
  KnotGroup k2 = k;
  std::swap(k2.meridian, k2.longitude);
  CHECK_THROWS_AS(splice_presentation(k, k2), AbelianizationNontrivial);
}

TEST_CASE("SU(2) arithmetic against complex matrices") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const SU2 a = random_su2(rng), b = random_su2(rng);
    CHECK(mdist(matrix(a * b), mul(matrix(a), matrix(b))) < 1e-14);
    CHECK(std::fabs((a * b).norm() - 1.0) < 1e-12);
    CHECK(distance(a * a.inverse(), SU2::identity()) < 1e-14);
  }
  CHECK(distance(SU2::exp(0.3, 0.0, 0.0), SU2::diag(0.3)) < 1e-15);
  CHECK(SU2::diag(2.0).angle() == doctest::Approx(2.0));
  const SU2 d = SU2::diag(0.7);
  const M2 m = matrix(d);
  CHECK(std::abs(m[0] - std::polar(1.0, 0.7)) < 1e-15);
  CHECK(std::abs(m[3] - std::polar(1.0, -0.7)) < 1e-15);
}

TEST_CASE("word evaluation is a homomorphism") {
  std::mt19937_64 rng(11);
  std::vector<SU2> im{random_su2(rng), random_su2(rng), random_su2(rng)};
  CHECK(distance(eval_word(im, {}), SU2::identity()) == 0.0);
  for (int i = 0; i < 100; ++i) {
    const Word a = random_word(rng, 3, 12), b = random_word(rng, 3, 9);
    CHECK(distance(eval_word(im, concat(a, b)), eval_word(im, a) * eval_word(im, b)) < 1e-13);
    CHECK(distance(eval_word(im, concat(a, inverse(a))), SU2::identity()) < 1e-13);
    M2 acc{1.0, 0.0, 0.0, 1.0};
    for (int k : a) acc = mul(acc, matrix(k > 0 ? im[k - 1] : im[-k - 1].inverse()));
    CHECK(mdist(acc, matrix(eval_word(im, a))) < 1e-13);
  }
  CHECK_THROWS_AS(eval_word(im, {4}), IndexOutOfRange);
}

TEST_CASE("explicit trefoil representations") {
  const KnotGroup g = knot_group(KnotSpec::torus(2, 3));
  for (double theta : {0.3, 1.0, 2.0}) {
    const auto rho = trefoil_rep(theta);
    CHECK(relator_residual(g.presentation, rho) < 1e-14);
    const SU2 m = eval_word(rho, g.meridian), l = eval_word(rho, g.longitude);
    CHECK(commutator_distance(m, l) < 1e-13);
    // l = u^2 m^-6 = -m^-6.
    CHECK(distance(l, -eval_word(rho, power(g.meridian, -6))) < 1e-13);
  }
  CHECK_FALSE(is_irreducible(trefoil_rep(0.0)));
  CHECK(is_irreducible(trefoil_rep(1.0)));
}

TEST_CASE("canonical gauge is idempotent") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    std::vector<SU2> im{SU2::diag(0.4), random_su2(rng), random_su2(rng)};
    const auto once = canonicalize(im);
    const auto twice = canonicalize(once);
    for (std::size_t k = 0; k < im.size(); ++k) CHECK(distance(once[k], twice[k]) < 1e-14);
    CHECK(std::fabs(once[1].y) < 1e-14);
    CHECK(once[1].z >= 0.0);
    CHECK(distance(once[0], im[0]) < 1e-14);  // the torus is fixed
  }
}

TEST_CASE("solver returns to a perturbed solution") {
  const KnotGroup g = knot_group(KnotSpec::torus(2, 3));
  std::mt19937_64 rng(5);
  int found = 0;
  for (int i = 0; i < 64 && found < 5; ++i) {
    auto s = solve_at(g, 1.1, {random_su2(rng), random_su2(rng)});
    if (!s || !is_irreducible(s->images)) continue;
    ++found;
    CHECK(s->residual <= 1e-9);
    const Angles a = boundary_angles(g, s->images);
    CHECK(a.alpha == doctest::Approx(1.1).epsilon(1e-12));
    auto moved = s->images;
    for (auto& q : moved) q = q * SU2::exp(1e-3, -2e-3, 1e-3);
    auto back = solve_at(g, 1.1, moved);
    REQUIRE(back);
    for (std::size_t k = 0; k < 2; ++k) CHECK(distance(back->images[k], s->images[k]) < 1e-9);
  }
  CHECK(found == 5);
}

TEST_CASE("Alexander polynomials and endpoint angles") {
  CHECK(alexander_polynomial(KnotSpec::unknot()) == std::vector<long>{1});
  CHECK(alexander_endpoint_angles(KnotSpec::unknot()).empty());

  // Fox calculus on the braid presentations <x, y | xyx = yxy> and
  // <x, y | (xy)^2 x = y (xy)^2>.
  const Word r23 = concat({1, 2, 1}, inverse({2, 1, 2}));
  const Word r25 = concat({1, 2, 1, 2, 1}, inverse({2, 1, 2, 1, 2}));
  CHECK(alexander_polynomial(KnotSpec::torus(2, 3)) == normalized(fox_x(r23)));
  CHECK(alexander_polynomial(KnotSpec::torus(2, 5)) == normalized(fox_x(r25)));
  CHECK(alexander_polynomial(KnotSpec::torus(3, 4)) == std::vector<long>{1, -1, 0, 1, 0, -1, 1});

  const auto a23 = alexander_endpoint_angles(KnotSpec::torus(2, 3));
  REQUIRE(a23.size() == 2);
  CHECK(a23[0] == doctest::Approx(kPi / 6).epsilon(1e-13));
  CHECK(a23[1] == doctest::Approx(5 * kPi / 6).epsilon(1e-13));
  const auto a25 = alexander_endpoint_angles(KnotSpec::torus(2, 5));
  REQUIRE(a25.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    const int odd[] = {1, 3, 7, 9};
    CHECK(a25[k] == doctest::Approx(odd[k] * kPi / 10).epsilon(1e-12));
  }
}

TEST_CASE("trefoil image curve") {
  const KnotGroup g = knot_group(KnotSpec::torus(2, 3));
  const ImageCurve& c = trefoil_curve();
  REQUIRE(c.arcs.size() == 1);
  const auto& arc = c.arcs[0];
  const auto& v = arc.curve.vertices;
  CHECK(std::fabs(v.front().x - kPi / 6) < 1e-6);
  CHECK(std::fabs(v.back().x - 5 * kPi / 6) < 1e-6);
  CHECK(c.gaps.empty());

  for (std::size_t k = 0; k < v.size(); ++k) {
    const auto& w = arc.witnesses[k];
    CHECK(w.residual <= 1e-9);
    const Angles a = boundary_angles(g, w.images);
    CHECK(std::fabs(a.alpha - v[k].x) < 1e-8);
    CHECK(std::fabs(torus::wrap_signed(a.beta - v[k].y)) < 1e-8);
    CHECK(commutator_distance(eval_word(w.images, g.meridian), eval_word(w.images, g.longitude)) < 1e-9);
    // beta + 6 alpha = pi on the whole arc.
    CHECK(std::fabs(torus::wrap_signed(v[k].y + 6.0 * v[k].x - kPi)) < 1e-6);
    if (is_irreducible(w.images)) CHECK((v[k].x > 1e-2 && v[k].x < kPi - 1e-2));
    // tau-consistency: conjugating by j negates both angles.
    std::vector<SU2> conj;
    for (const auto& q : w.images) conj.push_back(conjugate(SU2{0.0, 0.0, 1.0, 0.0}, q));
    CHECK(relator_residual(g.presentation, conj) < 1e-9);
    const Angles b = boundary_angles(g, conj);
    CHECK(std::fabs(torus::wrap_signed(a.alpha + b.alpha)) < 1e-9);
    CHECK(std::fabs(torus::wrap_signed(a.beta + b.beta)) < 1e-9);
  }
  CHECK(c.delta == doctest::Approx(kPi / 6 - kPi / 400).epsilon(1e-6));
}

TEST_CASE("trefoil endpoints agree with a brute-force sweep") {
  const KnotGroup g = knot_group(KnotSpec::torus(2, 3));
  std::mt19937_64 rng(17);
  for (double alpha = 0.05; alpha < kPi; alpha += 0.05) {
    if (std::fabs(alpha - kPi / 6) < 0.02 || std::fabs(alpha - 5 * kPi / 6) < 0.02) continue;
    bool irreducible = false;
    for (int s = 0; s < 64 && !irreducible; ++s) {
      auto r = solve_at(g, alpha, {random_su2(rng), random_su2(rng)});
      irreducible = r && is_irreducible(r->images);
    }
    CHECK(irreducible == (alpha > kPi / 6 && alpha < 5 * kPi / 6));
  }
}

TEST_CASE("trefoil closure winds and separates") {
  const ImageCurve& c = trefoil_curve();
  const auto& arc = c.arcs[0].curve;
  CHECK(std::labs(pillowcase::winding_number(close_on_reducible(arc))) == 2);
  const auto pieces = split_on_reducible(arc);
  REQUIRE(pieces.size() == 2);
  for (const auto& p : pieces) CHECK(std::labs(pillowcase::winding_number(p)) == 1);
  CHECK(pieces[0].vertices.back().x == doctest::Approx(kPi / 2).epsilon(1e-4));

  const auto graph = c.graph();
  const pillowcase::PillowcasePoint p{0.0, kPi}, q{kPi, kPi};
  CHECK(pillowcase::separates(graph, p, q, 512));
  CHECK(pillowcase::separates(graph, p, q, 1024));
  CHECK(pillowcase::find_winding_cycle(graph, 512) != 0);
}

TEST_CASE("T(2,5) image curve") {
  const KnotGroup g = knot_group(KnotSpec::torus(2, 5));
  const ImageCurve& c = t25_curve();
  REQUIRE(c.arcs.size() == 2);
  const auto angles = alexander_endpoint_angles(KnotSpec::torus(2, 5));
  std::vector<double> ends;
  for (const auto& a : c.arcs) {
    ends.push_back(a.curve.vertices.front().x);
    ends.push_back(a.curve.vertices.back().x);
    for (std::size_t k = 0; k < a.curve.vertices.size(); ++k) {
      const auto& v = a.curve.vertices[k];
      CHECK(std::fabs(torus::wrap_signed(v.y + 10.0 * v.x - kPi)) < 1e-6);
      CHECK(a.witnesses[k].residual <= 1e-9);
    }
    // Endpoint law.
    for (const auto& e : {a.curve.vertices.front(), a.curve.vertices.back()}) {
      if (std::fabs(torus::wrap_signed(e.y)) < 1e-6) {
        CHECK(std::any_of(angles.begin(), angles.end(), [&](double x) { return std::fabs(x - e.x) < 1e-5; }));
      }
    }
  }
  std::sort(ends.begin(), ends.end());
  for (std::size_t k = 0; k < 4; ++k) CHECK(std::fabs(ends[k] - angles[k]) < 1e-5);
  (void)g;
}

TEST_CASE("unknot image") {
  const ImageCurve c = sample_image_curve(KnotSpec::unknot(), 64);
  CHECK(c.arcs.empty());
  CHECK(c.graph().edges.size() == 1);
  CHECK(c.graph().edges[0].label == pillowcase::EdgeLabel::ReducibleLine);
}

TEST_CASE("representations on slices") {
  pillowcase::CylinderCurve line;
  for (int k = 0; k <= 64; ++k) line.vertices.push_back({kPi * k / 64, kPi});
  CHECK(solve_rep_on_slice(KnotSpec::unknot(), line, 64).empty());

  const KnotGroup g = knot_group(KnotSpec::torus(2, 3));
  const auto hits = solve_rep_on_slice(g, trefoil_curve(), line);
  REQUIRE(hits.size() == 2);
  for (const auto& h : hits) {
    CHECK(std::fabs(h.angles.beta - kPi) < 1e-8);
    CHECK(distance(eval_word(h.rep.images, g.longitude), -SU2::identity()) < 1e-8);
    CHECK(h.rep.residual <= 1e-9);
  }
  CHECK(hits[0].angles.alpha == doctest::Approx(kPi / 3).epsilon(1e-8));

  // A sheared copy of the slice: the hit count matches a brute-force
  // polyline intersection count.
  pillowcase::CylinderCurve bent;
  for (int k = 0; k <= 400; ++k) {
    const double a = kPi * k / 400;
    bent.vertices.push_back({a, kPi + 0.8 * std::sin(2 * a) + 0.3 * std::sin(6 * a)});
  }
  const auto bent_hits = solve_rep_on_slice(g, trefoil_curve(), bent);
  std::size_t brute = 0;
  const auto& av = trefoil_curve().arcs[0].curve.vertices;
  for (std::size_t i = 0; i + 1 < av.size(); ++i) {
    for (std::size_t j = 0; j + 1 < bent.vertices.size(); ++j) {
      const torus::Vec2 p = av[i], r{av[i + 1].x - p.x, torus::wrap_signed(av[i + 1].y - p.y)};
      const torus::Vec2 q{bent.vertices[j].x, p.y + torus::wrap_signed(bent.vertices[j].y - p.y)};
      const torus::Vec2 s{bent.vertices[j + 1].x - bent.vertices[j].x, bent.vertices[j + 1].y - bent.vertices[j].y};
      const double den = r.x * s.y - r.y * s.x;
      if (den == 0.0) continue;
      const double t = ((q.x - p.x) * s.y - (q.y - p.y) * s.x) / den;
      const double u = ((q.x - p.x) * r.y - (q.y - p.y) * r.x) / den;
      if (t >= 0 && t < 1 && u >= 0 && u < 1) ++brute;
    }
  }
  CHECK(bent_hits.size() == brute);
  CHECK(brute % 2 == 0);
  for (const auto& h : bent_hits) {
    const auto& a = bent.vertices[h.segment];
    const auto& b = bent.vertices[h.segment + 1];
    const double target = a.y + (b.y - a.y) * (h.angles.alpha - a.x) / (b.x - a.x);
    CHECK(std::fabs(torus::wrap_signed(h.angles.beta - target)) < 1e-6);
  }
}

TEST_CASE("splice representations") {
  for (auto [p, q] : {std::pair{3, 3}, std::pair{3, 5}}) {
    const auto r = find_splice_rep(KnotSpec::torus(2, p), KnotSpec::torus(2, q));
    CHECK(r.assignment.residual <= 1e-9);
    CHECK(r.residual_first <= 1e-9);
    CHECK(r.residual_second <= 1e-9);
    CHECK(r.irreducible);
    CHECK(r.irreducible_first);
    CHECK(r.irreducible_second);
    // The swap: beta of one factor is alpha of the other.
    CHECK(std::fabs(torus::wrap_signed(r.first.beta - r.second.alpha)) < 1e-9);
    CHECK(std::fabs(torus::wrap_signed(r.second.beta - r.first.alpha)) < 1e-9);
    // Independent residual check over the presentation.
    CHECK(relator_residual(r.presentation, r.assignment.images) <= 1e-9);
  }
  CHECK(find_splice_rep(KnotSpec::torus(2, 3), KnotSpec::torus(2, 3)).first.alpha ==
        doctest::Approx(3 * kPi / 7).epsilon(1e-9));
  CHECK_THROWS_AS(find_splice_rep(KnotSpec::unknot(), KnotSpec::torus(2, 3)), std::invalid_argument);
}
