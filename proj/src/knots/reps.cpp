#include "pillowkit/knots/reps.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <stdexcept>

#include "pillowkit/errors.hpp"

namespace pillowkit::knots {

using pillowcase::kPi;
using pillowcase::kTwoPi;
using pillowcase::Vec2;
using torus::wrap_angle;
using torus::wrap_signed;

SU2 eval_word(const std::vector<SU2>& images, const Word& w) {
  SU2 acc;
  for (int k : w) {
    const std::size_t idx = static_cast<std::size_t>(std::abs(k)) - 1;
    if (k == 0 || idx >= images.size()) {
      throw IndexOutOfRange("generator index " + std::to_string(k) + " with " + std::to_string(images.size()) +
                            " images");
    }
    acc = acc * (k > 0 ? images[idx] : images[idx].inverse());
  }
  return acc;
}

double relator_residual(const Presentation& p, const std::vector<SU2>& images) {
  double r = 0.0;
  for (const auto& w : p.relators) r = std::max(r, distance(eval_word(images, w), SU2::identity()));
  return r;
}

RepAssignment make_assignment(const Presentation& p, std::vector<SU2> images) {
  RepAssignment out;
  out.residual = relator_residual(p, images);
  out.images = std::move(images);
  return out;
}

double max_commutator(const std::vector<SU2>& images) {
  double best = 0.0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = i + 1; j < images.size(); ++j) best = std::max(best, commutator_distance(images[i], images[j]));
  }
  return best;
}

bool is_irreducible(const std::vector<SU2>& images, double tol) { return max_commutator(images) >= tol; }

std::vector<SU2> canonicalize(std::vector<SU2> images) {
  if (images.empty()) return images;
  std::size_t pick = images.size();
  auto off_axis = [&](std::size_t k) { return std::hypot(images[k].y, images[k].z) > 1e-9; };
  if (images.size() > 1 && off_axis(1)) {
    pick = 1;
  } else {
    for (std::size_t k = 0; k < images.size(); ++k) {
      if (off_axis(k)) {
        pick = k;
        break;
      }
    }
  }
  if (pick == images.size()) return images;
  const double theta = std::atan2(images[pick].z, images[pick].y);
  const double phi = 0.5 * kPi - theta;
  const SU2 c{std::cos(0.5 * phi), std::sin(0.5 * phi), 0.0, 0.0};
  for (auto& g : images) g = conjugate(c, g);
  return images;
}

Angles boundary_angles(const KnotGroup& g, const std::vector<SU2>& images) {
  const SU2 m = eval_word(images, g.meridian);
  const SU2 l = eval_word(images, g.longitude);
  return {wrap_angle(std::atan2(m.x, m.w)), wrap_angle(std::atan2(l.x, l.w))};
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd residual_vector(const KnotGroup& g, const SU2& target, const std::vector<SU2>& images) {
  const auto& rel = g.presentation.relators;
  VectorXd r(4 * (rel.size() + 1));
  Eigen::Index row = 0;
  auto put = [&](const SU2& a, const SU2& b) {
    r(row++) = a.w - b.w;
    r(row++) = a.x - b.x;
    r(row++) = a.y - b.y;
    r(row++) = a.z - b.z;
  };
  for (const auto& w : rel) put(eval_word(images, w), SU2::identity());
  put(eval_word(images, g.meridian), target);
  return r;
}

std::vector<SU2> perturbed(const std::vector<SU2>& images, const VectorXd& d, double scale) {
  std::vector<SU2> out = images;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(3 * k);
    out[k] = out[k] * SU2::exp(scale * d(i), scale * d(i + 1), scale * d(i + 2));
  }
  return out;
}

using Q = std::array<double, 4>;

Q qmul(const Q& a, const Q& b) {
  return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3], a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
          a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1], a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

// d/dxi of the word under g_k -> g_k exp(xi), by prefix and suffix products:
// an occurrence of g_k contributes P_{<=j} e P_{>j}, of g_k^{-1} contributes
// -P_{<j} e P_{>=j}.
void word_jacobian(const std::vector<SU2>& images, const Word& w, MatrixXd& jac, Eigen::Index row) {
  const std::size_t n = w.size();
  std::vector<SU2> prefix(n + 1), suffix(n + 1);
  auto letter = [&](int k) { return k > 0 ? images[static_cast<std::size_t>(k - 1)] : images[static_cast<std::size_t>(-k - 1)].inverse(); };
  for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] * letter(w[j]);
  for (std::size_t j = n; j-- > 0;) suffix[j] = letter(w[j]) * suffix[j + 1];
  for (std::size_t j = 0; j < n; ++j) {
    const int k = w[j];
    const SU2& l = k > 0 ? prefix[j + 1] : prefix[j];
    const SU2& r = k > 0 ? suffix[j + 1] : suffix[j];
    const double sign = k > 0 ? 1.0 : -1.0;
    const auto col0 = static_cast<Eigen::Index>(3 * (std::abs(k) - 1));
    for (int d = 0; d < 3; ++d) {
      Q e{0.0, 0.0, 0.0, 0.0};
      e[static_cast<std::size_t>(d + 1)] = sign;
      const Q v = qmul(qmul(l.coords(), e), r.coords());
      for (int c = 0; c < 4; ++c) jac(row + c, col0 + d) += v[static_cast<std::size_t>(c)];
    }
  }
}

MatrixXd jacobian(const KnotGroup& g, const std::vector<SU2>& images) {
  const auto& rel = g.presentation.relators;
  MatrixXd jac = MatrixXd::Zero(static_cast<Eigen::Index>(4 * (rel.size() + 1)), static_cast<Eigen::Index>(3 * images.size()));
  Eigen::Index row = 0;
  for (const auto& w : rel) {
    word_jacobian(images, w, jac, row);
    row += 4;
  }
  word_jacobian(images, g.meridian, jac, row);
  return jac;
}

SU2 random_su2(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return SU2{n(rng), n(rng), n(rng), n(rng)}.normalized();
}

}  // namespace

std::optional<RepAssignment> solve_at(const KnotGroup& g, double alpha, std::vector<SU2> images,
                                      const SolverOptions& opt) {
  const std::size_t n = images.size();
  if (n != static_cast<std::size_t>(g.presentation.generators)) {
    throw std::invalid_argument("start assignment has the wrong number of images");
  }
  const SU2 target = SU2::diag(alpha);
  VectorXd r = residual_vector(g, target, images);
  for (int it = 0; it < opt.max_iterations && r.lpNorm<Eigen::Infinity>() > opt.newton_tol; ++it) {
    const MatrixXd jac = jacobian(g, images);
    // The threshold must be set before compute(); Z is built for that rank.
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(jac.rows(), jac.cols());
    cod.setThreshold(1e-10);
    cod.compute(jac);
    VectorXd step = -cod.solve(r);
    const double big = step.lpNorm<Eigen::Infinity>();
    if (big > 0.5) step *= 0.5 / big;
    double scale = 1.0;
    const double r0 = r.norm();
    bool moved = false;
    for (int halvings = 0; halvings < 12; ++halvings, scale *= 0.5) {
      auto trial = perturbed(images, step, scale);
      VectorXd rt = residual_vector(g, target, trial);
      if (rt.norm() < r0) {
        images = std::move(trial);
        r = std::move(rt);
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (!(r.lpNorm<Eigen::Infinity>() <= opt.rep_tol)) return std::nullopt;
  auto out = make_assignment(g.presentation, canonicalize(std::move(images)));
  if (!(out.residual <= opt.rep_tol)) return std::nullopt;
  return out;
}

pillowcase::EmbeddedGraph ImageCurve::graph() const {
  pillowcase::EmbeddedGraph g;
  for (const auto& a : arcs) g.edges.push_back({a.curve, pillowcase::EdgeLabel::IrreducibleArc});
  g.edges.push_back({reducible_line, pillowcase::EdgeLabel::ReducibleLine});
  return g;
}

namespace {

double assignment_distance(const std::vector<SU2>& a, const std::vector<SU2>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, distance(a[k], b[k]));
  return d;
}

struct Tracker {
  const KnotGroup& g;
  const SolverOptions& opt;

  // Continue `from` to alpha; irreducibility floor `floor`, jump bound `jump`.
  std::optional<RepAssignment> step(const RepAssignment& from, double alpha, double floor, double jump) const {
    auto s = solve_at(g, alpha, from.images, opt);
    if (!s || max_commutator(s->images) < floor) return std::nullopt;
    if (assignment_distance(s->images, from.images) > jump) return std::nullopt;
    return s;
  }

  // step() with up to `depth` interval halvings when the direct step fails.
  std::optional<RepAssignment> walk(const RepAssignment& from, double a0, double a1, double floor, double jump,
                                    int depth = 4) const {
    if (auto s = step(from, a1, floor, jump)) return s;
    if (depth == 0) return std::nullopt;
    const double mid = 0.5 * (a0 + a1);
    auto half = walk(from, a0, mid, floor, jump, depth - 1);
    if (!half) return std::nullopt;
    return walk(*half, mid, a1, floor, jump, depth - 1);
  }

  using Point = std::pair<double, RepAssignment>;

  // Bisect between a good sample (lo) and a failing alpha (hi). Returns the
  // last good point and, when the arc runs into the reducibles, the limit
  // point: near it alpha is quadratic in the commutator size c, so alpha is
  // fitted as a0 + a c^2 + b c^4 on a few samples and extrapolated to c = 0.
  std::vector<Point> end(double lo, RepAssignment at_lo, double hi, double jump) const {
    for (int k = 0; k < opt.endpoint_bisections && std::fabs(hi - lo) > 1e-14; ++k) {
      const double mid = 0.5 * (lo + hi);
      if (auto s = step(at_lo, mid, opt.endpoint_commutator, jump)) {
        lo = mid;
        at_lo = std::move(*s);
      } else {
        hi = mid;
      }
    }
    std::vector<Point> out{{lo, at_lo}};
    if (max_commutator(at_lo.images) > 0.1) return out;

    const double dir = hi > lo ? 1.0 : -1.0;
    std::vector<double> xs, cs;
    RepAssignment cur = at_lo;
    for (double off : {0.0, 1e-4, 2e-4, 4e-4, 6e-4, 8e-4, 1.2e-3, 1.6e-3}) {
      const double a = lo - dir * off;
      auto s = off == 0.0 ? std::optional<RepAssignment>(at_lo) : step(cur, a, opt.endpoint_commutator, jump);
      if (!s) break;
      cur = *s;
      const double c = max_commutator(s->images);
      xs.push_back(a);
      cs.push_back(c * c);
    }
    if (xs.size() < 5) return out;
    Eigen::MatrixXd a(static_cast<Eigen::Index>(xs.size()), 3);
    Eigen::VectorXd b(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      a(i, 0) = 1.0;
      a(i, 1) = cs[k];
      a(i, 2) = cs[k] * cs[k];
      b(i) = xs[k];
    }
    const double a0 = a.colPivHouseholderQr().solve(b)(0);
    if (!((a0 - lo) * dir >= 0.0) || std::fabs(a0 - lo) > 2e-3) return out;
    auto limit = solve_at(g, a0, at_lo.images, opt);
    if (!limit || assignment_distance(limit->images, at_lo.images) > jump) return out;
    if (std::fabs(a0 - lo) > 1e-14) out.emplace_back(a0, std::move(*limit));
    return out;
  }
};

struct OpenArc {
  std::vector<double> alpha;
  std::vector<RepAssignment> reps;
  bool open = true;
};

ImageArc finish(const KnotGroup& g, const OpenArc& a) {
  ImageArc out;
  for (const auto& r : a.reps) {
    const Angles ang = boundary_angles(g, r.images);
    out.curve.vertices.push_back({ang.alpha, ang.beta});
    out.witnesses.push_back(r);
  }
  return out;
}

}  // namespace

ImageCurve sample_image_curve(const KnotGroup& g, int n_samples, const SolverOptions& opt) {
  if (n_samples < 4) throw std::invalid_argument("need at least 4 samples");
  ImageCurve out;
  out.reducible_line = pillowcase::reducible_line();
  const double da = kPi / n_samples;
  out.grid_step = da;
  const int gens = g.presentation.generators;
  const Tracker tr{g, opt};
  const double jump = 0.5;
  std::vector<OpenArc> arcs;

  for (int i = 1; i < n_samples; ++i) {
    const double alpha = da * i;
    std::vector<const RepAssignment*> live;
    for (auto& a : arcs) {
      if (!a.open) continue;
      if (auto s = tr.walk(a.reps.back(), a.alpha.back(), alpha, opt.irreducible_tol, jump)) {
        a.alpha.push_back(alpha);
        a.reps.push_back(std::move(*s));
      } else {
        for (auto& [ea, er] : tr.end(a.alpha.back(), a.reps.back(), alpha, jump)) {
          if (ea > a.alpha.back()) {
            a.alpha.push_back(ea);
            a.reps.push_back(std::move(er));
          }
        }
        a.open = false;
      }
    }
    for (const auto& a : arcs) {
      if (a.open) live.push_back(&a.reps.back());
    }

    std::mt19937_64 rng(opt.seed + static_cast<std::uint64_t>(i) * 0x9e3779b97f4a7c15ULL);
    std::vector<RepAssignment> fresh;
    bool any = !live.empty();
    for (int k = 0; k < opt.seeds; ++k) {
      std::vector<SU2> start(static_cast<std::size_t>(gens));
      for (auto& s : start) s = random_su2(rng);
      auto s = solve_at(g, alpha, std::move(start), opt);
      if (!s) continue;
      any = true;
      if (max_commutator(s->images) < opt.irreducible_tol) continue;
      auto same = [&](const RepAssignment& r) { return assignment_distance(r.images, s->images) < 1e-5; };
      if (std::any_of(live.begin(), live.end(), [&](const RepAssignment* r) { return same(*r); })) continue;
      if (std::any_of(fresh.begin(), fresh.end(), same)) continue;
      fresh.push_back(std::move(*s));
    }
    if (!any) out.gaps.push_back(alpha);

    for (auto& s : fresh) {
      // Walk back toward the start of the new arc, then bisect its end.
      OpenArc a;
      a.alpha.push_back(alpha);
      a.reps.push_back(s);
      for (int j = i - 1; j >= 0; --j) {
        const double back = da * j;
        std::optional<RepAssignment> prev;
        if (j > 0) prev = tr.walk(a.reps.front(), a.alpha.front(), back, opt.irreducible_tol, jump);
        if (!prev) {
          for (auto& [ea, er] : tr.end(a.alpha.front(), a.reps.front(), back, jump)) {
            if (ea < a.alpha.front()) {
              a.alpha.insert(a.alpha.begin(), ea);
              a.reps.insert(a.reps.begin(), std::move(er));
            }
          }
          break;
        }
        a.alpha.insert(a.alpha.begin(), back);
        a.reps.insert(a.reps.begin(), std::move(*prev));
      }
      arcs.push_back(std::move(a));
    }
  }
  for (auto& a : arcs) {
    if (a.open) {
      for (auto& [ea, er] : tr.end(a.alpha.back(), a.reps.back(), kPi, jump)) {
        if (ea > a.alpha.back()) {
          a.alpha.push_back(ea);
          a.reps.push_back(std::move(er));
        }
      }
    }
  }

  double min_alpha = kPi / 2;
  for (const auto& a : arcs) {
    if (a.reps.size() < 2) continue;
    out.arcs.push_back(finish(g, a));
    for (double x : a.alpha) min_alpha = std::min({min_alpha, x, kPi - x});
  }
  out.delta = std::max(1e-2, min_alpha - da);
  return out;
}

CylinderCurve close_on_reducible(const CylinderCurve& arc) {
  CylinderCurve out = arc;
  out.closed = true;
  return out;
}

std::vector<CylinderCurve> split_on_reducible(const CylinderCurve& arc) {
  std::vector<CylinderCurve> out;
  const auto& v = arc.vertices;
  if (v.size() < 2) return out;
  CylinderCurve cur;
  cur.closed = true;
  cur.vertices.push_back(v[0]);
  double lifted = wrap_signed(v[0].y);
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    const double next = lifted + wrap_signed(v[k + 1].y - v[k].y);
    // The end segments touch beta = 0 at the arc ends themselves.
    const bool interior = k > 0 && k + 2 < v.size();
    const double zero = kTwoPi * std::ceil(std::min(lifted, next) / kTwoPi);
    if (interior && zero < std::max(lifted, next)) {
      const double s = (zero - lifted) / (next - lifted);
      const Vec2 x{v[k].x + s * (v[k + 1].x - v[k].x), 0.0};
      cur.vertices.push_back(x);
      out.push_back(cur);
      cur.vertices.assign(1, x);
    }
    cur.vertices.push_back(v[k + 1]);
    lifted = next;
  }
  if (cur.vertices.size() > 1) out.push_back(cur);
  return out;
}

ImageCurve sample_image_curve(const KnotSpec& spec, int n_samples, const SolverOptions& opt) {
  return sample_image_curve(knot_group(spec), n_samples, opt);
}

std::vector<long> alexander_polynomial(const KnotSpec& spec) {
  if (spec.kind == KnotSpec::Kind::Unknot) return {1};
  if (spec.kind != KnotSpec::Kind::TorusKnot) throw std::invalid_argument("Alexander polynomial needs a torus knot");
  const int p = std::abs(spec.p), q = std::abs(spec.q);
  auto mul = [](const std::vector<long>& a, const std::vector<long>& b) {
    std::vector<long> c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    }
    return c;
  };
  auto cyc = [](int n) {
    std::vector<long> c(static_cast<std::size_t>(n) + 1, 0);
    c[0] = -1;
    c[static_cast<std::size_t>(n)] = 1;
    return c;
  };
  std::vector<long> num = mul(cyc(p * q), cyc(1));
  const std::vector<long> den = mul(cyc(p), cyc(q));
  // Exact long division by a monic polynomial.
  const std::size_t dn = den.size() - 1;
  std::vector<long> quot(num.size() - dn, 0);
  for (std::size_t k = num.size(); k-- > dn;) {
    const long c = num[k];
    quot[k - dn] = c;
    for (std::size_t j = 0; j <= dn; ++j) num[k - dn + j] -= c * den[j];
  }
  for (long r : num) {
    if (r != 0) throw std::logic_error("Alexander division left a remainder");
  }
  return quot;
}

std::vector<double> alexander_endpoint_angles(const KnotSpec& spec) {
  const auto c = alexander_polynomial(spec);
  const int deg = static_cast<int>(c.size()) - 1;
  std::vector<double> out;
  if (deg < 1) return out;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -static_cast<double>(c[static_cast<std::size_t>(i)]) / c.back();
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  using C = std::complex<double>;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    C t = es.eigenvalues()(k);
    for (int it = 0; it < 8; ++it) {
      C f = 0.0, df = 0.0;
      for (int j = deg; j >= 0; --j) {
        df = df * t + f;
        f = f * t + static_cast<double>(c[static_cast<std::size_t>(j)]);
      }
      if (std::abs(df) == 0.0) break;
      t -= f / df;
    }
    if (std::fabs(std::abs(t) - 1.0) > 1e-8) continue;
    double a = std::fmod(0.5 * std::arg(t) + kPi, kPi);
    if (a <= 1e-12 || a >= kPi - 1e-12) continue;
    if (std::none_of(out.begin(), out.end(), [&](double b) { return std::fabs(a - b) < 1e-9; })) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

// Segment intersection parameters for p + t r and q + u s, half-open [0, 1).
bool hit(const Vec2& p, const Vec2& r, const Vec2& q, const Vec2& s, double& t, double& u) {
  const double den = cross(r, s);
  if (den == 0.0) return false;
  const Vec2 qp = q - p;
  t = cross(qp, s) / den;
  u = cross(qp, r) / den;
  return t >= 0.0 && t < 1.0 && u >= 0.0 && u < 1.0;
}

}  // namespace

std::vector<SliceHit> solve_rep_on_slice(const KnotGroup& g, const ImageCurve& image, const CylinderCurve& s,
                                         const SolverOptions& opt) {
  std::vector<SliceHit> out;
  const auto& sv = s.vertices;
  const std::size_t s_edges = s.closed ? sv.size() : (sv.empty() ? 0 : sv.size() - 1);
  const Tracker tr{g, opt};
  for (std::size_t ai = 0; ai < image.arcs.size(); ++ai) {
    const auto& arc = image.arcs[ai];
    const auto& v = arc.curve.vertices;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      const Vec2 base = v[k];
      const Vec2 r{v[k + 1].x - base.x, wrap_signed(v[k + 1].y - base.y)};
      for (std::size_t j = 0; j < s_edges; ++j) {
        const Vec2 a{sv[j].x - base.x, wrap_signed(sv[j].y - base.y)};
        const Vec2 d{sv[(j + 1) % sv.size()].x - sv[j].x, wrap_signed(sv[(j + 1) % sv.size()].y - sv[j].y)};
        double t = 0.0, u = 0.0;
        if (!hit({0.0, 0.0}, r, a, d, t, u)) continue;
        // Signed distance of the arc point at meridian angle x to the line.
        const double dn = torus::norm(d);
        auto side = [&](const RepAssignment& w) {
          const Angles ang = boundary_angles(g, w.images);
          const Vec2 p{ang.alpha - base.x, wrap_signed(ang.beta - base.y)};
          return cross(d, p - a) / dn;
        };
        double lo = v[k].x, hi = v[k + 1].x;
        RepAssignment wlo = arc.witnesses[k];
        RepAssignment whi = arc.witnesses[k + 1];
        double flo = side(wlo);
        RepAssignment best = std::fabs(flo) < std::fabs(side(whi)) ? wlo : whi;
        bool ok = true;
        for (int it = 0; it < 80 && std::fabs(side(best)) > 1e-12; ++it) {
          const double mid = 0.5 * (lo + hi);
          auto m = tr.step(wlo, mid, 0.0, 0.5);
          if (!m) {
            ok = false;
            break;
          }
          const double fm = side(*m);
          best = *m;
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            wlo = *m;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        if (!ok) continue;
        SliceHit h;
        h.angles = boundary_angles(g, best.images);
        h.rep = std::move(best);
        h.arc = ai;
        h.segment = j;
        out.push_back(std::move(h));
      }
    }
  }
  return out;
}

std::vector<SliceHit> solve_rep_on_slice(const KnotSpec& spec, const CylinderCurve& s, int n_samples,
                                         const SolverOptions& opt) {
  const KnotGroup g = knot_group(spec);
  return solve_rep_on_slice(g, sample_image_curve(g, n_samples, opt), s, opt);
}

namespace {

struct Segment {
  Vec2 a, b;
  RepAssignment wa, wb;
};

// Segments of the arcs that stay inside one sheet of the fundamental domain.
std::vector<Segment> segments(const ImageCurve& c, bool swap) {
  std::vector<Segment> out;
  for (const auto& arc : c.arcs) {
    const auto& v = arc.curve.vertices;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      if (std::fabs(v[k + 1].y - v[k].y) > kPi) continue;
      Segment s{v[k], v[k + 1], arc.witnesses[k], arc.witnesses[k + 1]};
      if (swap) {
        std::swap(s.a.x, s.a.y);
        std::swap(s.b.x, s.b.y);
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

// Rotation c with c n c^{-1} = m for unit imaginary axes n, m.
SU2 rotate_axis(const Eigen::Vector3d& n, const Eigen::Vector3d& m) {
  const double d = n.dot(m);
  if (d < -1.0 + 1e-12) {
    Eigen::Vector3d perp = n.unitOrthogonal();
    return SU2{0.0, perp.x(), perp.y(), perp.z()};
  }
  const Eigen::Vector3d c = n.cross(m);
  return SU2{1.0 + d, c.x(), c.y(), c.z()}.normalized();
}

Eigen::Vector3d axis(const SU2& a) {
  Eigen::Vector3d v(a.x, a.y, a.z);
  const double n = v.norm();
  if (n < 1e-12) return Eigen::Vector3d::UnitX();
  return v / n;
}

}  // namespace

SpliceRep find_splice_rep(const KnotSpec& k, const KnotSpec& k2, int n_samples, const SolverOptions& opt) {
  if (k.kind != KnotSpec::Kind::TorusKnot || k2.kind != KnotSpec::Kind::TorusKnot) {
    throw std::invalid_argument("find_splice_rep is implemented for non-trivial torus knots");
  }
  const KnotGroup g1 = knot_group(k), g2 = knot_group(k2);
  const ImageCurve c1 = sample_image_curve(g1, n_samples, opt);
  const ImageCurve c2 = sample_image_curve(g2, n_samples, opt);
  const auto s1 = segments(c1, false);
  const auto s2 = segments(c2, true);

  struct Candidate {
    Vec2 point;
    const Segment* a;
    const Segment* b;
  };
  std::vector<Candidate> cand;
  for (const auto& a : s1) {
    for (const auto& b : s2) {
      double t = 0.0, u = 0.0;
      if (!hit(a.a, a.b - a.a, b.a, b.b - b.a, t, u)) continue;
      const Vec2 p = a.a + t * (a.b - a.a);
      if (p.x <= c1.delta || p.x >= kPi - c1.delta || p.y <= c2.delta || p.y >= kPi - c2.delta) continue;
      cand.push_back({p, &a, &b});
    }
  }
  const Vec2 centre{0.5 * kPi, 0.5 * kPi};
  std::sort(cand.begin(), cand.end(), [&](const Candidate& x, const Candidate& y) {
    const double dx = torus::norm(x.point - centre), dy = torus::norm(y.point - centre);
    if (dx != dy) return dx < dy;
    return std::make_pair(x.point.x, x.point.y) < std::make_pair(y.point.x, y.point.y);
  });

  const Presentation pres = splice_presentation(g1, g2);
  const Tracker t1{g1, opt}, t2{g2, opt};
  std::ostringstream diag;
  diag << cand.size() << " candidate intersections;";
  for (const auto& c : cand) {
    // Unknowns: x = alpha of K, y = alpha of K'. Want beta_K(x) = y and
    // beta_K'(y) = x.
    double x = c.point.x, y = c.point.y;
    RepAssignment r1 = c.a->wa, r2 = c.b->wa;
    auto eval = [&](double xx, double yy, RepAssignment& o1, RepAssignment& o2, Eigen::Vector2d& f) {
      auto a = t1.step(r1, xx, 0.0, 0.5);
      auto b = t2.step(r2, yy, 0.0, 0.5);
      if (!a || !b) return false;
      o1 = *a;
      o2 = *b;
      f << wrap_signed(boundary_angles(g1, a->images).beta - yy), wrap_signed(boundary_angles(g2, b->images).beta - xx);
      return true;
    };
    Eigen::Vector2d f;
    bool ok = eval(x, y, r1, r2, f);
    for (int it = 0; ok && it < 30 && f.lpNorm<Eigen::Infinity>() > 1e-13; ++it) {
      constexpr double h = 1e-7;
      Eigen::Matrix2d jac;
      RepAssignment q1, q2;
      Eigen::Vector2d fx, fy;
      if (!eval(x + h, y, q1, q2, fx) || !eval(x, y + h, q1, q2, fy)) {
        ok = false;
        break;
      }
      jac.col(0) = (fx - f) / h;
      jac.col(1) = (fy - f) / h;
      const Eigen::Vector2d d = jac.fullPivLu().solve(-f);
      x += d(0);
      y += d(1);
      ok = eval(x, y, r1, r2, f);
    }
    if (!ok || f.lpNorm<Eigen::Infinity>() > 1e-11) {
      diag << " refinement failed near (" << c.point.x << ", " << c.point.y << ");";
      continue;
    }

    // rho1(l1) = rho2(m2): align the peripheral tori, then try both signs.
    const SU2 l1 = eval_word(r1.images, g1.longitude);
    const SU2 m2 = eval_word(r2.images, g2.meridian);
    for (double sign : {1.0, -1.0}) {
      const SU2 c0 = rotate_axis(axis(m2), sign * axis(l1));
      std::vector<SU2> images = r1.images;
      for (const auto& im : r2.images) images.push_back(conjugate(c0, im));
      SpliceRep out;
      out.presentation = pres;
      out.split = g1.presentation.generators;
      out.assignment = make_assignment(pres, images);
      if (!(out.assignment.residual <= opt.rep_tol)) continue;
      const std::vector<SU2> first(images.begin(), images.begin() + out.split);
      const std::vector<SU2> second(images.begin() + out.split, images.end());
      out.residual_first = relator_residual(g1.presentation, first);
      out.residual_second = relator_residual(g2.presentation, second);
      out.irreducible = is_irreducible(images, opt.irreducible_tol);
      out.irreducible_first = is_irreducible(first, opt.irreducible_tol);
      out.irreducible_second = is_irreducible(second, opt.irreducible_tol);
      out.first = boundary_angles(g1, r1.images);
      out.second = boundary_angles(g2, r2.images);
      return out;
    }
    diag << " alignment failed at (" << x << ", " << y << ");";
  }
  throw NoIntersection("no usable intersection of the image curve of " + k.id() + " with the swapped image of " +
                       k2.id() + ": " + diag.str());
}

}  // namespace pillowkit::knots
