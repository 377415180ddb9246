#include "pillowkit/pillowcase/pillowcase.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pillowkit/errors.hpp"

namespace pillowkit::pillowcase {

using torus::wrap_angle;
using torus::wrap_signed;

PillowcasePoint project(const TorusPoint& p) {
  double a = p.x();
  double b = p.y();
  if (a > kPi) {
    a = kTwoPi - a;
    b = wrap_angle(-b);
  }
  if (a == 0.0 || a == kPi) b = std::min(b, wrap_angle(-b));
  return {a, b};
}

bool is_singular(const PillowcasePoint& p, double tol) {
  const bool edge_a = std::fabs(p.alpha) <= tol || std::fabs(p.alpha - kPi) <= tol;
  const bool edge_b = std::fabs(wrap_signed(p.beta)) <= tol || std::fabs(wrap_signed(p.beta - kPi)) <= tol;
  return edge_a && edge_b;
}

std::array<PillowcasePoint, 4> singular_points() { return {{{0.0, 0.0}, {kPi, 0.0}, {0.0, kPi}, {kPi, kPi}}}; }

namespace {

Vec2 edge_delta(const Vec2& a, const Vec2& b) { return {b.x - a.x, wrap_signed(b.y - a.y)}; }

}  // namespace

double CylinderCurve::max_edge() const {
  double best = 0.0;
  const std::size_t n = vertices.size();
  const std::size_t edges = closed ? n : (n == 0 ? 0 : n - 1);
  for (std::size_t i = 0; i < edges; ++i) best = std::max(best, torus::norm(edge_delta(vertices[i], vertices[(i + 1) % n])));
  return best;
}

CylinderCurve CylinderCurve::refined(double max_edge) const {
  CylinderCurve out;
  out.closed = closed;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    out.vertices.push_back(vertices[i]);
    if (!closed && i + 1 == n) break;
    const Vec2 d = edge_delta(vertices[i], vertices[(i + 1) % n]);
    const int pieces = static_cast<int>(std::ceil(torus::norm(d) / max_edge));
    for (int k = 1; k < pieces; ++k) {
      const double s = static_cast<double>(k) / pieces;
      out.vertices.push_back({vertices[i].x + s * d.x, wrap_angle(vertices[i].y + s * d.y)});
    }
  }
  return out;
}

long winding_number(const CylinderCurve& curve) {
  if (!curve.closed) throw std::invalid_argument("winding number needs a closed curve");
  const std::size_t n = curve.vertices.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = wrap_signed(curve.vertices[(i + 1) % n].y - curve.vertices[i].y);
    if (std::fabs(d) >= kPi - 1e-12) {
      std::ostringstream msg;
      msg << "edge " << i << " spans " << d << " in the circle factor";
      throw AmbiguousLift(msg.str());
    }
    total += d;
  }
  return std::lround(total / kTwoPi);
}

std::string to_string(EdgeLabel label) {
  switch (label) {
    case EdgeLabel::IrreducibleArc:
      return "irreducible-arc";
    case EdgeLabel::ReducibleLine:
      return "reducible-line";
    case EdgeLabel::Other:
      break;
  }
  return "other";
}

EdgeLabel edge_label_from_string(const std::string& s) {
  if (s == "irreducible-arc") return EdgeLabel::IrreducibleArc;
  if (s == "reducible-line") return EdgeLabel::ReducibleLine;
  if (s == "other") return EdgeLabel::Other;
  throw SchemaError("unknown edge label '" + s + "'");
}

std::size_t EmbeddedGraph::vertex_count() const {
  std::size_t n = 0;
  for (const auto& e : edges) n += e.curve.vertices.size();
  return n;
}

CylinderCurve reducible_line(double step) {
  CylinderCurve c;
  const int pieces = static_cast<int>(std::ceil(kPi / step));
  for (int k = 0; k <= pieces; ++k) c.vertices.push_back({kPi * k / pieces, 0.0});
  return c;
}

namespace {

// Cells of size (pi / r) x (2 pi / r). The pillowcase raster has r x r cells
// with folds along alpha = 0 and alpha = pi; the double cover has 2r x r
// cells with both directions periodic.
class Raster {
 public:
  Raster(int r, bool cover) : r_(r), cover_(cover), nx_(cover ? 2 * r : r), cells_(static_cast<std::size_t>(nx_) * r, 0) {}

  int nx() const { return nx_; }
  int ny() const { return r_; }
  double da() const { return kPi / r_; }
  double db() const { return kTwoPi / r_; }

  std::pair<int, int> cell(double a, double b) const {
    if (cover_) {
      a = wrap_angle(a);
    } else {
      a = std::fabs(wrap_signed(a));
      if (a > kPi) a = kPi;
      // (a, b) with a folded from a negative lift carries -b; the caller
      // passes already-folded points.
    }
    b = wrap_angle(b);
    const int i = std::clamp(static_cast<int>(std::floor(a / da())), 0, nx_ - 1);
    const int j = std::clamp(static_cast<int>(std::floor(b / db())), 0, r_ - 1);
    return {i, j};
  }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * r_ + static_cast<std::size_t>(j); }
  std::uint8_t& at(int i, int j) { return cells_[index(i, j)]; }
  std::uint8_t at(int i, int j) const { return cells_[index(i, j)]; }

  // Marks a point given in any lift of T^2.
  void mark_point(double a, double b) {
    if (cover_) {
      auto [i, j] = cell(a, b);
      at(i, j) = 1;
      std::tie(i, j) = cell(-a, -b);
      at(i, j) = 1;
      return;
    }
    a = wrap_angle(a);
    if (a > kPi) {
      a = kTwoPi - a;
      b = -b;
    }
    auto [i, j] = cell(a, b);
    at(i, j) = 1;
  }

  void mark_segment(const Vec2& p, const Vec2& q) {
    const Vec2 d = edge_delta(p, q);
    const double h = 0.25 * std::min(da(), db());
    const int n = std::max(1, static_cast<int>(std::ceil(torus::norm(d) / h)));
    for (int k = 0; k <= n; ++k) {
      const double s = static_cast<double>(k) / n;
      mark_point(p.x + s * d.x, p.y + s * d.y);
    }
  }

  void mark_graph(const EmbeddedGraph& g) {
    for (const auto& e : g.edges) {
      const auto& v = e.curve.vertices;
      if (v.size() == 1) mark_point(v[0].x, v[0].y);
      for (std::size_t k = 0; k + 1 < v.size(); ++k) mark_segment(v[k], v[k + 1]);
      if (e.curve.closed && v.size() > 1) mark_segment(v.back(), v.front());
    }
  }

  template <class F>
  void for_neighbors4(int i, int j, F&& f) const {
    const int jp = (j + 1) % r_, jm = (j + r_ - 1) % r_;
    f(i, jp);
    f(i, jm);
    if (cover_) {
      f((i + 1) % nx_, j);
      f((i + nx_ - 1) % nx_, j);
      return;
    }
    if (i + 1 < nx_) f(i + 1, j);
    if (i > 0) f(i - 1, j);
    // Across a fold the cell of beta lands on the cell of -beta.
    if (i == 0 || i == nx_ - 1) f(i, r_ - 1 - j);
  }

  bool near_graph(int i, int j) const {
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        int ii = i + di;
        const int jj = ((j + dj) % r_ + r_) % r_;
        if (cover_) {
          ii = (ii + nx_) % nx_;
        } else if (ii < 0 || ii >= nx_) {
          continue;
        }
        if (at(ii, jj) != 0) return true;
      }
    }
    return false;
  }

  std::vector<std::uint8_t> flood(int i0, int j0) const {
    std::vector<std::uint8_t> seen(cells_.size(), 0);
    std::deque<std::pair<int, int>> queue;
    seen[index(i0, j0)] = 1;
    queue.emplace_back(i0, j0);
    while (!queue.empty()) {
      const auto [i, j] = queue.front();
      queue.pop_front();
      for_neighbors4(i, j, [&](int a, int b) {
        const std::size_t k = index(a, b);
        if (seen[k] != 0 || cells_[k] != 0) return;
        seen[k] = 1;
        queue.emplace_back(a, b);
      });
    }
    return seen;
  }

 private:
  int r_;
  bool cover_;
  int nx_;
  std::vector<std::uint8_t> cells_;
};

bool near_corner(const EmbeddedGraph& g, double radius) {
  for (const auto& e : g.edges) {
    for (const auto& v : e.curve.vertices) {
      for (const auto& c : singular_points()) {
        if (std::hypot(v.x - c.alpha, wrap_signed(v.y - c.beta)) <= radius) return true;
      }
    }
  }
  return false;
}

}  // namespace

bool separates(const EmbeddedGraph& graph, const PillowcasePoint& p, const PillowcasePoint& q, int resolution,
               const SeparationOptions& options) {
  if (resolution < 4) throw std::invalid_argument("resolution must be at least 4");
  const double cell = std::max(kPi / resolution, kTwoPi / resolution);
  const bool cover = options.force_double_cover || near_corner(graph, options.corner_cells * cell);
  Raster raster(resolution, cover);
  raster.mark_graph(graph);

  const auto [pi, pj] = raster.cell(p.alpha, p.beta);
  std::vector<std::pair<int, int>> targets{raster.cell(q.alpha, q.beta)};
  if (cover) targets.push_back(raster.cell(-q.alpha, -q.beta));
  if (raster.near_graph(pi, pj) || raster.near_graph(targets[0].first, targets[0].second)) {
    throw PointOnGraph("P or Q lies within one raster cell of the graph");
  }
  const auto seen = raster.flood(pi, pj);
  return std::none_of(targets.begin(), targets.end(), [&](const auto& t) { return seen[raster.index(t.first, t.second)] != 0; });
}

SeparationResult separates_converged(const EmbeddedGraph& graph, const PillowcasePoint& p, const PillowcasePoint& q,
                                     int start, int max_resolution) {
  SeparationResult out;
  for (int r = start; r <= max_resolution; r *= 2) {
    out.resolutions.push_back(r);
    out.answers.push_back(separates(graph, p, q, r));
    const std::size_t n = out.answers.size();
    if (n >= 2 && out.answers[n - 1] == out.answers[n - 2]) {
      out.separated = out.answers.back();
      return out;
    }
  }
  out.separated = out.answers.empty() ? false : out.answers.back();
  return out;
}

long find_winding_cycle(const EmbeddedGraph& graph, int resolution) {
  // Cylinder raster: alpha clamped to [0, pi], beta periodic, no fold gluing.
  const int r = resolution;
  const double da = kPi / r, db = kTwoPi / r;
  std::vector<std::uint8_t> marked(static_cast<std::size_t>(r) * r, 0);
  auto mark = [&](double a, double b) {
    const int i = std::clamp(static_cast<int>(std::floor(a / da)), 0, r - 1);
    const int j = std::clamp(static_cast<int>(std::floor(wrap_angle(b) / db)), 0, r - 1);
    marked[static_cast<std::size_t>(i) * r + j] = 1;
  };
  for (const auto& e : graph.edges) {
    const auto& v = e.curve.vertices;
    const std::size_t edges = e.curve.closed ? v.size() : (v.empty() ? 0 : v.size() - 1);
    for (std::size_t k = 0; k < edges; ++k) {
      const Vec2 d = edge_delta(v[k], v[(k + 1) % v.size()]);
      const int n = std::max(1, static_cast<int>(std::ceil(torus::norm(d) / (0.25 * da))));
      for (int s = 0; s <= n; ++s) mark(v[k].x + d.x * s / n, v[k].y + d.y * s / n);
    }
  }

  constexpr long kUnseen = std::numeric_limits<long>::min();
  std::vector<long> lift(marked.size(), kUnseen);
  for (std::size_t start = 0; start < marked.size(); ++start) {
    if (marked[start] == 0 || lift[start] != kUnseen) continue;
    lift[start] = 0;
    std::deque<std::size_t> queue{start};
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      const int i = static_cast<int>(cur / static_cast<std::size_t>(r));
      const int j = static_cast<int>(cur % static_cast<std::size_t>(r));
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int ii = i + di;
          if (ii < 0 || ii >= r) continue;
          int jj = j + dj;
          long w = lift[cur];
          if (jj >= r) {
            jj -= r;
            ++w;
          } else if (jj < 0) {
            jj += r;
            --w;
          }
          const std::size_t nb = static_cast<std::size_t>(ii) * r + jj;
          if (marked[nb] == 0) continue;
          if (lift[nb] == kUnseen) {
            lift[nb] = w;
            queue.push_back(nb);
          } else if (lift[nb] != w) {
            return w - lift[nb];
          }
        }
      }
    }
  }
  return 0;
}

namespace {

std::string label_colour(EdgeLabel l) {
  switch (l) {
    case EdgeLabel::IrreducibleArc:
      return "#1f4e9c";
    case EdgeLabel::ReducibleLine:
      return "#b22222";
    case EdgeLabel::Other:
      break;
  }
  return "#555555";
}

}  // namespace

void write_svg(std::ostream& out, const EmbeddedGraph& graph, const std::string& title) {
  constexpr double w = 300.0, h = 600.0, pad = 30.0;
  auto sx = [&](double a) { return pad + a / kPi * w; };
  auto sy = [&](double b) { return pad + h - b / kTwoPi * h; };
  std::ostringstream s;
  s << std::fixed << std::setprecision(3);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w + 2 * pad << "\" height=\"" << h + 2 * pad << "\">\n";
  if (!title.empty()) s << "<title>" << title << "</title>\n";
  s << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << w << "\" height=\"" << h
    << "\" fill=\"none\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
  for (const auto& e : graph.edges) {
    const auto& v = e.curve.vertices;
    if (v.empty()) continue;
    std::vector<std::vector<Vec2>> runs{{v[0]}};
    const std::size_t n = e.curve.closed ? v.size() + 1 : v.size();
    for (std::size_t k = 1; k < n; ++k) {
      const Vec2& a = v[k - 1];
      const Vec2& b = v[k % v.size()];
      // Break the polyline where it crosses the beta seam.
      if (std::fabs(b.y - a.y) > kPi) runs.emplace_back();
      runs.back().push_back(b);
    }
    for (const auto& run : runs) {
      if (run.size() < 2) continue;
      s << "<polyline fill=\"none\" stroke=\"" << label_colour(e.label) << "\" stroke-width=\"2\" points=\"";
      for (const auto& p : run) s << sx(p.x) << "," << sy(p.y) << " ";
      s << "\"/>\n";
    }
  }
  for (const auto& c : singular_points()) {
    s << "<circle cx=\"" << sx(c.alpha) << "\" cy=\"" << sy(c.beta) << "\" r=\"4\" fill=\"black\"/>\n";
    if (c.beta == 0.0) s << "<circle cx=\"" << sx(c.alpha) << "\" cy=\"" << sy(kTwoPi) << "\" r=\"4\" fill=\"black\"/>\n";
  }
  s << "</svg>\n";
  out << s.str();
}

void write_csv(std::ostream& out, const EmbeddedGraph& graph) {
  std::ostringstream s;
  s << std::setprecision(17);
  s << "edge,label,index,alpha,beta\n";
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto& v = graph.edges[e].curve.vertices;
    for (std::size_t k = 0; k < v.size(); ++k) {
      s << e << "," << to_string(graph.edges[e].label) << "," << k << "," << v[k].x << "," << v[k].y << "\n";
    }
  }
  out << s.str();
}

}  // namespace pillowkit::pillowcase
