#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "pillowkit/torus/geometry.hpp"

namespace pillowkit::pillowcase {

using torus::kPi;
using torus::kTwoPi;
using torus::TorusPoint;
using torus::Vec2;

/// Canonical representative of {(a, b), (-a, -b)}: alpha in [0, pi],
/// beta in [0, 2pi), and beta in [0, pi] on the two fold lines alpha = 0, pi.
struct PillowcasePoint {
  double alpha = 0.0;
  double beta = 0.0;
  friend bool operator==(const PillowcasePoint&, const PillowcasePoint&) = default;
};

PillowcasePoint project(const TorusPoint& p);
inline TorusPoint lift(const PillowcasePoint& p) { return TorusPoint(p.alpha, p.beta); }
bool is_singular(const PillowcasePoint& p, double tol = 0.0);
std::array<PillowcasePoint, 4> singular_points();

/// Polyline in the cut-open cylinder C = [0, pi] x R/2piZ, vertices (alpha, beta).
struct CylinderCurve {
  std::vector<Vec2> vertices;
  bool closed = false;

  /// Largest edge length measured with the wrapped beta difference.
  double max_edge() const;
  /// Insert vertices until no edge is longer than `max_edge`.
  CylinderCurve refined(double max_edge = 0.1) const;
};

/// Sum of wrapped beta increments over 2pi. Throws AmbiguousLift when an edge
/// spans pi or more in the circle factor, std::invalid_argument if not closed.
long winding_number(const CylinderCurve& curve);

enum class EdgeLabel { IrreducibleArc, ReducibleLine, Other };
std::string to_string(EdgeLabel label);
EdgeLabel edge_label_from_string(const std::string& s);

struct GraphEdge {
  CylinderCurve curve;
  EdgeLabel label = EdgeLabel::Other;
};

struct EmbeddedGraph {
  std::vector<GraphEdge> edges;
  std::size_t vertex_count() const;
};

/// The reducible line {beta = 0} sampled with spacing at most `step`.
CylinderCurve reducible_line(double step = 0.05);

struct SeparationOptions {
  /// Rasterize in the branched double cover T^2 when an edge comes within
  /// this many cells of a corner.
  int corner_cells = 2;
  bool force_double_cover = false;
};

/// Flood-fill separation test at resolution x resolution. Throws PointOnGraph
/// if P or Q lies within one cell of an edge.
bool separates(const EmbeddedGraph& graph, const PillowcasePoint& p, const PillowcasePoint& q, int resolution,
               const SeparationOptions& options = {});

struct SeparationResult {
  bool separated = false;
  std::vector<int> resolutions;
  std::vector<bool> answers;
};

/// Doubles the resolution from `start` until two consecutive answers agree
/// (at most `max_resolution`).
SeparationResult separates_converged(const EmbeddedGraph& graph, const PillowcasePoint& p, const PillowcasePoint& q,
                                     int start = 512, int max_resolution = 4096);

/// Searches the rasterized edge cells of C (no fold gluing) for a closed walk
/// that winds around the circle factor. Returns the winding found, 0 if none.
long find_winding_cycle(const EmbeddedGraph& graph, int resolution);

/// Figure-style picture of the fundamental domain [0, pi] x [0, 2pi].
void write_svg(std::ostream& out, const EmbeddedGraph& graph, const std::string& title = {});
/// edge,label,index,alpha,beta rows.
void write_csv(std::ostream& out, const EmbeddedGraph& graph);

}  // namespace pillowkit::pillowcase
