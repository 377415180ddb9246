#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pillowkit/knots/presentation.hpp"
#include "pillowkit/knots/su2.hpp"
#include "pillowkit/pillowcase/pillowcase.hpp"

namespace pillowkit::knots {

using pillowcase::CylinderCurve;

SU2 eval_word(const std::vector<SU2>& images, const Word& w);

struct RepAssignment {
  std::vector<SU2> images;
  double residual = 0.0;  // max over relators of |rho(r) - 1|
};

double relator_residual(const Presentation& p, const std::vector<SU2>& images);
RepAssignment make_assignment(const Presentation& p, std::vector<SU2> images);
/// Largest commutator distance over all generator pairs.
double max_commutator(const std::vector<SU2>& images);
bool is_irreducible(const std::vector<SU2>& images, double tol = 1e-3);

struct SolverOptions {
  double rep_tol = 1e-9;
  double newton_tol = 1e-13;
  int max_iterations = 40;
  int seeds = 32;
  double irreducible_tol = 1e-3;
  /// Looser commutator floor used only while bisecting toward an arc end.
  double endpoint_commutator = 1e-5;
  int endpoint_bisections = 48;
  std::uint64_t seed = 0x5eed;
};

/// Damped Newton for rho(relators) = 1 and rho(meridian) = diag(alpha),
/// started from `start`. Returns the gauge-canonical solution or nothing.
std::optional<RepAssignment> solve_at(const KnotGroup& g, double alpha, std::vector<SU2> start,
                                      const SolverOptions& opt = {});

/// Conjugate by the maximal torus so the first generator not commuting with
/// diag(alpha) has its axis in the xz-plane with z >= 0. Idempotent.
std::vector<SU2> canonicalize(std::vector<SU2> images);

/// (alpha, beta) of a witness: meridian angle and longitude angle in the
/// maximal torus, both in [0, 2pi).
struct Angles {
  double alpha = 0.0;
  double beta = 0.0;
};
Angles boundary_angles(const KnotGroup& g, const std::vector<SU2>& images);

struct ImageArc {
  CylinderCurve curve;
  std::vector<RepAssignment> witnesses;  // one per vertex
};

struct ImageCurve {
  std::vector<ImageArc> arcs;
  CylinderCurve reducible_line;
  std::vector<double> gaps;  // alpha samples where no seed converged
  double grid_step = 0.0;
  /// Corner margin: min witness alpha distance to {0, pi} minus one step,
  /// floored at 1e-2.
  double delta = 1e-2;

  pillowcase::EmbeddedGraph graph() const;
};

/// The arc closed up along the reducible line (both ends on beta = 0).
CylinderCurve close_on_reducible(const CylinderCurve& arc);
/// Pieces of the arc between consecutive crossings of beta = 0, each closed
/// along the reducible line. Crossing vertices are interpolated.
std::vector<CylinderCurve> split_on_reducible(const CylinderCurve& arc);

ImageCurve sample_image_curve(const KnotGroup& g, int n_samples, const SolverOptions& opt = {});
ImageCurve sample_image_curve(const KnotSpec& spec, int n_samples, const SolverOptions& opt = {});

/// Torus knots: (t^pq - 1)(t - 1) / ((t^p - 1)(t^q - 1)), coefficients from
/// the constant term up.
std::vector<long> alexander_polynomial(const KnotSpec& spec);
/// alpha in (0, pi) with Delta(e^{2 i alpha}) = 0, sorted.
std::vector<double> alexander_endpoint_angles(const KnotSpec& spec);

struct SliceHit {
  RepAssignment rep;
  Angles angles;
  std::size_t arc = 0;
  std::size_t segment = 0;  // index into the slice polyline
};

/// Intersections of the sampled image with the polyline S, refined along
/// the arc by bisection until the witness lies on S within 1e-8.
std::vector<SliceHit> solve_rep_on_slice(const KnotGroup& g, const ImageCurve& image, const CylinderCurve& s,
                                         const SolverOptions& opt = {});
std::vector<SliceHit> solve_rep_on_slice(const KnotSpec& spec, const CylinderCurve& s, int n_samples = 400,
                                         const SolverOptions& opt = {});

struct SpliceRep {
  Presentation presentation;
  RepAssignment assignment;
  int split = 0;  // generators of the first factor
  double residual_first = 0.0;
  double residual_second = 0.0;
  bool irreducible = false;
  bool irreducible_first = false;
  bool irreducible_second = false;
  Angles first;   // boundary angles of the first factor
  Angles second;  // boundary angles of the second factor
};

/// Intersects gamma_K with the swapped gamma_K' and assembles a
/// representation of the spliced group. Throws NoIntersection.
SpliceRep find_splice_rep(const KnotSpec& k, const KnotSpec& k2, int n_samples = 400, const SolverOptions& opt = {});

}  // namespace pillowkit::knots
