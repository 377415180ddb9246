#pragma once

#include <vector>

#include "pillowkit/torus/program.hpp"
#include "pillowkit/torus/shearing.hpp"

namespace pillowkit::torus {

/// Integer matrix [[a, c], [b, d]] with (a, b) as its first column.
struct SL2Z {
  long a = 1, b = 0, c = 0, d = 1;
  long det() const { return a * d - b * c; }
  friend bool operator==(const SL2Z&, const SL2Z&) = default;
};

/// Completes a primitive (a, b) to a determinant-one matrix. Among all
/// solutions of a d - b c = 1 picks minimal |c|, then d >= 0, then minimal |d|.
/// Throws NonPrimitiveDirection when gcd(a, b) != 1.
SL2Z complete_sl2(long a, long b);

/// One step of the coordinate map (alpha, beta) -> (alpha, beta) + f(-b alpha + a beta) (a, b).
struct PerturbationStep {
  SL2Z matrix;
  /// f, already scaled to the full step.
  ShearingProfile profile_f;
  /// Zero-mean antiderivative g of f; a constant term of f shows up as the
  /// non-periodic part g_linear * s.
  ShearingProfile profile_g;
  double g_linear = 0.0;

  Vec2 apply(const Vec2& p, double fraction = 1.0) const;
};

/// g with g' = f and zero mean, plus the slope of the constant part of f.
ShearingProfile antiderivative(const ShearingProfile& f, double* linear = nullptr);

std::vector<PerturbationStep> program_to_perturbation(const ShearingProgram& program);

/// With N steps, applies steps 0..k-1 fully and step k at fraction N t - k,
/// where k = floor(N t).
Vec2 perturbation_to_map(const std::vector<PerturbationStep>& steps, double t, Vec2 p);

}  // namespace pillowkit::torus
