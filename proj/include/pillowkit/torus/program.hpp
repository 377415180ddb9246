#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pillowkit/torus/shearing.hpp"
#include "pillowkit/torus/time_field.hpp"

namespace pillowkit::torus {

/// A run of steps that cycles through `maps` in order, `repeat` times. Every
/// step lasts `step_duration` and flows along its map's field at `speed`, so
/// a completed step applies the shear with time speed * step_duration.
struct ProgramBlock {
  std::vector<ShearingMap> maps;
  long repeat = 1;
  double step_duration = 1.0;
  double speed = 1.0;

  std::size_t step_count() const { return maps.size() * static_cast<std::size_t>(repeat); }
  double duration() const { return static_cast<double>(step_count()) * step_duration; }
};

/// A timed composition of shearing flows on [0, 1]. Steps are stored in
/// blocks so that the k-fold repetitions of the splitting stage stay compact;
/// step(i) and breakpoints() give the flat view.
class ShearingProgram {
 public:
  struct Step {
    const ShearingMap* map;
    double duration;
    double speed;
    double start;
  };

  ShearingProgram() = default;
  /// Validates positive durations and speeds and a total duration of 1
  /// (to 1e-9).
  explicit ShearingProgram(std::vector<ProgramBlock> blocks);

  const std::vector<ProgramBlock>& blocks() const { return blocks_; }
  std::size_t step_count() const { return total_steps_; }
  Step step(std::size_t i) const;
  /// t_0 = 0 < t_1 < ... < t_N = 1.
  std::vector<double> breakpoints() const;

  Vec2 eval_lifted(double t, Vec2 p) const;
  TorusPoint eval(double t, const TorusPoint& p) const { return TorusPoint(eval_lifted(t, p.vec())); }
  /// Positions at each sorted time, marching through the steps once.
  std::vector<Vec2> trajectory(Vec2 p, std::span<const double> times) const;
  /// Composition of the first `count` complete steps.
  Vec2 apply_steps(std::size_t count, Vec2 p) const;

  bool equivariant() const;

 private:
  std::vector<ProgramBlock> blocks_;
  std::vector<double> block_start_;
  std::vector<std::size_t> block_first_step_;
  std::size_t total_steps_ = 0;
};

inline TorusPoint eval_program(const ShearingProgram& program, double t, const TorusPoint& p) {
  return program.eval(t, p);
}

/// Measured quantities of one time slice [j/n, (j+1)/n].
struct SliceData {
  double time_variation = 0.0;  // sup |X_s - X_j| over the slice
  double truncation_error = 0.0;  // sup |X_j - Z_j|
  double z_sup = 0.0;  // sup |Z_j|
  double w_sup_sum = 0.0;  // sum of sup |W_r|
  double splitting_c = 0.0;  // C_j
  int radius = 0;  // K_j
  long fineness = 1;  // k_j
  int terms = 0;  // m_j
};

struct ErrorCertificate {
  double eps1 = 0.0;
  double eps2 = 0.0;
  double eps3 = 0.0;
  double total = 0.0;
  double lipschitz = 0.0;
  double eps = 0.0;
  int n = 1;
  std::vector<SliceData> slices;
  std::string note =
      "sup-norms, Lipschitz and splitting constants are grid estimates inflated by 1.1; "
      "the bound is numerical, not formally rigorous";
};

/// eps1 = (1/n) sum_j delta_j e^L.
double stage1_bound(std::span<const SliceData> slices, double lipschitz);
/// eps2 = (1/n) sum_j |X_j - Z_j| e^L.
double stage2_bound(std::span<const SliceData> slices, double lipschitz);
/// eps3 = sum_j (S_j / (k_j n) + C_j e^{L/(k_j n)} / (k_j n^2)) e^L with
/// S_j = |Z_j| + sum_r |W_r|. A slice with at most one term is an exact flow
/// and contributes nothing.
double stage3_bound(std::span<const SliceData> slices, double lipschitz);

struct BuildOptions {
  std::optional<int> n;
  std::optional<int> radius;  // same K for every slice
  std::optional<long> fineness;  // same k for every slice
  int max_n = 1024;
  int max_radius = 64;
  long max_fineness = 1L << 20;
  double div_tol = 1e-8;
  int slice_samples = 8;  // time samples per slice for the stage 1 sup
  int splitting_grid = 48;
  int splitting_samples = 8;
  std::optional<double> lipschitz;  // skip the estimate
};

struct BuildResult {
  ShearingProgram program;
  ErrorCertificate certificate;
};

/// The three-stage approximation: freeze the field on n slices, truncate each
/// slice to a finite Fourier sum, and split each sum into its shearing terms
/// repeated k_j times. Throws BudgetInfeasible when a stage exceeds its cap.
BuildResult build_shearing_program(const TimeField& field, double eps, const BuildOptions& options = {});

struct Deviation {
  double max = 0.0;
  std::vector<double> times;
  std::vector<double> per_time;  // max over the grid at each time
};

/// Sup over an n x n grid and `time_samples` uniform times of the distance
/// between the program and an RK4 reference flow of `field`.
Deviation measure_deviation(const ShearingProgram& program, const TimeField& field, int grid_n = 64,
                            int time_samples = 21, double rk4_step = 1.0 / 2048.0);

}  // namespace pillowkit::torus
