#include "pillowkit/torus/program.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pillowkit/errors.hpp"
#include "pillowkit/torus/flow.hpp"
#include "pillowkit/torus/fourier.hpp"

namespace pillowkit::torus {

ShearingProgram::ShearingProgram(std::vector<ProgramBlock> blocks) : blocks_(std::move(blocks)) {
  double start = 0.0;
  for (const auto& b : blocks_) {
    if (b.maps.empty() || b.repeat < 1) throw std::invalid_argument("program block has no steps");
    if (!(b.step_duration > 0.0) || b.step_duration > 1.0) throw std::invalid_argument("step duration must lie in (0, 1]");
    if (!(b.speed > 0.0)) throw std::invalid_argument("step speed must be positive");
    block_start_.push_back(start);
    block_first_step_.push_back(total_steps_);
    start += b.duration();
    total_steps_ += b.step_count();
  }
  if (!blocks_.empty() && std::fabs(start - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "program durations sum to " << start << ", expected 1";
    throw std::invalid_argument(msg.str());
  }
}

ShearingProgram::Step ShearingProgram::step(std::size_t i) const {
  if (i >= total_steps_) throw std::out_of_range("program step index");
  const auto it = std::upper_bound(block_first_step_.begin(), block_first_step_.end(), i);
  const auto b = static_cast<std::size_t>(it - block_first_step_.begin()) - 1;
  const auto& block = blocks_[b];
  const std::size_t local = i - block_first_step_[b];
  return {&block.maps[local % block.maps.size()], block.step_duration, block.speed,
          block_start_[b] + static_cast<double>(local) * block.step_duration};
}

std::vector<double> ShearingProgram::breakpoints() const {
  std::vector<double> out;
  out.reserve(total_steps_ + 1);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& block = blocks_[b];
    const std::size_t count = block.step_count();
    for (std::size_t s = 0; s < count; ++s) out.push_back(block_start_[b] + static_cast<double>(s) * block.step_duration);
  }
  out.push_back(1.0);
  if (blocks_.empty()) out.insert(out.begin(), 0.0);
  return out;
}

Vec2 ShearingProgram::apply_steps(std::size_t count, Vec2 p) const {
  std::size_t done = 0;
  for (const auto& block : blocks_) {
    const double full = block.speed * block.step_duration;
    const std::size_t m = block.maps.size();
    const std::size_t steps = block.step_count();
    for (std::size_t s = 0; s < steps; ++s) {
      if (done == count) return p;
      p = block.maps[s % m].apply_lifted(p, full);
      ++done;
    }
  }
  return p;
}

Vec2 ShearingProgram::eval_lifted(double t, Vec2 p) const {
  t = std::clamp(t, 0.0, 1.0);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& block = blocks_[b];
    const double full = block.speed * block.step_duration;
    const std::size_t m = block.maps.size();
    const std::size_t steps = block.step_count();
    const double local = t - block_start_[b];
    const bool last = b + 1 == blocks_.size();
    if (!last && t >= block_start_[b + 1]) {
      for (std::size_t s = 0; s < steps; ++s) p = block.maps[s % m].apply_lifted(p, full);
      continue;
    }
    auto whole = static_cast<std::size_t>(std::floor(local / block.step_duration));
    whole = std::min(whole, steps);
    for (std::size_t s = 0; s < whole; ++s) p = block.maps[s % m].apply_lifted(p, full);
    if (whole < steps) {
      const double rest = local - static_cast<double>(whole) * block.step_duration;
      if (rest > 0.0) p = block.maps[whole % m].apply_lifted(p, block.speed * rest);
    }
    return p;
  }
  return p;
}

std::vector<Vec2> ShearingProgram::trajectory(Vec2 p, std::span<const double> times) const {
  std::vector<Vec2> out;
  out.reserve(times.size());
  std::size_t next = 0;
  double prev = 0.0;
  for (std::size_t b = 0; b < blocks_.size() && next < times.size(); ++b) {
    const auto& block = blocks_[b];
    const double full = block.speed * block.step_duration;
    const std::size_t m = block.maps.size();
    const std::size_t steps = block.step_count();
    const bool last = b + 1 == blocks_.size();
    for (std::size_t s = 0; s < steps && next < times.size(); ++s) {
      const double start = block_start_[b] + static_cast<double>(s) * block.step_duration;
      const bool final_step = last && s + 1 == steps;
      const double end = final_step ? 1.0 : start + block.step_duration;
      while (next < times.size() && (times[next] < end || final_step)) {
        if (times[next] < prev) throw std::invalid_argument("trajectory times must be sorted");
        const double rest = std::clamp(times[next] - start, 0.0, block.step_duration);
        out.push_back(rest > 0.0 ? block.maps[s % m].apply_lifted(p, block.speed * rest) : p);
        prev = times[next];
        ++next;
      }
      p = block.maps[s % m].apply_lifted(p, full);
    }
  }
  while (out.size() < times.size()) out.push_back(p);
  return out;
}

bool ShearingProgram::equivariant() const {
  return std::all_of(blocks_.begin(), blocks_.end(), [](const ProgramBlock& b) {
    return std::all_of(b.maps.begin(), b.maps.end(), [](const ShearingMap& m) { return m.profile().is_odd(); });
  });
}

double stage1_bound(std::span<const SliceData> slices, double lipschitz) {
  double sum = 0.0;
  for (const auto& s : slices) sum += s.time_variation;
  return slices.empty() ? 0.0 : sum / static_cast<double>(slices.size()) * std::exp(lipschitz);
}

double stage2_bound(std::span<const SliceData> slices, double lipschitz) {
  double sum = 0.0;
  for (const auto& s : slices) sum += s.truncation_error;
  return slices.empty() ? 0.0 : sum / static_cast<double>(slices.size()) * std::exp(lipschitz);
}

namespace {

double slice_splitting_term(const SliceData& s, double n, double lipschitz) {
  if (s.terms <= 1) return 0.0;
  const double kn = static_cast<double>(s.fineness) * n;
  return (s.z_sup + s.w_sup_sum) / kn + s.splitting_c * std::exp(lipschitz / kn) / (kn * n);
}

}  // namespace

double stage3_bound(std::span<const SliceData> slices, double lipschitz) {
  const double n = static_cast<double>(slices.size());
  double sum = 0.0;
  for (const auto& s : slices) sum += slice_splitting_term(s, n, lipschitz);
  return sum * std::exp(lipschitz);
}

namespace {

[[noreturn]] void infeasible(const std::string& stage, double best, double target) {
  std::ostringstream msg;
  msg << stage << ": parameter cap reached, best bound " << best << " vs target " << target;
  throw BudgetInfeasible(msg.str());
}

double slice_variation(const TimeField& field, int n, int j, int samples) {
  const double t0 = static_cast<double>(j) / n;
  const int g = field.grid_n;
  std::vector<Vec2> base(static_cast<std::size_t>(g) * g);
  for (int a = 0; a < g; ++a) {
    for (int b = 0; b < g; ++b) base[static_cast<std::size_t>(a) * g + b] = field(t0, {kTwoPi * a / g, kTwoPi * b / g});
  }
  double best = 0.0;
  for (int q = 1; q <= samples; ++q) {
    const double s = t0 + (static_cast<double>(q) / samples) / n;
    for (int a = 0; a < g; ++a) {
      for (int b = 0; b < g; ++b) {
        const Vec2 v = field(s, {kTwoPi * a / g, kTwoPi * b / g});
        best = std::max(best, norm(v - base[static_cast<std::size_t>(a) * g + b]));
      }
    }
  }
  return 1.1 * best;
}

// Stage 1: the smallest n = 2^r whose slices all vary by at most target.
int choose_slices(const TimeField& field, const BuildOptions& opt, double target, std::vector<double>& variation) {
  if (opt.n) {
    const int n = *opt.n;
    if (n < 1) throw std::invalid_argument("n must be positive");
    variation.assign(static_cast<std::size_t>(n), 0.0);
    if (!field.autonomous) {
      for (int j = 0; j < n; ++j) variation[static_cast<std::size_t>(j)] = slice_variation(field, n, j, opt.slice_samples);
    }
    return n;
  }
  if (field.autonomous) {
    variation.assign(1, 0.0);
    return 1;
  }
  double best = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= opt.max_n; n *= 2) {
    variation.assign(static_cast<std::size_t>(n), 0.0);
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      variation[static_cast<std::size_t>(j)] = slice_variation(field, n, j, opt.slice_samples);
      worst = std::max(worst, variation[static_cast<std::size_t>(j)]);
      if (worst > target) break;
    }
    best = std::min(best, worst);
    if (worst <= target) return n;
  }
  infeasible("stage 1 (time slices)", best, target);
}

double truncation_sup(const FieldFn& x, const FourierField& z, double t, int g) {
  double best = 0.0;
  for (int half = 0; half < 2; ++half) {
    const double off = 0.5 * half;
    for (int a = 0; a < g; ++a) {
      for (int b = 0; b < g; ++b) {
        const Vec2 p{kTwoPi * (a + off) / g, kTwoPi * (b + off) / g};
        best = std::max(best, norm(x(t, p) - z(p)));
      }
    }
  }
  return 1.1 * best;
}

// Stage 2: Fourier truncation of the frozen slice field.
FourierField truncate_slice(const TimeField& field, double t, const BuildOptions& opt, double target, SliceData& data) {
  const int g = field.grid_n;
  auto attempt = [&](int radius) {
    const int grid = std::max(g, 4 * radius);
    const GridField samples = field.slice(t, grid);
    Decomposition d = fourier_decompose(samples, radius, opt.div_tol, field.equivariant);
    data.radius = radius;
    data.truncation_error = truncation_sup(field.eval, d.field, t, g);
    return d.field;
  };
  if (opt.radius) return attempt(*opt.radius);
  double best = std::numeric_limits<double>::infinity();
  for (int radius = 1; radius <= opt.max_radius; ++radius) {
    FourierField z = attempt(radius);
    best = std::min(best, data.truncation_error);
    if (data.truncation_error <= target) return z;
  }
  infeasible("stage 2 (Fourier truncation)", best, target);
}

}  // namespace

BuildResult build_shearing_program(const TimeField& field, double eps, const BuildOptions& opt) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const double lip = opt.lipschitz ? *opt.lipschitz : estimate_lipschitz(field);
  const double e_l = std::exp(lip);
  const double third = eps / 3.0;

  std::vector<double> variation;
  const int n = choose_slices(field, opt, third / e_l, variation);
  const double nd = static_cast<double>(n);

  ErrorCertificate cert;
  cert.eps = eps;
  cert.lipschitz = lip;
  cert.n = n;
  cert.slices.resize(static_cast<std::size_t>(n));
  std::vector<ProgramBlock> blocks;
  blocks.reserve(static_cast<std::size_t>(n));

  for (int j = 0; j < n; ++j) {
    SliceData& data = cert.slices[static_cast<std::size_t>(j)];
    data.time_variation = variation[static_cast<std::size_t>(j)];
    const double t = static_cast<double>(j) / n;
    const FourierField z = truncate_slice(field, t, opt, third / e_l, data);

    // Stage 3: split Z_j into its shearing terms.
    std::vector<ShearingMap> terms = z.shearing_terms();
    data.terms = static_cast<int>(terms.size());
    if (terms.empty()) terms.emplace_back(Int2{1, 0}, ShearingProfile{});
    const FieldFn zf = [&z](double, const Vec2& p) { return z(p); };
    data.z_sup = 1.1 * std::max(grid_sup_norm(zf, 0.0, field.grid_n), grid_sup_norm(zf, 0.0, field.grid_n, true));
    data.w_sup_sum = 0.0;
    for (const auto& w : terms) data.w_sup_sum += w.profile().sup_bound() * norm(to_vec(w.direction()));
    data.splitting_c = data.terms > 1
                           ? splitting_constant(terms, 1.0 / nd, opt.splitting_grid, opt.splitting_samples)
                           : 0.0;

    long k = 1;
    if (opt.fineness) {
      k = *opt.fineness;
    } else if (data.terms > 1) {
      // (1/k) (S_j + C_j e^L / n) e^L <= eps / 3
      const double need = (data.z_sup + data.w_sup_sum + data.splitting_c * e_l / nd) * e_l;
      while (need / static_cast<double>(k) > third) {
        if (k >= opt.max_fineness) infeasible("stage 3 (splitting fineness)", need / static_cast<double>(k), third);
        k *= 2;
      }
    }
    data.fineness = k;

    ProgramBlock block;
    const double m = static_cast<double>(terms.size());
    block.maps = std::move(terms);
    block.repeat = k;
    block.step_duration = 1.0 / (static_cast<double>(k) * m * nd);
    block.speed = m;
    blocks.push_back(std::move(block));
  }

  cert.eps1 = stage1_bound(cert.slices, lip);
  cert.eps2 = stage2_bound(cert.slices, lip);
  cert.eps3 = stage3_bound(cert.slices, lip);
  cert.total = cert.eps1 + cert.eps2 + cert.eps3;
  return {ShearingProgram(std::move(blocks)), std::move(cert)};
}

Deviation measure_deviation(const ShearingProgram& program, const TimeField& field, int grid_n, int time_samples,
                            double rk4_step) {
  Deviation out;
  out.times.resize(static_cast<std::size_t>(time_samples));
  for (int q = 0; q < time_samples; ++q) {
    out.times[static_cast<std::size_t>(q)] = time_samples > 1 ? static_cast<double>(q) / (time_samples - 1) : 0.0;
  }
  out.per_time.assign(out.times.size(), 0.0);
  for (int a = 0; a < grid_n; ++a) {
    for (int b = 0; b < grid_n; ++b) {
      const Vec2 p{kTwoPi * a / grid_n, kTwoPi * b / grid_n};
      const auto ref = rk4_trajectory(field.eval, p, out.times, rk4_step);
      const auto got = program.trajectory(p, out.times);
      for (std::size_t q = 0; q < out.times.size(); ++q) {
        out.per_time[q] = std::max(out.per_time[q], torus_distance(ref[q], got[q]));
      }
    }
  }
  out.max = out.per_time.empty() ? 0.0 : *std::max_element(out.per_time.begin(), out.per_time.end());
  return out;
}

}  // namespace pillowkit::torus
