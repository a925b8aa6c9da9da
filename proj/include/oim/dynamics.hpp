#pragma once

// Phase dynamics of an oscillator Ising machine in the rotating frame of the
// common natural frequency. Time is measured in oscillation cycles.
//
//   dphi_i/dt = dw_i - K [ sum_j J_ij sin(phi_i - phi_j) + h_i sin(phi_i) ] - Ks(t) sin(2 phi_i)
//
// The local field h_i couples oscillator i to a reference pinned at phase 0.
// Without detuning the drift is the negative gradient of
//
//   E(phi) = -K [ sum_{i<j} J_ij cos(phi_i - phi_j) + sum_i h_i cos(phi_i) ] - Ks/2 sum_i cos(2 phi_i)
//
// and on binary phases {0, pi} E = K H(s) - n Ks / 2 with s_i = cos(phi_i).
// The SYNC term Ks sin(2 phi) makes 0 and pi the two stable locks.
//
// Integration is fixed-step Euler-Maruyama with additive phase noise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "oim/defaults.hpp"
#include "oim/error.hpp"
#include "oim/fast_trig.hpp"
#include "oim/ising.hpp"
#include "oim/random.hpp"

namespace oim {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double wrap_phase(double phi) noexcept {
  // One step moves a phase by far less than a period, so the cheap branches
  // cover the integration loop; fmod handles arbitrary input.
  if (phi >= 0.0 && phi < kTwoPi) return phi;
  if (phi < 0.0 && phi >= -kTwoPi) {
    const double r = phi + kTwoPi;
    if (r < kTwoPi) return r;
  } else if (phi >= kTwoPi && phi < 2.0 * kTwoPi) {
    return phi - kTwoPi;
  }
  double r = std::fmod(phi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative value can round up to exactly 2 pi.
  return r >= kTwoPi ? 0.0 : r;
}

// SYNC strength over time: a constant level, or a linear ramp from 0 at t0 to
// `level` at t1 (flat outside the ramp).
struct KsSchedule {
  enum class Kind { kConstant, kLinearRamp };

  Kind kind = Kind::kConstant;
  double level = defaults::kSyncLevel;
  double t0 = 0.0;
  double t1 = 0.0;

  static KsSchedule constant(double level) { return {Kind::kConstant, level, 0.0, 0.0}; }
  static KsSchedule ramp(double t0, double t1, double level) { return {Kind::kLinearRamp, level, t0, t1}; }

  double at(double t) const noexcept {
    if (kind == Kind::kConstant) return level;
    if (t <= t0) return 0.0;
    if (t >= t1) return level;
    return level * (t - t0) / (t1 - t0);
  }

  void validate() const {
    if (!std::isfinite(level) || level < 0.0) throw SpecError("SYNC level must be finite and >= 0");
    if (kind == Kind::kLinearRamp && !(std::isfinite(t0) && std::isfinite(t1) && t0 >= 0.0 && t1 > t0))
      throw SpecError("SYNC ramp needs 0 <= t0 < t1");
  }

  friend bool operator==(const KsSchedule&, const KsSchedule&) = default;
};

inline double ks_value(const KsSchedule& schedule, double t) noexcept { return schedule.at(t); }

struct DynamicsParams {
  double K = defaults::kCoupling;
  // SYNC ramps from 0 to its level over the default run length.
  KsSchedule ks = KsSchedule::ramp(0.0, defaults::kCycles, defaults::kSyncLevel);
  // radians per sqrt(cycle)
  double noise_amp = defaults::kNoiseAmp;
  // standard deviation of the fractional frequency spread; 0.05 means 5 %
  double variability = defaults::kVariability;
  double cycles = defaults::kCycles;
  int steps_per_cycle = defaults::kStepsPerCycle;
  bool sync_enabled = true;
  // Divide K by the maximum vertex degree of the problem.
  bool normalize_by_degree = false;
  // Greedy single-flip descent after rounding.
  bool polish = false;
  // Number of (time, E, H) samples to record; 0 disables the trace.
  int trace_points = 0;

  double dt() const noexcept { return 1.0 / steps_per_cycle; }

  long long total_steps() const noexcept {
    const double exact = cycles * steps_per_cycle;
    const double rounded = std::round(exact);
    if (std::abs(exact - rounded) < 1e-9 * std::max(1.0, exact)) return static_cast<long long>(rounded);
    return static_cast<long long>(std::ceil(exact));
  }

  double sync_at(double t) const noexcept { return sync_enabled ? ks.at(t) : 0.0; }

  double coupling_gain(const IsingProblem& problem) const noexcept {
    if (!normalize_by_degree) return K;
    return K / static_cast<double>(std::max<std::size_t>(1, problem.max_degree()));
  }

  void validate() const {
    if (!std::isfinite(K) || K <= 0.0) throw SpecError("coupling gain K must be finite and > 0");
    ks.validate();
    if (!std::isfinite(noise_amp) || noise_amp < 0.0) throw SpecError("noise amplitude must be finite and >= 0");
    if (!std::isfinite(variability) || variability < 0.0) throw SpecError("variability must be finite and >= 0");
    if (!std::isfinite(cycles) || cycles <= 0.0) throw SpecError("cycles must be finite and > 0");
    if (steps_per_cycle <= 0) throw SpecError("steps_per_cycle must be positive");
    if (trace_points < 0) throw SpecError("trace_points must be >= 0");
  }

  friend bool operator==(const DynamicsParams&, const DynamicsParams&) = default;
};

struct PhaseState {
  std::vector<double> phases;
  double time = 0.0;
};

struct Detuning {
  // radians per cycle
  std::vector<double> delta_omega;

  bool is_zero() const noexcept {
    return std::all_of(delta_omega.begin(), delta_omega.end(), [](double x) { return x == 0.0; });
  }
};

inline Detuning zero_detuning(std::size_t n) { return {std::vector<double>(n, 0.0)}; }

// dw_i = 2 pi d_i, d_i ~ Normal(0, variability^2), one draw per oscillator.
inline Detuning sample_detuning(std::size_t n, double variability, std::uint64_t seed) {
  if (!(variability >= 0.0) || !std::isfinite(variability)) throw SpecError("variability must be finite and >= 0");
  Detuning d = zero_detuning(n);
  if (variability == 0.0) return d;
  Rng rng = make_rng(seed, Stream::kDetuning);
  std::normal_distribution<double> normal(0.0, variability);
  for (auto& w : d.delta_omega) w = kTwoPi * normal(rng);
  return d;
}

// Evaluates drift and Lyapunov function for one problem; owns the per-step
// scratch buffers so the integration loop does not allocate.
class PhaseModel {
 public:
  PhaseModel(const IsingProblem& problem, const DynamicsParams& params, Detuning detuning)
      : problem_(problem), params_(params), detuning_(std::move(detuning)), gain_(params.coupling_gain(problem)) {
    params_.validate();
    check_dimension(problem.n(), detuning_.delta_omega.size(), "detuning");
    sin_.resize(problem.n());
    cos_.resize(problem.n());
  }

  std::size_t n() const noexcept { return problem_.n(); }
  const DynamicsParams& params() const noexcept { return params_; }
  const Detuning& detuning() const noexcept { return detuning_; }

  void drift(std::span<const double> phases, double t, std::span<double> out) {
    check_dimension(n(), phases.size(), "drift");
    check_dimension(n(), out.size(), "drift output");
    fill_trig(phases);
    drift_from_trig(t, out);
  }

  double lyapunov(std::span<const double> phases, double t) const {
    check_dimension(n(), phases.size(), "lyapunov");
    double pair = 0.0;
    for (const auto& c : problem_.couplings()) pair += c.J * std::cos(phases[c.i] - phases[c.j]);
    double field = 0.0;
    const auto h = problem_.fields();
    double sync = 0.0;
    for (std::size_t i = 0; i < n(); ++i) {
      if (h[i] != 0.0) field += h[i] * std::cos(phases[i]);
      sync += std::cos(2.0 * phases[i]);
    }
    return -gain_ * (pair + field) - 0.5 * params_.sync_at(t) * sync;
  }

  // One Euler-Maruyama step, in place. Returns false when a phase became
  // non-finite; the state is left partially updated in that case.
  bool step(PhaseState& state, Rng& noise_rng) {
    const double dt = params_.dt();
    fill_trig(state.phases);
    drift_buf_.resize(n());
    drift_from_trig(state.time, drift_buf_);
    bool finite = true;
    if (params_.noise_amp > 0.0) {
      const double sigma = params_.noise_amp * std::sqrt(dt);
      for (std::size_t i = 0; i < n(); ++i) {
        const double next = state.phases[i] + drift_buf_[i] * dt + sigma * normal_(noise_rng);
        finite &= std::isfinite(next);
        state.phases[i] = wrap_phase(next);
      }
    } else {
      for (std::size_t i = 0; i < n(); ++i) {
        const double next = state.phases[i] + drift_buf_[i] * dt;
        finite &= std::isfinite(next);
        state.phases[i] = wrap_phase(next);
      }
    }
    state.time += dt;
    return finite;
  }

 private:
  // Phases handed to the model are wrapped (or close to it), inside the fast
  // kernel's range; anything else goes through libm.
  void fill_trig(std::span<const double> phases) {
    const bool in_range = std::all_of(phases.begin(), phases.end(), [](double p) { return p >= -kTwoPi && p <= 2.0 * kTwoPi; });
    if (in_range) {
      fast_sincos(phases, sin_, cos_);
      return;
    }
    for (std::size_t i = 0; i < n(); ++i) {
      sin_[i] = std::sin(phases[i]);
      cos_[i] = std::cos(phases[i]);
    }
  }

  // sin(phi_i - phi_j) = sin_i cos_j - cos_i sin_j, so the coupling sum is two
  // sparse dot products per oscillator. (cos, sin) pairs are interleaved so
  // each neighbour costs one 16-byte load.
  void drift_from_trig(double t, std::span<double> out) {
    const std::size_t count = n();
    trig_.resize(count);
    for (std::size_t i = 0; i < count; ++i) trig_[i] = {sin_[i], cos_[i]};

    const double ks = params_.sync_at(t);
    const auto h = problem_.fields();
    const auto offsets = problem_.adjacency_offsets();
    const std::uint32_t* __restrict idx = problem_.adjacency_indices().data();
    const double* __restrict w = problem_.adjacency_weights().data();
    const SinCos* __restrict trig = trig_.data();
    for (std::size_t i = 0; i < count; ++i) {
      // Four independent accumulator pairs break the add dependency chain.
      double jc[4] = {0.0, 0.0, 0.0, 0.0}, js[4] = {0.0, 0.0, 0.0, 0.0};
      std::size_t k = offsets[i];
      const std::size_t end = offsets[i + 1];
      for (; k + 4 <= end; k += 4)
        for (std::size_t u = 0; u < 4; ++u) {
          const SinCos sc = trig[idx[k + u]];
          jc[u] += w[k + u] * sc.cos;
          js[u] += w[k + u] * sc.sin;
        }
      for (; k < end; ++k) {
        const SinCos sc = trig[idx[k]];
        jc[0] += w[k] * sc.cos;
        js[0] += w[k] * sc.sin;
      }
      const double jc_sum = (jc[0] + jc[1]) + (jc[2] + jc[3]);
      const double js_sum = (js[0] + js[1]) + (js[2] + js[3]);
      const double coupling = sin_[i] * jc_sum - cos_[i] * js_sum + h[i] * sin_[i];
      out[i] = detuning_.delta_omega[i] - gain_ * coupling - ks * 2.0 * sin_[i] * cos_[i];
    }
  }

  const IsingProblem& problem_;
  DynamicsParams params_;
  Detuning detuning_;
  double gain_;
  std::vector<double> sin_, cos_, drift_buf_;
  std::vector<SinCos> trig_;
  boost::random::normal_distribution<double> normal_{0.0, 1.0};
};

inline std::vector<double> drift(const IsingProblem& problem, const PhaseState& state, const DynamicsParams& params,
                                 const Detuning& detuning) {
  PhaseModel model(problem, params, detuning);
  std::vector<double> out(problem.n());
  model.drift(state.phases, state.time, out);
  return out;
}

inline double lyapunov(const IsingProblem& problem, const PhaseState& state, const DynamicsParams& params) {
  return PhaseModel(problem, params, zero_detuning(problem.n())).lyapunov(state.phases, state.time);
}

inline PhaseState step(const PhaseState& state, const IsingProblem& problem, const DynamicsParams& params,
                       const Detuning& detuning, Rng& rng) {
  PhaseModel model(problem, params, detuning);
  PhaseState next = state;
  if (!model.step(next, rng)) throw DivergenceError("non-finite phase", 1);
  return next;
}

// s_i = +1 when cos(phi_i) >= 0. Works on unwrapped input.
inline SpinConfig round_phases(std::span<const double> phases) {
  SpinConfig s(phases.size());
  for (std::size_t i = 0; i < phases.size(); ++i)
    if (std::cos(phases[i]) < 0.0) s.flip(i);
  return s;
}

inline SpinConfig round_phases(const PhaseState& state) { return round_phases(state.phases); }

inline PhaseState random_phases(std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::kInitialPhases);
  std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
  PhaseState s;
  s.phases.resize(n);
  for (auto& p : s.phases) p = uniform(rng);
  return s;
}

struct TracePoint {
  double time;
  double lyapunov;
  double hamiltonian;
};

struct RunResult {
  SpinConfig final_spins;
  double final_H = 0.0;
  std::optional<double> final_cut;
  std::vector<double> final_phases;
  std::vector<TracePoint> trajectory;
  std::uint64_t seed = 0;
  std::chrono::duration<double> wall_time{0.0};
};

// Integrates from an explicit initial state. Noise and detuning still come
// from `seed`.
inline RunResult simulate_from(const IsingProblem& problem, const DynamicsParams& params, std::uint64_t seed,
                               PhaseState state, std::optional<double> total_weight = std::nullopt) {
  const auto start = std::chrono::steady_clock::now();
  params.validate();
  check_dimension(problem.n(), state.phases.size(), "initial phases");

  PhaseModel model(problem, params, sample_detuning(problem.n(), params.variability, seed));
  Rng noise = make_rng(seed, Stream::kNoise);
  const long long steps = params.total_steps();

  RunResult result;
  result.seed = seed;

  const long long points = std::min<long long>(params.trace_points, defaults::kMaxTracePoints);
  long long stride = 0;
  if (points > 0) {
    stride = std::max<long long>(1, (steps + points - 1) / points);
    result.trajectory.reserve(static_cast<std::size_t>(steps / stride + 2));
  }
  auto record = [&] {
    result.trajectory.push_back(
        {state.time, model.lyapunov(state.phases, state.time), hamiltonian(problem, round_phases(state))});
  };

  for (auto& p : state.phases) p = wrap_phase(p);
  if (stride > 0) record();
  for (long long k = 1; k <= steps; ++k) {
    if (!model.step(state, noise)) throw DivergenceError("non-finite phase", k);
    if (stride > 0 && (k % stride == 0 || k == steps)) record();
  }
  // Keep at most `points` samples after the thinning above.
  if (points > 0 && static_cast<long long>(result.trajectory.size()) > points) {
    std::vector<TracePoint> thinned;
    const auto size = result.trajectory.size();
    for (long long i = 0; i < points; ++i)
      thinned.push_back(result.trajectory[static_cast<std::size_t>(i * (size - 1) / std::max<long long>(1, points - 1))]);
    result.trajectory = std::move(thinned);
  }

  result.final_spins = round_phases(state);
  if (params.polish) greedy_descent(problem, result.final_spins);
  result.final_H = hamiltonian(problem, result.final_spins);
  if (total_weight) result.final_cut = cut_from_hamiltonian(result.final_H, *total_weight);
  result.final_phases = std::move(state.phases);
  result.wall_time = std::chrono::steady_clock::now() - start;
  return result;
}

inline RunResult simulate(const IsingProblem& problem, const DynamicsParams& params, std::uint64_t seed,
                          std::optional<double> total_weight = std::nullopt) {
  return simulate_from(problem, params, seed, random_phases(problem.n(), seed), total_weight);
}

}  // namespace oim
