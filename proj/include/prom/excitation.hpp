#pragma once

// Parametric load histories. Sample k of a history is the load at t = k dt.

#include "prom/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace prom {

template <typename Scalar = double>
struct LoadHistory {
  Scalar dt{};
  Mat<Scalar> samples;  ///< steps x dofs
  std::string generator;
  std::uint64_t seed = 0;

  Index steps() const { return samples.rows(); }
  Index dofs() const { return samples.cols(); }
};

template <typename Scalar = double>
struct QuakeParams {
  Scalar cutoff_hz{};
  Scalar amplitude{};
  Scalar duration_s{};
  Scalar total_sim_s{};
  std::uint64_t seed = 0;
};

template <typename Scalar>
LoadHistory<Scalar> sinusoid(Scalar freq_hz, Scalar amplitude, const Vec<Scalar>& pattern, Scalar dt,
                             Index steps) {
  require(dt > 0 && steps >= 1, "sinusoid needs dt > 0 and at least one step");
  require(freq_hz >= 0 && freq_hz < 1 / (2 * dt),
          "sinusoid frequency must lie below the Nyquist frequency 1/(2 dt)");
  LoadHistory<Scalar> h;
  h.dt = dt;
  h.generator = "sinusoid";
  h.samples.resize(steps, pattern.size());
  for (Index k = 0; k < steps; ++k) {
    const Scalar s = amplitude * std::sin(2 * std::numbers::pi_v<Scalar> * freq_hz * Scalar(k) * dt);
    h.samples.row(k) = s * pattern.transpose();
  }
  return h;
}

/// splitmix64 finalizer; derives independent stream seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t x = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Second-order section in direct form II transposed.
template <typename Scalar>
struct Biquad {
  Scalar b0, b1, b2, a1, a2;

  void run(std::vector<Scalar>& x) const {
    Scalar s1 = 0, s2 = 0;
    for (auto& v : x) {
      const Scalar y = b0 * v + s1;
      s1 = b1 * v - a1 * y + s2;
      s2 = b2 * v - a2 * y;
      v = y;
    }
  }
};

/// 4th-order Butterworth low-pass as two bilinear-transformed sections.
template <typename Scalar>
std::array<Biquad<Scalar>, 2> butterworth4_lowpass(Scalar cutoff_hz, Scalar fs) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar K = std::tan(pi * cutoff_hz / fs);
  std::array<Biquad<Scalar>, 2> out{};
  for (int k = 0; k < 2; ++k) {
    const Scalar theta = pi * Scalar(2 * k + 1) / Scalar(8);
    const Scalar q = 1 / (2 * std::cos(theta));
    const Scalar norm = 1 / (1 + K / q + K * K);
    auto& s = out[k];
    s.b0 = K * K * norm;
    s.b1 = 2 * s.b0;
    s.b2 = s.b0;
    s.a1 = 2 * (K * K - 1) * norm;
    s.a2 = (1 - K / q + K * K) * norm;
  }
  return out;
}

/// Zero-phase filtering: forward pass, reverse, forward pass, reverse, with
/// odd reflection padding at both ends to damp start-up transients.
template <typename Scalar>
std::vector<Scalar> filtfilt(const std::array<Biquad<Scalar>, 2>& sections, const std::vector<Scalar>& x) {
  const std::size_t n = x.size();
  const std::size_t pad = std::min<std::size_t>(n > 1 ? n - 1 : 0, 15);
  std::vector<Scalar> y;
  y.reserve(n + 2 * pad);
  for (std::size_t i = pad; i > 0; --i) y.push_back(2 * x.front() - x[i]);
  y.insert(y.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) y.push_back(2 * x.back() - x[n - 1 - i]);
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& s : sections) s.run(y);
    std::reverse(y.begin(), y.end());
  }
  return {y.begin() + static_cast<std::ptrdiff_t>(pad), y.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

/// Ground-acceleration record from seeded white noise: Butterworth low-pass
/// (zero phase), raised-cosine taper over the first and last 5% of the
/// excitation window, unit-variance normalization, scaling by the amplitude.
/// Applied as nodal forces -m_i a(t); identically zero after duration_s.
template <typename Scalar>
Vec<Scalar> quake_acceleration(const QuakeParams<Scalar>& p, Scalar dt, Index steps) {
  require(p.cutoff_hz > 0 && p.cutoff_hz < 1 / (2 * dt), "quake cutoff must lie in (0, Nyquist)");
  require(p.amplitude > 0, "quake amplitude must be positive");
  require(p.duration_s > 0 && p.duration_s <= p.total_sim_s, "quake duration must lie in (0, total_sim_s]");
  const Index active = std::min<Index>(steps, static_cast<Index>(std::floor(p.duration_s / dt + 1e-9)) + 1);

  std::mt19937_64 rng(p.seed);
  std::normal_distribution<Scalar> normal(0, 1);
  std::vector<Scalar> x(static_cast<std::size_t>(active));
  for (auto& v : x) v = normal(rng);
  x = filtfilt(butterworth4_lowpass(p.cutoff_hz, 1 / dt), x);

  const Index ramp = std::max<Index>(1, active / 20);
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  for (Index i = 0; i < ramp && i < active; ++i) {
    const Scalar w = Scalar(0.5) * (1 - std::cos(pi * Scalar(i) / Scalar(ramp)));
    x[static_cast<std::size_t>(i)] *= w;
    x[static_cast<std::size_t>(active - 1 - i)] *= w;
  }

  Scalar mean = 0, var = 0;
  for (Scalar v : x) mean += v;
  mean /= Scalar(active);
  for (Scalar v : x) var += (v - mean) * (v - mean);
  var /= Scalar(active);
  const Scalar scale = var > 0 ? p.amplitude / std::sqrt(var) : Scalar(0);

  Vec<Scalar> a = Vec<Scalar>::Zero(steps);
  for (Index i = 0; i < active; ++i) a(i) = scale * x[static_cast<std::size_t>(i)];
  return a;
}

template <typename Scalar>
LoadHistory<Scalar> filtered_noise_quake(const QuakeParams<Scalar>& p, const Vec<Scalar>& mass_diag,
                                         Scalar dt) {
  require(dt > 0, "time step must be positive");
  const Index steps = static_cast<Index>(std::floor(p.total_sim_s / dt + 1e-9)) + 1;
  const Vec<Scalar> a = quake_acceleration(p, dt, steps);
  LoadHistory<Scalar> h;
  h.dt = dt;
  h.generator = "filtered_noise_quake";
  h.seed = p.seed;
  h.samples = -a * mass_diag.transpose();
  return h;
}

}  // namespace prom
