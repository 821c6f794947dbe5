#include "gccd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace gccd {
namespace {

constexpr double kTau = 6.283185307179586;

void add_noise_and_wander(Signal& s, std::uint64_t seed, double noise,
                          double wander) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = s.n();
  for (int i = 0; i < n; ++i) {
    double v = s.samples[i];
    if (wander != 0.0)
      v += wander * std::sin(kTau * i / (s.rate * 3.0));  // ~0.33 Hz drift
    if (noise != 0.0) v += noise * gauss(rng);
    s.samples[i] = v;
  }
}

// Rounded bump centered at c.
double gauss_bump(int i, int c, double height, double width) {
  const double d = (i - c) / width;
  return height * std::exp(-0.5 * d * d);
}

}  // namespace

SynthResult synth_pulse_train(const PulseTrainParams& p) {
  if (p.n < 10) throw std::invalid_argument("synth: n must be >= 10");
  if (p.period < p.width + 1 || p.width < 1)
    throw std::invalid_argument("synth: period must exceed pulse width");

  SynthResult out;
  out.signal.rate = p.rate;
  out.signal.id = "pulse-train-seed" + std::to_string(p.seed);
  out.signal.samples.assign(p.n, 0.0);

  const int blocks = p.n / p.period;
  for (int k = 0; k < blocks; ++k) {
    const int end = (k + 1) * p.period;          // 1-based last pulse sample
    const int start = end - p.width + 1;
    for (int i = start; i <= end; ++i) out.signal.samples[i - 1] = p.amplitude;
    out.annotations.push_back((start + end) / 2);
  }
  add_noise_and_wander(out.signal, p.seed, p.noise, p.baseline_wander);
  return out;
}

SynthResult synth_noisy_ecg(const NoisyEcgParams& p) {
  if (p.n < 10) throw std::invalid_argument("synth: n must be >= 10");
  if (p.period < 120)
    throw std::invalid_argument("synth: beat period must be >= 120 samples");

  SynthResult out;
  out.signal.rate = p.rate;
  out.signal.id = "noisy-ecg-seed" + std::to_string(p.seed);
  out.signal.samples.assign(p.n, 0.0);

  const double a = p.amplitude;
  for (int c = p.period / 2; c + p.period / 4 <= p.n; c += p.period) {
    for (int i = std::max(1, c - p.period / 2); i <= std::min(p.n, c + p.period / 2); ++i) {
      double v = 0.0;
      v += gauss_bump(i, c - 50, 0.12 * a, 8.0);   // P
      v -= gauss_bump(i, c - 5, 0.15 * a, 2.0);    // Q
      v += gauss_bump(i, c, a, 2.5);               // R
      v -= gauss_bump(i, c + 5, 0.20 * a, 2.5);    // S
      v += gauss_bump(i, c + 45, 0.25 * a, 12.0);  // T
      out.signal.samples[i - 1] += v;
    }
    out.annotations.push_back(c);
  }
  add_noise_and_wander(out.signal, p.seed, p.noise, p.baseline_wander);
  return out;
}

}  // namespace gccd
