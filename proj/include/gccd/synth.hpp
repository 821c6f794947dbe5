#pragma once

#include <cstdint>
#include <vector>

#include "gccd/types.hpp"

namespace gccd {

struct SynthResult {
  Signal signal;
  std::vector<int> annotations;  // true peak centers, 1-based
};

// Square pulses of the given amplitude riding on a zero baseline. Each
// full period block carries one pulse in its last `width` samples, so the
// final pulse ends flush at the last sample of the last full block.
struct PulseTrainParams {
  int n = 360;
  std::uint64_t seed = 1;
  double noise = 0.0;            // gaussian sigma
  double baseline_wander = 0.0;  // slow sinusoid amplitude
  double amplitude = 5.0;
  int period = 60;
  int width = 5;
  double rate = 360.0;
};

SynthResult synth_pulse_train(const PulseTrainParams& p);

// ECG-like beats: P bump, QRS spike with Q/S dips, T bump, plus gaussian
// noise and optional baseline wander. Amplitudes are in raw ADC-like units.
struct NoisyEcgParams {
  int n = 10800;
  std::uint64_t seed = 1;
  double noise = 5.0;
  double baseline_wander = 0.0;
  double amplitude = 200.0;  // R peak height
  int period = 300;
  double rate = 360.0;
};

SynthResult synth_noisy_ecg(const NoisyEcgParams& p);

}  // namespace gccd
