// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "vb/common/matrix.hpp"
#include "vb/signal/waveform.hpp"

namespace vb::signal {

/// Waveform quantised to `levels` classes after mu-law companding.
struct QuantizedWave {
  std::vector<int> levels;
  int num_levels = 1024;
  double mu = 1023.0;
  int sample_rate = 16000;
};

/// Compands to y in [-1, 1] then maps to floor((y + 1) / 2 * L), clamped to
/// L - 1, so x = 0 lands on level L/2. Samples outside [-1, 1] are clipped
/// and a warning is logged.
QuantizedWave mu_law_encode(const Waveform& wave, int num_levels = 1024, double mu = 1023.0);

/// Inverse companding of each level's bin centre. Throws InputError for
/// levels outside [0, L).
Waveform mu_law_decode(const QuantizedWave& q);

/// Scalar forms of the mapping above.
int mu_law_level(double x, int num_levels, double mu);
double mu_law_value(int level, int num_levels, double mu);
/// Amplitude interval [lo, hi) that encodes to `level`.
std::pair<double, double> mu_law_bin_edges(int level, int num_levels, double mu);

/// T x L one-hot rows.
Matrix one_hot(std::span<const int> classes, int num_classes);

}  // namespace vb::signal
