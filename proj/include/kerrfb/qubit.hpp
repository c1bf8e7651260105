// Copyright 2026 The kerrfb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include "kerrfb/params.hpp"

namespace kerrfb {

using cplx = std::complex<double>;
using Rng = std::mt19937_64;

// Two-level qubit amplitudes, unnormalised between jumps. A jump fires when
// the squared norm falls below r_threshold.
struct QubitState {
  cplx c0{1.0, 0.0};
  cplx c1{0.0, 0.0};
  double norm_sq = 1.0;
  double r_threshold = 0.5;
  std::uint32_t jumps = 0;
};

QubitState make_qubit(bool excited, Rng& rng);

// Dispersive shift at photon number n_b, including the optional
// high-photon-number reduction.
double effective_chi(const SystemParams& p, double n_b);

// Advances the amplitudes under
//   H = (delta_pulse + 2 chi n_b)/2 sigma_z + omega sigma_+ + conj(omega) sigma_-
//       - i gamma/2 |1><1|
// with the exact 2x2 propagator for a step of length dt.
void qubit_step(QubitState& q, double n_b, cplx omega, double delta_pulse,
                const SystemParams& p, double dt);

// Applies sigma_- and draws a fresh threshold when the norm has decayed below
// it. Returns true on a jump.
bool maybe_jump(QubitState& q, Rng& rng);

double expectation_sz(const QubitState& q);

// Projective readout: collapses a superposition onto |0> or |1> with the Born
// probabilities and draws a fresh jump threshold. Eigenstates are left
// untouched and consume no random numbers. Returns true if a collapse happened.
bool project_qubit(QubitState& q, Rng& rng);

}  // namespace kerrfb
