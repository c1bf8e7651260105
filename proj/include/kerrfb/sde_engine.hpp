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

#include "kerrfb/params.hpp"
#include "kerrfb/qubit.hpp"
#include "kerrfb/schedule.hpp"

namespace kerrfb {

struct FieldState {
  cplx alpha;
  cplx beta;
  double t = 0.0;
};

struct FieldDrift {
  cplx dalpha;
  cplx dbeta;
};

// Deterministic right-hand sides of the coupled Kerr-resonator / cavity
// equations:
//   da/dt = -i D_a a - i K |a|^2 a - (k_a + k_d)/2 a
//           + sqrt(k_a k_b) b e^{i(th_b - th_a)} - sqrt(k_a) a_in e^{-i th_a}
//           - sqrt(k_d) a_d
//   db/dt = -i D_b b - i chi sz b - (k_b + k_p)/2 b
//           + sqrt(k_a k_b) a e^{i(th_a - th_b)} - sqrt(k_b) a_in e^{-i th_b}
//           - sqrt(k_p) a_p
FieldDrift drift(const FieldState& s, const Controls& c, double sz,
                 const SystemParams& p);

// sqrt(rate_sum (n_bar + 1/2) / 2) (dW1 + i dW2) with dW ~ N(0, dt).
cplx noise_increment(Rng& rng, double rate_sum, double n_bar, double dt);

// Vacuum Wigner sample for both modes: Var(Re) = Var(Im) = 1/4.
FieldState sample_initial_state(Rng& rng);

// Precomputed coefficients for repeated Euler-Maruyama steps.
class FieldIntegrator {
 public:
  FieldIntegrator(const SystemParams& p, bool noise);

  FieldDrift drift(const FieldState& s, const Controls& c, double sz) const;
  // Advances one step; throws NumericalBlowup if the state stops being finite.
  void step(FieldState& s, const Controls& c, double sz, Rng& rng) const;

  double dt() const { return dt_; }
  bool noisy() const { return noise_; }

 private:
  const SystemParams* p_;
  bool noise_;
  double dt_;
  double half_kappa_a_, half_kappa_b_;
  double sqrt_ka_, sqrt_kd_, sqrt_kb_, sqrt_kp_;
  cplx couple_ab_, couple_ba_, in_phase_a_, in_phase_b_;
  double sigma_a_, sigma_b_;
};

// Field plus qubit state of one trajectory.
struct TrajectoryState {
  FieldState field;
  QubitState qubit;
};

// One joint step: the qubit sees the photon number at the step start, the
// fields see the qubit's normalised <sigma_z> at the step start.
void advance(TrajectoryState& s, const Controls& c, const FieldIntegrator& fi,
             const SystemParams& p, Rng& rng);

}  // namespace kerrfb
