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

#include "kerrfb/sde_engine.hpp"

#include <cmath>

#include "kerrfb/error.hpp"

namespace kerrfb {

FieldDrift drift(const FieldState& s, const Controls& c, double sz,
                 const SystemParams& p) {
  return FieldIntegrator(p, false).drift(s, c, sz);
}

cplx noise_increment(Rng& rng, double rate_sum, double n_bar, double dt) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(dt));
  const double amp = std::sqrt(0.5 * rate_sum * (n_bar + 0.5));
  const double w1 = gauss(rng);
  const double w2 = gauss(rng);
  return amp * cplx(w1, w2);
}

FieldState sample_initial_state(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 0.5);
  FieldState s;
  const double ar = gauss(rng), ai = gauss(rng);
  const double br = gauss(rng), bi = gauss(rng);
  s.alpha = cplx(ar, ai);
  s.beta = cplx(br, bi);
  return s;
}

FieldIntegrator::FieldIntegrator(const SystemParams& p, bool noise)
    : p_(&p), noise_(noise), dt_(p.noise.dt) {
  const auto& k = p.kerr;
  const auto& b = p.cavity;
  half_kappa_a_ = 0.5 * (k.kappa_a + k.kappa_d);
  half_kappa_b_ = 0.5 * (b.kappa_b + b.kappa_p);
  sqrt_ka_ = std::sqrt(k.kappa_a);
  sqrt_kd_ = std::sqrt(k.kappa_d);
  sqrt_kb_ = std::sqrt(b.kappa_b);
  sqrt_kp_ = std::sqrt(b.kappa_p);
  const double c = std::sqrt(k.kappa_a * b.kappa_b);
  couple_ab_ = std::polar(c, b.theta_b - k.theta_a);
  couple_ba_ = std::polar(c, k.theta_a - b.theta_b);
  in_phase_a_ = std::polar(sqrt_ka_, -k.theta_a);
  in_phase_b_ = std::polar(sqrt_kb_, -b.theta_b);
  const double nb = p.noise.n_bar + 0.5;
  sigma_a_ = std::sqrt(0.5 * (k.kappa_a + k.kappa_d) * nb * dt_);
  sigma_b_ = std::sqrt(0.5 * (b.kappa_b + b.kappa_p) * nb * dt_);
}

FieldDrift FieldIntegrator::drift(const FieldState& s, const Controls& c,
                                  double sz) const {
  constexpr cplx I(0.0, 1.0);
  const double na = std::norm(s.alpha);
  double chi = p_->cavity.chi;
  if (p_->chi_correction)
    chi = effective_chi(
        *p_, std::norm(s.beta) - (noise_ ? p_->stark_vacuum_offset : 0.0));
  FieldDrift d;
  d.dalpha = -I * (c.delta_a + p_->kerr.K * na) * s.alpha -
             half_kappa_a_ * s.alpha + couple_ab_ * s.beta -
             in_phase_a_ * c.alpha_in - sqrt_kd_ * c.alpha_d;
  d.dbeta = -I * (c.delta_b + chi * sz) * s.beta - half_kappa_b_ * s.beta +
            couple_ba_ * s.alpha - in_phase_b_ * c.alpha_in -
            sqrt_kp_ * c.alpha_p;
  return d;
}

void FieldIntegrator::step(FieldState& s, const Controls& c, double sz,
                           Rng& rng) const {
  const auto d = drift(s, c, sz);
  s.alpha += d.dalpha * dt_;
  s.beta += d.dbeta * dt_;
  if (noise_) {
    std::normal_distribution<double> unit(0.0, 1.0);
    const double a1 = unit(rng), a2 = unit(rng);
    const double b1 = unit(rng), b2 = unit(rng);
    s.alpha += sigma_a_ * cplx(a1, a2);
    s.beta += sigma_b_ * cplx(b1, b2);
  }
  s.t += dt_;
  const double mag = std::norm(s.alpha) + std::norm(s.beta);
  if (!std::isfinite(mag) || mag > 1e12)
    throw NumericalBlowup("field amplitudes diverged", s.t);
}

void advance(TrajectoryState& s, const Controls& c, const FieldIntegrator& fi,
             const SystemParams& p, Rng& rng) {
  const double sz = expectation_sz(s.qubit);
  const double offset = fi.noisy() ? p.stark_vacuum_offset : 0.0;
  const double n_b = std::norm(s.field.beta) - offset;
  fi.step(s.field, c, sz, rng);
  qubit_step(s.qubit, n_b, c.omega_d, 0.0, p, fi.dt());
  maybe_jump(s.qubit, rng);
}

}  // namespace kerrfb
