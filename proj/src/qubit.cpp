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

#include "kerrfb/qubit.hpp"

#include <cmath>

#include "kerrfb/error.hpp"

namespace kerrfb {
namespace {

double draw_threshold(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double r = u(rng);
  while (r <= 0.0) r = u(rng);
  return r;
}

}  // namespace

QubitState make_qubit(bool excited, Rng& rng) {
  QubitState q;
  if (excited) {
    q.c0 = 0.0;
    q.c1 = 1.0;
  }
  q.r_threshold = draw_threshold(rng);
  return q;
}

double effective_chi(const SystemParams& p, double n_b) {
  if (!p.chi_correction) return p.cavity.chi;
  const double n = n_b > 0.0 ? n_b : 0.0;
  return p.cavity.chi / (1.0 + n / (2.0 * p.derived.n_crit));
}

void qubit_step(QubitState& q, double n_b, cplx omega, double delta_pulse,
                const SystemParams& p, double dt) {
  const double w = delta_pulse + 2.0 * effective_chi(p, n_b) * n_b;
  const double gamma = p.derived.gamma_total;
  constexpr cplx I(0.0, 1.0);
  if (omega == cplx(0.0)) {
    q.c0 *= std::polar(1.0, 0.5 * w * dt);
    q.c1 *= std::polar(std::exp(-0.5 * gamma * dt), -0.5 * w * dt);
  } else {
    const cplx m00 = 0.5 * I * w;
    const cplx m11 = -0.5 * I * w - 0.5 * gamma;
    const cplx m01 = -I * std::conj(omega);
    const cplx m10 = -I * omega;
    const cplx m0 = 0.5 * (m00 + m11);
    const cplx a = 0.5 * (m00 - m11);
    const cplx qq = std::sqrt(a * a + m01 * m10);
    const cplx ch = std::cosh(qq * dt);
    const cplx sh = std::abs(qq) > 1e-300 ? std::sinh(qq * dt) / qq : cplx(dt);
    const cplx e = std::exp(m0 * dt);
    const cplx n0 = e * ((ch + sh * a) * q.c0 + sh * m01 * q.c1);
    const cplx n1 = e * (sh * m10 * q.c0 + (ch - sh * a) * q.c1);
    q.c0 = n0;
    q.c1 = n1;
  }
  q.norm_sq = std::norm(q.c0) + std::norm(q.c1);
}

bool maybe_jump(QubitState& q, Rng& rng) {
  if (q.norm_sq >= q.r_threshold) return false;
  q.c0 = 1.0;
  q.c1 = 0.0;
  q.norm_sq = 1.0;
  q.r_threshold = draw_threshold(rng);
  ++q.jumps;
  return true;
}

bool project_qubit(QubitState& q, Rng& rng) {
  const double n0 = std::norm(q.c0);
  const double n1 = std::norm(q.c1);
  if (n0 == 0.0 || n1 == 0.0) return false;
  const bool excited = draw_threshold(rng) * (n0 + n1) < n1;
  q.c0 = excited ? 0.0 : 1.0;
  q.c1 = excited ? 1.0 : 0.0;
  q.norm_sq = 1.0;
  q.r_threshold = draw_threshold(rng);
  return true;
}

double expectation_sz(const QubitState& q) {
  const double n = std::norm(q.c0) + std::norm(q.c1);
  if (!(n > 0.0)) throw InvalidState("qubit state has zero norm");
  return (std::norm(q.c1) - std::norm(q.c0)) / n;
}

}  // namespace kerrfb
