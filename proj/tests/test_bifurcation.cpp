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


#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "kerrfb/bifurcation.hpp"
#include "kerrfb/error.hpp"
#include "oracles.hpp"

using namespace kerrfb;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct Draw {
  double kappa_a, kappa_d, delta, K;
};

Draw random_bistable(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Draw d;
  d.kappa_a = two_pi * 1e6 * (0.5 + 10.0 * u(rng));
  d.kappa_d = two_pi * 1e6 * (0.05 + 2.0 * u(rng));
  const double dac = critical_detuning(d.kappa_a, d.kappa_d);
  d.delta = dac * (1.05 + 5.0 * u(rng));
  d.K = -two_pi * 1e6 * (0.01 + 2.0 * u(rng));
  if (u(rng) < 0.5) {
    d.delta = -d.delta;
    d.K = -d.K;
  }
  return d;
}

}  // namespace

TEST_CASE("critical detuning is sqrt(3)/2 of the total linewidth") {
  CHECK(critical_detuning(2.0, 1.0) == doctest::Approx(std::sqrt(0.75) * 3.0).epsilon(1e-15));
  CHECK(critical_detuning(two_pi * 5e6, two_pi * 0.3e6) ==
        doctest::Approx(std::sqrt(3.0) / 2.0 * two_pi * 5.3e6).epsilon(1e-15));
}

TEST_CASE("no bistability below the critical detuning or with matching signs") {
  const double ka = 1.0, kd = 0.5;
  const double dac = critical_detuning(ka, kd);
  CHECK_THROWS_AS(critical_photon_numbers(0.9 * dac, -0.01, ka, kd), NoBistability);
  CHECK_THROWS_AS(critical_photon_numbers(2.0 * dac, 0.01, ka, kd), NoBistability);
  CHECK_THROWS_AS(critical_photon_numbers(2.0 * dac, 0.0, ka, kd), NoBistability);
  try {
    critical_photon_numbers(dac, -0.01, ka, kd);
    FAIL("expected NoBistability at the cusp");
  } catch (const NoBistability& e) {
    REQUIRE(e.inflection_photon_number().has_value());
    CHECK(*e.inflection_photon_number() == doctest::Approx(-2.0 * dac / (3.0 * -0.01)));
  }
  CHECK_NOTHROW(critical_photon_numbers(1.01 * dac, -0.01, ka, kd));
}

TEST_CASE("critical photon numbers are the stationary points of P(n)") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto d = random_bistable(rng);
    const auto c = critical_photon_numbers(d.delta, d.K, d.kappa_a, d.kappa_d);
    const double kappa = d.kappa_a + d.kappa_d;
    auto dP = [&](double n) {
      return 3.0 * d.K * d.K * n * n + 4.0 * d.delta * d.K * n + d.delta * d.delta +
             0.25 * kappa * kappa;
    };
    const double scale = d.delta * d.delta + 0.25 * kappa * kappa;
    CHECK(std::abs(dP(c.n_c_minus)) < 1e-9 * scale);
    CHECK(std::abs(dP(c.n_c_plus)) < 1e-9 * scale);
    CHECK(c.n_c_minus < c.n_c_plus);
    CHECK(c.drive_power_minus < c.drive_power_plus);
    CHECK(c.drive_power_plus ==
          doctest::Approx(drive_power_for(c.n_c_minus, d.delta, d.K, d.kappa_a, d.kappa_d)));
  }
}

TEST_CASE("property: three roots exactly inside the critical window") {
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bistable_seen = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto d = random_bistable(rng);
    const double kappa = d.kappa_a + d.kappa_d;
    const auto c = critical_photon_numbers(d.delta, d.K, d.kappa_a, d.kappa_d);
    const double lo = c.drive_power_minus, hi = c.drive_power_plus;
    // Draw powers below, inside and above the window, away from the folds.
    const double choices[3] = {lo * (0.02 + 0.97 * u(rng)),
                               lo + (hi - lo) * (0.001 + 0.998 * u(rng)),
                               hi * (1.001 + 3.0 * u(rng))};
    for (double P : choices) {
      const auto s = steady_states(P, d.delta, d.K, d.kappa_a, d.kappa_d);
      const bool inside = P > lo && P < hi;
      CHECK((s.roots.size() == 3) == inside);
      CHECK((s.regime == Regime::bistable) == inside);
      const auto ref = oracle::kerr_steady_states(P, d.delta, d.K, kappa);
      REQUIRE(ref.size() == s.roots.size());
      for (std::size_t k = 0; k < ref.size(); ++k) {
        CHECK(s.roots[k] == doctest::Approx(ref[k]).epsilon(1e-7));
        CHECK(oracle::kerr_residual(s.roots[k], P, d.delta, d.K, kappa) < 1e-9);
      }
      if (inside) {
        ++bistable_seen;
        CHECK(s.stable == std::vector<bool>{true, false, true});
      }
    }
  }
  CHECK(bistable_seen == 1000);
}

TEST_CASE("monostable regimes are labelled by branch") {
  const double ka = 1.0, kd = 0.3, delta = 3.0, K = -0.01;
  const auto c = critical_photon_numbers(delta, K, ka, kd);
  CHECK(steady_states(0.5 * c.drive_power_minus, delta, K, ka, kd).regime ==
        Regime::monostable_low);
  CHECK(steady_states(2.0 * c.drive_power_plus, delta, K, ka, kd).regime ==
        Regime::monostable_high);
  CHECK(std::string(regime_name(Regime::bistable)) == "bistable");
}

TEST_CASE("linear resonator has a single Lorentzian root") {
  const auto s = steady_states(10.0, 2.0, 0.0, 1.0, 1.0);
  REQUIRE(s.roots.size() == 1);
  CHECK(s.roots[0] == doctest::Approx(10.0 / (4.0 + 1.0)));
  CHECK(steady_states(0.0, 2.0, -0.1, 1.0, 1.0).roots == std::vector<double>{0.0});
}

TEST_CASE("hysteresis sweep jumps at the folds") {
  const double ka = 1.0, kd = 0.3, delta = 3.5 * 1.3, K = -0.02;
  const auto c = critical_photon_numbers(delta, K, ka, kd);
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(1.5 * c.drive_power_plus * i / 400.0);
  const auto h = hysteresis_sweep(delta, K, ka, kd, grid);
  CHECK(h.bistable);
  CHECK(h.up_jump_drive == doctest::Approx(c.drive_power_plus).epsilon(1e-6));
  CHECK(h.down_jump_drive == doctest::Approx(c.drive_power_minus).epsilon(1e-6));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(h.n_up[i] <= h.n_down[i] + 1e-9);
    if (grid[i] < c.drive_power_minus || grid[i] > c.drive_power_plus)
      CHECK(h.n_up[i] == doctest::Approx(h.n_down[i]));
  }
  CHECK_THROWS_AS(hysteresis_sweep(delta, K, ka, kd, {1.0, 0.5}), Error);

  std::istringstream csv(hysteresis_csv(h));
  std::string header;
  std::getline(csv, header);
  CHECK(header == "drive_power,n_up,n_down,n_roots,regime");
}

TEST_CASE("default latch threshold sits between the branches") {
  const double ka = two_pi * 5e6, kd = two_pi * 0.3e6;
  const double delta = 3.5 * (ka + kd), K = -two_pi * 0.4e6;
  const auto c = critical_photon_numbers(delta, K, ka, kd);
  const double thr = default_latch_threshold(delta, K, ka, kd);
  CHECK(thr > 0.0);
  CHECK(thr < c.n_c_plus);
  CHECK(thr == doctest::Approx(12.51).epsilon(0.01));
}
