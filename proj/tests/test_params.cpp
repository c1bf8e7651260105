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

#include "doctest.h"
#include "kerrfb/config.hpp"
#include "kerrfb/error.hpp"
#include "kerrfb/params.hpp"

using namespace kerrfb;

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

TEST_CASE("dispersive shift from the transmon formula") {
  const double g = two_pi * 122e6, d = two_pi * 1200e6, ec = two_pi * 300e6;
  const double chi = derive_dispersive_shift(g, d, ec);
  // g^2 Ec / (Delta (Delta - Ec)), evaluated by hand in MHz units.
  const double expect = two_pi * (122.0 * 122.0 * 300.0 / (1200.0 * 900.0)) * 1e6;
  CHECK(std::abs(chi) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(quoted_dispersive_shift() == doctest::Approx(-two_pi * 2.5e6));
  CHECK_THROWS_AS(derive_dispersive_shift(g, 0.0, ec), DegenerateDetuning);
  CHECK_THROWS_AS(derive_dispersive_shift(g, ec, ec), DegenerateDetuning);
}

TEST_CASE("Purcell rate and critical photon number") {
  const double kb = two_pi * 1e6, g = two_pi * 122e6, d = two_pi * 1200e6;
  CHECK(derive_purcell_rate(kb, g, d) == doctest::Approx(kb * (122.0 / 1200.0) * (122.0 / 1200.0)));
  CHECK(derive_ncrit(d, g) == doctest::Approx((1200.0 / 244.0) * (1200.0 / 244.0)));
  CHECK_THROWS_AS(derive_purcell_rate(kb, g, 0.0), DegenerateDetuning);
  CHECK_THROWS_AS(derive_ncrit(d, 0.0), DegenerateCoupling);
}

TEST_CASE("defaults load into SI units") {
  const auto p = load_and_validate(default_config());
  CHECK(p.kerr.K == doctest::Approx(-two_pi * 0.4e6));
  CHECK(p.kerr.kappa_a == doctest::Approx(two_pi * 5e6));
  CHECK(p.kerr.delta_a0 == doctest::Approx(3.5 * two_pi * 5.3e6));
  CHECK(p.cavity.chi == doctest::Approx(-two_pi * 2.5e6));
  CHECK(p.noise.dt == doctest::Approx(0.05e-9));
  CHECK(p.derived.delta_ac == doctest::Approx(std::sqrt(0.75) * two_pi * 5.3e6));
  // Intrinsic 5 kHz plus Purcell decay gives a lifetime close to 10 us.
  CHECK(p.derived.gamma_total == doctest::Approx(two_pi * 15.3e3).epsilon(0.01));
  CHECK(1.0 / p.derived.gamma_total == doctest::Approx(10.4e-6).epsilon(0.01));
}

TEST_CASE("t1 override and switch-off") {
  auto doc = default_config();
  doc.set("system", "t1_us", "30");
  CHECK(load_and_validate(doc).derived.gamma_total == doctest::Approx(1.0 / 30e-6));
  doc.set("system", "t1_us", "off");
  CHECK(load_and_validate(doc).derived.gamma_total == 0.0);
  doc.set("system", "t1_us", "-3");
  CHECK_THROWS_AS(load_and_validate(doc), ConfigError);
}

TEST_CASE("missing keys are all reported at once") {
  KeyValueDoc doc;
  doc.set("system", "K_MHz", "-0.4");
  try {
    load_and_validate(doc);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("kappa_a_MHz") != std::string::npos);
    CHECK(msg.find("master_seed") != std::string::npos);
  }
}

TEST_CASE("invalid values name the offending field") {
  auto doc = default_config();
  doc.set("system", "kappa_a_MHz", "-5");
  try {
    load_and_validate(doc);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("kappa_a must be positive") != std::string::npos);
    CHECK(e.key() == "kappa_a_MHz");
  }
  auto doc2 = default_config();
  doc2.set("system", "unknown_thing", "1");
  CHECK_THROWS_AS(load_and_validate(doc2), ConfigError);
  auto doc3 = default_config();
  doc3.set("system", "dt_ns", "0");
  CHECK_THROWS_AS(load_and_validate(doc3), ConfigError);
}

TEST_CASE("store_system round-trips every field") {
  auto doc = default_config();
  doc.set("system", "t1_us", "12.5");
  doc.set("system", "chi_correction", "on");
  const auto p = load_and_validate(doc);
  KeyValueDoc out = default_config();
  store_system(p, out);
  const auto q = load_and_validate(out);
  CHECK(q.kerr.K == doctest::Approx(p.kerr.K).epsilon(1e-14));
  CHECK(q.kerr.kappa_d == doctest::Approx(p.kerr.kappa_d).epsilon(1e-14));
  CHECK(q.kerr.delta_a0 == doctest::Approx(p.kerr.delta_a0).epsilon(1e-14));
  CHECK(q.cavity.chi == doctest::Approx(p.cavity.chi).epsilon(1e-14));
  CHECK(q.derived.gamma_total == doctest::Approx(p.derived.gamma_total).epsilon(1e-14));
  CHECK(q.chi_correction);
  CHECK(q.noise.master_seed == p.noise.master_seed);
}
