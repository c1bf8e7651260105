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
#include "kerrfb/bifurcation.hpp"
#include "kerrfb/ensemble.hpp"
#include "kerrfb/error.hpp"
#include "kerrfb/params.hpp"
#include "kerrfb/protocol.hpp"

using namespace kerrfb;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct Setup {
  SystemParams p;
  ProtocolParams pp;
};

const Setup& calibrated() {
  static const Setup s = [] {
    auto doc = default_config();
    doc.set("system", "t1_us", "off");
    Setup out;
    out.p = load_and_validate(doc);
    out.pp = resolve_protocol(out.p, load_protocol(doc));
    return out;
  }();
  return s;
}

std::vector<std::string> names(const Schedule& s) {
  std::vector<std::string> out;
  for (const auto& seg : s.segments()) out.push_back(seg.name);
  return out;
}

}  // namespace

TEST_CASE("protocol defaults load and round-trip") {
  const auto doc = default_config();
  const auto pp = load_protocol(doc);
  CHECK(pp.T_M == doctest::Approx(400e-9));
  CHECK(pp.T_pi == doctest::Approx(35.7e-9));
  CHECK(pp.delta_t == doctest::Approx(two_pi * 30e6));
  CHECK(pp.omega_pi == doctest::Approx(two_pi * 7e6));
  CHECK(pp.purcell_drive == doctest::Approx(two_pi * 8e6));
  CHECK_FALSE(pp.alpha_d_meas.has_value());
  CHECK_FALSE(pp.alpha_in_over_sqrt_ka.has_value());
  CHECK(pp.alpha_d_phase == doctest::Approx(std::numbers::pi));

  auto resolved = calibrated().pp;
  KeyValueDoc out = default_config();
  store_protocol(resolved, out);
  const auto back = load_protocol(out);
  CHECK(back.alpha_d_meas.value() == resolved.alpha_d_meas.value());
  CHECK(back.alpha_in_over_sqrt_ka.value() == resolved.alpha_in_over_sqrt_ka.value());
  CHECK(back.T_reset == doctest::Approx(resolved.T_reset).epsilon(1e-14));
}

TEST_CASE("protocol loading rejects inconsistent input") {
  auto d1 = default_config();
  d1.set("protocol", "stab_drive_factor", "1");
  CHECK_THROWS_AS(load_protocol(d1), ConfigError);
  auto d2 = default_config();
  d2.set("protocol", "alpha_in_over_sqrt_ka_re", "0.5");
  CHECK_THROWS_AS(load_protocol(d2), ConfigError);
  auto d3 = default_config();
  d3.set("protocol", "T_M_ns", "-1");
  CHECK_THROWS_AS(load_protocol(d3), ConfigError);
  auto d4 = default_config();
  d4.set("protocol", "surprise", "1");
  CHECK_THROWS_AS(load_protocol(d4), ConfigError);
}

TEST_CASE("state preparation timeline") {
  const auto& c = calibrated();
  const auto s = build_state_prep(c.p, c.pp);
  CHECK(names(s) == std::vector<std::string>{"measure_ramp", "measure", "stabilize", "detune",
                                             "wait", "retune", "dwell", "pi_pulse"});
  CHECK(s.total_duration() == doctest::Approx(825.7e-9).epsilon(1e-12));

  const auto& seg = s.segments();
  const double A = *c.pp.alpha_d_meas * std::sqrt(c.p.kerr.kappa_d);
  CHECK(seg[0].alpha_d_mag.start == 0.0);
  CHECK(seg[0].alpha_d_mag.end == doctest::Approx(A));
  CHECK(seg[0].alpha_p.start == cplx(0.0, two_pi * 8e6 / std::sqrt(c.p.cavity.kappa_p)));
  CHECK(seg[0].delta_a.start == doctest::Approx(3.5 * c.p.kerr.kappa_sum()));
  CHECK(seg[2].alpha_d_mag.end == doctest::Approx(1.8 * A));
  CHECK(seg[2].delta_a.end == doctest::Approx(1.7 * 3.5 * c.p.kerr.kappa_sum()));
  // Park detuning ramps continuously across stabilize and detune.
  CHECK(seg[2].delta_b.end == doctest::Approx(-c.pp.delta_t * 150.0 / 250.0));
  CHECK(seg[3].delta_b.start == seg[2].delta_b.end);
  CHECK(seg[3].delta_b.end == doctest::Approx(-c.pp.delta_t));
  CHECK(seg[2].alpha_p.start == cplx(0.0));
  CHECK(seg[5].delta_b.end == 0.0);
  CHECK(seg[5].alpha_in.end == seg[6].alpha_in.start);
  CHECK(seg[7].omega_d.start == cplx(two_pi * 7e6, 0.0));
  CHECK(std::abs(seg[7].alpha_in.start) > 0.0);
}

TEST_CASE("schedules are pure data") {
  const auto& c = calibrated();
  CHECK(build_state_prep(c.p, c.pp) == build_state_prep(c.p, c.pp));
  CHECK(build_memory(c.p, c.pp, c.pp.T_wait, false) == build_state_prep(c.p, c.pp));
}

TEST_CASE("stabilization repeats the preparation cycle") {
  const auto& c = calibrated();
  CHECK(build_stabilization(c.p, c.pp, 1) == build_state_prep(c.p, c.pp));
  CHECK_THROWS_AS(build_stabilization(c.p, c.pp, 0), ScheduleError);
  const auto s = build_stabilization(c.p, c.pp, 20);
  CHECK(s.total_duration() == doctest::Approx(20 * 825.7e-9 + 19 * c.pp.T_reset));
  auto back_to_back = c.pp;
  back_to_back.T_reset = 0.0;
  CHECK(build_stabilization(c.p, back_to_back, 20).total_duration() ==
        doctest::Approx(20 * 825.7e-9));
}

TEST_CASE("memory schedule inserts the unconditional pulse before retuning") {
  const auto& c = calibrated();
  const double w = wait_for_retune_at(c.pp, 78e-6);
  const auto s = build_memory(c.p, c.pp, w, true);
  const auto n = names(s);
  CHECK(n == std::vector<std::string>{"measure_ramp", "measure", "stabilize", "detune", "wait",
                                      "pre_pi", "retune", "dwell", "pi_pulse"});
  double t = 0.0;
  for (const auto& seg : s.segments()) {
    if (seg.name == "retune") break;
    t += seg.duration;
  }
  CHECK(t == doctest::Approx(78e-6));
  const auto short_run = build_memory(c.p, c.pp, 5e-6, true);
  CHECK(names(short_run) == n);
  CHECK_THROWS_AS(build_memory(c.p, c.pp, 0.0, true), ScheduleError);
  CHECK_THROWS_AS(wait_for_retune_at(c.pp, 500e-9), ScheduleError);
}

TEST_CASE("tuning-rate bound") {
  const auto& c = calibrated();
  const auto s = build_state_prep(c.p, c.pp);
  CHECK_NOTHROW(check_tuning_rate(s, c.p, 2.0));
  CHECK_THROWS_AS(check_tuning_rate(s, c.p, 1.0), ScheduleError);
  auto fast = c.pp;
  fast.T_delta = 10e-9;
  CHECK_THROWS_AS(build_state_prep(c.p, fast), ScheduleError);
}

TEST_CASE("network threshold discriminates the qubit states") {
  const auto& c = calibrated();
  const auto t = calibrate_network_threshold(c.p, c.pp);
  CHECK(t.alpha_d_low < t.alpha_d_high);
  CHECK(t.plateau == doctest::Approx(t.alpha_d_low + 0.12 * (t.alpha_d_high - t.alpha_d_low)));
  CHECK(*c.pp.alpha_d_meas == doctest::Approx(t.plateau));

  auto blind = c.p;
  blind.cavity.chi = 0.0;
  CHECK_THROWS_AS(calibrate_network_threshold(blind, c.pp), CalibrationFailed);
}

TEST_CASE("isolated resonator folds match the analytic critical drives") {
  auto doc = default_config();
  doc.set("system", "kappa_b_MHz", "0");
  doc.set("system", "kappa_p_MHz", "0");
  doc.set("protocol", "purcell_drive_MHz", "0");
  auto p = load_and_validate(doc);
  p.kerr.delta_a0 = 1.75 * p.derived.delta_ac;
  p.kerr.K = -0.012 * p.kerr.delta_a0;
  const auto pp = load_protocol(doc);
  const auto cp = critical_photon_numbers(p.kerr.delta_a0, p.kerr.K, p.kerr.kappa_a,
                                          p.kerr.kappa_d);
  const auto f = network_fold_drives(p, pp, 1.0, 3e-6);
  CHECK(f.up == doctest::Approx(std::sqrt(cp.drive_power_plus) / p.kerr.kappa_d).epsilon(0.02));
  CHECK(f.down == doctest::Approx(std::sqrt(cp.drive_power_minus) / p.kerr.kappa_d).epsilon(0.02));
}

TEST_CASE("cancellation drive empties the cavity for the |0> memory") {
  const auto& c = calibrated();
  const auto x = *c.pp.alpha_in_over_sqrt_ka;
  CHECK(std::abs(x) > 0.0);
  const auto s = build_state_prep(c.p, c.pp);
  const auto rows = record_trajectory(s, c.p, false, 1, false, 1, "");
  const double t_pulse = s.total_duration() - c.pp.T_pi;
  double worst = 0.0;
  for (const auto& r : rows)
    if (r.t >= t_pulse - 1e-12) worst = std::max(worst, std::norm(r.beta));
  CHECK(worst < 0.5);

  auto off = c.pp;
  off.alpha_d_meas = 0.0;
  off.purcell_drive = 0.0;
  CHECK(std::abs(calibrate_alpha_in(c.p, off)) == 0.0);
}

TEST_CASE("parked latched states do not decay over 10 us") {
  const auto& c = calibrated();
  auto pp = c.pp;
  const auto s = build_memory(c.p, pp, 10e-6, false);
  double wait_start = 0.0, wait_end = 0.0;
  for (const auto& seg : s.segments()) {
    if (seg.name == "wait") {
      wait_end = wait_start + seg.duration;
      break;
    }
    wait_start += seg.duration;
  }
  const double A = 1.8 * *pp.alpha_d_meas * std::sqrt(c.p.kerr.kappa_d);
  const auto ss = steady_states(c.p.kerr.kappa_d * A * A, 1.7 * c.p.kerr.delta_a0, c.p.kerr.K,
                                c.p.kerr.kappa_a, c.p.kerr.kappa_d);
  REQUIRE(ss.roots.size() == 3);
  const double unstable = ss.roots[1];
  int latched = 0, decayed = 0;
  for (std::uint64_t i = 0; latched < 100 && i < 400; ++i) {
    const auto rows = record_trajectory(s, c.p, true, trajectory_seed(3, i, true), true, 200);
    bool high_at_start = false, fell = false;
    for (const auto& r : rows) {
      if (r.t < wait_start || r.t > wait_end) continue;
      const double n = std::norm(r.alpha);
      if (!high_at_start) {
        high_at_start = n > unstable;
        if (!high_at_start) break;
      }
      if (n < unstable) fell = true;
    }
    if (!high_at_start) continue;
    ++latched;
    if (fell) ++decayed;
  }
  CHECK(latched == 100);
  CHECK(decayed == 0);
}

TEST_CASE("latch threshold falls back to the isolated-resonator estimate") {
  const auto& c = calibrated();
  CHECK(latch_threshold(c.p, c.pp) == doctest::Approx(12.51).epsilon(0.01));
  auto pp = c.pp;
  pp.latch_threshold = 40.0;
  CHECK(latch_threshold(c.p, pp) == 40.0);
}
