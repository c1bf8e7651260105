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
#include <sstream>

#include "doctest.h"
#include "kerrfb/ensemble.hpp"
#include "kerrfb/error.hpp"
#include "kerrfb/params.hpp"
#include "kerrfb/protocol.hpp"
#include "oracles.hpp"

using namespace kerrfb;

namespace {

Schedule idle(double duration) {
  ControlSegment s;
  s.name = "idle";
  s.duration = duration;
  Schedule out;
  out.append(s);
  return out;
}

// A short driven schedule that exercises fields, Stark shifts and pulses.
Schedule busy() {
  Schedule out;
  ControlSegment a;
  a.name = "measure_ramp";
  a.duration = 40e-9;
  a.alpha_d_mag = Ramp<double>::line(0.0, 5e4);
  a.delta_a = Ramp<double>::hold(1e8);
  out.append(a);
  ControlSegment b = a;
  b.name = "pi_pulse";
  b.duration = 35.7e-9;
  b.alpha_d_mag = Ramp<double>::hold(5e4);
  b.omega_d = Ramp<cplx>::hold(cplx(2.0 * std::acos(-1.0) * 7e6, 0.0));
  out.append(b);
  out.append(a);
  out.append(b);
  return out;
}

std::string header_of(const std::string& csv) {
  std::istringstream in(csv);
  std::string h;
  std::getline(in, h);
  return h;
}

}  // namespace

TEST_CASE("seeds are distinct per trajectory and qubit group") {
  CHECK(trajectory_seed(7, 0, false) != trajectory_seed(7, 0, true));
  CHECK(trajectory_seed(7, 0, false) != trajectory_seed(7, 1, false));
  CHECK(trajectory_seed(7, 3, true) == trajectory_seed(7, 3, true));
  CHECK(trajectory_seed(8, 3, true) != trajectory_seed(7, 3, true));
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("results do not depend on the worker count") {
  const auto p = load_and_validate(default_config());
  const auto s = busy();
  EnsembleOptions o;
  o.n_traj = 70;
  o.master_seed = 12;
  o.initial = InitialQubit::mixed(0.4, 0.6);
  o.latch_threshold = 10.0;
  o.workers = 1;
  const auto a = run_ensemble(s, p, o);
  o.workers = 4;
  const auto b = run_ensemble(s, p, o);
  CHECK(means_csv(a) == means_csv(b));
  CHECK(finals_csv(a) == finals_csv(b));
  CHECK(a.marker_sz == b.marker_sz);
}

TEST_CASE("a mixed start is the weighted sum of the pure runs") {
  const auto p = load_and_validate(default_config());
  const auto s = busy();
  EnsembleOptions o;
  o.master_seed = 5;
  o.workers = 1;
  o.n_traj = 40;
  o.initial = InitialQubit::mixed(0.25, 0.75);
  const auto mixed = run_ensemble(s, p, o);
  o.n_traj = 10;
  o.initial = InitialQubit::ground();
  const auto g = run_ensemble(s, p, o);
  o.n_traj = 30;
  o.initial = InitialQubit::excited();
  const auto e = run_ensemble(s, p, o);
  REQUIRE(mixed.mean_sz.size() == g.mean_sz.size());
  for (std::size_t i = 0; i < mixed.mean_sz.size(); ++i) {
    CHECK(mixed.mean_sz[i] == doctest::Approx(0.25 * g.mean_sz[i] + 0.75 * e.mean_sz[i]).epsilon(1e-12));
    CHECK(mixed.mean_na[i] == doctest::Approx(0.25 * g.mean_na[i] + 0.75 * e.mean_na[i]).epsilon(1e-12));
  }
  for (std::size_t i = 0; i < 10; ++i) CHECK(mixed.finals[i].sz_final == g.finals[i].sz_final);
  for (std::size_t i = 0; i < 30; ++i)
    CHECK(mixed.finals[10 + i].sz_final == e.finals[i].sz_final);
}

TEST_CASE("decay-only ensemble tracks 2 exp(-gamma t) - 1") {
  auto doc = default_config();
  doc.set("system", "t1_us", "1");
  auto p = load_and_validate(doc);
  p.noise.dt = 1e-9;
  EnsembleOptions o;
  o.n_traj = 3000;
  o.master_seed = 99;
  o.initial = InitialQubit::excited();
  o.noise = false;
  o.record_interval = 100e-9;
  const auto r = run_ensemble(idle(3e-6), p, o);
  for (std::size_t i = 0; i < r.time_grid.size(); ++i) {
    const double surv = std::exp(-r.time_grid[i] / 1e-6);
    const double band = oracle::binomial_band(surv, o.n_traj);
    CHECK(std::abs(fidelity(r, true, i) - surv) < band + 1e-12);
  }
}

TEST_CASE("recording grid and markers") {
  const auto p = load_and_validate(default_config());
  EnsembleOptions o;
  o.n_traj = 3;
  o.record_interval = 10e-9;
  const auto r = run_ensemble(busy(), p, o);
  CHECK(r.time_grid.front() == 0.0);
  CHECK(r.time_grid.back() == doctest::Approx(busy().total_duration()));
  CHECK(r.time_grid.size() == r.mean_sz.size());
  CHECK(r.marker_times.size() == 2);
  CHECK(r.marker_times[0] == doctest::Approx(75.7e-9));
  for (double sz : r.mean_sz) CHECK(std::abs(sz) <= 1.0 + 1e-12);
  for (double n : r.mean_na) CHECK(n >= 0.0);
}

TEST_CASE("fidelity helpers") {
  EnsembleResult r;
  r.time_grid = {0.0, 1.0, 2.0};
  r.mean_sz = {1.0, 0.0, -1.0};
  r.marker_sz = {1.0, 0.0};
  CHECK(fidelity(r, true, 0) == 1.0);
  CHECK(fidelity(r, true, 1) == 0.5);
  CHECK(fidelity(r, false, 2) == 1.0);
  CHECK(final_fidelity(r, true) == 0.0);
  CHECK(fidelity_at_time(r, true, 0.9) == 0.5);
  CHECK(time_averaged_fidelity(r, true) == doctest::Approx(0.5));
  CHECK(protocol_end_fidelity(r, true) == doctest::Approx(0.75));
  CHECK_THROWS_AS(fidelity(r, true, 3), IndexError);
  CHECK_THROWS_AS(fidelity_at_time(r, true, 5.0), IndexError);
  EnsembleResult empty;
  CHECK_THROWS_AS(protocol_end_fidelity(empty, true), IndexError);

  r.finals.resize(4);
  r.finals[0].na_final = 50.0;
  r.finals[1].na_final = 1.0;
  r.finals[2].failed = true;
  r.finals[3].na_final = 20.0;
  CHECK(latching_fraction(r, 10.0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("diverging ensembles report the failure") {
  const auto p = load_and_validate(default_config());
  Schedule s;
  ControlSegment a;
  a.name = "kick";
  a.duration = 200e-9;
  a.alpha_d_mag = Ramp<double>::hold(1e13);
  s.append(a);
  EnsembleOptions o;
  o.n_traj = 4;
  CHECK_THROWS_AS(run_ensemble(s, p, o), NumericalBlowup);
  o.n_traj = 0;
  CHECK_THROWS_AS(run_ensemble(s, p, o), Error);
  o.n_traj = 2;
  o.initial = InitialQubit::mixed(0.7, 0.7);
  CHECK_THROWS_AS(run_ensemble(s, p, o), Error);
}

TEST_CASE("csv schemas") {
  const auto p = load_and_validate(default_config());
  EnsembleOptions o;
  o.n_traj = 2;
  o.record_interval = 20e-9;
  const auto r = run_ensemble(busy(), p, o);
  CHECK(header_of(means_csv(r)) == "t_ns,mean_sz,mean_na,mean_nb");
  CHECK(header_of(finals_csv(r)) == "traj_id,sz_final,na_final,jumped,latched");
  const auto rows = record_trajectory(busy(), p, true, 4, true, 100);
  CHECK(header_of(trajectory_csv(rows)) == "t_ns,re_alpha,im_alpha,re_beta,im_beta,n_a,n_b,sz");
  CHECK(rows.front().t == 0.0);
  CHECK(rows.back().t == doctest::Approx(busy().total_duration()));
}

TEST_CASE("single trajectories match the ensemble member with the same seed") {
  const auto p = load_and_validate(default_config());
  EnsembleOptions o;
  o.n_traj = 1;
  o.master_seed = 21;
  o.initial = InitialQubit::excited();
  const auto r = run_ensemble(busy(), p, o);
  const auto rows = record_trajectory(busy(), p, true, trajectory_seed(21, 0, true), true, 1);
  CHECK(rows.back().sz == r.finals[0].sz_final);
  CHECK(std::norm(rows.back().alpha) == r.finals[0].na_final);
}
