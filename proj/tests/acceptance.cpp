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


// Acceptance runner. Each criterion prints one PASS/FAIL line with the
// measured values and the tolerance they were held to. The exit status is
// nonzero if any requested criterion fails.
//
//   kerrfb_acceptance <criterion>... | all

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "kerrfb/bifurcation.hpp"
#include "kerrfb/config.hpp"
#include "kerrfb/ensemble.hpp"
#include "kerrfb/params.hpp"
#include "kerrfb/protocol.hpp"
#include "kerrfb/quantum_oracle.hpp"
#include "kerrfb/qubit.hpp"
#include "kerrfb/sde_engine.hpp"
#include "oracles.hpp"

using namespace kerrfb;

namespace {

bool report(bool ok, const char* name, const char* fmt, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, buf);
  std::fflush(stdout);
  return ok;
}

bool within(double x, double lo, double hi) { return x >= lo && x <= hi; }

struct Setup {
  SystemParams p;
  ProtocolParams pp;
};

Setup setup(const std::map<std::string, std::string>& overrides = {}) {
  auto doc = default_config();
  for (const auto& [k, v] : overrides) {
    const auto dot = k.find('.');
    doc.set(k.substr(0, dot), k.substr(dot + 1), v);
  }
  Setup s;
  s.p = load_and_validate(doc);
  s.pp = resolve_protocol(s.p, load_protocol(doc));
  return s;
}

EnsembleOptions options(const Setup& s, std::size_t n_traj, InitialQubit init) {
  EnsembleOptions o;
  o.n_traj = n_traj;
  o.master_seed = s.p.noise.master_seed;
  o.initial = init;
  o.record_interval = s.pp.record_interval;
  o.latch_threshold = latch_threshold(s.p, s.pp);
  return o;
}

bool bifurcation() {
  std::mt19937_64 rng(20261019);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double two_pi = 2.0 * std::numbers::pi;
  double worst_residual = 0.0, worst_dac = 0.0;
  int root_mismatch = 0;
  for (int i = 0; i < 1000; ++i) {
    const double ka = two_pi * 1e6 * (0.5 + 10.0 * u(rng));
    const double kd = two_pi * 1e6 * (0.05 + 2.0 * u(rng));
    const double dac = critical_detuning(ka, kd);
    worst_dac = std::max(worst_dac, std::abs(dac - std::sqrt(0.75) * (ka + kd)) / dac);
    double delta = dac * (1.02 + 5.0 * u(rng));
    double K = -two_pi * 1e6 * (0.01 + 2.0 * u(rng));
    if (u(rng) < 0.5) {
      delta = -delta;
      K = -K;
    }
    const auto c = critical_photon_numbers(delta, K, ka, kd);
    const double lo = c.drive_power_minus, hi = c.drive_power_plus;
    const double P = hi * (1.5 * u(rng));
    const auto s = steady_states(P, delta, K, ka, kd);
    const bool inside = P > lo && P < hi;
    const auto ref = oracle::kerr_steady_states(P, delta, K, ka + kd);
    if ((s.roots.size() == 3) != inside || ref.size() != s.roots.size()) ++root_mismatch;
    for (double n : s.roots)
      worst_residual = std::max(worst_residual, oracle::kerr_residual(n, P, delta, K, ka + kd));
  }
  const bool ok = root_mismatch == 0 && worst_residual < 1e-9 && worst_dac < 1e-15;
  return report(ok, "bifurcation",
                "1000 draws, root-count mismatches %d (need 0), max residual %.2e (< 1e-9), "
                "critical detuning rel. error %.1e (< 1e-15)",
                root_mismatch, worst_residual, worst_dac);
}

bool drive_ramp() {
  const auto s = setup();
  const double ka = s.p.kerr.kappa_a, kd = s.p.kerr.kappa_d, kappa = ka + kd;
  const double delta = 1.75 * critical_detuning(ka, kd);
  const double K = -0.012 * delta;
  const auto c = critical_photon_numbers(delta, K, ka, kd);
  const double dt = 0.002 / kappa;
  const double ramp = 20.0 / kappa, end = ramp + 400.0 / kappa;
  const double n_above =
      std::norm(oracle::integrate_kerr(delta, K, kappa, std::sqrt(c.drive_power_plus * 1.001), ramp, end, dt));
  const double n_below =
      std::norm(oracle::integrate_kerr(delta, K, kappa, std::sqrt(c.drive_power_plus * 0.999), ramp, end, dt));
  const bool ok = within(n_above, 110.0 * 0.85, 110.0 * 1.15) && within(n_below, 35.0 * 0.85, 35.0 * 1.15);
  return report(ok, "drive_ramp",
                "latched n above fold %.2f (110 +/- 15%%), below fold %.2f (35 +/- 15%%)",
                n_above, n_below);
}

bool vacuum_noise() {
  bool ok = true;
  std::string detail;
  for (double n_bar : {0.0, 1.0}) {
    auto s = setup();
    s.p.cavity.kappa_b = 0.0;
    s.p.noise.n_bar = n_bar;
    const FieldIntegrator fi(s.p, true);
    const Controls ctl;
    const double kappa = s.p.kerr.kappa_a + s.p.kerr.kappa_d;
    const auto steps = static_cast<std::size_t>(12.0 / kappa / fi.dt());
    const int n_traj = 10000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n_traj; ++i) {
      Rng rng(trajectory_seed(s.p.noise.master_seed, i, false));
      FieldState f;
      for (std::size_t k = 0; k < steps; ++k) fi.step(f, ctl, -1.0, rng);
      const double n = std::norm(f.alpha);
      sum += n;
      sum_sq += n * n;
    }
    const double mean = sum / n_traj;
    const double sem = std::sqrt((sum_sq / n_traj - mean * mean) / n_traj);
    const double target = n_bar + 0.5;
    ok = ok && std::abs(mean - target) < 3.0 * sem;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%sN=%g: <|a|^2> %.4f vs %.1f (3 sigma %.4f)",
                  detail.empty() ? "" : "; ", n_bar, mean, target, 3.0 * sem);
    detail += buf;
  }
  return report(ok, "vacuum_noise", "%s", detail.c_str());
}

bool qubit_decay() {
  const auto s = setup();
  const double gamma = s.p.derived.gamma_total;
  const double dt = 0.5e-9;
  const int n_traj = 10000;
  const std::vector<double> marks{0.25, 0.5, 1.0, 2.0};
  std::vector<int> alive(marks.size(), 0);
  for (int i = 0; i < n_traj; ++i) {
    Rng rng(trajectory_seed(s.p.noise.master_seed, i, true));
    auto q = make_qubit(true, rng);
    std::size_t next = 0;
    for (long k = 1; next < marks.size(); ++k) {
      qubit_step(q, 0.0, 0.0, 0.0, s.p, dt);
      maybe_jump(q, rng);
      if (gamma * k * dt >= marks[next] - 1e-12) {
        if (q.jumps == 0) ++alive[next];
        ++next;
      }
    }
  }
  bool ok = true;
  std::string detail;
  for (std::size_t j = 0; j < marks.size(); ++j) {
    const double expect = std::exp(-marks[j]);
    const double got = alive[j] / double(n_traj);
    const double band = oracle::binomial_band(expect, n_traj);
    ok = ok && std::abs(got - expect) < band;
    char buf[120];
    std::snprintf(buf, sizeof buf, "%sgt=%.2f %.4f vs %.4f +/- %.4f", detail.empty() ? "" : "; ",
                  marks[j], got, expect, band);
    detail += buf;
  }
  return report(ok, "qubit_decay", "%s", detail.c_str());
}

bool state_prep() {
  const auto s = setup({{"system.t1_us", "off"}});
  const auto sched = build_state_prep(s.p, s.pp);
  const auto r1 = run_ensemble(sched, s.p, options(s, 400, InitialQubit::excited()));
  const auto r0 = run_ensemble(sched, s.p, options(s, 400, InitialQubit::ground()));
  const double f1 = final_fidelity(r1, true), f0 = final_fidelity(r0, true);
  const bool ok = within(f1, 0.95, 1.0) && within(f0, 0.93, 0.99);
  return report(ok, "state_prep",
                "P(|1>) from |1> %.4f in [0.95, 1.00], from |0> %.4f in [0.93, 0.99], 400 trajectories each",
                f1, f0);
}

bool stabilization() {
  const auto s10 = setup({{"system.t1_us", "auto"}});
  const auto r10 = run_ensemble(build_stabilization(s10.p, s10.pp, 20), s10.p,
                                options(s10, 400, InitialQubit::excited()));
  const double avg = time_averaged_fidelity(r10, true), end10 = protocol_end_fidelity(r10, true);
  const auto s30 = setup({{"system.t1_us", "30"}});
  const auto r30 = run_ensemble(build_stabilization(s30.p, s30.pp, 20), s30.p,
                                options(s30, 400, InitialQubit::excited()));
  const double end30 = protocol_end_fidelity(r30, true);
  const bool ok = within(avg, 0.86, 0.93) && within(end10, 0.90, 0.96) && within(end30, 0.94, 0.99);
  return report(ok, "stabilization",
                "T1=%.1f us: time-averaged %.4f in [0.86, 0.93], protocol-end %.4f in [0.90, 0.96]; "
                "T1=30 us: protocol-end %.4f in [0.94, 0.99]",
                1e6 / s10.p.derived.gamma_total, avg, end10, end30);
}

bool memory(double retune_us, const char* name) {
  const auto s = setup();
  const auto sched = build_memory(s.p, s.pp, wait_for_retune_at(s.pp, retune_us * 1e-6), true);
  const auto r1 = run_ensemble(sched, s.p, options(s, 400, InitialQubit::excited()));
  const auto r0 = run_ensemble(sched, s.p, options(s, 400, InitialQubit::ground()));
  const double f1 = final_fidelity(r1, true), f0 = final_fidelity(r0, false);
  const bool ok = within(f1, 0.95, 1.0) && within(f0, 0.93, 0.99);
  return report(ok, name,
                "retune at %g us, T1=%.1f us: recovered |1> %.4f in [0.95, 1.00], recovered |0> %.4f in [0.93, 0.99]",
                retune_us, 1e6 / s.p.derived.gamma_total, f1, f0);
}

bool oracle_k0() {
  const auto s = setup();
  auto c = oracle_config(s.p);
  c.K = 0.0;
  c.record_interval = 10e-9;
  const double kappa = c.kappa_a + c.kappa_d;
  const double lorentz = c.delta_a * c.delta_a + 0.25 * kappa * kappa;
  bool ok = true;
  std::string detail;
  for (double n_target : {2.0, 15.0, 60.0}) {
    const double drive = std::sqrt(n_target * lorentz) / c.kappa_d;
    const auto sched = oracle_schedule(c, drive, s.pp.alpha_d_phase);
    const auto m = mcwf_ensemble(c, sched, 20, s.p.noise.master_seed, FockVector::vacuum(c.dim));
    const auto q = semiclassical_ensemble(c, sched, 1000, s.p.noise.master_seed, true);
    const double sigma = std::hypot(m.sem_n.back(), q.sem_n.back());
    const double diff = q.mean_n.back() - m.mean_n.back();
    ok = ok && std::abs(diff) < 3.0 * sigma;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%sn %.3f vs %.3f (|diff| %.3f < %.3f)", detail.empty() ? "" : "; ",
                  m.mean_n.back(), q.mean_n.back(), std::abs(diff), 3.0 * sigma);
    detail += buf;
  }
  return report(ok, "oracle_k0", "%s", detail.c_str());
}

bool oracle_latching() {
  const auto s = setup();
  const auto c = oracle_config(s.p);
  const double thr = latch_threshold(s.p, s.pp);
  const std::uint64_t seed = s.p.noise.master_seed;
  const double drive = calibrate_semiclassical_drive(c, 0.22, 100, seed, thr, s.pp.alpha_d_phase);
  const auto cmp = compare_with_semiclassical(c, {drive}, 100, seed, thr, s.pp.alpha_d_phase);
  const double lm = cmp[0].latch_mcwf, ls = cmp[0].latch_semiclassical;
  const bool ordered = lm < ls;
  const bool soft = std::abs(lm - 0.10) <= 0.08 && std::abs(ls - 0.22) <= 0.08;
  return report(ordered, "oracle_latching",
                "drive %.3f, dim %zu, 100 trajectories: MCWF %.2f < semiclassical %.2f; "
                "soft target 0.10/0.22 +/- 0.08 %s",
                drive, c.dim, lm, ls, soft ? "met" : "missed");
}

bool reproducibility() {
  const auto s = setup();
  const auto sched = build_stabilization(s.p, s.pp, 2);
  auto o = options(s, 24, InitialQubit::mixed(0.5, 0.5));
  o.workers = 1;
  const auto a = run_ensemble(sched, s.p, o);
  o.workers = 5;
  const auto b = run_ensemble(sched, s.p, o);
  const bool ens = means_csv(a) == means_csv(b) && finals_csv(a) == finals_csv(b);
  const auto back = Schedule::from_text(sched.to_text());
  const bool sched_ok = back == sched && back.hash() == sched.hash();

  auto c = oracle_config(s.p);
  c.dim = 80;
  c.duration = 300e-9;
  c.workers = 1;
  const auto os = oracle_schedule(c, 20.0, s.pp.alpha_d_phase);
  const auto m1 = mcwf_ensemble(c, os, 6, 3, FockVector::vacuum(c.dim));
  c.workers = 4;
  const auto m4 = mcwf_ensemble(c, os, 6, 3, FockVector::vacuum(c.dim));
  const bool orc = m1.mean_n == m4.mean_n && m1.final_n == m4.final_n;
  return report(ens && sched_ok && orc, "reproducibility",
                "ensemble CSVs 1 vs 5 workers %s, schedule text round trip %s, oracle 1 vs 4 workers %s",
                ens ? "identical" : "differ", sched_ok ? "identical" : "differs",
                orc ? "identical" : "differ");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<bool()>>> all{
      {"bifurcation", bifurcation},
      {"drive_ramp", drive_ramp},
      {"vacuum_noise", vacuum_noise},
      {"qubit_decay", qubit_decay},
      {"state_prep", state_prep},
      {"stabilization", stabilization},
      {"memory_20us", [] { return memory(20.0, "memory_20us"); }},
      {"memory_78us", [] { return memory(78.0, "memory_78us"); }},
      {"oracle_k0", oracle_k0},
      {"oracle_latching", oracle_latching},
      {"reproducibility", reproducibility},
  };
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <criterion>... | all\ncriteria:", argv[0]);
    for (const auto& [name, fn] : all) std::fprintf(stderr, " %s", name.c_str());
    std::fprintf(stderr, "\n");
    return 2;
  }
  int failures = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string want = argv[i];
    bool found = false;
    for (const auto& [name, fn] : all) {
      if (want != name && !(want == "all" && name != "memory_78us")) continue;
      found = true;
      const auto t0 = std::chrono::steady_clock::now();
      bool ok = false;
      try {
        ok = fn();
      } catch (const std::exception& e) {
        report(false, name.c_str(), "exception: %s", e.what());
      }
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::fprintf(stderr, "  (%s took %.1f s)\n", name.c_str(), secs);
      if (!ok) ++failures;
    }
    if (!found) {
      std::fprintf(stderr, "unknown criterion '%s'\n", want.c_str());
      return 2;
    }
  }
  return failures == 0 ? 0 : 1;
}
