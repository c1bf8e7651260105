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

#include "kerrfb/quantum_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "kerrfb/bifurcation.hpp"
#include "kerrfb/config.hpp"
#include "kerrfb/ensemble.hpp"
#include "kerrfb/error.hpp"
#include "kerrfb/units.hpp"
#include "parallel.hpp"

namespace kerrfb {

FockVector FockVector::vacuum(std::size_t dim) {
  if (dim < 2) throw Error("Fock basis needs at least two states");
  FockVector v;
  v.amplitudes.assign(dim, 0.0);
  v.amplitudes[0] = 1.0;
  return v;
}

FockVector FockVector::coherent(std::size_t dim, cplx alpha) {
  FockVector v = vacuum(dim);
  cplx c = std::exp(-0.5 * std::norm(alpha));
  for (std::size_t n = 0; n < dim; ++n) {
    v.amplitudes[n] = c;
    c *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  double s = 0.0;
  for (const auto& a : v.amplitudes) s += std::norm(a);
  const double inv = 1.0 / std::sqrt(s);
  for (auto& a : v.amplitudes) a *= inv;
  v.norm_sq = 1.0;
  return v;
}

double FockVector::mean_n() const {
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < amplitudes.size(); ++n) {
    const double p = std::norm(amplitudes[n]);
    num += static_cast<double>(n) * p;
    den += p;
  }
  if (!(den > 0.0)) throw InvalidState("Fock vector has zero norm");
  return num / den;
}

cplx FockVector::mean_a() const {
  cplx num = 0.0;
  double den = std::norm(amplitudes[0]);
  for (std::size_t n = 1; n < amplitudes.size(); ++n) {
    num += std::conj(amplitudes[n - 1]) * std::sqrt(static_cast<double>(n)) *
           amplitudes[n];
    den += std::norm(amplitudes[n]);
  }
  if (!(den > 0.0)) throw InvalidState("Fock vector has zero norm");
  return num / den;
}

double FockVector::tail_population() const {
  const std::size_t d = amplitudes.size();
  const std::size_t start = d - std::max<std::size_t>(1, d / 10);
  double tail = 0.0, total = 0.0;
  for (std::size_t n = 0; n < d; ++n) {
    const double p = std::norm(amplitudes[n]);
    total += p;
    if (n >= start) tail += p;
  }
  return total > 0.0 ? tail / total : 0.0;
}

namespace {

constexpr double kTailLimit = 1e-6;

void guard(const FockVector& v) {
  if (v.tail_population() > kTailLimit)
    throw TruncationError("Fock basis truncation exceeded; raise dim",
                          v.dim() + v.dim() / 2);
}

}  // namespace

std::vector<cplx> apply_effective_hamiltonian(const FockVector& v,
                                              double delta_a, double K,
                                              cplx drive, double kappa_sum) {
  guard(v);
  constexpr cplx I(0.0, 1.0);
  const auto& psi = v.amplitudes;
  const std::size_t d = psi.size();
  std::vector<cplx> out(d);
  for (std::size_t n = 0; n < d; ++n) {
    const double nn = static_cast<double>(n);
    cplx acc = (-I * (delta_a * nn + 0.5 * K * nn * nn) - 0.5 * kappa_sum * nn) *
               psi[n];
    if (n > 0) acc += drive * std::sqrt(nn) * psi[n - 1];
    if (n + 1 < d) acc -= std::conj(drive) * std::sqrt(nn + 1.0) * psi[n + 1];
    out[n] = acc;
  }
  return out;
}

OracleConfig oracle_config(const SystemParams& p) {
  OracleConfig c;
  c.delta_a = p.kerr.delta_a0;
  c.K = p.kerr.K;
  c.kappa_a = p.kerr.kappa_a;
  c.kappa_d = p.kerr.kappa_d;
  c.dt = p.noise.dt;
  return c;
}

SystemParams kerr_only(const SystemParams& p, const OracleConfig& c) {
  SystemParams q = p;
  q.kerr.delta_a0 = c.delta_a;
  q.kerr.K = c.K;
  q.kerr.kappa_a = c.kappa_a;
  q.kerr.kappa_d = c.kappa_d;
  q.cavity.kappa_b = 0.0;
  q.cavity.kappa_p = 0.0;
  q.cavity.chi = 0.0;
  q.derived.gamma_total = 0.0;
  q.chi_correction = false;
  q.noise.dt = c.dt;
  return q;
}

Schedule oracle_schedule(const OracleConfig& c, double drive, double phase) {
  if (!(c.duration > c.ramp))
    throw ScheduleError("oracle duration must exceed the ramp");
  const double amp = drive * std::sqrt(c.kappa_d);
  ControlSegment ramp;
  ramp.name = "ramp";
  ramp.duration = c.ramp;
  ramp.alpha_d_mag = Ramp<double>::line(0.0, amp);
  ramp.alpha_d_arg = Ramp<double>::hold(phase);
  ramp.delta_a = Ramp<double>::hold(c.delta_a);
  ramp.delta_b = Ramp<double>::hold(0.0);
  ramp.alpha_in = Ramp<cplx>::hold(0.0);
  ramp.alpha_p = Ramp<cplx>::hold(0.0);
  ramp.omega_d = Ramp<cplx>::hold(0.0);
  ControlSegment hold = ramp;
  hold.name = "hold";
  hold.duration = c.duration - c.ramp;
  hold.alpha_d_mag = Ramp<double>::hold(amp);
  return Schedule({ramp, hold});
}

namespace {

struct Series {
  std::vector<double> n;
  std::vector<cplx> a;
  double final_n = 0.0;
  std::uint32_t jumps = 0;
  double integrated_n = 0.0;
};

std::vector<std::size_t> record_steps(std::size_t n_steps, double dt,
                                      double interval) {
  const auto stride = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(interval / dt)));
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k <= n_steps; k += stride) out.push_back(k);
  if (out.back() != n_steps) out.push_back(n_steps);
  return out;
}

OracleEnsemble reduce(const std::vector<Series>& all,
                      const std::vector<std::size_t>& steps, double dt) {
  OracleEnsemble e;
  const std::size_t m = steps.size();
  const double inv = 1.0 / static_cast<double>(all.size());
  e.time_grid.resize(m);
  e.mean_n.assign(m, 0.0);
  e.sem_n.assign(m, 0.0);
  e.mean_a.assign(m, 0.0);
  for (std::size_t r = 0; r < m; ++r) e.time_grid[r] = static_cast<double>(steps[r]) * dt;
  for (const auto& s : all) {
    for (std::size_t r = 0; r < m; ++r) {
      e.mean_n[r] += s.n[r];
      e.mean_a[r] += s.a[r];
    }
    e.final_n.push_back(s.final_n);
    e.total_jumps += s.jumps;
    e.integrated_n += s.integrated_n;
  }
  for (std::size_t r = 0; r < m; ++r) {
    e.mean_n[r] *= inv;
    e.mean_a[r] *= inv;
  }
  if (all.size() > 1) {
    for (const auto& s : all)
      for (std::size_t r = 0; r < m; ++r) {
        const double d = s.n[r] - e.mean_n[r];
        e.sem_n[r] += d * d;
      }
    const double nn = static_cast<double>(all.size());
    for (auto& v : e.sem_n) v = std::sqrt(v / (nn - 1.0) / nn);
  }
  return e;
}

double draw_threshold(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double r = u(rng);
  while (r <= 0.0) r = u(rng);
  return r;
}

class FockStepper {
 public:
  FockStepper(const OracleConfig& c)
      : c_(c), d_(c.dim), sq_(c.dim + 1), half_(c.dim), t1_(c.dim), t2_(c.dim),
        k_(c.dim), acc_(c.dim) {
    for (std::size_t n = 0; n <= d_; ++n) sq_[n] = std::sqrt(static_cast<double>(n));
  }

  // One grid step, split into substeps so that the largest drive matrix
  // element times the substep stays below kMaxDrivePhase.
  void step(std::vector<cplx>& psi, double delta, cplx eps) {
    const double reach = std::abs(eps) * sq_[d_] * c_.dt / kMaxDrivePhase;
    const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(reach)));
    if (delta != cached_delta_ || m != cached_sub_) {
      constexpr cplx I(0.0, 1.0);
      const double h2 = 0.5 * c_.dt / static_cast<double>(m);
      const double kappa = c_.kappa_a + c_.kappa_d;
      for (std::size_t n = 0; n < d_; ++n) {
        const double nn = static_cast<double>(n);
        half_[n] = std::exp((-I * (delta * nn + 0.5 * c_.K * nn * nn) -
                             0.5 * kappa * nn) * h2);
      }
      cached_delta_ = delta;
      cached_sub_ = m;
    }
    for (std::size_t j = 0; j < m; ++j) substep(psi, eps, c_.dt / static_cast<double>(m));
  }

  // Applies a and renormalises.
  void jump(std::vector<cplx>& psi) const {
    double s = 0.0;
    for (std::size_t n = 0; n + 1 < d_; ++n) {
      psi[n] = sq_[n + 1] * psi[n + 1];
      s += std::norm(psi[n]);
    }
    psi[d_ - 1] = 0.0;
    if (!(s > 0.0)) throw InvalidState("jump annihilated the vacuum");
    const double inv = 1.0 / std::sqrt(s);
    for (auto& v : psi) v *= inv;
  }

 private:
  void drive(const std::vector<cplx>& psi, cplx eps, std::vector<cplx>& out) const {
    const cplx ce = std::conj(eps);
    for (std::size_t n = 0; n < d_; ++n) {
      cplx acc = 0.0;
      if (n > 0) acc += eps * sq_[n] * psi[n - 1];
      if (n + 1 < d_) acc -= ce * sq_[n + 1] * psi[n + 1];
      out[n] = acc;
    }
  }

  static constexpr double kMaxDrivePhase = 0.1;

  // Interaction-picture RK4: the diagonal part is applied exactly through
  // half_, the drive coupling by the four stages.
  void substep(std::vector<cplx>& psi, cplx eps, double h) {
    drive(psi, eps, k_);
    for (std::size_t n = 0; n < d_; ++n) {
      t1_[n] = half_[n] * psi[n];
      k_[n] *= half_[n];
      acc_[n] = k_[n];
      t2_[n] = t1_[n] + 0.5 * h * k_[n];
    }
    drive(t2_, eps, k_);
    for (std::size_t n = 0; n < d_; ++n) {
      acc_[n] += 2.0 * k_[n];
      t2_[n] = t1_[n] + 0.5 * h * k_[n];
    }
    drive(t2_, eps, k_);
    for (std::size_t n = 0; n < d_; ++n) {
      acc_[n] += 2.0 * k_[n];
      t2_[n] = half_[n] * (t1_[n] + h * k_[n]);
    }
    drive(t2_, eps, k_);
    for (std::size_t n = 0; n < d_; ++n)
      psi[n] = half_[n] * (t1_[n] + (h / 6.0) * acc_[n]) + (h / 6.0) * k_[n];
  }

  const OracleConfig& c_;
  std::size_t d_;
  std::vector<double> sq_;
  std::vector<cplx> half_, t1_, t2_, k_, acc_;
  double cached_delta_ = std::numeric_limits<double>::quiet_NaN();
  std::size_t cached_sub_ = 0;
};

}  // namespace

OracleEnsemble mcwf_ensemble(const OracleConfig& c, const Schedule& s,
                             std::size_t n_traj, std::uint64_t seed,
                             const FockVector& initial) {
  if (n_traj < 1) throw Error("oracle ensemble needs at least one trajectory");
  if (initial.dim() != c.dim) throw Error("initial Fock vector has the wrong dimension");
  const SteppedSchedule st(s, c.dt);
  const auto steps = record_steps(st.n_steps(), c.dt, c.record_interval);
  const double sqrt_kd = std::sqrt(c.kappa_d);
  std::vector<Series> all(n_traj);

  detail::parallel_for(n_traj, c.workers, [&](std::size_t i) {
    Rng rng(trajectory_seed(seed, i, false));
    FockVector v = initial;
    v.r_threshold = draw_threshold(rng);
    FockStepper stepper(c);
    Series& out = all[i];
    out.n.reserve(steps.size());
    out.a.reserve(steps.size());
    std::size_t r = 0;
    auto sample = [&](std::size_t k) {
      if (r < steps.size() && steps[r] == k) {
        out.n.push_back(v.mean_n());
        out.a.push_back(v.mean_a());
        ++r;
      }
    };
    guard(v);
    sample(0);
    SteppedSchedule::Cursor cur(st);
    for (std::size_t k = 0; k < st.n_steps(); ++k) {
      const Controls ctl = cur.next();
      out.integrated_n += v.mean_n() * c.dt;
      stepper.step(v.amplitudes, ctl.delta_a, sqrt_kd * ctl.alpha_d);
      double norm = 0.0;
      for (const auto& a : v.amplitudes) norm += std::norm(a);
      v.norm_sq = norm;
      if (!std::isfinite(norm)) throw NumericalBlowup("Fock vector diverged", (k + 1) * c.dt);
      if (norm < v.r_threshold) {
        stepper.jump(v.amplitudes);
        v.norm_sq = 1.0;
        v.r_threshold = draw_threshold(rng);
        ++v.jumps;
      }
      if ((k + 1) % 200 == 0) guard(v);
      sample(k + 1);
    }
    guard(v);
    out.final_n = v.mean_n();
    out.jumps = v.jumps;
  });
  return reduce(all, steps, c.dt);
}

OracleEnsemble semiclassical_ensemble(const OracleConfig& c, const Schedule& s,
                                      std::size_t n_traj, std::uint64_t seed,
                                      bool noise, cplx initial_alpha) {
  if (n_traj < 1) throw Error("oracle ensemble needs at least one trajectory");
  SystemParams base;
  base.noise.n_bar = 0.0;
  const SystemParams p = kerr_only(base, c);
  const SteppedSchedule st(s, c.dt);
  const auto steps = record_steps(st.n_steps(), c.dt, c.record_interval);
  const double offset = noise ? 0.5 : 0.0;
  std::vector<Series> all(n_traj);

  detail::parallel_for(n_traj, c.workers, [&](std::size_t i) {
    Rng rng(trajectory_seed(seed, i, true));
    const FieldIntegrator fi(p, noise);
    FieldState f;
    if (noise) f = sample_initial_state(rng);
    f.alpha += initial_alpha;
    Series& out = all[i];
    std::size_t r = 0;
    auto sample = [&](std::size_t k) {
      if (r < steps.size() && steps[r] == k) {
        out.n.push_back(std::norm(f.alpha) - offset);
        out.a.push_back(f.alpha);
        ++r;
      }
    };
    sample(0);
    SteppedSchedule::Cursor cur(st);
    for (std::size_t k = 0; k < st.n_steps(); ++k) {
      out.integrated_n += (std::norm(f.alpha) - offset) * c.dt;
      fi.step(f, cur.next(), -1.0, rng);
      sample(k + 1);
    }
    out.final_n = std::norm(f.alpha) - offset;
  });
  return reduce(all, steps, c.dt);
}

double latching_fraction(const OracleEnsemble& e, double threshold_n) {
  if (e.final_n.empty()) return 0.0;
  std::size_t high = 0;
  for (double n : e.final_n)
    if (n > threshold_n) ++high;
  return static_cast<double>(high) / static_cast<double>(e.final_n.size());
}

std::vector<DriveComparison> compare_with_semiclassical(
    const OracleConfig& c, const std::vector<double>& drives,
    std::size_t n_traj, std::uint64_t seed, double latch_threshold_n,
    double phase) {
  std::vector<DriveComparison> out;
  std::optional<CriticalPoint> cp;
  try {
    cp = critical_photon_numbers(c.delta_a, c.K, c.kappa_a, c.kappa_d);
  } catch (const NoBistability&) {
  }
  for (std::size_t i = 0; i < drives.size(); ++i) {
    DriveComparison d;
    d.drive = drives[i];
    const Schedule s = oracle_schedule(c, d.drive, phase);
    const std::uint64_t sub = splitmix64(seed + i);
    d.mcwf = mcwf_ensemble(c, s, n_traj, sub, FockVector::vacuum(c.dim));
    d.semiclassical = semiclassical_ensemble(c, s, n_traj, sub, true);
    d.latch_mcwf = latching_fraction(d.mcwf, latch_threshold_n);
    d.latch_semiclassical = latching_fraction(d.semiclassical, latch_threshold_n);
    if (cp) {
      const double power = c.kappa_d * c.kappa_d * d.drive * d.drive;
      d.discrepancy_expected =
          power > cp->drive_power_minus && power < cp->drive_power_plus;
    }
    out.push_back(std::move(d));
  }
  return out;
}

double calibrate_semiclassical_drive(const OracleConfig& c, double target,
                                     std::size_t n_traj, std::uint64_t seed,
                                     double latch_threshold_n, double phase) {
  const auto cp = critical_photon_numbers(c.delta_a, c.K, c.kappa_a, c.kappa_d);
  auto frac = [&](double a) {
    return latching_fraction(
        semiclassical_ensemble(c, oracle_schedule(c, a, phase), n_traj, seed, true),
        latch_threshold_n);
  };
  double lo = std::sqrt(cp.drive_power_minus) / c.kappa_d;
  double hi = 1.5 * std::sqrt(cp.drive_power_plus) / c.kappa_d;
  if (frac(lo) > target || frac(hi) < target)
    throw CalibrationFailed("target latching fraction not bracketed");
  for (int it = 0; it < 40 && hi - lo > 1e-4 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (frac(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string comparison_csv(const DriveComparison& d) {
  std::string out = "t_ns,n_mcwf,n_semiclassical\n";
  for (std::size_t i = 0; i < d.mcwf.time_grid.size(); ++i)
    out += format_double(units::s_to_ns(d.mcwf.time_grid[i])) + "," +
           format_double(d.mcwf.mean_n[i]) + "," +
           format_double(d.semiclassical.mean_n[i]) + "\n";
  return out;
}

std::string latching_summary_csv(const std::vector<DriveComparison>& all,
                                 std::size_t n_traj) {
  std::string out =
      "drive,latch_mcwf,latch_semiclassical,n_traj,discrepancy_expected\n";
  for (const auto& d : all)
    out += format_double(d.drive) + "," + format_double(d.latch_mcwf) + "," +
           format_double(d.latch_semiclassical) + "," + std::to_string(n_traj) +
           "," + (d.discrepancy_expected ? "1" : "0") + "\n";
  return out;
}

}  // namespace kerrfb
