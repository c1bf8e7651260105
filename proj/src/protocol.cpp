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

#include "kerrfb/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <functional>

#include "kerrfb/bifurcation.hpp"
#include "kerrfb/error.hpp"
#include "kerrfb/sde_engine.hpp"
#include "kerrfb/units.hpp"

namespace kerrfb {
namespace {

using units::mhz_to_rad_per_s;
using units::ns_to_s;

const std::vector<std::string> kProtocolKeys = {
    "T_M_ns",          "ramp_up_ns",
    "T_s_ns",          "T_delta_ns",
    "T_wait_ns",       "T_d_ns",
    "T_pi_ns",         "T_reset_ns",
    "stab_detuning_factor", "stab_drive_factor",
    "delta_t_MHz",     "omega_pi_MHz",
    "purcell_drive_MHz", "alpha_d_meas",
    "alpha_d_phase_rad", "alpha_in_over_sqrt_ka_re",
    "alpha_in_over_sqrt_ka_im", "threshold_position",
    "tuning_rate_multiplier", "n_cycles",
    "record_interval_ns", "latch_threshold"};

}  // namespace

ProtocolParams load_protocol(const KeyValueDoc& doc) {
  const std::string s = "protocol";
  std::vector<std::string> missing;
  for (const auto& k : kProtocolKeys)
    if (!doc.contains(s, k)) missing.push_back(k);
  if (!missing.empty()) {
    std::string list;
    for (const auto& k : missing) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError(missing.front(), "missing config keys: " + list);
  }
  for (const auto& e : doc.entries(s))
    if (std::find(kProtocolKeys.begin(), kProtocolKeys.end(), e.key) ==
        kProtocolKeys.end())
      throw ConfigError(e.key, "unknown config key: " + e.key);

  auto text = [&](const std::string& k) { return *doc.get(s, k); };
  auto num = [&](const std::string& k) { return parse_double(k, text(k)); };
  auto duration = [&](const std::string& k, bool allow_zero = false) {
    const double v = num(k);
    if (allow_zero ? v < 0.0 : !(v > 0.0))
      throw ConfigError(k, k + (allow_zero ? " must be non-negative"
                                           : " must be positive"));
    return ns_to_s(v);
  };
  auto factor = [&](const std::string& k) {
    const double v = num(k);
    if (!(v > 1.0)) throw ConfigError(k, k + " must exceed 1");
    return v;
  };

  ProtocolParams pp;
  pp.T_M = duration("T_M_ns");
  pp.ramp_up = duration("ramp_up_ns");
  if (!(pp.ramp_up < pp.T_M))
    throw ConfigError("ramp_up_ns", "ramp_up_ns must be shorter than T_M_ns");
  pp.T_s = duration("T_s_ns");
  pp.T_delta = duration("T_delta_ns");
  pp.T_wait = duration("T_wait_ns");
  pp.T_d = duration("T_d_ns");
  pp.T_pi = duration("T_pi_ns");
  pp.T_reset = duration("T_reset_ns", true);
  pp.stab_detuning_factor = factor("stab_detuning_factor");
  pp.stab_drive_factor = factor("stab_drive_factor");
  pp.delta_t = mhz_to_rad_per_s(num("delta_t_MHz"));
  pp.omega_pi = mhz_to_rad_per_s(num("omega_pi_MHz"));
  pp.purcell_drive = mhz_to_rad_per_s(num("purcell_drive_MHz"));
  if (text("alpha_d_meas") != "auto") {
    const double a = num("alpha_d_meas");
    if (!(a > 0.0))
      throw ConfigError("alpha_d_meas", "alpha_d_meas must be positive");
    pp.alpha_d_meas = a;
  }
  pp.alpha_d_phase = num("alpha_d_phase_rad");
  const bool re_auto = text("alpha_in_over_sqrt_ka_re") == "auto";
  const bool im_auto = text("alpha_in_over_sqrt_ka_im") == "auto";
  if (re_auto != im_auto)
    throw ConfigError("alpha_in_over_sqrt_ka_re",
                      "alpha_in real and imaginary parts must both be set or "
                      "both be auto");
  if (!re_auto)
    pp.alpha_in_over_sqrt_ka =
        cplx(num("alpha_in_over_sqrt_ka_re"), num("alpha_in_over_sqrt_ka_im"));
  pp.threshold_position = num("threshold_position");
  if (!(pp.threshold_position > 0.0 && pp.threshold_position < 1.0))
    throw ConfigError("threshold_position",
                      "threshold_position must lie in (0, 1)");
  pp.tuning_rate_multiplier = num("tuning_rate_multiplier");
  if (!(pp.tuning_rate_multiplier > 0.0))
    throw ConfigError("tuning_rate_multiplier",
                      "tuning_rate_multiplier must be positive");
  const auto cycles = parse_u64("n_cycles", text("n_cycles"));
  if (cycles < 1 || cycles > 100000)
    throw ConfigError("n_cycles", "n_cycles must lie in [1, 100000]");
  pp.n_cycles = static_cast<std::uint32_t>(cycles);
  pp.record_interval = duration("record_interval_ns");
  if (text("latch_threshold") != "auto") {
    const double t = num("latch_threshold");
    if (!(t > 0.0))
      throw ConfigError("latch_threshold", "latch_threshold must be positive");
    pp.latch_threshold = t;
  }
  return pp;
}

void store_protocol(const ProtocolParams& pp, KeyValueDoc& d) {
  using units::rad_per_s_to_mhz;
  using units::s_to_ns;
  const std::string s = "protocol";
  d.set(s, "T_M_ns", format_double(s_to_ns(pp.T_M)));
  d.set(s, "ramp_up_ns", format_double(s_to_ns(pp.ramp_up)));
  d.set(s, "T_s_ns", format_double(s_to_ns(pp.T_s)));
  d.set(s, "T_delta_ns", format_double(s_to_ns(pp.T_delta)));
  d.set(s, "T_wait_ns", format_double(s_to_ns(pp.T_wait)));
  d.set(s, "T_d_ns", format_double(s_to_ns(pp.T_d)));
  d.set(s, "T_pi_ns", format_double(s_to_ns(pp.T_pi)));
  d.set(s, "T_reset_ns", format_double(s_to_ns(pp.T_reset)));
  d.set(s, "stab_detuning_factor", format_double(pp.stab_detuning_factor));
  d.set(s, "stab_drive_factor", format_double(pp.stab_drive_factor));
  d.set(s, "delta_t_MHz", format_double(rad_per_s_to_mhz(pp.delta_t)));
  d.set(s, "omega_pi_MHz", format_double(rad_per_s_to_mhz(pp.omega_pi)));
  d.set(s, "purcell_drive_MHz", format_double(rad_per_s_to_mhz(pp.purcell_drive)));
  d.set(s, "alpha_d_meas",
        pp.alpha_d_meas ? format_double(*pp.alpha_d_meas) : "auto");
  d.set(s, "alpha_d_phase_rad", format_double(pp.alpha_d_phase));
  d.set(s, "alpha_in_over_sqrt_ka_re",
        pp.alpha_in_over_sqrt_ka ? format_double(pp.alpha_in_over_sqrt_ka->real())
                                 : "auto");
  d.set(s, "alpha_in_over_sqrt_ka_im",
        pp.alpha_in_over_sqrt_ka ? format_double(pp.alpha_in_over_sqrt_ka->imag())
                                 : "auto");
  d.set(s, "threshold_position", format_double(pp.threshold_position));
  d.set(s, "tuning_rate_multiplier", format_double(pp.tuning_rate_multiplier));
  d.set(s, "n_cycles", std::to_string(pp.n_cycles));
  d.set(s, "record_interval_ns", format_double(s_to_ns(pp.record_interval)));
  d.set(s, "latch_threshold",
        pp.latch_threshold ? format_double(*pp.latch_threshold) : "auto");
}

double latch_threshold(const SystemParams& p, const ProtocolParams& pp) {
  if (pp.latch_threshold) return *pp.latch_threshold;
  try {
    return default_latch_threshold(p.kerr.delta_a0, p.kerr.K, p.kerr.kappa_a,
                                   p.kerr.kappa_d);
  } catch (const NoBistability& e) {
    throw ConfigError("latch_threshold",
                      std::string("cannot derive a latch threshold: ") + e.what());
  }
}

double wait_for_retune_at(const ProtocolParams& pp, double t_retune) {
  const double w = t_retune - (pp.T_M + pp.T_s + pp.T_delta + pp.T_pi);
  if (!(w > 0.0)) throw ScheduleError("retune time leaves no room for the wait");
  return w;
}

namespace {

struct Levels {
  double drive;   // |alpha_d| on the measurement plateau
  double phase;
  double delta0;  // Delta_a during measurement
  cplx alpha_p;
  cplx alpha_in;
};

Levels levels(const SystemParams& p, const ProtocolParams& pp) {
  if (!pp.alpha_d_meas)
    throw ScheduleError("measurement drive is not calibrated");
  Levels l;
  l.drive = *pp.alpha_d_meas * std::sqrt(p.kerr.kappa_d);
  l.phase = pp.alpha_d_phase;
  l.delta0 = p.kerr.delta_a0;
  l.alpha_p = p.cavity.kappa_p > 0.0
                  ? cplx(0.0, pp.purcell_drive / std::sqrt(p.cavity.kappa_p))
                  : cplx(0.0);
  l.alpha_in = pp.alpha_in_over_sqrt_ka
                   ? *pp.alpha_in_over_sqrt_ka * std::sqrt(p.kerr.kappa_a)
                   : cplx(0.0);
  return l;
}

ControlSegment quiet(const std::string& name, double duration, double delta_a) {
  ControlSegment s;
  s.name = name;
  s.duration = duration;
  s.alpha_d_mag = Ramp<double>::hold(0.0);
  s.alpha_d_arg = Ramp<double>::hold(0.0);
  s.delta_a = Ramp<double>::hold(delta_a);
  s.delta_b = Ramp<double>::hold(0.0);
  s.alpha_in = Ramp<cplx>::hold(0.0);
  s.alpha_p = Ramp<cplx>::hold(0.0);
  s.omega_d = Ramp<cplx>::hold(0.0);
  return s;
}

Schedule measurement_only(const Levels& l, const ProtocolParams& pp) {
  Schedule s;
  auto ramp = quiet("measure_ramp", pp.ramp_up, l.delta0);
  ramp.alpha_d_mag = Ramp<double>::line(0.0, l.drive);
  ramp.alpha_d_arg = Ramp<double>::hold(l.phase);
  ramp.alpha_p = Ramp<cplx>::hold(l.alpha_p);
  s.append(ramp);
  auto hold = ramp;
  hold.name = "measure";
  hold.duration = pp.T_M - pp.ramp_up;
  hold.alpha_d_mag = Ramp<double>::hold(l.drive);
  s.append(hold);
  return s;
}

Schedule cycle(const SystemParams& p, const ProtocolParams& pp, double T_wait,
               bool pre_pi) {
  const Levels l = levels(p, pp);
  const double d_hi = l.drive * pp.stab_drive_factor;
  const double da_hi = l.delta0 * pp.stab_detuning_factor;
  const double db_mid = -pp.delta_t * pp.T_s / (pp.T_s + pp.T_delta);
  const cplx omega(pp.omega_pi, 0.0);

  Schedule s = measurement_only(l, pp);

  auto stab = quiet("stabilize", pp.T_s, l.delta0);
  stab.alpha_d_mag = Ramp<double>::line(l.drive, d_hi);
  stab.alpha_d_arg = Ramp<double>::hold(l.phase);
  stab.delta_a = Ramp<double>::line(l.delta0, da_hi);
  stab.delta_b = Ramp<double>::line(0.0, db_mid);
  s.append(stab);

  auto park = quiet("detune", pp.T_delta, da_hi);
  park.alpha_d_mag = Ramp<double>::hold(d_hi);
  park.alpha_d_arg = Ramp<double>::hold(l.phase);
  park.delta_b = Ramp<double>::line(db_mid, -pp.delta_t);
  s.append(park);

  auto wait = park;
  wait.name = "wait";
  wait.duration = T_wait;
  wait.delta_b = Ramp<double>::hold(-pp.delta_t);
  s.append(wait);

  if (pre_pi) {
    auto pulse = wait;
    pulse.name = "pre_pi";
    pulse.duration = pp.T_pi;
    pulse.omega_d = Ramp<cplx>::hold(omega);
    s.append(pulse);
  }

  auto retune = quiet("retune", pp.T_delta, da_hi);
  retune.alpha_d_mag = Ramp<double>::line(d_hi, l.drive);
  retune.alpha_d_arg = Ramp<double>::hold(l.phase);
  retune.delta_a = Ramp<double>::line(da_hi, l.delta0);
  retune.delta_b = Ramp<double>::line(-pp.delta_t, 0.0);
  retune.alpha_in = Ramp<cplx>::line(0.0, l.alpha_in);
  s.append(retune);

  auto dwell = quiet("dwell", pp.T_d, l.delta0);
  dwell.alpha_d_mag = Ramp<double>::hold(l.drive);
  dwell.alpha_d_arg = Ramp<double>::hold(l.phase);
  dwell.alpha_in = Ramp<cplx>::hold(l.alpha_in);
  s.append(dwell);

  auto pulse = dwell;
  pulse.name = "pi_pulse";
  pulse.duration = pp.T_pi;
  pulse.omega_d = Ramp<cplx>::hold(omega);
  s.append(pulse);

  check_tuning_rate(s, p, pp.tuning_rate_multiplier);
  return s;
}

}  // namespace

void check_tuning_rate(const Schedule& s, const SystemParams& p,
                       double multiplier) {
  const double kappa = p.kerr.kappa_sum();
  const double bound = multiplier * kappa * kappa;
  for (const auto& seg : s.segments()) {
    const double ra = std::abs(seg.delta_a.end - seg.delta_a.start) / seg.duration;
    const double rb = std::abs(seg.delta_b.end - seg.delta_b.start) / seg.duration;
    if (ra > bound || rb > bound)
      throw ScheduleError("segment '" + seg.name +
                          "' exceeds the tuning-rate bound");
  }
}

Schedule build_state_prep(const SystemParams& p, const ProtocolParams& pp) {
  return cycle(p, pp, pp.T_wait, false);
}

Schedule build_stabilization(const SystemParams& p, const ProtocolParams& pp,
                             std::uint32_t n_cycles) {
  if (n_cycles < 1) throw ScheduleError("stabilization needs at least one cycle");
  const Schedule one = build_state_prep(p, pp);
  Schedule s = one;
  for (std::uint32_t i = 1; i < n_cycles; ++i) {
    if (pp.T_reset > 0.0) s.append(quiet("reset", pp.T_reset, p.kerr.delta_a0));
    s.append(one);
  }
  return s;
}

Schedule build_memory(const SystemParams& p, const ProtocolParams& pp,
                      double T_wait_long, bool pre_pi) {
  if (!(T_wait_long > 0.0)) throw ScheduleError("memory wait must be positive");
  return cycle(p, pp, T_wait_long, pre_pi);
}

namespace {

// Runs a noise-free trajectory with the qubit frozen at sz and returns the
// field state after `steps` steps (all of the schedule when zero).
FieldState run_frozen(const SystemParams& p, const Schedule& s, double sz,
                      std::size_t steps = 0) {
  const FieldIntegrator fi(p, false);
  const SteppedSchedule st(s, p.noise.dt);
  SteppedSchedule::Cursor cur(st);
  Rng rng(0);
  FieldState f;
  const std::size_t n = steps == 0 ? st.n_steps() : steps;
  for (std::size_t k = 0; k < n; ++k) fi.step(f, cur.next(), sz, rng);
  return f;
}

ProtocolParams with_plateau(ProtocolParams pp, double a) {
  pp.alpha_d_meas = a;
  return pp;
}

// Smallest value in [lo, hi] where pred flips from false to true, scanning a
// geometric grid first and bisecting the bracketing cell.
std::optional<double> first_true(double lo, double hi, int grid,
                                 const std::function<bool(double)>& pred) {
  const double ratio = std::pow(hi / lo, 1.0 / grid);
  double prev = lo;
  if (pred(lo)) return lo;
  for (int i = 1; i <= grid; ++i) {
    const double x = lo * std::pow(ratio, i);
    if (pred(x)) {
      double a = prev, b = x;
      while (b - a > 1e-7 * b) {
        const double m = 0.5 * (a + b);
        (pred(m) ? b : a) = m;
      }
      return b;
    }
    prev = x;
  }
  return std::nullopt;
}

}  // namespace

ThresholdCalibration calibrate_network_threshold(const SystemParams& p,
                                                 const ProtocolParams& pp) {
  const double thr = latch_threshold(p, pp);
  auto latches = [&](double sz) {
    return [&, sz](double a) {
      const auto s = measurement_only(levels(p, with_plateau(pp, a)), pp);
      return std::norm(run_frozen(p, s, sz).alpha) > thr;
    };
  };
  const auto a1 = first_true(1.0, 5000.0, 240, latches(+1.0));
  const auto a0 = first_true(1.0, 5000.0, 240, latches(-1.0));
  if (!a1 || !a0)
    throw CalibrationFailed("measurement drive never latches the Kerr resonator");
  if (!(*a0 - *a1 > 1e-4 * *a1))
    throw CalibrationFailed(
        "no drive latches the |1> measurement while leaving |0> low");
  ThresholdCalibration c;
  c.alpha_d_low = *a1;
  c.alpha_d_high = *a0;
  c.plateau = *a1 + pp.threshold_position * (*a0 - *a1);
  return c;
}

FoldDrives network_fold_drives(const SystemParams& p, const ProtocolParams& pp,
                               double sz, double hold) {
  const double thr = latch_threshold(p, pp);
  const double sk = std::sqrt(p.kerr.kappa_d);
  auto base = [&](double a) {
    Levels l = levels(p, with_plateau(pp, a));
    auto seg = quiet("ramp", pp.ramp_up, l.delta0);
    seg.alpha_d_arg = Ramp<double>::hold(l.phase);
    seg.alpha_p = Ramp<cplx>::hold(l.alpha_p);
    return std::make_pair(l, seg);
  };
  auto up = [&](double a) {
    auto [l, seg] = base(a);
    Schedule s;
    seg.alpha_d_mag = Ramp<double>::line(0.0, l.drive);
    s.append(seg);
    seg.name = "hold";
    seg.duration = hold;
    seg.alpha_d_mag = Ramp<double>::hold(l.drive);
    s.append(seg);
    return std::norm(run_frozen(p, s, sz).alpha) > thr;
  };
  FoldDrives f;
  const auto a_up = first_true(1.0, 5000.0, 240, up);
  if (!a_up) throw CalibrationFailed("resonator never latches high");
  f.up = *a_up;
  const double a_high = 1.5 * f.up;
  auto stays_high = [&](double a) {
    auto [l, seg] = base(a);
    Schedule s;
    seg.alpha_d_mag = Ramp<double>::line(0.0, a_high * sk);
    s.append(seg);
    seg.name = "latch";
    seg.duration = pp.T_M;
    seg.alpha_d_mag = Ramp<double>::hold(a_high * sk);
    s.append(seg);
    seg.name = "ramp_down";
    seg.duration = pp.ramp_up;
    seg.alpha_d_mag = Ramp<double>::line(a_high * sk, l.drive);
    s.append(seg);
    seg.name = "hold";
    seg.duration = hold;
    seg.alpha_d_mag = Ramp<double>::hold(l.drive);
    s.append(seg);
    return std::norm(run_frozen(p, s, sz).alpha) > thr;
  };
  const auto a_down = first_true(1e-2 * f.up, f.up, 240, stays_high);
  if (!a_down) throw CalibrationFailed("latched state never survives");
  f.down = *a_down;
  return f;
}

cplx calibrate_alpha_in(const SystemParams& p, const ProtocolParams& pp) {
  const double thr = latch_threshold(p, pp);
  const cplx phase = std::polar(1.0, p.kerr.theta_a);
  cplx x(0.0);  // alpha_in / sqrt(kappa_a)
  constexpr double relax = 0.6;
  for (int it = 0; it < 400; ++it) {
    ProtocolParams q = pp;
    q.alpha_in_over_sqrt_ka = x;
    const Schedule s = build_state_prep(p, q);
    const SteppedSchedule st(s, p.noise.dt);
    const auto end = st.segment_ends("dwell");
    const FieldState f = run_frozen(p, s, -1.0, end.front());
    if (std::norm(f.alpha) > thr)
      throw CalibrationFailed("|0> memory trajectory latched high");
    // alpha_in = sqrt(kappa_a) alpha e^{i theta_a} cancels the Kerr emission
    // at the cavity port.
    const cplx target = f.alpha * phase;
    const cplx next = x + relax * (target - x);
    const double change = std::abs(next - x);
    x = next;
    if (change <= 1e-9 * std::max(std::abs(x), 1e-12) || std::abs(x) < 1e-300)
      return x;
  }
  throw CalibrationFailed("alpha_in iteration did not converge");
}

ProtocolParams resolve_protocol(const SystemParams& p, ProtocolParams pp) {
  if (!pp.alpha_d_meas) pp.alpha_d_meas = calibrate_network_threshold(p, pp).plateau;
  if (!pp.alpha_in_over_sqrt_ka) pp.alpha_in_over_sqrt_ka = calibrate_alpha_in(p, pp);
  return pp;
}

}  // namespace kerrfb
