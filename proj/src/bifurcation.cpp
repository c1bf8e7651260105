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

#include "kerrfb/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "kerrfb/config.hpp"
#include "kerrfb/error.hpp"

namespace kerrfb {
namespace {

struct Cubic {
  double K, delta, kappa, P;

  double value(double n) const {
    return ((K * K * n + 2.0 * delta * K) * n + delta * delta +
            0.25 * kappa * kappa) * n - P;
  }
  double slope(double n) const {
    return (3.0 * K * K * n + 4.0 * delta * K) * n + delta * delta +
           0.25 * kappa * kappa;
  }
  double scale(double n) const {
    return K * K * n * n * n + std::abs(2.0 * delta * K) * n * n +
           (delta * delta + 0.25 * kappa * kappa) * n + P;
  }
};

// Safeguarded Newton on a bracket where the cubic changes sign once.
double polish(const Cubic& c, double lo, double hi) {
  double flo = c.value(lo);
  if (flo == 0.0) return lo;
  if (c.value(hi) == 0.0) return hi;
  double n = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = c.value(n);
    if (std::abs(f) <= 1e-13 * c.scale(n)) return n;
    if ((f < 0.0) == (flo < 0.0)) {
      lo = n;
      flo = f;
    } else {
      hi = n;
    }
    const double d = c.slope(n);
    double next = d != 0.0 ? n - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == n || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
      return next;
    n = next;
  }
  return n;
}

// Upper bracket for the largest root: doubles until the cubic is positive.
double upper_bound(const Cubic& c, double start) {
  double hi = std::max(start, 1.0);
  while (c.value(hi) <= 0.0) hi *= 2.0;
  return hi;
}

// Closed-form stationary points of the drive-power curve. Empty when the
// curve is monotone.
std::optional<std::pair<double, double>> folds(double delta, double K,
                                               double kappa) {
  if (K == 0.0 || delta * K >= 0.0) return std::nullopt;
  const double inner =
      1.0 - 3.0 * (delta * delta + 0.25 * kappa * kappa) / (4.0 * delta * delta);
  if (inner <= 0.0) return std::nullopt;
  const double base = -2.0 * delta / (3.0 * K);
  const double r = std::sqrt(inner);
  return std::make_pair(base * (1.0 - r), base * (1.0 + r));
}

}  // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::monostable_low: return "monostable_low";
    case Regime::bistable: return "bistable";
    case Regime::monostable_high: return "monostable_high";
  }
  return "unknown";
}

double critical_detuning(double kappa_a, double kappa_d) {
  return std::sqrt(0.75) * (kappa_a + kappa_d);
}

double drive_power_for(double n, double delta_a, double K, double kappa_a,
                       double kappa_d) {
  const Cubic c{K, delta_a, kappa_a + kappa_d, 0.0};
  return c.value(n);
}

CriticalPoint critical_photon_numbers(double delta_a, double K, double kappa_a,
                                      double kappa_d) {
  const double kappa = kappa_a + kappa_d;
  if (K == 0.0 || delta_a * K >= 0.0)
    throw NoBistability("bistability requires delta_a and K of opposite sign");
  const double base = -2.0 * delta_a / (3.0 * K);
  const double inner =
      1.0 - 3.0 * (delta_a * delta_a + 0.25 * kappa * kappa) /
                (4.0 * delta_a * delta_a);
  if (std::abs(inner) <= 1e-12)
    throw NoBistability("detuning sits at the inflection point", base);
  if (inner < 0.0)
    throw NoBistability("|delta_a| must exceed the critical detuning");
  const double r = std::sqrt(inner);
  CriticalPoint cp;
  cp.n_c_minus = base * (1.0 - r);
  cp.n_c_plus = base * (1.0 + r);
  cp.drive_power_plus = drive_power_for(cp.n_c_minus, delta_a, K, kappa_a, kappa_d);
  cp.drive_power_minus = drive_power_for(cp.n_c_plus, delta_a, K, kappa_a, kappa_d);
  return cp;
}

SteadyStateSolution steady_states(double drive_power, double delta_a, double K,
                                  double kappa_a, double kappa_d) {
  const double kappa = kappa_a + kappa_d;
  SteadyStateSolution s;
  if (drive_power <= 0.0) {
    s.roots = {0.0};
    s.stable = {true};
    return s;
  }
  const Cubic c{K, delta_a, kappa, drive_power};
  if (K == 0.0) {
    s.roots = {drive_power / (delta_a * delta_a + 0.25 * kappa * kappa)};
    s.stable = {true};
    return s;
  }
  const auto f = folds(delta_a, K, kappa);
  if (!f) {
    const double hi = upper_bound(c, 1.0);
    s.roots = {polish(c, 0.0, hi)};
    s.stable = {true};
    const double inflection = -2.0 * delta_a / (3.0 * K);
    s.regime = (delta_a * K < 0.0 && s.roots[0] > inflection)
                   ? Regime::monostable_high
                   : Regime::monostable_low;
    return s;
  }
  const auto [nm, np] = *f;
  const double p_upper = c.value(nm) + drive_power;  // local maximum
  const double p_lower = c.value(np) + drive_power;  // local minimum
  if (drive_power > p_lower && drive_power < p_upper) {
    s.roots = {polish(c, 0.0, nm), polish(c, nm, np),
               polish(c, np, upper_bound(c, np))};
    s.stable = {true, false, true};
    s.regime = Regime::bistable;
  } else if (drive_power <= p_lower) {
    s.roots = {polish(c, 0.0, nm)};
    s.stable = {true};
    s.regime = Regime::monostable_low;
  } else {
    s.roots = {polish(c, np, upper_bound(c, np))};
    s.stable = {true};
    s.regime = Regime::monostable_high;
  }
  return s;
}

HysteresisSweep hysteresis_sweep(double delta_a, double K, double kappa_a,
                                 double kappa_d,
                                 const std::vector<double>& drive_grid) {
  for (std::size_t i = 1; i < drive_grid.size(); ++i)
    if (!(drive_grid[i] > drive_grid[i - 1]))
      throw Error("hysteresis sweep needs a strictly increasing drive grid");

  HysteresisSweep out;
  const std::size_t m = drive_grid.size();
  out.drive = drive_grid;
  out.n_up.resize(m);
  out.n_down.resize(m);
  out.n_roots.resize(m);
  out.regime.resize(m);

  std::vector<SteadyStateSolution> sol(m);
  for (std::size_t i = 0; i < m; ++i) {
    sol[i] = steady_states(drive_grid[i], delta_a, K, kappa_a, kappa_d);
    out.n_roots[i] = static_cast<int>(sol[i].roots.size());
    out.regime[i] = sol[i].regime;
  }

  bool high = false;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& s = sol[i];
    if (s.roots.size() == 3) {
      out.n_up[i] = high ? s.roots[2] : s.roots[0];
    } else {
      out.n_up[i] = s.roots[0];
      high = s.regime == Regime::monostable_high;
    }
  }
  high = true;
  for (std::size_t k = m; k-- > 0;) {
    const auto& s = sol[k];
    if (s.roots.size() == 3) {
      out.n_down[k] = high ? s.roots[2] : s.roots[0];
    } else {
      out.n_down[k] = s.roots[0];
      high = s.regime == Regime::monostable_high;
    }
  }

  // Bisect on the root count between neighbouring grid points that straddle
  // a fold.
  auto count = [&](double p) {
    return steady_states(p, delta_a, K, kappa_a, kappa_d).roots.size();
  };
  auto refine = [&](double lo, double hi) {
    const auto c_lo = count(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (count(mid) == c_lo ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  for (std::size_t i = 1; i < m; ++i) {
    if (out.n_roots[i - 1] != 3 && out.n_roots[i] == 3) {
      out.down_jump_drive = refine(drive_grid[i - 1], drive_grid[i]);
      out.bistable = true;
    }
    if (out.n_roots[i - 1] == 3 && out.n_roots[i] != 3) {
      out.up_jump_drive = refine(drive_grid[i - 1], drive_grid[i]);
      out.bistable = true;
    }
  }
  return out;
}

double default_latch_threshold(double delta_a, double K, double kappa_a,
                               double kappa_d) {
  const auto cp = critical_photon_numbers(delta_a, K, kappa_a, kappa_d);
  const double p = std::sqrt(cp.drive_power_minus * cp.drive_power_plus);
  const auto s = steady_states(p, delta_a, K, kappa_a, kappa_d);
  if (s.roots.size() != 3)
    throw NoBistability("no bistable window at the geometric-mean drive");
  return std::sqrt(s.roots.front() * s.roots.back());
}

std::string hysteresis_csv(const HysteresisSweep& s) {
  std::string out = "drive_power,n_up,n_down,n_roots,regime\n";
  for (std::size_t i = 0; i < s.drive.size(); ++i) {
    out += format_double(s.drive[i]) + "," + format_double(s.n_up[i]) + "," +
           format_double(s.n_down[i]) + "," + std::to_string(s.n_roots[i]) +
           "," + regime_name(s.regime[i]) + "\n";
  }
  return out;
}

}  // namespace kerrfb
