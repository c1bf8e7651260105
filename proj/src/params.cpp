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

#include "kerrfb/params.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "kerrfb/error.hpp"
#include "kerrfb/units.hpp"

namespace kerrfb {

using units::khz_to_rad_per_s;
using units::mhz_to_rad_per_s;

double derive_dispersive_shift(double g, double delta_qb, double E_c) {
  if (delta_qb == 0.0 || delta_qb == E_c)
    throw DegenerateDetuning("dispersive shift undefined: delta_qb is 0 or E_c");
  return g * g * E_c / (delta_qb * (delta_qb - E_c));
}

double quoted_dispersive_shift() { return mhz_to_rad_per_s(-2.5); }

double derive_purcell_rate(double kappa_b, double g, double delta_qb) {
  if (delta_qb == 0.0)
    throw DegenerateDetuning("Purcell rate undefined at zero detuning");
  return kappa_b * g * g / (delta_qb * delta_qb);
}

double derive_ncrit(double delta_qb, double g) {
  if (g == 0.0) throw DegenerateCoupling("n_crit undefined for g = 0");
  return delta_qb * delta_qb / (4.0 * g * g);
}

namespace {

const std::vector<std::string> kRequired = {
    "K_MHz",        "kappa_a_MHz", "kappa_d_MHz", "kappa_b_MHz",
    "kappa_p_MHz",  "chi_MHz",     "g_MHz",       "delta_qb_MHz",
    "Ec_MHz",       "gamma_qb_kHz", "n_bar",      "theta_a_rad",
    "theta_b_rad",  "dt_ns",       "master_seed"};

const std::set<std::string> kOptional = {"delta_a_over_kappa", "t1_us",
                                         "chi_correction",
                                         "stark_vacuum_offset"};

}  // namespace

const std::vector<std::string>& required_system_keys() { return kRequired; }

KeyValueDoc default_config() {
  KeyValueDoc d;
  const std::string s = "system";
  d.set(s, "K_MHz", "-0.4");
  d.set(s, "kappa_a_MHz", "5");
  d.set(s, "kappa_d_MHz", "0.3");
  d.set(s, "kappa_b_MHz", "1");
  d.set(s, "kappa_p_MHz", "4");
  d.set(s, "chi_MHz", "-2.5");
  d.set(s, "g_MHz", "122");
  d.set(s, "delta_qb_MHz", "1200");
  d.set(s, "Ec_MHz", "300");
  d.set(s, "gamma_qb_kHz", "5");
  d.set(s, "n_bar", "0");
  d.set(s, "theta_a_rad", "0");
  d.set(s, "theta_b_rad", "0");
  d.set(s, "dt_ns", "0.05");
  d.set(s, "master_seed", "7");
  d.set(s, "delta_a_over_kappa", "3.5");
  d.set(s, "t1_us", "auto");
  d.set(s, "chi_correction", "off");
  d.set(s, "stark_vacuum_offset", "0.5");

  const std::string p = "protocol";
  d.set(p, "T_M_ns", "400");
  d.set(p, "ramp_up_ns", "80");
  d.set(p, "T_s_ns", "150");
  d.set(p, "T_delta_ns", "100");
  d.set(p, "T_wait_ns", "25");
  d.set(p, "T_d_ns", "15");
  d.set(p, "T_pi_ns", "35.7");
  d.set(p, "T_reset_ns", "150");
  d.set(p, "stab_detuning_factor", "1.7");
  d.set(p, "stab_drive_factor", "1.8");
  d.set(p, "delta_t_MHz", "30");
  d.set(p, "omega_pi_MHz", "7");
  d.set(p, "purcell_drive_MHz", "8");
  d.set(p, "alpha_d_meas", "auto");
  d.set(p, "alpha_d_phase_rad", format_double(std::numbers::pi));
  d.set(p, "alpha_in_over_sqrt_ka_re", "auto");
  d.set(p, "alpha_in_over_sqrt_ka_im", "auto");
  d.set(p, "threshold_position", "0.12");
  d.set(p, "tuning_rate_multiplier", "2");
  d.set(p, "n_cycles", "20");
  d.set(p, "record_interval_ns", "1");
  d.set(p, "latch_threshold", "auto");
  return d;
}

SystemParams load_and_validate(const KeyValueDoc& doc) {
  const std::string s = "system";
  std::vector<std::string> missing;
  for (const auto& k : kRequired)
    if (!doc.contains(s, k)) missing.push_back(k);
  if (!missing.empty()) {
    std::string list;
    for (const auto& k : missing) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError(missing.front(), "missing config keys: " + list);
  }
  for (const auto& e : doc.entries(s)) {
    if (std::find(kRequired.begin(), kRequired.end(), e.key) ==
            kRequired.end() &&
        !kOptional.count(e.key))
      throw ConfigError(e.key, "unknown config key: " + e.key);
  }

  auto num = [&](const std::string& k) { return parse_double(k, *doc.get(s, k)); };
  auto positive = [&](const std::string& k, const std::string& name) {
    const double v = num(k);
    if (!(v > 0.0)) throw ConfigError(k, name + " must be positive");
    return v;
  };
  auto nonneg = [&](const std::string& k, const std::string& name) {
    const double v = num(k);
    if (v < 0.0) throw ConfigError(k, name + " must be non-negative");
    return v;
  };

  SystemParams p;
  p.kerr.K = mhz_to_rad_per_s(num("K_MHz"));
  p.kerr.kappa_a = mhz_to_rad_per_s(positive("kappa_a_MHz", "kappa_a"));
  p.kerr.kappa_d = mhz_to_rad_per_s(positive("kappa_d_MHz", "kappa_d"));
  p.kerr.theta_a = num("theta_a_rad");
  p.cavity.kappa_b = mhz_to_rad_per_s(nonneg("kappa_b_MHz", "kappa_b"));
  p.cavity.kappa_p = mhz_to_rad_per_s(nonneg("kappa_p_MHz", "kappa_p"));
  p.cavity.chi = mhz_to_rad_per_s(num("chi_MHz"));
  p.cavity.g = mhz_to_rad_per_s(num("g_MHz"));
  p.cavity.delta_qb = mhz_to_rad_per_s(num("delta_qb_MHz"));
  p.cavity.E_c = mhz_to_rad_per_s(num("Ec_MHz"));
  p.cavity.gamma_qb = khz_to_rad_per_s(nonneg("gamma_qb_kHz", "gamma_qb"));
  p.cavity.theta_b = num("theta_b_rad");
  p.noise.n_bar = nonneg("n_bar", "n_bar");
  p.noise.dt = units::ns_to_s(positive("dt_ns", "dt"));
  p.noise.master_seed = parse_u64("master_seed", *doc.get(s, "master_seed"));

  double ratio = 3.5;
  if (auto v = doc.get(s, "delta_a_over_kappa"))
    ratio = parse_double("delta_a_over_kappa", *v);
  p.kerr.delta_a0 = ratio * p.kerr.kappa_sum();

  if (auto v = doc.get(s, "chi_correction"))
    p.chi_correction = parse_bool("chi_correction", *v);
  if (auto v = doc.get(s, "stark_vacuum_offset")) {
    p.stark_vacuum_offset = parse_double("stark_vacuum_offset", *v);
    if (p.stark_vacuum_offset < 0.0)
      throw ConfigError("stark_vacuum_offset",
                        "stark_vacuum_offset must be non-negative");
  }

  try {
    p.derived.gamma_p =
        derive_purcell_rate(p.cavity.kappa_b, p.cavity.g, p.cavity.delta_qb);
    p.derived.n_crit = derive_ncrit(p.cavity.delta_qb, p.cavity.g);
  } catch (const Error& e) {
    throw ConfigError("delta_qb_MHz", e.what());
  }
  p.derived.gamma_total = p.cavity.gamma_qb + p.derived.gamma_p;
  p.derived.delta_ac = std::sqrt(0.75) * p.kerr.kappa_sum();

  if (auto v = doc.get(s, "t1_us"); v && *v != "auto") {
    if (*v == "off" || *v == "inf") {
      p.derived.gamma_total = 0.0;
    } else {
      const double t1 = parse_double("t1_us", *v);
      if (!(t1 > 0.0)) throw ConfigError("t1_us", "t1_us must be positive");
      p.derived.gamma_total = 1.0 / units::us_to_s(t1);
    }
  }
  return p;
}

void store_system(const SystemParams& p, KeyValueDoc& d) {
  using units::rad_per_s_to_khz;
  using units::rad_per_s_to_mhz;
  const std::string s = "system";
  d.set(s, "K_MHz", format_double(rad_per_s_to_mhz(p.kerr.K)));
  d.set(s, "kappa_a_MHz", format_double(rad_per_s_to_mhz(p.kerr.kappa_a)));
  d.set(s, "kappa_d_MHz", format_double(rad_per_s_to_mhz(p.kerr.kappa_d)));
  d.set(s, "kappa_b_MHz", format_double(rad_per_s_to_mhz(p.cavity.kappa_b)));
  d.set(s, "kappa_p_MHz", format_double(rad_per_s_to_mhz(p.cavity.kappa_p)));
  d.set(s, "chi_MHz", format_double(rad_per_s_to_mhz(p.cavity.chi)));
  d.set(s, "g_MHz", format_double(rad_per_s_to_mhz(p.cavity.g)));
  d.set(s, "delta_qb_MHz", format_double(rad_per_s_to_mhz(p.cavity.delta_qb)));
  d.set(s, "Ec_MHz", format_double(rad_per_s_to_mhz(p.cavity.E_c)));
  d.set(s, "gamma_qb_kHz", format_double(rad_per_s_to_khz(p.cavity.gamma_qb)));
  d.set(s, "n_bar", format_double(p.noise.n_bar));
  d.set(s, "theta_a_rad", format_double(p.kerr.theta_a));
  d.set(s, "theta_b_rad", format_double(p.cavity.theta_b));
  d.set(s, "dt_ns", format_double(units::s_to_ns(p.noise.dt)));
  d.set(s, "master_seed", std::to_string(p.noise.master_seed));
  d.set(s, "delta_a_over_kappa",
        format_double(p.kerr.delta_a0 / p.kerr.kappa_sum()));
  std::string t1 = "auto";
  if (p.derived.gamma_total == 0.0)
    t1 = "off";
  else if (p.derived.gamma_total != p.cavity.gamma_qb + p.derived.gamma_p)
    t1 = format_double(units::s_to_us(1.0 / p.derived.gamma_total));
  d.set(s, "t1_us", t1);
  d.set(s, "chi_correction", p.chi_correction ? "on" : "off");
  d.set(s, "stark_vacuum_offset", format_double(p.stark_vacuum_offset));
}

}  // namespace kerrfb
