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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kerrfb/config.hpp"

namespace kerrfb {

// All rates, detunings and couplings are angular frequencies in rad/s and all
// durations are in seconds.

struct KerrParams {
  double K = 0.0;
  double kappa_a = 0.0;
  double kappa_d = 0.0;
  double delta_a0 = 0.0;
  double theta_a = 0.0;

  double kappa_sum() const { return kappa_a + kappa_d; }
};

struct CavityQubitParams {
  double kappa_b = 0.0;
  double kappa_p = 0.0;
  double chi = 0.0;
  double g = 0.0;
  double delta_qb = 0.0;
  double E_c = 0.0;
  double gamma_qb = 0.0;
  double theta_b = 0.0;
};

struct NoiseParams {
  double n_bar = 0.0;
  double dt = 0.05e-9;
  std::uint64_t master_seed = 0;
};

struct DerivedParams {
  double gamma_p = 0.0;
  double gamma_total = 0.0;
  double n_crit = 0.0;
  double delta_ac = 0.0;
};

struct SystemParams {
  KerrParams kerr;
  CavityQubitParams cavity;
  NoiseParams noise;
  DerivedParams derived;
  // Reduces the dispersive shift as chi / (1 + n_b / (2 n_crit)).
  bool chi_correction = false;
  // Photon number subtracted from |beta|^2 before it enters the Stark shift
  // of a noisy trajectory; 1/2 removes the symmetric-ordering vacuum
  // contribution of the Wigner samples.
  double stark_vacuum_offset = 0.5;
};

// g^2 E_c / (delta_qb (delta_qb - E_c)).
double derive_dispersive_shift(double g, double delta_qb, double E_c);
// The dispersive shift every reported simulation uses, -2 pi x 2.5 MHz.
double quoted_dispersive_shift();
double derive_purcell_rate(double kappa_b, double g, double delta_qb);
double derive_ncrit(double delta_qb, double g);

// Defaults for every key under [system] and [protocol].
KeyValueDoc default_config();

// Keys that must be present under [system].
const std::vector<std::string>& required_system_keys();

// Reads [system]; throws ConfigError naming the offending or missing keys.
SystemParams load_and_validate(const KeyValueDoc& doc);

// Writes the external (MHz, ns) representation back under [system].
void store_system(const SystemParams& p, KeyValueDoc& doc);

}  // namespace kerrfb
