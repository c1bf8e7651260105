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

#include <string>
#include <vector>

// Steady states of the isolated driven Kerr resonator. Photon numbers n solve
//   K^2 n^3 + 2 delta K n^2 + (delta^2 + kappa^2/4) n - P = 0,
// with kappa = kappa_a + kappa_d and drive power P = kappa_d |alpha_d|^2.
namespace kerrfb {

enum class Regime { monostable_low, bistable, monostable_high };

const char* regime_name(Regime r);

struct SteadyStateSolution {
  std::vector<double> roots;  // ascending
  std::vector<bool> stable;
  Regime regime = Regime::monostable_low;
};

struct CriticalPoint {
  double n_c_minus = 0.0;
  double n_c_plus = 0.0;
  // Drive power at which the low branch ends (substituting n_c_minus).
  double drive_power_plus = 0.0;
  // Drive power at which the high branch ends (substituting n_c_plus).
  double drive_power_minus = 0.0;
};

double critical_detuning(double kappa_a, double kappa_d);

// Drive power that sustains photon number n.
double drive_power_for(double n, double delta_a, double K, double kappa_a,
                       double kappa_d);

CriticalPoint critical_photon_numbers(double delta_a, double K, double kappa_a,
                                      double kappa_d);

SteadyStateSolution steady_states(double drive_power, double delta_a, double K,
                                  double kappa_a, double kappa_d);

struct HysteresisSweep {
  std::vector<double> drive;
  std::vector<double> n_up;
  std::vector<double> n_down;
  std::vector<int> n_roots;
  std::vector<Regime> regime;
  // Fold locations refined by bisection; zero when there is no window.
  double up_jump_drive = 0.0;
  double down_jump_drive = 0.0;
  bool bistable = false;
};

HysteresisSweep hysteresis_sweep(double delta_a, double K, double kappa_a,
                                 double kappa_d,
                                 const std::vector<double>& drive_grid);

// Geometric mean of the two stable photon numbers at the geometric mean of
// the critical drive powers.
double default_latch_threshold(double delta_a, double K, double kappa_a,
                               double kappa_d);

std::string hysteresis_csv(const HysteresisSweep& s);

}  // namespace kerrfb
