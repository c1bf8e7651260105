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

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "kerrfb/params.hpp"
#include "kerrfb/schedule.hpp"
#include "kerrfb/sde_engine.hpp"

// Fock-space Monte-Carlo wavefunction model of the isolated Kerr resonator,
//   d|psi>/dt = -i H |psi> - (kappa_a + kappa_d)/2 n |psi>,
//   H = Delta n + (K/2) n^2 + i (eps a^dag - conj(eps) a),  eps = sqrt(k_d) alpha_d,
// with jumps by a. Its drive term carries the opposite sign of the
// mean-field equation, so <a> here corresponds to -alpha there; photon
// numbers are unaffected.
namespace kerrfb {

struct FockVector {
  std::vector<cplx> amplitudes;
  double norm_sq = 1.0;
  double r_threshold = 0.5;
  std::uint32_t jumps = 0;

  static FockVector vacuum(std::size_t dim);
  // Truncated coherent state |alpha>.
  static FockVector coherent(std::size_t dim, cplx alpha);
  std::size_t dim() const { return amplitudes.size(); }
  double mean_n() const;
  cplx mean_a() const;
  // Share of the population in the top tenth of the basis.
  double tail_population() const;
};

// -i H |psi> - (kappa_sum/2) n |psi>. Throws TruncationError when the top
// tenth of the basis holds more than 1e-6 of the population.
std::vector<cplx> apply_effective_hamiltonian(const FockVector& v,
                                              double delta_a, double K,
                                              cplx drive, double kappa_sum);

struct OracleConfig {
  double delta_a = 0.0;
  double K = 0.0;
  double kappa_a = 0.0;
  double kappa_d = 0.0;
  std::size_t dim = 180;
  double dt = 0.05e-9;
  double ramp = 100e-9;
  double duration = 1e-6;
  double record_interval = 1e-9;
  unsigned workers = 0;
};

// Oracle settings derived from the system's Kerr resonator.
OracleConfig oracle_config(const SystemParams& p);
// Kerr-resonator-only parameters: no cavity, qubit or Purcell channels.
SystemParams kerr_only(const SystemParams& p, const OracleConfig& c);

// Drive ramped from zero to alpha_d / sqrt(kappa_d) = drive over c.ramp and
// held until c.duration.
Schedule oracle_schedule(const OracleConfig& c, double drive, double phase);

struct OracleEnsemble {
  std::vector<double> time_grid;
  std::vector<double> mean_n;
  std::vector<double> sem_n;  // standard error of mean_n
  std::vector<cplx> mean_a;
  std::vector<double> final_n;
  std::uint64_t total_jumps = 0;
  // Sum over trajectories of the integral of <n> dt.
  double integrated_n = 0.0;
};

// Quantum trajectories stepped with a fourth-order interaction-picture
// Runge-Kutta scheme that treats the diagonal part exactly.
OracleEnsemble mcwf_ensemble(const OracleConfig& c, const Schedule& s,
                             std::size_t n_traj, std::uint64_t seed,
                             const FockVector& initial);

// The mean-field engine on the same schedule; mean_n reports |alpha|^2 - 1/2.
OracleEnsemble semiclassical_ensemble(const OracleConfig& c, const Schedule& s,
                                      std::size_t n_traj, std::uint64_t seed,
                                      bool noise, cplx initial_alpha = 0.0);

double latching_fraction(const OracleEnsemble& e, double threshold_n);

struct DriveComparison {
  double drive = 0.0;
  OracleEnsemble mcwf;
  OracleEnsemble semiclassical;
  double latch_mcwf = 0.0;
  double latch_semiclassical = 0.0;
  // Inside the isolated-resonator hysteresis window the two descriptions are
  // expected to latch differently.
  bool discrepancy_expected = false;
};

std::vector<DriveComparison> compare_with_semiclassical(
    const OracleConfig& c, const std::vector<double>& drives,
    std::size_t n_traj, std::uint64_t seed, double latch_threshold_n,
    double phase);

// Drive (alpha_d / sqrt(kappa_d)) at which the semiclassical ensemble latches
// with the requested fraction, by bisection with common random numbers.
double calibrate_semiclassical_drive(const OracleConfig& c, double target,
                                     std::size_t n_traj, std::uint64_t seed,
                                     double latch_threshold_n, double phase);

std::string comparison_csv(const DriveComparison& d);
std::string latching_summary_csv(const std::vector<DriveComparison>& all,
                                 std::size_t n_traj);

}  // namespace kerrfb
