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

#include "kerrfb/params.hpp"
#include "kerrfb/schedule.hpp"
#include "kerrfb/sde_engine.hpp"

namespace kerrfb {

// Fraction of trajectories started in |0> and |1>.
struct InitialQubit {
  double p0 = 1.0;
  double p1 = 0.0;

  static InitialQubit ground() { return {1.0, 0.0}; }
  static InitialQubit excited() { return {0.0, 1.0}; }
  static InitialQubit mixed(double p0, double p1) { return {p0, p1}; }
};

struct EnsembleOptions {
  std::size_t n_traj = 1;
  std::uint64_t master_seed = 0;
  InitialQubit initial;
  bool noise = true;
  double record_interval = 1e-9;
  double latch_threshold = 0.0;
  // 0 selects the hardware concurrency.
  unsigned workers = 0;
  // Segments whose ends are sampled individually (protocol-end fidelity).
  std::string marker_segment = "pi_pulse";
  // The qubit is projected onto an eigenstate when each segment of this name
  // begins; empty disables readout collapse.
  std::string readout_segment = "measure_ramp";
};

struct TrajectoryFinal {
  double sz_final = 0.0;
  double na_final = 0.0;
  bool jumped = false;
  bool latched = false;
  bool failed = false;
  bool started_excited = false;
};

struct EnsembleResult {
  std::vector<double> time_grid;
  std::vector<double> mean_sz;
  std::vector<double> mean_na;
  std::vector<double> mean_nb;
  std::vector<double> marker_times;
  std::vector<double> marker_sz;
  std::vector<TrajectoryFinal> finals;
  std::size_t n_traj = 0;
  std::size_t n_failed = 0;
  std::uint64_t master_seed = 0;
};

std::uint64_t splitmix64(std::uint64_t x);
// Seed of the index-th trajectory among those started in the given state.
std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index,
                              bool excited);

EnsembleResult run_ensemble(const Schedule& s, const SystemParams& p,
                            const EnsembleOptions& opt);

// P(target) = (1 +/- mean_sz) / 2 at a recorded index.
double fidelity(const EnsembleResult& r, bool target_excited, std::size_t index);
// Same at the recorded time nearest to t; t outside the run is an IndexError.
double fidelity_at_time(const EnsembleResult& r, bool target_excited, double t);
double final_fidelity(const EnsembleResult& r, bool target_excited);
// Trapezoidal time average over the whole record.
double time_averaged_fidelity(const EnsembleResult& r, bool target_excited);
// Mean fidelity at the marker-segment ends.
double protocol_end_fidelity(const EnsembleResult& r, bool target_excited);
double latching_fraction(const EnsembleResult& r, double threshold_n);

std::string means_csv(const EnsembleResult& r);
std::string finals_csv(const EnsembleResult& r);

struct TrajectorySample {
  double t = 0.0;
  cplx alpha;
  cplx beta;
  double sz = 0.0;
};

// Single trajectory sampled every `stride` steps (and at the end), using the
// same seed as the ensemble's trajectory of that index.
std::vector<TrajectorySample> record_trajectory(const Schedule& s,
                                                const SystemParams& p,
                                                bool excited,
                                                std::uint64_t seed, bool noise,
                                                std::size_t stride,
                                                const std::string& readout_segment =
                                                    "measure_ramp");
std::string trajectory_csv(const std::vector<TrajectorySample>& rows);

}  // namespace kerrfb
