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
#include <optional>

#include "kerrfb/config.hpp"
#include "kerrfb/params.hpp"
#include "kerrfb/schedule.hpp"

namespace kerrfb {

struct ProtocolParams {
  double T_M = 400e-9;
  double ramp_up = 80e-9;
  double T_s = 150e-9;
  double T_delta = 100e-9;
  double T_wait = 25e-9;
  double T_d = 15e-9;
  double T_pi = 35.7e-9;
  // Drive-off interval that lets the Kerr resonator relax between
  // consecutive cycles of a stabilization run.
  double T_reset = 150e-9;
  double stab_detuning_factor = 1.7;
  double stab_drive_factor = 1.8;
  double delta_t = 0.0;
  double omega_pi = 0.0;
  // sqrt(kappa_p) |alpha_p| in rad/s; applied with a pi/2 phase.
  double purcell_drive = 0.0;
  // Measurement plateau |alpha_d| / sqrt(kappa_d); calibrated when empty.
  std::optional<double> alpha_d_meas;
  double alpha_d_phase = 0.0;
  // Cancellation drive alpha_in / sqrt(kappa_a); calibrated when empty.
  std::optional<cplx> alpha_in_over_sqrt_ka;
  // Where the plateau sits inside the discriminating drive interval.
  double threshold_position = 0.12;
  double tuning_rate_multiplier = 2.0;
  std::uint32_t n_cycles = 20;
  double record_interval = 1e-9;
  // Kerr photon number separating the latched branches; derived from the
  // isolated resonator when empty.
  std::optional<double> latch_threshold;
};

ProtocolParams load_protocol(const KeyValueDoc& doc);
void store_protocol(const ProtocolParams& pp, KeyValueDoc& doc);

// Photon-number threshold used to classify a trajectory as latched.
double latch_threshold(const SystemParams& p, const ProtocolParams& pp);

// T_wait that starts the retuning ramp at `t_retune` in a memory schedule.
double wait_for_retune_at(const ProtocolParams& pp, double t_retune);

Schedule build_state_prep(const SystemParams& p, const ProtocolParams& pp);
Schedule build_stabilization(const SystemParams& p, const ProtocolParams& pp,
                             std::uint32_t n_cycles);
Schedule build_memory(const SystemParams& p, const ProtocolParams& pp,
                      double T_wait_long, bool pre_pi = true);

// Throws ScheduleError if any segment tunes Delta_a or Delta_b faster than
// multiplier * (kappa_a + kappa_d)^2.
void check_tuning_rate(const Schedule& s, const SystemParams& p,
                       double multiplier);

struct ThresholdCalibration {
  // Smallest plateau (alpha_d / sqrt(kappa_d)) that latches the
  // |1>-conditioned measurement.
  double alpha_d_low = 0.0;
  // Smallest plateau that latches the |0>-conditioned measurement.
  double alpha_d_high = 0.0;
  double plateau = 0.0;
};

// Noise-free, qubit-conditioned bisection over the measurement plateau.
ThresholdCalibration calibrate_network_threshold(const SystemParams& p,
                                                 const ProtocolParams& pp);

struct FoldDrives {
  // Plateau above which a resonator starting empty ends latched high.
  double up = 0.0;
  // Plateau below which a resonator starting latched high falls back.
  double down = 0.0;
};

// Fold drives (alpha_d / sqrt(kappa_d)) of the coupled network with the qubit
// held at sz, found from noise-free ramps held for `hold` seconds.
FoldDrives network_fold_drives(const SystemParams& p, const ProtocolParams& pp,
                               double sz, double hold);

// Damped fixed-point iteration for the tee-port drive that cancels the
// |0>-memory Kerr emission reaching the cavity. Returns alpha_in / sqrt(k_a).
cplx calibrate_alpha_in(const SystemParams& p, const ProtocolParams& pp);

// Fills every calibrated field that is still empty.
ProtocolParams resolve_protocol(const SystemParams& p, ProtocolParams pp);

}  // namespace kerrfb
