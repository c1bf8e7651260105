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

#include "kerrfb/kerrfb.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "kerrfb/bifurcation.hpp"
#include "kerrfb/config.hpp"
#include "kerrfb/ensemble.hpp"
#include "kerrfb/error.hpp"
#include "kerrfb/params.hpp"
#include "kerrfb/protocol.hpp"
#include "kerrfb/quantum_oracle.hpp"

struct kfb_config {
  kerrfb::KeyValueDoc doc;
};

struct kfb_schedule {
  kerrfb::Schedule schedule;
};

struct kfb_result {
  kerrfb::EnsembleResult result;
};

namespace {

thread_local std::string g_last_error;

kfb_status fail(kfb_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <typename Fn>
kfb_status guarded(Fn&& fn) {
  using namespace kerrfb;
  try {
    fn();
    g_last_error.clear();
    return KFB_OK;
  } catch (const ConfigError& e) {
    return fail(KFB_CONFIG, e.what());
  } catch (const NumericalBlowup& e) {
    return fail(KFB_NUMERICAL, e.what());
  } catch (const ScheduleError& e) {
    return fail(KFB_SCHEDULE, e.what());
  } catch (const CalibrationFailed& e) {
    return fail(KFB_CALIBRATION, e.what());
  } catch (const NoBistability& e) {
    return fail(KFB_NO_BISTABILITY, e.what());
  } catch (const TruncationError& e) {
    return fail(KFB_TRUNCATION, e.what());
  } catch (const IoError& e) {
    return fail(KFB_IO, e.what());
  } catch (const IndexError& e) {
    return fail(KFB_INDEX, e.what());
  } catch (const DegenerateDetuning& e) {
    return fail(KFB_DEGENERATE, e.what());
  } catch (const DegenerateCoupling& e) {
    return fail(KFB_DEGENERATE, e.what());
  } catch (const InvalidState& e) {
    return fail(KFB_NUMERICAL, e.what());
  } catch (const Error& e) {
    return fail(KFB_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(KFB_INTERNAL, e.what());
  } catch (...) {
    return fail(KFB_INTERNAL, "unknown failure");
  }
}

#define KFB_REQUIRE(cond)                                              \
  do {                                                                 \
    if (!(cond)) return fail(KFB_INVALID_ARGUMENT, "null or invalid argument: " #cond); \
  } while (0)

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw kerrfb::IoError("cannot write " + path);
  out << text;
  if (!out) throw kerrfb::IoError("write failed for " + path);
}

struct Resolved {
  kerrfb::SystemParams sys;
  kerrfb::ProtocolParams proto;
};

Resolved resolve(const kfb_config* cfg) {
  return {kerrfb::load_and_validate(cfg->doc), kerrfb::load_protocol(cfg->doc)};
}

kerrfb::ProtocolParams calibrated(const Resolved& r) {
  return kerrfb::resolve_protocol(r.sys, r.proto);
}

kerrfb::OracleConfig oracle_from(const Resolved& r, const kfb_oracle_options& o) {
  auto c = kerrfb::oracle_config(r.sys);
  c.dim = o.dim;
  c.ramp = o.ramp;
  c.duration = o.duration;
  c.workers = o.workers;
  c.record_interval = r.proto.record_interval;
  return c;
}

}  // namespace

extern "C" {

KFB_API const char* kfb_version(void) { return KERRFB_VERSION; }

KFB_API const char* kfb_last_error(void) { return g_last_error.c_str(); }

KFB_API const char* kfb_status_name(kfb_status s) {
  switch (s) {
    case KFB_OK: return "ok";
    case KFB_INVALID_ARGUMENT: return "invalid_argument";
    case KFB_CONFIG: return "config";
    case KFB_NUMERICAL: return "numerical";
    case KFB_SCHEDULE: return "schedule";
    case KFB_CALIBRATION: return "calibration";
    case KFB_NO_BISTABILITY: return "no_bistability";
    case KFB_TRUNCATION: return "truncation";
    case KFB_IO: return "io";
    case KFB_INDEX: return "index";
    case KFB_DEGENERATE: return "degenerate";
    case KFB_INTERNAL: return "internal";
  }
  return "unknown";
}

KFB_API kfb_status kfb_config_new(int with_defaults, kfb_config** out) {
  KFB_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto* c = new kfb_config;
    if (with_defaults) c->doc = kerrfb::default_config();
    *out = c;
  });
}

KFB_API kfb_status kfb_config_merge_file(kfb_config* cfg, const char* path) {
  KFB_REQUIRE(cfg && path);
  return guarded([&] { cfg->doc.merge(kerrfb::KeyValueDoc::load_file(path)); });
}

KFB_API kfb_status kfb_config_merge_text(kfb_config* cfg, const char* text) {
  KFB_REQUIRE(cfg && text);
  return guarded([&] { cfg->doc.merge(kerrfb::KeyValueDoc::parse(text)); });
}

KFB_API kfb_status kfb_config_set(kfb_config* cfg, const char* section,
                                  const char* key, const char* value) {
  KFB_REQUIRE(cfg && section && key && value);
  return guarded([&] { cfg->doc.set(section, key, value); });
}

KFB_API kfb_status kfb_config_get(const kfb_config* cfg, const char* section,
                                  const char* key, char* buf, size_t len,
                                  size_t* needed) {
  KFB_REQUIRE(cfg && section && key);
  const auto v = cfg->doc.get(section, key);
  if (!v) return fail(KFB_CONFIG, std::string("no key ") + section + "." + key);
  if (needed) *needed = v->size() + 1;
  if (!buf || len < v->size() + 1)
    return fail(KFB_INVALID_ARGUMENT, "buffer too small");
  std::memcpy(buf, v->c_str(), v->size() + 1);
  g_last_error.clear();
  return KFB_OK;
}

KFB_API kfb_status kfb_config_validate(const kfb_config* cfg) {
  KFB_REQUIRE(cfg);
  return guarded([&] { (void)resolve(cfg); });
}

KFB_API kfb_status kfb_config_write(const kfb_config* cfg, const char* path) {
  KFB_REQUIRE(cfg && path);
  return guarded([&] { cfg->doc.save_file(path); });
}

KFB_API void kfb_config_free(kfb_config* cfg) { delete cfg; }

KFB_API kfb_status kfb_config_derived(const kfb_config* cfg, kfb_derived* out) {
  KFB_REQUIRE(cfg && out);
  return guarded([&] {
    const auto r = resolve(cfg);
    out->chi = r.sys.cavity.chi;
    out->chi_formula = kerrfb::derive_dispersive_shift(
        r.sys.cavity.g, r.sys.cavity.delta_qb, r.sys.cavity.E_c);
    out->gamma_p = r.sys.derived.gamma_p;
    out->gamma_total = r.sys.derived.gamma_total;
    out->n_crit = r.sys.derived.n_crit;
    out->delta_ac = r.sys.derived.delta_ac;
    out->latch_threshold = kerrfb::latch_threshold(r.sys, r.proto);
  });
}

KFB_API kfb_status kfb_calibrate_threshold(const kfb_config* cfg,
                                           kfb_threshold* out) {
  KFB_REQUIRE(cfg && out);
  return guarded([&] {
    const auto r = resolve(cfg);
    const auto c = kerrfb::calibrate_network_threshold(r.sys, r.proto);
    out->alpha_d_low = c.alpha_d_low;
    out->alpha_d_high = c.alpha_d_high;
    out->plateau = c.plateau;
  });
}

KFB_API kfb_status kfb_calibrate(kfb_config* cfg) {
  KFB_REQUIRE(cfg);
  return guarded([&] {
    const auto r = resolve(cfg);
    const auto pp = calibrated(r);
    using kerrfb::format_double;
    cfg->doc.set("protocol", "alpha_d_meas", format_double(*pp.alpha_d_meas));
    cfg->doc.set("protocol", "alpha_in_over_sqrt_ka_re",
                 format_double(pp.alpha_in_over_sqrt_ka->real()));
    cfg->doc.set("protocol", "alpha_in_over_sqrt_ka_im",
                 format_double(pp.alpha_in_over_sqrt_ka->imag()));
  });
}

KFB_API kfb_status kfb_schedule_state_prep(const kfb_config* cfg,
                                           kfb_schedule** out) {
  KFB_REQUIRE(cfg && out);
  *out = nullptr;
  return guarded([&] {
    const auto r = resolve(cfg);
    *out = new kfb_schedule{kerrfb::build_state_prep(r.sys, calibrated(r))};
  });
}

KFB_API kfb_status kfb_schedule_stabilization(const kfb_config* cfg,
                                              uint32_t n_cycles,
                                              kfb_schedule** out) {
  KFB_REQUIRE(cfg && out);
  *out = nullptr;
  return guarded([&] {
    const auto r = resolve(cfg);
    *out = new kfb_schedule{
        kerrfb::build_stabilization(r.sys, calibrated(r), n_cycles)};
  });
}

KFB_API kfb_status kfb_schedule_memory(const kfb_config* cfg, double t_retune,
                                       int pre_pi, kfb_schedule** out) {
  KFB_REQUIRE(cfg && out);
  *out = nullptr;
  return guarded([&] {
    const auto r = resolve(cfg);
    const double wait = kerrfb::wait_for_retune_at(r.proto, t_retune);
    *out = new kfb_schedule{
        kerrfb::build_memory(r.sys, calibrated(r), wait, pre_pi != 0)};
  });
}

KFB_API kfb_status kfb_schedule_memory_wait(const kfb_config* cfg,
                                            double t_wait, int pre_pi,
                                            kfb_schedule** out) {
  KFB_REQUIRE(cfg && out);
  *out = nullptr;
  return guarded([&] {
    const auto r = resolve(cfg);
    *out = new kfb_schedule{
        kerrfb::build_memory(r.sys, calibrated(r), t_wait, pre_pi != 0)};
  });
}

KFB_API kfb_status kfb_schedule_load(const char* path, kfb_schedule** out) {
  KFB_REQUIRE(path && out);
  *out = nullptr;
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw kerrfb::IoError(std::string("cannot open ") + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    *out = new kfb_schedule{kerrfb::Schedule::from_text(text)};
  });
}

KFB_API kfb_status kfb_schedule_write(const kfb_schedule* s, const char* path) {
  KFB_REQUIRE(s && path);
  return guarded([&] { write_text(path, s->schedule.to_text()); });
}

KFB_API kfb_status kfb_schedule_duration(const kfb_schedule* s, double* out) {
  KFB_REQUIRE(s && out);
  *out = s->schedule.total_duration();
  return KFB_OK;
}

KFB_API kfb_status kfb_schedule_segments(const kfb_schedule* s, size_t* out) {
  KFB_REQUIRE(s && out);
  *out = s->schedule.segments().size();
  return KFB_OK;
}

KFB_API kfb_status kfb_schedule_hash(const kfb_schedule* s, char out[17]) {
  KFB_REQUIRE(s && out);
  const auto h = s->schedule.hash();
  std::memcpy(out, h.c_str(), 17);
  return KFB_OK;
}

KFB_API void kfb_schedule_free(kfb_schedule* s) { delete s; }

KFB_API kfb_run_options kfb_run_options_default(void) {
  kfb_run_options o;
  o.n_traj = 200;
  o.seed = 7;
  o.p_excited = 1.0;
  o.noise = 1;
  o.workers = 0;
  return o;
}

KFB_API kfb_status kfb_run_ensemble(const kfb_config* cfg,
                                    const kfb_schedule* s,
                                    const kfb_run_options* opt,
                                    kfb_result** out) {
  KFB_REQUIRE(cfg && s && opt && out);
  KFB_REQUIRE(opt->n_traj >= 1);
  KFB_REQUIRE(opt->p_excited >= 0.0 && opt->p_excited <= 1.0);
  *out = nullptr;
  return guarded([&] {
    const auto r = resolve(cfg);
    kerrfb::EnsembleOptions eo;
    eo.n_traj = opt->n_traj;
    eo.master_seed = opt->seed;
    eo.initial = kerrfb::InitialQubit::mixed(1.0 - opt->p_excited, opt->p_excited);
    eo.noise = opt->noise != 0;
    eo.workers = opt->workers;
    eo.record_interval = r.proto.record_interval;
    eo.latch_threshold = kerrfb::latch_threshold(r.sys, r.proto);
    *out = new kfb_result{kerrfb::run_ensemble(s->schedule, r.sys, eo)};
  });
}

KFB_API kfb_status kfb_result_length(const kfb_result* r, size_t* out) {
  KFB_REQUIRE(r && out);
  *out = r->result.time_grid.size();
  return KFB_OK;
}

KFB_API kfb_status kfb_result_series(const kfb_result* r, kfb_series which,
                                     double* buf, size_t len) {
  KFB_REQUIRE(r && buf);
  const std::vector<double>* v = nullptr;
  switch (which) {
    case KFB_SERIES_TIME: v = &r->result.time_grid; break;
    case KFB_SERIES_SZ: v = &r->result.mean_sz; break;
    case KFB_SERIES_NA: v = &r->result.mean_na; break;
    case KFB_SERIES_NB: v = &r->result.mean_nb; break;
  }
  KFB_REQUIRE(v);
  if (len < v->size()) return fail(KFB_INVALID_ARGUMENT, "buffer too small");
  std::memcpy(buf, v->data(), v->size() * sizeof(double));
  return KFB_OK;
}

KFB_API kfb_status kfb_result_fidelity(const kfb_result* r,
                                       kfb_fidelity_kind kind,
                                       int target_excited, double* out) {
  KFB_REQUIRE(r && out);
  return guarded([&] {
    const bool t = target_excited != 0;
    switch (kind) {
      case KFB_FIDELITY_FINAL: *out = kerrfb::final_fidelity(r->result, t); break;
      case KFB_FIDELITY_TIME_AVERAGED:
        *out = kerrfb::time_averaged_fidelity(r->result, t);
        break;
      case KFB_FIDELITY_PROTOCOL_END:
        *out = kerrfb::protocol_end_fidelity(r->result, t);
        break;
      default: throw kerrfb::Error("unknown fidelity kind");
    }
  });
}

KFB_API kfb_status kfb_result_fidelity_at(const kfb_result* r, double t,
                                          int target_excited, double* out) {
  KFB_REQUIRE(r && out);
  return guarded([&] {
    *out = kerrfb::fidelity_at_time(r->result, target_excited != 0, t);
  });
}

KFB_API kfb_status kfb_result_latching_fraction(const kfb_result* r,
                                                double threshold_n,
                                                double* out) {
  KFB_REQUIRE(r && out);
  *out = kerrfb::latching_fraction(r->result, threshold_n);
  return KFB_OK;
}

KFB_API kfb_status kfb_result_counts(const kfb_result* r, size_t* n_traj,
                                     size_t* n_failed) {
  KFB_REQUIRE(r);
  if (n_traj) *n_traj = r->result.n_traj;
  if (n_failed) *n_failed = r->result.n_failed;
  return KFB_OK;
}

KFB_API kfb_status kfb_result_write_means(const kfb_result* r,
                                          const char* path) {
  KFB_REQUIRE(r && path);
  return guarded([&] { write_text(path, kerrfb::means_csv(r->result)); });
}

KFB_API kfb_status kfb_result_write_finals(const kfb_result* r,
                                           const char* path) {
  KFB_REQUIRE(r && path);
  return guarded([&] { write_text(path, kerrfb::finals_csv(r->result)); });
}

KFB_API void kfb_result_free(kfb_result* r) { delete r; }

KFB_API kfb_status kfb_write_trajectory(const kfb_config* cfg,
                                        const kfb_schedule* s, int excited,
                                        uint64_t index, int noise,
                                        size_t stride, const char* path) {
  KFB_REQUIRE(cfg && s && path);
  return guarded([&] {
    const auto r = resolve(cfg);
    const auto seed =
        kerrfb::trajectory_seed(r.sys.noise.master_seed, index, excited != 0);
    const auto rows = kerrfb::record_trajectory(s->schedule, r.sys, excited != 0,
                                                seed, noise != 0, stride);
    write_text(path, kerrfb::trajectory_csv(rows));
  });
}

KFB_API kfb_status kfb_kerr_from_config(const kfb_config* cfg, kfb_kerr* out) {
  KFB_REQUIRE(cfg && out);
  return guarded([&] {
    const auto p = kerrfb::load_and_validate(cfg->doc);
    out->delta_a = p.kerr.delta_a0;
    out->K = p.kerr.K;
    out->kappa_a = p.kerr.kappa_a;
    out->kappa_d = p.kerr.kappa_d;
  });
}

KFB_API kfb_status kfb_critical_point(const kfb_kerr* k, kfb_critical* out) {
  KFB_REQUIRE(k && out);
  return guarded([&] {
    const auto cp =
        kerrfb::critical_photon_numbers(k->delta_a, k->K, k->kappa_a, k->kappa_d);
    out->n_c_minus = cp.n_c_minus;
    out->n_c_plus = cp.n_c_plus;
    out->drive_power_minus = cp.drive_power_minus;
    out->drive_power_plus = cp.drive_power_plus;
  });
}

KFB_API kfb_status kfb_bifurcation_csv(const kfb_kerr* k, double p_min,
                                       double p_max, size_t points,
                                       const char* path) {
  KFB_REQUIRE(k && path && points >= 2 && p_min >= 0.0 && p_max > p_min);
  return guarded([&] {
    std::vector<double> grid(points);
    for (size_t i = 0; i < points; ++i)
      grid[i] = p_min + (p_max - p_min) * static_cast<double>(i) /
                            static_cast<double>(points - 1);
    const auto sweep = kerrfb::hysteresis_sweep(k->delta_a, k->K, k->kappa_a,
                                                k->kappa_d, grid);
    write_text(path, kerrfb::hysteresis_csv(sweep));
  });
}

KFB_API kfb_oracle_options kfb_oracle_options_default(void) {
  kfb_oracle_options o;
  o.dim = 180;
  o.ramp = 100e-9;
  o.duration = 1e-6;
  o.n_traj = 100;
  o.seed = 11;
  o.workers = 0;
  return o;
}

KFB_API kfb_status kfb_oracle_calibrate_drive(const kfb_config* cfg,
                                              const kfb_oracle_options* opt,
                                              double target, double* out) {
  KFB_REQUIRE(cfg && opt && out && target > 0.0 && target < 1.0);
  return guarded([&] {
    const auto r = resolve(cfg);
    *out = kerrfb::calibrate_semiclassical_drive(
        oracle_from(r, *opt), target, opt->n_traj, opt->seed,
        kerrfb::latch_threshold(r.sys, r.proto), r.proto.alpha_d_phase);
  });
}

KFB_API kfb_status kfb_oracle_compare(const kfb_config* cfg,
                                      const kfb_oracle_options* opt,
                                      const double* drives, size_t n_drives,
                                      const char* out_dir, double* latch_mcwf,
                                      double* latch_semiclassical) {
  KFB_REQUIRE(cfg && opt && drives && n_drives > 0 && out_dir);
  return guarded([&] {
    const auto r = resolve(cfg);
    const auto all = kerrfb::compare_with_semiclassical(
        oracle_from(r, *opt), std::vector<double>(drives, drives + n_drives),
        opt->n_traj, opt->seed, kerrfb::latch_threshold(r.sys, r.proto),
        r.proto.alpha_d_phase);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    for (size_t i = 0; i < all.size(); ++i) {
      write_text((dir / ("oracle_drive_" + std::to_string(i) + ".csv")).string(),
                 kerrfb::comparison_csv(all[i]));
      if (latch_mcwf) latch_mcwf[i] = all[i].latch_mcwf;
      if (latch_semiclassical) latch_semiclassical[i] = all[i].latch_semiclassical;
    }
    write_text((dir / "latching.csv").string(),
               kerrfb::latching_summary_csv(all, opt->n_traj));
  });
}

}  // extern "C"
