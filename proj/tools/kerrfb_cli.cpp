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

// Command-line front end. Talks to the simulator only through kerrfb.h.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kerrfb/kerrfb.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Failure {
  kfb_status status;
  std::string what;
};

void check(kfb_status s) {
  if (s != KFB_OK) throw Failure{s, kfb_last_error()};
}

int exit_code(kfb_status s) {
  switch (s) {
    case KFB_CONFIG:
    case KFB_IO:
    case KFB_INVALID_ARGUMENT:
      return kExitConfig;
    default:
      return kExitNumerical;
  }
}

// Everything that determines a run. It is written to the manifest's [run]
// section and read back by `rerun`.
struct Options {
  std::string subcommand;
  std::string config_path;
  std::string out = "out";
  std::vector<std::string> sets;
  std::string seed;
  std::string dt_ns;
  std::string t1_us;
  std::string chi_correction;
  std::size_t traj = 200;
  std::string initial;
  std::uint32_t cycles = 0;
  double twait_us = 0.0;
  double retune_us = 78.0;
  std::string protocol = "state-prep";
  std::uint64_t index = 0;
  std::size_t stride = 20;
  std::string noise = "on";
  std::string scenario = "config";
  std::size_t points = 401;
  double span = 1.5;
  std::string drives = "auto";
  std::size_t dim = 180;
  double duration_ns = 1000.0;
  double ramp_ns = 100.0;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

struct Config {
  kfb_config* ptr = nullptr;
  Config() { check(kfb_config_new(1, &ptr)); }
  ~Config() { kfb_config_free(ptr); }
  Config(const Config&) = delete;
  Config& operator=(const Config&) = delete;

  void set(const std::string& sec, const std::string& key, const std::string& v) {
    check(kfb_config_set(ptr, sec.c_str(), key.c_str(), v.c_str()));
  }
  std::string get(const std::string& sec, const std::string& key) const {
    std::size_t need = 0;
    kfb_config_get(ptr, sec.c_str(), key.c_str(), nullptr, 0, &need);
    if (need == 0) check(kfb_config_get(ptr, sec.c_str(), key.c_str(), nullptr, 0, &need));
    std::string buf(need, '\0');
    check(kfb_config_get(ptr, sec.c_str(), key.c_str(), buf.data(), need, &need));
    buf.resize(need - 1);
    return buf;
  }
};

struct Schedule {
  kfb_schedule* ptr = nullptr;
  ~Schedule() { kfb_schedule_free(ptr); }
};

struct Result {
  kfb_result* ptr = nullptr;
  ~Result() { kfb_result_free(ptr); }
};

unsigned workers_from_env() {
  const char* w = std::getenv("KERRFB_WORKERS");
  if (!w || !*w) return 0;
  char* end = nullptr;
  const unsigned long v = std::strtoul(w, &end, 10);
  if (*end != '\0') throw Failure{KFB_INVALID_ARGUMENT, "KERRFB_WORKERS must be an integer"};
  return static_cast<unsigned>(v);
}

void apply_options(Config& cfg, const Options& o) {
  if (!o.config_path.empty()) check(kfb_config_merge_file(cfg.ptr, o.config_path.c_str()));
  for (const auto& s : o.sets) {
    const auto dot = s.find('.');
    const auto eq = s.find('=');
    if (dot == std::string::npos || eq == std::string::npos || dot > eq)
      throw Failure{KFB_CONFIG, "--set expects section.key=value, got '" + s + "'"};
    cfg.set(s.substr(0, dot), s.substr(dot + 1, eq - dot - 1), s.substr(eq + 1));
  }
  if (!o.seed.empty()) cfg.set("system", "master_seed", o.seed);
  if (!o.dt_ns.empty()) cfg.set("system", "dt_ns", o.dt_ns);
  if (!o.t1_us.empty()) cfg.set("system", "t1_us", o.t1_us);
  if (!o.chi_correction.empty()) cfg.set("system", "chi_correction", o.chi_correction);
  if (o.cycles > 0) cfg.set("protocol", "n_cycles", std::to_string(o.cycles));
  check(kfb_config_validate(cfg.ptr));
}

// Probability of starting in |1> from "0", "1" or "mixed:P1".
double parse_initial(const std::string& s) {
  if (s == "0") return 0.0;
  if (s == "1") return 1.0;
  if (s.rfind("mixed:", 0) == 0) {
    char* end = nullptr;
    const double p = std::strtod(s.c_str() + 6, &end);
    if (*end == '\0' && p >= 0.0 && p <= 1.0) return p;
  }
  throw Failure{KFB_CONFIG, "--initial expects 0, 1 or mixed:P1, got '" + s + "'"};
}

bool parse_on_off(const std::string& s, const std::string& flag) {
  if (s == "on") return true;
  if (s == "off") return false;
  throw Failure{KFB_CONFIG, flag + " expects on or off"};
}

struct Manifest {
  std::vector<std::string> outputs;
  std::string schedule_hash = "none";
  std::string status = "ok";
};

void write_manifest(Config& cfg, const Options& o, const Manifest& m,
                    double wall) {
  const std::string r = "run";
  cfg.set(r, "subcommand", o.subcommand);
  cfg.set(r, "code_version", kfb_version());
  cfg.set(r, "status", m.status);
  cfg.set(r, "traj", std::to_string(o.traj));
  cfg.set(r, "seed", cfg.get("system", "master_seed"));
  cfg.set(r, "initial", o.initial.empty() ? "default" : o.initial);
  cfg.set(r, "cycles", std::to_string(o.cycles));
  cfg.set(r, "twait_us", fmt(o.twait_us));
  cfg.set(r, "retune_us", fmt(o.retune_us));
  cfg.set(r, "protocol", o.protocol);
  cfg.set(r, "index", std::to_string(o.index));
  cfg.set(r, "stride", std::to_string(o.stride));
  cfg.set(r, "noise", o.noise);
  cfg.set(r, "scenario", o.scenario);
  cfg.set(r, "points", std::to_string(o.points));
  cfg.set(r, "span", fmt(o.span));
  cfg.set(r, "drives", o.drives);
  cfg.set(r, "dim", std::to_string(o.dim));
  cfg.set(r, "duration_ns", fmt(o.duration_ns));
  cfg.set(r, "ramp_ns", fmt(o.ramp_ns));
  cfg.set(r, "schedule_hash", m.schedule_hash);
  cfg.set(r, "wall_time_s", fmt(wall));
  std::string outs;
  for (const auto& f : m.outputs) outs += (outs.empty() ? "" : ",") + f;
  cfg.set(r, "outputs", outs.empty() ? "none" : outs);
  check(kfb_config_write(cfg.ptr, (fs::path(o.out) / "manifest.toml").c_str()));
}

std::string out_file(const Options& o, Manifest& m, const std::string& name) {
  m.outputs.push_back(name);
  return (fs::path(o.out) / name).string();
}

void build_schedule(Config& cfg, const Options& o, const std::string& which,
                    Schedule& s) {
  if (which == "state-prep") {
    check(kfb_schedule_state_prep(cfg.ptr, &s.ptr));
  } else if (which == "stabilize") {
    const auto n = static_cast<std::uint32_t>(std::stoul(cfg.get("protocol", "n_cycles")));
    check(kfb_schedule_stabilization(cfg.ptr, n, &s.ptr));
  } else if (which == "memory") {
    if (o.twait_us > 0.0)
      check(kfb_schedule_memory_wait(cfg.ptr, o.twait_us * 1e-6, 1, &s.ptr));
    else
      check(kfb_schedule_memory(cfg.ptr, o.retune_us * 1e-6, 1, &s.ptr));
  } else {
    throw Failure{KFB_CONFIG, "unknown protocol '" + which + "'"};
  }
}

std::string hash_of(const Schedule& s) {
  char h[17];
  check(kfb_schedule_hash(s.ptr, h));
  return h;
}

void run_experiment(Config& cfg, const Options& o, Manifest& m) {
  check(kfb_calibrate(cfg.ptr));
  Schedule s;
  build_schedule(cfg, o, o.subcommand, s);
  m.schedule_hash = hash_of(s);
  check(kfb_schedule_write(s.ptr, out_file(o, m, "schedule.txt").c_str()));

  const std::string initial =
      !o.initial.empty() ? o.initial : (o.subcommand == "state-prep" ? "mixed:0.5" : "1");
  kfb_run_options ro = kfb_run_options_default();
  ro.n_traj = o.traj;
  ro.seed = std::stoull(cfg.get("system", "master_seed"));
  ro.p_excited = parse_initial(initial);
  ro.noise = parse_on_off(o.noise, "--noise");
  ro.workers = workers_from_env();
  Result r;
  check(kfb_run_ensemble(cfg.ptr, s.ptr, &ro, &r.ptr));
  check(kfb_result_write_means(r.ptr, out_file(o, m, "means.csv").c_str()));
  check(kfb_result_write_finals(r.ptr, out_file(o, m, "finals.csv").c_str()));

  kfb_derived d;
  check(kfb_config_derived(cfg.ptr, &d));
  double f_final1 = 0, f_final0 = 0, f_avg = 0, f_end = 0, latch = 0;
  check(kfb_result_fidelity(r.ptr, KFB_FIDELITY_FINAL, 1, &f_final1));
  check(kfb_result_fidelity(r.ptr, KFB_FIDELITY_FINAL, 0, &f_final0));
  check(kfb_result_fidelity(r.ptr, KFB_FIDELITY_TIME_AVERAGED, 1, &f_avg));
  check(kfb_result_fidelity(r.ptr, KFB_FIDELITY_PROTOCOL_END, 1, &f_end));
  check(kfb_result_latching_fraction(r.ptr, d.latch_threshold, &latch));
  std::size_t n = 0, failed = 0;
  check(kfb_result_counts(r.ptr, &n, &failed));

  std::ofstream sum(out_file(o, m, "summary.csv"));
  sum.precision(17);
  sum << "metric,value\n"
      << "p1_final," << f_final1 << "\n"
      << "p0_final," << f_final0 << "\n"
      << "p1_time_averaged," << f_avg << "\n"
      << "p1_protocol_end," << f_end << "\n"
      << "latching_fraction," << latch << "\n"
      << "n_traj," << n << "\n"
      << "n_failed," << failed << "\n";
  std::printf("P(|1>) final %.4f  time-averaged %.4f  protocol-end %.4f  latched %.3f  failed %zu/%zu\n",
              f_final1, f_avg, f_end, latch, failed, n);
}

void run_trajectory(Config& cfg, const Options& o, Manifest& m) {
  check(kfb_calibrate(cfg.ptr));
  Schedule s;
  build_schedule(cfg, o, o.protocol, s);
  m.schedule_hash = hash_of(s);
  const double p1 = parse_initial(o.initial.empty() ? "1" : o.initial);
  if (p1 != 0.0 && p1 != 1.0)
    throw Failure{KFB_CONFIG, "a single trajectory needs --initial 0 or 1"};
  check(kfb_write_trajectory(cfg.ptr, s.ptr, p1 == 1.0, o.index,
                             parse_on_off(o.noise, "--noise"), o.stride,
                             out_file(o, m, "trajectory.csv").c_str()));
}

void run_bifurcation(Config& cfg, const Options& o, Manifest& m) {
  kfb_kerr k;
  check(kfb_kerr_from_config(cfg.ptr, &k));
  if (o.scenario == "demo") {
    const double kappa = k.kappa_a + k.kappa_d;
    k.delta_a = 1.75 * std::sqrt(0.75) * kappa;
    k.K = -0.012 * k.delta_a;
  } else if (o.scenario != "config") {
    throw Failure{KFB_CONFIG, "--scenario expects config or demo"};
  }
  kfb_critical c;
  check(kfb_critical_point(&k, &c));
  check(kfb_bifurcation_csv(&k, 0.0, o.span * c.drive_power_plus, o.points,
                            out_file(o, m, "bifurcation.csv").c_str()));
  std::printf("n_c- %.4f  n_c+ %.4f  drive powers %.6g .. %.6g\n", c.n_c_minus,
              c.n_c_plus, c.drive_power_minus, c.drive_power_plus);
}

void run_oracle(Config& cfg, const Options& o, Manifest& m) {
  kfb_oracle_options oo = kfb_oracle_options_default();
  oo.dim = o.dim;
  oo.duration = o.duration_ns * 1e-9;
  oo.ramp = o.ramp_ns * 1e-9;
  oo.n_traj = o.traj;
  oo.seed = std::stoull(cfg.get("system", "master_seed"));
  oo.workers = workers_from_env();
  std::vector<double> drives;
  if (o.drives == "auto") {
    kfb_kerr k;
    check(kfb_kerr_from_config(cfg.ptr, &k));
    kfb_critical c;
    check(kfb_critical_point(&k, &c));
    double mid = 0.0;
    check(kfb_oracle_calibrate_drive(cfg.ptr, &oo, 0.22, &mid));
    drives = {0.5 * std::sqrt(c.drive_power_minus) / k.kappa_d, mid,
              1.3 * std::sqrt(c.drive_power_plus) / k.kappa_d};
  } else {
    std::stringstream ss(o.drives);
    for (std::string item; std::getline(ss, item, ',');) drives.push_back(std::stod(item));
  }
  std::vector<double> lm(drives.size()), ls(drives.size());
  check(kfb_oracle_compare(cfg.ptr, &oo, drives.data(), drives.size(),
                           o.out.c_str(), lm.data(), ls.data()));
  for (std::size_t i = 0; i < drives.size(); ++i) {
    m.outputs.push_back("oracle_drive_" + std::to_string(i) + ".csv");
    std::printf("drive %.4f: latching mcwf %.3f semiclassical %.3f\n", drives[i],
                lm[i], ls[i]);
  }
  m.outputs.push_back("latching.csv");
}

void run_calibrate(Config& cfg, const Options& o, Manifest& m) {
  kfb_threshold t;
  check(kfb_calibrate_threshold(cfg.ptr, &t));
  check(kfb_calibrate(cfg.ptr));
  check(kfb_config_write(cfg.ptr, out_file(o, m, "calibrated.toml").c_str()));
  std::printf("discriminating drive interval [%.6f, %.6f], plateau %.6f\n",
              t.alpha_d_low, t.alpha_d_high, t.plateau);
}

int execute(Config& cfg, const Options& o) {
  fs::create_directories(o.out);
  Manifest m;
  const auto t0 = std::chrono::steady_clock::now();
  auto wall = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  try {
    if (o.subcommand == "bifurcation") run_bifurcation(cfg, o, m);
    else if (o.subcommand == "trajectory") run_trajectory(cfg, o, m);
    else if (o.subcommand == "oracle-compare") run_oracle(cfg, o, m);
    else if (o.subcommand == "calibrate") run_calibrate(cfg, o, m);
    else run_experiment(cfg, o, m);
  } catch (const Failure& f) {
    if (f.status == KFB_NUMERICAL) {
      m.status = "numerical_failure";
      write_manifest(cfg, o, m, wall());
    }
    throw;
  }
  write_manifest(cfg, o, m, wall());
  return kExitOk;
}

// Rebuilds the options of a finished run from its manifest. The manifest's
// [system] and [protocol] sections already hold every resolved value.
Options options_from_manifest(Config& cfg, const std::string& path,
                              const std::string& out) {
  check(kfb_config_merge_file(cfg.ptr, path.c_str()));
  Options o;
  o.subcommand = cfg.get("run", "subcommand");
  o.out = out;
  o.traj = std::stoul(cfg.get("run", "traj"));
  const auto initial = cfg.get("run", "initial");
  o.initial = initial == "default" ? "" : initial;
  o.cycles = static_cast<std::uint32_t>(std::stoul(cfg.get("run", "cycles")));
  o.twait_us = std::stod(cfg.get("run", "twait_us"));
  o.retune_us = std::stod(cfg.get("run", "retune_us"));
  o.protocol = cfg.get("run", "protocol");
  o.index = std::stoull(cfg.get("run", "index"));
  o.stride = std::stoul(cfg.get("run", "stride"));
  o.noise = cfg.get("run", "noise");
  o.scenario = cfg.get("run", "scenario");
  o.points = std::stoul(cfg.get("run", "points"));
  o.span = std::stod(cfg.get("run", "span"));
  o.drives = cfg.get("run", "drives");
  o.dim = std::stoul(cfg.get("run", "dim"));
  o.duration_ns = std::stod(cfg.get("run", "duration_ns"));
  o.ramp_ns = std::stod(cfg.get("run", "ramp_ns"));
  check(kfb_config_validate(cfg.ptr));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kerr-resonator feedback simulator"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool ensemble) {
    sub->add_option("--config", o.config_path, "Configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--dt-ns", o.dt_ns, "Integration step in ns");
    sub->add_option("--t1-us", o.t1_us, "Qubit T1 in us, or off");
    sub->add_option("--chi-correction", o.chi_correction, "on or off")
        ->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--set", o.sets, "Override section.key=value");
    if (ensemble) {
      sub->add_option("--traj", o.traj, "Number of trajectories")->check(CLI::PositiveNumber);
      sub->add_option("--initial", o.initial, "Initial qubit: 0, 1 or mixed:P1");
      sub->add_option("--noise", o.noise, "on or off")->check(CLI::IsMember({"on", "off"}));
    }
  };

  auto* bif = app.add_subcommand("bifurcation", "Steady states and hysteresis of the isolated resonator");
  common(bif, false);
  bif->add_option("--scenario", o.scenario, "config, or demo (detuning 1.75x critical, K = -0.012 x detuning)")->check(CLI::IsMember({"config", "demo"}));
  bif->add_option("--points", o.points, "Drive grid points")->check(CLI::Range(2, 10000000));
  bif->add_option("--span", o.span, "Grid end relative to the upper critical drive")
      ->check(CLI::PositiveNumber);

  auto* traj = app.add_subcommand("trajectory", "Single trajectory time series");
  common(traj, true);
  traj->add_option("--protocol", o.protocol, "state-prep, stabilize or memory")
      ->check(CLI::IsMember({"state-prep", "stabilize", "memory"}));
  traj->add_option("--index", o.index, "Trajectory index within its group");
  traj->add_option("--stride", o.stride, "Record every N steps")->check(CLI::PositiveNumber);
  traj->add_option("--cycles", o.cycles, "Stabilization cycles");
  traj->add_option("--twait-us", o.twait_us, "Memory wait in us");
  traj->add_option("--retune-us", o.retune_us, "Memory retuning start in us");

  auto* sp = app.add_subcommand("state-prep", "State-preparation ensemble");
  common(sp, true);
  auto* st = app.add_subcommand("stabilize", "Repeated stabilization ensemble");
  common(st, true);
  st->add_option("--cycles", o.cycles, "Number of cycles")->check(CLI::PositiveNumber);
  auto* mem = app.add_subcommand("memory", "Memory-recovery ensemble");
  common(mem, true);
  mem->add_option("--twait-us", o.twait_us, "Wait in us (overrides --retune-us)");
  mem->add_option("--retune-us", o.retune_us, "Retuning start in us");

  auto* orc = app.add_subcommand("oracle-compare", "Fock-space trajectories against the mean-field engine");
  common(orc, false);
  orc->add_option("--traj", o.traj, "Trajectories per method and drive")->check(CLI::PositiveNumber);
  orc->add_option("--drives", o.drives, "Comma-separated alpha_d/sqrt(kappa_d), or auto");
  orc->add_option("--dim", o.dim, "Fock-space dimension")->check(CLI::Range(2, 100000));
  orc->add_option("--duration-ns", o.duration_ns, "Simulated time")->check(CLI::PositiveNumber);
  orc->add_option("--ramp-ns", o.ramp_ns, "Drive ramp time")->check(CLI::PositiveNumber);

  auto* cal = app.add_subcommand("calibrate", "Network threshold and cancellation drive");
  common(cal, false);

  std::string manifest_path;
  auto* rerun = app.add_subcommand("rerun", "Repeat a run from its manifest");
  rerun->add_option("--manifest", manifest_path, "manifest.toml of a previous run")
      ->required()
      ->check(CLI::ExistingFile);
  rerun->add_option("--out", o.out, "Output directory")->required();

  if (argc <= 1) {
    std::cout << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    Config cfg;
    if (rerun->parsed()) {
      Config fresh;
      kfb_config_free(fresh.ptr);
      check(kfb_config_new(0, &fresh.ptr));
      const Options ro = options_from_manifest(fresh, manifest_path, o.out);
      return execute(fresh, ro);
    }
    o.subcommand = app.get_subcommands().front()->get_name();
    apply_options(cfg, o);
    return execute(cfg, o);
  } catch (const Failure& f) {
    std::cerr << "error (" << kfb_status_name(f.status) << "): " << f.what << "\n";
    return exit_code(f.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
