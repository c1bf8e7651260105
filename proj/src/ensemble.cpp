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

#include "kerrfb/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "kerrfb/config.hpp"
#include "kerrfb/error.hpp"
#include "kerrfb/units.hpp"

namespace kerrfb {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index,
                              bool excited) {
  return splitmix64(splitmix64(master) ^ (2 * index + (excited ? 1 : 0)));
}

namespace {

constexpr std::size_t kBlock = 16;

struct Plan {
  std::size_t n_steps;
  std::size_t stride;
  std::vector<std::size_t> record_steps;
  std::vector<std::size_t> markers;
  std::vector<std::size_t> readouts;
};

struct BlockSums {
  std::vector<double> sz, na, nb, marker;
  std::size_t ok = 0;
};

struct Job {
  bool excited;
  std::uint64_t seed;
};

// Integrates one trajectory, writing the recorded series into `rec`.
TrajectoryFinal integrate(const SteppedSchedule& st, const SystemParams& p,
                          const Plan& plan, const Job& job, bool noise,
                          double latch_n, BlockSums& rec) {
  Rng rng(job.seed);
  const FieldIntegrator fi(p, noise);
  TrajectoryState s;
  if (noise) s.field = sample_initial_state(rng);
  s.qubit = make_qubit(job.excited, rng);

  std::size_t r = 0, m = 0, ro = 0;
  auto sample = [&](std::size_t step) {
    if (r < plan.record_steps.size() && plan.record_steps[r] == step) {
      rec.sz[r] = expectation_sz(s.qubit);
      rec.na[r] = std::norm(s.field.alpha);
      rec.nb[r] = std::norm(s.field.beta);
      ++r;
    }
    while (m < plan.markers.size() && plan.markers[m] == step)
      rec.marker[m++] = expectation_sz(s.qubit);
  };
  sample(0);
  SteppedSchedule::Cursor cur(st);
  for (std::size_t k = 0; k < plan.n_steps; ++k) {
    while (ro < plan.readouts.size() && plan.readouts[ro] == k) {
      project_qubit(s.qubit, rng);
      ++ro;
    }
    advance(s, cur.next(), fi, p, rng);
    sample(k + 1);
  }
  TrajectoryFinal f;
  f.sz_final = expectation_sz(s.qubit);
  f.na_final = std::norm(s.field.alpha);
  f.jumped = s.qubit.jumps > 0;
  f.latched = f.na_final > latch_n;
  f.started_excited = job.excited;
  return f;
}

void add_into(std::vector<double>& acc, const std::vector<double>& v) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
}

}  // namespace

EnsembleResult run_ensemble(const Schedule& s, const SystemParams& p,
                            const EnsembleOptions& opt) {
  if (opt.n_traj < 1) throw Error("ensemble needs at least one trajectory");
  if (!(opt.initial.p0 >= 0.0 && opt.initial.p1 >= 0.0) ||
      std::abs(opt.initial.p0 + opt.initial.p1 - 1.0) > 1e-9)
    throw Error("initial qubit probabilities must be non-negative and sum to 1");

  const SteppedSchedule st(s, p.noise.dt);
  Plan plan;
  plan.n_steps = st.n_steps();
  plan.stride = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(opt.record_interval / p.noise.dt)));
  for (std::size_t k = 0; k <= plan.n_steps; k += plan.stride)
    plan.record_steps.push_back(k);
  if (plan.record_steps.back() != plan.n_steps)
    plan.record_steps.push_back(plan.n_steps);
  plan.markers = st.segment_ends(opt.marker_segment);
  if (!opt.readout_segment.empty())
    plan.readouts = st.segment_starts(opt.readout_segment);

  const std::size_t n = opt.n_traj;
  const auto n0 = static_cast<std::size_t>(std::llround(opt.initial.p0 * n));
  std::vector<Job> jobs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool excited = i >= n0;
    const std::size_t idx = excited ? i - n0 : i;
    jobs[i] = {excited, trajectory_seed(opt.master_seed, idx, excited)};
  }

  EnsembleResult out;
  out.n_traj = n;
  out.master_seed = opt.master_seed;
  out.finals.resize(n);
  const std::size_t n_rec = plan.record_steps.size();
  BlockSums total;
  total.sz.assign(n_rec, 0.0);
  total.na.assign(n_rec, 0.0);
  total.nb.assign(n_rec, 0.0);
  total.marker.assign(plan.markers.size(), 0.0);

  const std::size_t n_blocks = (n + kBlock - 1) / kBlock;
  std::atomic<std::size_t> next_block{0};
  std::mutex mu;
  std::map<std::size_t, BlockSums> pending;
  std::size_t next_merge = 0;
  std::exception_ptr fatal;

  auto worker = [&] {
    BlockSums rec;
    rec.sz.resize(n_rec);
    rec.na.resize(n_rec);
    rec.nb.resize(n_rec);
    rec.marker.resize(plan.markers.size());
    for (;;) {
      const std::size_t b = next_block.fetch_add(1);
      if (b >= n_blocks) return;
      BlockSums sums;
      sums.sz.assign(n_rec, 0.0);
      sums.na.assign(n_rec, 0.0);
      sums.nb.assign(n_rec, 0.0);
      sums.marker.assign(plan.markers.size(), 0.0);
      try {
        for (std::size_t i = b * kBlock; i < std::min(n, (b + 1) * kBlock); ++i) {
          try {
            out.finals[i] = integrate(st, p, plan, jobs[i], opt.noise,
                                      opt.latch_threshold, rec);
          } catch (const NumericalBlowup&) {
            out.finals[i] = TrajectoryFinal{};
            out.finals[i].failed = true;
            out.finals[i].started_excited = jobs[i].excited;
            continue;
          }
          add_into(sums.sz, rec.sz);
          add_into(sums.na, rec.na);
          add_into(sums.nb, rec.nb);
          add_into(sums.marker, rec.marker);
          ++sums.ok;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!fatal) fatal = std::current_exception();
        next_block = n_blocks;
        return;
      }
      std::lock_guard<std::mutex> lock(mu);
      pending.emplace(b, std::move(sums));
      // Blocks merge strictly in index order, so the floating-point sums do
      // not depend on which worker finished first.
      for (auto it = pending.find(next_merge); it != pending.end();
           it = pending.find(next_merge)) {
        add_into(total.sz, it->second.sz);
        add_into(total.na, it->second.na);
        add_into(total.nb, it->second.nb);
        add_into(total.marker, it->second.marker);
        total.ok += it->second.ok;
        pending.erase(it);
        ++next_merge;
      }
    }
  };

  unsigned workers = opt.workers ? opt.workers : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_blocks)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  out.n_failed = n - total.ok;
  if (total.ok == 0)
    throw NumericalBlowup("every trajectory diverged", s.total_duration());
  const double inv = 1.0 / static_cast<double>(total.ok);
  out.time_grid.resize(n_rec);
  for (std::size_t r = 0; r < n_rec; ++r)
    out.time_grid[r] = static_cast<double>(plan.record_steps[r]) * p.noise.dt;
  out.mean_sz.resize(n_rec);
  out.mean_na.resize(n_rec);
  out.mean_nb.resize(n_rec);
  for (std::size_t r = 0; r < n_rec; ++r) {
    out.mean_sz[r] = total.sz[r] * inv;
    out.mean_na[r] = total.na[r] * inv;
    out.mean_nb[r] = total.nb[r] * inv;
  }
  for (std::size_t m = 0; m < plan.markers.size(); ++m) {
    out.marker_times.push_back(static_cast<double>(plan.markers[m]) * p.noise.dt);
    out.marker_sz.push_back(total.marker[m] * inv);
  }
  return out;
}

double fidelity(const EnsembleResult& r, bool target_excited, std::size_t index) {
  if (index >= r.mean_sz.size()) throw IndexError("fidelity index out of range");
  const double sz = r.mean_sz[index];
  return target_excited ? 0.5 * (1.0 + sz) : 0.5 * (1.0 - sz);
}

double fidelity_at_time(const EnsembleResult& r, bool target_excited, double t) {
  if (r.time_grid.empty() || t < 0.0 || t > r.time_grid.back())
    throw IndexError("time outside the recorded run");
  const auto it = std::lower_bound(r.time_grid.begin(), r.time_grid.end(), t);
  std::size_t i = static_cast<std::size_t>(it - r.time_grid.begin());
  if (i > 0 && (i == r.time_grid.size() || t - r.time_grid[i - 1] < r.time_grid[i] - t))
    --i;
  return fidelity(r, target_excited, i);
}

double final_fidelity(const EnsembleResult& r, bool target_excited) {
  if (r.mean_sz.empty()) throw IndexError("empty ensemble result");
  return fidelity(r, target_excited, r.mean_sz.size() - 1);
}

double time_averaged_fidelity(const EnsembleResult& r, bool target_excited) {
  const auto& t = r.time_grid;
  if (t.size() < 2) throw IndexError("time average needs two samples");
  double acc = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i)
    acc += 0.5 * (fidelity(r, target_excited, i) + fidelity(r, target_excited, i - 1)) *
           (t[i] - t[i - 1]);
  return acc / (t.back() - t.front());
}

double protocol_end_fidelity(const EnsembleResult& r, bool target_excited) {
  if (r.marker_sz.empty()) throw IndexError("run has no protocol-end markers");
  double acc = 0.0;
  for (double sz : r.marker_sz)
    acc += target_excited ? 0.5 * (1.0 + sz) : 0.5 * (1.0 - sz);
  return acc / static_cast<double>(r.marker_sz.size());
}

double latching_fraction(const EnsembleResult& r, double threshold_n) {
  std::size_t ok = 0, high = 0;
  for (const auto& f : r.finals) {
    if (f.failed) continue;
    ++ok;
    if (f.na_final > threshold_n) ++high;
  }
  return ok ? static_cast<double>(high) / static_cast<double>(ok) : 0.0;
}

std::string means_csv(const EnsembleResult& r) {
  std::string out = "t_ns,mean_sz,mean_na,mean_nb\n";
  for (std::size_t i = 0; i < r.time_grid.size(); ++i)
    out += format_double(units::s_to_ns(r.time_grid[i])) + "," +
           format_double(r.mean_sz[i]) + "," + format_double(r.mean_na[i]) +
           "," + format_double(r.mean_nb[i]) + "\n";
  return out;
}

std::string finals_csv(const EnsembleResult& r) {
  std::string out = "traj_id,sz_final,na_final,jumped,latched\n";
  for (std::size_t i = 0; i < r.finals.size(); ++i) {
    const auto& f = r.finals[i];
    if (f.failed) {
      out += std::to_string(i) + ",nan,nan,0,0\n";
      continue;
    }
    out += std::to_string(i) + "," + format_double(f.sz_final) + "," +
           format_double(f.na_final) + "," + (f.jumped ? "1" : "0") + "," +
           (f.latched ? "1" : "0") + "\n";
  }
  return out;
}

std::vector<TrajectorySample> record_trajectory(const Schedule& s,
                                                const SystemParams& p,
                                                bool excited,
                                                std::uint64_t seed, bool noise,
                                                std::size_t stride,
                                                const std::string& readout_segment) {
  if (stride == 0) stride = 1;
  const SteppedSchedule st(s, p.noise.dt);
  std::vector<std::size_t> readouts;
  if (!readout_segment.empty()) readouts = st.segment_starts(readout_segment);
  std::size_t ro = 0;
  Rng rng(seed);
  const FieldIntegrator fi(p, noise);
  TrajectoryState ts;
  if (noise) ts.field = sample_initial_state(rng);
  ts.qubit = make_qubit(excited, rng);
  std::vector<TrajectorySample> rows;
  auto push = [&] {
    rows.push_back({ts.field.t, ts.field.alpha, ts.field.beta,
                    expectation_sz(ts.qubit)});
  };
  push();
  SteppedSchedule::Cursor cur(st);
  for (std::size_t k = 0; k < st.n_steps(); ++k) {
    while (ro < readouts.size() && readouts[ro] == k) {
      project_qubit(ts.qubit, rng);
      ++ro;
    }
    advance(ts, cur.next(), fi, p, rng);
    if ((k + 1) % stride == 0 || k + 1 == st.n_steps()) push();
  }
  return rows;
}

std::string trajectory_csv(const std::vector<TrajectorySample>& rows) {
  std::string out = "t_ns,re_alpha,im_alpha,re_beta,im_beta,n_a,n_b,sz\n";
  for (const auto& r : rows)
    out += format_double(units::s_to_ns(r.t)) + "," +
           format_double(r.alpha.real()) + "," + format_double(r.alpha.imag()) +
           "," + format_double(r.beta.real()) + "," +
           format_double(r.beta.imag()) + "," +
           format_double(std::norm(r.alpha)) + "," +
           format_double(std::norm(r.beta)) + "," + format_double(r.sz) + "\n";
  return out;
}

}  // namespace kerrfb
