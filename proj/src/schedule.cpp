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

#include "kerrfb/schedule.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "kerrfb/error.hpp"
#include "kerrfb/units.hpp"

namespace kerrfb {

Controls ControlSegment::at(double frac) const {
  Controls c;
  c.alpha_d = std::polar(alpha_d_mag.at(frac), alpha_d_arg.at(frac));
  c.alpha_in = alpha_in.at(frac);
  c.alpha_p = alpha_p.at(frac);
  c.delta_a = delta_a.at(frac);
  c.delta_b = delta_b.at(frac);
  c.omega_d = omega_d.at(frac);
  return c;
}

namespace {

void check_segment(const ControlSegment& s) {
  if (!(s.duration > 0.0) || !std::isfinite(s.duration))
    throw ScheduleError("segment '" + s.name + "' needs a positive duration");
  auto finite = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
  const bool ok =
      std::isfinite(s.alpha_d_mag.start) && std::isfinite(s.alpha_d_mag.end) &&
      std::isfinite(s.alpha_d_arg.start) && std::isfinite(s.alpha_d_arg.end) &&
      std::isfinite(s.delta_a.start) && std::isfinite(s.delta_a.end) &&
      std::isfinite(s.delta_b.start) && std::isfinite(s.delta_b.end) &&
      finite(s.alpha_in.start) && finite(s.alpha_in.end) &&
      finite(s.alpha_p.start) && finite(s.alpha_p.end) &&
      finite(s.omega_d.start) && finite(s.omega_d.end);
  if (!ok) throw ScheduleError("segment '" + s.name + "' has non-finite ramps");
}

const char* shape_name(RampShape s) {
  return s == RampShape::linear ? "linear" : "constant";
}

RampShape parse_shape(const std::string& key, const std::string& s) {
  if (s == "linear") return RampShape::linear;
  if (s == "constant") return RampShape::constant;
  throw ScheduleError(key + ": unknown ramp shape '" + s + "'");
}

std::string real_ramp(const Ramp<double>& r) {
  return format_double(r.start) + " " + format_double(r.end) + " " +
         shape_name(r.shape);
}

std::string complex_ramp(const Ramp<cplx>& r) {
  return format_double(r.start.real()) + " " + format_double(r.start.imag()) +
         " " + format_double(r.end.real()) + " " + format_double(r.end.imag()) +
         " " + shape_name(r.shape);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

Ramp<double> parse_real_ramp(const std::string& key, const std::string& v) {
  const auto w = words(v);
  if (w.size() != 3) throw ScheduleError(key + ": expected 'start end shape'");
  return {parse_double(key, w[0]), parse_double(key, w[1]),
          parse_shape(key, w[2])};
}

Ramp<cplx> parse_complex_ramp(const std::string& key, const std::string& v) {
  const auto w = words(v);
  if (w.size() != 5)
    throw ScheduleError(key + ": expected 're0 im0 re1 im1 shape'");
  return {cplx(parse_double(key, w[0]), parse_double(key, w[1])),
          cplx(parse_double(key, w[2]), parse_double(key, w[3])),
          parse_shape(key, w[4])};
}

}  // namespace

Schedule::Schedule(std::vector<ControlSegment> segments) {
  for (auto& s : segments) append(s);
}

double Schedule::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments_) t += s.duration;
  return t;
}

void Schedule::append(const ControlSegment& s) {
  check_segment(s);
  segments_.push_back(s);
}

void Schedule::append(const Schedule& other) {
  for (const auto& s : other.segments_) append(s);
}

std::string Schedule::to_text() const {
  KeyValueDoc d;
  d.set("schedule", "segments", std::to_string(segments_.size()));
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    const std::string sec = "segment." + std::to_string(i);
    d.set(sec, "name", s.name);
    d.set(sec, "duration_s", format_double(s.duration));
    d.set(sec, "alpha_d_mag", real_ramp(s.alpha_d_mag));
    d.set(sec, "alpha_d_arg", real_ramp(s.alpha_d_arg));
    d.set(sec, "delta_a", real_ramp(s.delta_a));
    d.set(sec, "delta_b", real_ramp(s.delta_b));
    d.set(sec, "alpha_in", complex_ramp(s.alpha_in));
    d.set(sec, "alpha_p", complex_ramp(s.alpha_p));
    d.set(sec, "omega_d", complex_ramp(s.omega_d));
  }
  return d.to_text();
}

Schedule Schedule::from_text(const std::string& text) {
  const auto d = KeyValueDoc::parse(text);
  const auto n_text = d.get("schedule", "segments");
  if (!n_text) throw ScheduleError("schedule document lacks [schedule] segments");
  const auto n = parse_u64("segments", *n_text);
  Schedule out;
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::string sec = "segment." + std::to_string(i);
    auto need = [&](const std::string& k) {
      auto v = d.get(sec, k);
      if (!v) throw ScheduleError(sec + " lacks " + k);
      return *v;
    };
    ControlSegment s;
    s.name = need("name");
    s.duration = parse_double("duration_s", need("duration_s"));
    s.alpha_d_mag = parse_real_ramp("alpha_d_mag", need("alpha_d_mag"));
    s.alpha_d_arg = parse_real_ramp("alpha_d_arg", need("alpha_d_arg"));
    s.delta_a = parse_real_ramp("delta_a", need("delta_a"));
    s.delta_b = parse_real_ramp("delta_b", need("delta_b"));
    s.alpha_in = parse_complex_ramp("alpha_in", need("alpha_in"));
    s.alpha_p = parse_complex_ramp("alpha_p", need("alpha_p"));
    s.omega_d = parse_complex_ramp("omega_d", need("omega_d"));
    out.append(s);
  }
  return out;
}

std::string Schedule::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_text()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SteppedSchedule::SteppedSchedule(const Schedule& s, double dt)
    : schedule_(&s), dt_(dt) {
  if (!(dt > 0.0)) throw ScheduleError("time step must be positive");
  for (const auto& seg : s.segments()) {
    const auto n = static_cast<std::size_t>(std::llround(seg.duration / dt));
    offsets_.push_back(total_steps_);
    steps_.push_back(n == 0 ? 1 : n);
    total_steps_ += steps_.back();
  }
}

Controls SteppedSchedule::controls(std::size_t step) const {
  if (step >= total_steps_) throw IndexError("step beyond schedule end");
  std::size_t i = 0;
  while (i + 1 < offsets_.size() && offsets_[i + 1] <= step) ++i;
  const std::size_t local = step - offsets_[i];
  return schedule_->segments()[i].at(static_cast<double>(local) /
                                     static_cast<double>(steps_[i]));
}

std::vector<std::size_t> SteppedSchedule::segment_ends(
    const std::string& name) const {
  std::vector<std::size_t> out;
  const auto& segs = schedule_->segments();
  for (std::size_t i = 0; i < segs.size(); ++i)
    if (segs[i].name == name) out.push_back(offsets_[i] + steps_[i]);
  return out;
}

std::vector<std::size_t> SteppedSchedule::segment_starts(
    const std::string& name) const {
  std::vector<std::size_t> out;
  const auto& segs = schedule_->segments();
  for (std::size_t i = 0; i < segs.size(); ++i)
    if (segs[i].name == name) out.push_back(offsets_[i]);
  return out;
}

Controls SteppedSchedule::Cursor::next() {
  while (seg_ < s_->steps_.size() && local_ >= s_->steps_[seg_]) {
    ++seg_;
    local_ = 0;
  }
  if (seg_ >= s_->steps_.size()) throw IndexError("cursor beyond schedule end");
  const auto c = s_->schedule_->segments()[seg_].at(
      static_cast<double>(local_) / static_cast<double>(s_->steps_[seg_]));
  ++local_;
  return c;
}

}  // namespace kerrfb
