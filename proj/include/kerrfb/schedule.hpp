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

#include "kerrfb/config.hpp"

namespace kerrfb {

using cplx = std::complex<double>;

// Instantaneous external controls. Drive amplitudes carry units of
// sqrt(rad/s); they enter the field equations multiplied by the square root
// of the corresponding port rate.
struct Controls {
  cplx alpha_d;
  cplx alpha_in;
  cplx alpha_p;
  double delta_a = 0.0;
  double delta_b = 0.0;
  cplx omega_d;
};

enum class RampShape { constant, linear };

template <typename T>
struct Ramp {
  T start{};
  T end{};
  RampShape shape = RampShape::constant;

  static Ramp hold(T v) { return {v, v, RampShape::constant}; }
  static Ramp line(T a, T b) { return {a, b, RampShape::linear}; }
  T at(double frac) const {
    return shape == RampShape::constant ? start : start + (end - start) * frac;
  }
  bool operator==(const Ramp&) const = default;
};

struct ControlSegment {
  std::string name;
  double duration = 0.0;
  Ramp<double> alpha_d_mag;
  Ramp<double> alpha_d_arg;
  Ramp<double> delta_a;
  Ramp<double> delta_b;
  Ramp<cplx> alpha_in;
  Ramp<cplx> alpha_p;
  Ramp<cplx> omega_d;

  Controls at(double frac) const;
  bool operator==(const ControlSegment&) const = default;
};

class Schedule {
 public:
  Schedule() = default;
  explicit Schedule(std::vector<ControlSegment> segments);

  const std::vector<ControlSegment>& segments() const { return segments_; }
  double total_duration() const;
  void append(const ControlSegment& s);
  void append(const Schedule& other);

  std::string to_text() const;
  static Schedule from_text(const std::string& text);
  // FNV-1a over to_text(), printed as 16 hex digits.
  std::string hash() const;

  bool operator==(const Schedule&) const = default;

 private:
  std::vector<ControlSegment> segments_;
};

// A schedule discretised on a fixed step: each segment spans
// round(duration / dt) steps and controls are sampled at the left endpoint
// of every step.
class SteppedSchedule {
 public:
  SteppedSchedule(const Schedule& s, double dt);

  std::size_t n_steps() const { return total_steps_; }
  double dt() const { return dt_; }
  Controls controls(std::size_t step) const;
  // Step indices (counted after the step completes) at which each segment
  // named `name` ends.
  std::vector<std::size_t> segment_ends(const std::string& name) const;
  std::vector<std::size_t> segment_starts(const std::string& name) const;
  // Advances a cursor; cheaper than controls(step) for sequential access.
  class Cursor {
   public:
    explicit Cursor(const SteppedSchedule& s) : s_(&s) {}
    Controls next();
   private:
    const SteppedSchedule* s_;
    std::size_t seg_ = 0;
    std::size_t local_ = 0;
  };

 private:
  const Schedule* schedule_;
  double dt_;
  std::vector<std::size_t> steps_;
  std::vector<std::size_t> offsets_;
  std::size_t total_steps_ = 0;
};

}  // namespace kerrfb
