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

#include <optional>
#include <stdexcept>
#include <string>

namespace kerrfb {

// Every failure the core can raise derives from Error; the C API maps the
// concrete type onto a kfb_status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class DegenerateDetuning : public Error {
 public:
  using Error::Error;
};

class DegenerateCoupling : public Error {
 public:
  using Error::Error;
};

// Raised when the requested detuning admits no bistable window. At the exact
// inflection point the degenerate critical photon number is attached.
class NoBistability : public Error {
 public:
  explicit NoBistability(const std::string& what,
                         std::optional<double> inflection_n = std::nullopt)
      : Error(what), inflection_n_(inflection_n) {}
  const std::optional<double>& inflection_photon_number() const noexcept {
    return inflection_n_;
  }

 private:
  std::optional<double> inflection_n_;
};

class NumericalBlowup : public Error {
 public:
  NumericalBlowup(const std::string& what, double t)
      : Error(what), t_(t) {}
  double time() const noexcept { return t_; }

 private:
  double t_;
};

class ScheduleError : public Error {
 public:
  using Error::Error;
};

class CalibrationFailed : public Error {
 public:
  using Error::Error;
};

class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, std::size_t suggested_dim)
      : Error(what), suggested_dim_(suggested_dim) {}
  std::size_t suggested_dim() const noexcept { return suggested_dim_; }

 private:
  std::size_t suggested_dim_;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace kerrfb
