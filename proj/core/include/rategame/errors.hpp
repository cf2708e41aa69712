// Copyright 2026 The rategame Authors
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

#include <stdexcept>
#include <string>

namespace rategame {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or missing input files / columns.
class LoadError : public Error {
 public:
  using Error::Error;
};

// A rate could not be evaluated (e.g. its selector matched nothing).
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// An argument lies outside the domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Inconsistent problem, metric or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A training run could not continue (NaN, degenerate multipliers, ...).
class OptimizationError : public Error {
 public:
  using Error::Error;
};

}  // namespace rategame
