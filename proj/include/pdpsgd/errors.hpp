// Copyright 2026 The pdpsgd Authors
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

#ifndef PDPSGD_ERRORS_HPP_
#define PDPSGD_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace pdpsgd {

// A privacy target that cannot be met with the remaining budget.
class BudgetExhaustedError : public std::runtime_error {
 public:
  explicit BudgetExhaustedError(const std::string& what)
      : std::runtime_error(what) {}
};

// An iterative search that failed to converge within its iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

// A ledger charge attempted past the round cap R_max.
class RoundCapError : public std::runtime_error {
 public:
  explicit RoundCapError(const std::string& what)
      : std::runtime_error(what) {}
};

// Malformed input data; the message names the byte offset where parsing
// failed whenever one is known.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pdpsgd

#endif  // PDPSGD_ERRORS_HPP_
