// Copyright 2026 The trajpriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRAJPRIV_ERROR_H_
#define TRAJPRIV_ERROR_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace trajpriv {

// Malformed arguments: out-of-range cells, dimension mismatches, invalid
// parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The observed location has zero probability under the attacker's model.
class InconsistentObservationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The requested exact computation exceeds what the implementation supports
// (for example, exhaustive permute-and-flip over a large domain).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The target value is not bracketed by the search interval.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The target is crossed more than once inside the bracket.
class AmbiguityError : public std::runtime_error {
 public:
  AmbiguityError(const std::string& what, std::vector<double> crossings)
      : std::runtime_error(what), crossings_(std::move(crossings)) {}

  // Midpoints of the sampled sub-intervals where the target is crossed.
  const std::vector<double>& crossings() const { return crossings_; }

 private:
  std::vector<double> crossings_;
};

}  // namespace trajpriv

#endif  // TRAJPRIV_ERROR_H_
