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

#ifndef TRAJPRIV_PERTURBATION_H_
#define TRAJPRIV_PERTURBATION_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trajpriv/grid.h"
#include "trajpriv/random.h"

namespace trajpriv {

enum class MechanismKind {
  // Genuine permute-and-flip: scan a uniformly random permutation of all
  // cells, accepting each with probability exp(eps * (u - u*) / (2 du)).
  kPermuteAndFlip,
  // Literal closed form
  //   f(x'|x) = w_x exp(-eps (d(x, x') - max d(x, .)) / (2 D(Phi))).
  kClosedForm,
  // Exponential mechanism with utility -d(x, x') and sensitivity D(Phi).
  kExponential,
};

// "pf", "closed" or "exp".
std::string_view MechanismName(MechanismKind kind);
// Inverse of MechanismName. Throws InputError on an unknown name.
MechanismKind ParseMechanism(std::string_view name);

// Perturbation of one protected cell. The output domain is every cell of the
// map; the utility of reporting x' is -d(x, x') and its sensitivity is the
// diameter of the protection location set.
class PerturbationModel {
 public:
  // Throws InputError if `pls` is empty, does not contain `protected_cell`,
  // or `epsilon` is negative or non-finite. Epsilon 0 is allowed and yields
  // uniform output.
  PerturbationModel(MechanismKind kind, CellId protected_cell,
                    std::vector<CellId> pls, double epsilon, const GridMap& map);

  MechanismKind kind() const { return kind_; }
  CellId protected_cell() const { return protected_cell_; }
  const std::vector<CellId>& pls() const { return pls_; }
  double epsilon() const { return epsilon_; }
  double sensitivity_km() const { return sensitivity_km_; }
  // A singleton set has zero sensitivity and releases the true cell.
  bool degenerate() const { return sensitivity_km_ == 0.0; }

  // exp(-eps d(x, x') / (2 du)) for every output x'. The protected cell has
  // the top utility and acceptance 1.
  std::vector<double> AcceptanceProbabilities(const GridMap& map) const;

 private:
  MechanismKind kind_;
  CellId protected_cell_;
  std::vector<CellId> pls_;
  double epsilon_;
  double sensitivity_km_;
};

struct PerturbationDistribution {
  static constexpr double kMassTolerance = 1e-9;

  std::vector<double> pmf;
  MechanismKind kind = MechanismKind::kPermuteAndFlip;
  CellId protected_cell;
  double epsilon = 0.0;
  double sensitivity_km = 0.0;
  // Point mass at the protected cell because the set was a singleton.
  bool degenerate = false;

  double Probability(CellId c) const { return pmf[c.index]; }
};

PerturbationDistribution ClosedFormPmf(const PerturbationModel& model,
                                       const GridMap& map);
PerturbationDistribution ExponentialBaselinePmf(const PerturbationModel& model,
                                                const GridMap& map);

// Largest output domain accepted by PermuteAndFlipExactPmf.
inline constexpr std::size_t kMaxExactPermuteAndFlipDomain = 20;

// Exact output law of the permute-and-flip scan, by recursion over the set of
// not-yet-scanned candidates. Throws CapabilityError when the map has more
// than kMaxExactPermuteAndFlipDomain cells; use PermuteAndFlipPmf or
// Monte-Carlo sampling there.
PerturbationDistribution PermuteAndFlipExactPmf(const PerturbationModel& model,
                                                const GridMap& map);

// Output law of the permute-and-flip scan for any domain size, from
//   P(r) = a_r * integral_0^1 prod_{s != r} (1 - t a_s) dt,
// where the integrand is a polynomial integrated exactly by Gauss-Legendre
// quadrature.
PerturbationDistribution PermuteAndFlipPmf(const PerturbationModel& model,
                                           const GridMap& map);

// Same two computations over raw acceptance probabilities. At least one
// acceptance probability must be 1 so that the scan always terminates.
std::vector<double> PermuteAndFlipExactProbabilities(std::span<const double> acceptance);
std::vector<double> PermuteAndFlipProbabilities(std::span<const double> acceptance);

// One permute-and-flip release. Consumes randomness from `rng` only when the
// model is non-degenerate.
CellId PermuteAndFlipSample(const PerturbationModel& model, const GridMap& map,
                            RandomStream& rng);

// The pmf used by the experiment pipeline for `model.kind()`.
PerturbationDistribution MechanismPmf(const PerturbationModel& model,
                                      const GridMap& map);

// Draws one release: the permute-and-flip scan for kPermuteAndFlip, inverse
// transform sampling of `pmf` otherwise.
CellId SampleRelease(const PerturbationModel& model,
                     const PerturbationDistribution& pmf, const GridMap& map,
                     RandomStream& rng);

// Inverse transform sampling.
CellId SampleFromPmf(std::span<const double> pmf, RandomStream& rng);

struct RatioCheckResult {
  bool ok = true;
  // Largest pmf_x(o) / pmf_y(o) over all pairs and outputs with both masses
  // positive.
  double worst_ratio = 1.0;
  // Output/pair combinations exceeding the bound, including one-sided zeros.
  std::size_t violations = 0;
};

// Checks e^-eps <= pmf_x(o) / pmf_y(o) <= e^eps for every pair of
// distributions and every output o, allowing `slack` on the log ratio.
RatioCheckResult DpRatioCheck(std::span<const PerturbationDistribution> pmfs,
                              double epsilon, double slack = 1e-9);

// Release distributions f(.|x) for the true cells the mechanism may face.
class MechanismFamily {
 public:
  explicit MechanismFamily(std::size_t n) : rows_(n) {}

  std::size_t size() const { return rows_.size(); }
  void Set(CellId true_cell, PerturbationDistribution pmf);
  bool Has(CellId true_cell) const {
    return true_cell.index < rows_.size() && rows_[true_cell.index].has_value();
  }
  // Throws InputError if no distribution was set for `true_cell`.
  const PerturbationDistribution& Get(CellId true_cell) const;
  // f(observed | true_cell).
  double Likelihood(CellId observed, CellId true_cell) const {
    return Get(true_cell).pmf[observed.index];
  }

 private:
  std::vector<std::optional<PerturbationDistribution>> rows_;
};

}  // namespace trajpriv

#endif  // TRAJPRIV_PERTURBATION_H_
