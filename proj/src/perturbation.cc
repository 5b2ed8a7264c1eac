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

#include "trajpriv/perturbation.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <utility>

#include <boost/math/special_functions/legendre.hpp>

#include "trajpriv/error.h"

namespace trajpriv {

std::string_view MechanismName(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kPermuteAndFlip:
      return "pf";
    case MechanismKind::kClosedForm:
      return "closed";
    case MechanismKind::kExponential:
      return "exp";
  }
  return "unknown";
}

MechanismKind ParseMechanism(std::string_view name) {
  if (name == "pf") return MechanismKind::kPermuteAndFlip;
  if (name == "closed") return MechanismKind::kClosedForm;
  if (name == "exp") return MechanismKind::kExponential;
  throw InputError("unknown mechanism '" + std::string(name) +
                   "' (expected pf, closed or exp)");
}

PerturbationModel::PerturbationModel(MechanismKind kind, CellId protected_cell,
                                     std::vector<CellId> pls, double epsilon,
                                     const GridMap& map)
    : kind_(kind),
      protected_cell_(protected_cell),
      pls_(std::move(pls)),
      epsilon_(epsilon) {
  map.Validate(protected_cell_);
  if (pls_.empty()) throw InputError("protection location set is empty");
  if (std::find(pls_.begin(), pls_.end(), protected_cell_) == pls_.end()) {
    throw InputError("protection location set must contain the protected cell");
  }
  if (!std::isfinite(epsilon_) || epsilon_ < 0.0) {
    throw InputError("epsilon must be finite and nonnegative");
  }
  sensitivity_km_ = Diameter(pls_, map);
}

std::vector<double> PerturbationModel::AcceptanceProbabilities(
    const GridMap& map) const {
  std::vector<double> a(map.size(), 0.0);
  if (degenerate()) {
    a[protected_cell_.index] = 1.0;
    return a;
  }
  const double scale = epsilon_ / (2.0 * sensitivity_km_);
  for (CellId c : map.Cells()) {
    a[c.index] = std::exp(-scale * map.Distance(protected_cell_, c));
  }
  return a;
}

namespace {

PerturbationDistribution Describe(const PerturbationModel& model,
                                  MechanismKind kind, std::vector<double> pmf) {
  PerturbationDistribution out;
  out.pmf = std::move(pmf);
  out.kind = kind;
  out.protected_cell = model.protected_cell();
  out.epsilon = model.epsilon();
  out.sensitivity_km = model.sensitivity_km();
  out.degenerate = model.degenerate();
  return out;
}

std::vector<double> PointMass(std::size_t n, CellId c) {
  std::vector<double> pmf(n, 0.0);
  pmf[c.index] = 1.0;
  return pmf;
}

void Normalize(std::vector<double>& v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= total;
}

void CheckTerminates(std::span<const double> acceptance) {
  if (acceptance.empty()) throw InputError("empty candidate set");
  bool has_sure = false;
  for (double a : acceptance) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw InputError("acceptance probabilities must lie in [0, 1]");
    }
    has_sure = has_sure || a == 1.0;
  }
  if (!has_sure) {
    throw InputError("permute-and-flip needs a candidate with acceptance 1");
  }
}

// Gauss-Legendre rule mapped to [0, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const QuadratureRule& UnitGaussLegendre(int points) {
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(points);
  if (it != cache.end()) return it->second;

  QuadratureRule rule;
  auto add = [&](double z) {
    const double dp = boost::math::legendre_p_prime(points, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes.push_back(0.5 * (1.0 + z));
    rule.weights.push_back(0.5 * w);
  };
  for (double z : boost::math::legendre_p_zeros<double>(points)) {
    add(z);
    if (z != 0.0) add(-z);
  }
  return cache.emplace(points, std::move(rule)).first->second;
}

}  // namespace

PerturbationDistribution ClosedFormPmf(const PerturbationModel& model,
                                       const GridMap& map) {
  const std::size_t n = map.size();
  if (model.degenerate()) {
    return Describe(model, MechanismKind::kClosedForm,
                    PointMass(n, model.protected_cell()));
  }
  const CellId x = model.protected_cell();
  double max_distance = 0.0;
  for (CellId c : map.Cells()) max_distance = std::max(max_distance, map.Distance(x, c));

  const double scale = model.epsilon() / (2.0 * model.sensitivity_km());
  std::vector<double> pmf(n);
  for (CellId c : map.Cells()) {
    pmf[c.index] = std::exp(-scale * (map.Distance(x, c) - max_distance));
  }
  const double omega = 1.0 / std::accumulate(pmf.begin(), pmf.end(), 0.0);
  for (double& p : pmf) p *= omega;
  return Describe(model, MechanismKind::kClosedForm, std::move(pmf));
}

PerturbationDistribution ExponentialBaselinePmf(const PerturbationModel& model,
                                                const GridMap& map) {
  if (model.degenerate()) {
    return Describe(model, MechanismKind::kExponential,
                    PointMass(map.size(), model.protected_cell()));
  }
  // The weights are the acceptance probabilities: the top score is 0, so no
  // shift is needed to keep the exponent bounded.
  std::vector<double> pmf = model.AcceptanceProbabilities(map);
  Normalize(pmf);
  return Describe(model, MechanismKind::kExponential, std::move(pmf));
}

std::vector<double> PermuteAndFlipExactProbabilities(
    std::span<const double> acceptance) {
  CheckTerminates(acceptance);
  const std::size_t n = acceptance.size();
  if (n > kMaxExactPermuteAndFlipDomain) {
    throw CapabilityError(
        "exact permute-and-flip supports at most " +
        std::to_string(kMaxExactPermuteAndFlipDomain) + " candidates, got " +
        std::to_string(n) + "; estimate by sampling instead");
  }
  std::vector<double> out(n, 0.0);
  std::vector<double> others(n - 1);
  std::vector<double> win(std::size_t{1} << (n - 1));
  for (std::size_t r = 0; r < n; ++r) {
    // `others` lists the rejection probabilities of every candidate but r.
    for (std::size_t s = 0, k = 0; s < n; ++s) {
      if (s != r) others[k++] = 1.0 - acceptance[s];
    }
    // win[mask]: probability that r is released when r and the candidates in
    // `mask` remain unscanned in uniformly random order.
    for (std::size_t mask = 0; mask < win.size(); ++mask) {
      double total = acceptance[r];
      int remaining = 1;
      for (std::size_t bits = mask; bits != 0; bits &= bits - 1) {
        const int s = std::countr_zero(bits);
        total += others[s] * win[mask & ~(std::size_t{1} << s)];
        ++remaining;
      }
      win[mask] = total / remaining;
    }
    out[r] = win.back();
  }
  return out;
}

std::vector<double> PermuteAndFlipProbabilities(std::span<const double> acceptance) {
  CheckTerminates(acceptance);
  const std::size_t n = acceptance.size();
  // The integrand for r has degree n - 1; a rule with m points is exact up
  // to degree 2m - 1.
  const QuadratureRule& rule = UnitGaussLegendre(static_cast<int>(n / 2 + 1));
  std::vector<double> out(n, 0.0);
  std::vector<double> prefix(n + 1);
  std::vector<double> suffix(n + 1);
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double t = rule.nodes[k];
    prefix[0] = 1.0;
    for (std::size_t s = 0; s < n; ++s) prefix[s + 1] = prefix[s] * (1.0 - t * acceptance[s]);
    suffix[n] = 1.0;
    for (std::size_t s = n; s-- > 0;) suffix[s] = suffix[s + 1] * (1.0 - t * acceptance[s]);
    for (std::size_t r = 0; r < n; ++r) {
      out[r] += rule.weights[k] * acceptance[r] * prefix[r] * suffix[r + 1];
    }
  }
  return out;
}

PerturbationDistribution PermuteAndFlipExactPmf(const PerturbationModel& model,
                                                const GridMap& map) {
  if (model.degenerate()) {
    return Describe(model, MechanismKind::kPermuteAndFlip,
                    PointMass(map.size(), model.protected_cell()));
  }
  return Describe(model, MechanismKind::kPermuteAndFlip,
                  PermuteAndFlipExactProbabilities(model.AcceptanceProbabilities(map)));
}

PerturbationDistribution PermuteAndFlipPmf(const PerturbationModel& model,
                                           const GridMap& map) {
  if (model.degenerate()) {
    return Describe(model, MechanismKind::kPermuteAndFlip,
                    PointMass(map.size(), model.protected_cell()));
  }
  std::vector<double> pmf =
      PermuteAndFlipProbabilities(model.AcceptanceProbabilities(map));
  Normalize(pmf);
  return Describe(model, MechanismKind::kPermuteAndFlip, std::move(pmf));
}

CellId PermuteAndFlipSample(const PerturbationModel& model, const GridMap& map,
                            RandomStream& rng) {
  if (model.degenerate()) return model.protected_cell();
  const std::vector<double> acceptance = model.AcceptanceProbabilities(map);
  std::vector<std::size_t> order(acceptance.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Lazy Fisher-Yates: position k receives a uniform pick among the
  // candidates not yet scanned.
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t j = k + rng.UniformIndex(order.size() - k);
    std::swap(order[k], order[j]);
    const std::size_t candidate = order[k];
    if (rng.Uniform01() < acceptance[candidate]) return CellId{candidate};
  }
  // Unreachable: the protected cell has acceptance 1.
  return model.protected_cell();
}

PerturbationDistribution MechanismPmf(const PerturbationModel& model,
                                      const GridMap& map) {
  switch (model.kind()) {
    case MechanismKind::kPermuteAndFlip:
      return PermuteAndFlipPmf(model, map);
    case MechanismKind::kClosedForm:
      return ClosedFormPmf(model, map);
    case MechanismKind::kExponential:
      return ExponentialBaselinePmf(model, map);
  }
  throw InputError("unknown mechanism kind");
}

CellId SampleFromPmf(std::span<const double> pmf, RandomStream& rng) {
  if (pmf.empty()) throw InputError("cannot sample from an empty pmf");
  const double u = rng.Uniform01();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (pmf[i] <= 0.0) continue;
    cumulative += pmf[i];
    last_positive = i;
    if (u < cumulative) return CellId{i};
  }
  return CellId{last_positive};
}

CellId SampleRelease(const PerturbationModel& model,
                     const PerturbationDistribution& pmf, const GridMap& map,
                     RandomStream& rng) {
  if (model.kind() == MechanismKind::kPermuteAndFlip) {
    return PermuteAndFlipSample(model, map, rng);
  }
  return SampleFromPmf(pmf.pmf, rng);
}

RatioCheckResult DpRatioCheck(std::span<const PerturbationDistribution> pmfs,
                              double epsilon, double slack) {
  RatioCheckResult result;
  if (pmfs.size() < 2) return result;
  const std::size_t n = pmfs.front().pmf.size();
  for (const auto& d : pmfs) {
    if (d.pmf.size() != n) throw InputError("pmfs must share one output domain");
  }
  const double bound = epsilon + slack;
  for (std::size_t o = 0; o < n; ++o) {
    double lo = pmfs.front().pmf[o];
    double hi = lo;
    std::size_t zeros = 0;
    for (const auto& d : pmfs) {
      lo = std::min(lo, d.pmf[o]);
      hi = std::max(hi, d.pmf[o]);
      if (d.pmf[o] == 0.0) ++zeros;
    }
    if (zeros == pmfs.size()) continue;
    if (zeros > 0) {
      // Every (positive, zero) ordered pair is unbounded.
      result.violations += zeros * (pmfs.size() - zeros);
      result.worst_ratio = std::numeric_limits<double>::infinity();
      continue;
    }
    const double ratio = hi / lo;
    result.worst_ratio = std::max(result.worst_ratio, ratio);
    if (std::log(hi) - std::log(lo) > bound) {
      for (const auto& a : pmfs) {
        for (const auto& b : pmfs) {
          if (std::log(a.pmf[o]) - std::log(b.pmf[o]) > bound) ++result.violations;
        }
      }
    }
  }
  result.ok = result.violations == 0;
  return result;
}

void MechanismFamily::Set(CellId true_cell, PerturbationDistribution pmf) {
  if (true_cell.index >= rows_.size()) throw InputError("true cell outside family domain");
  if (pmf.pmf.size() != rows_.size()) throw InputError("pmf domain does not match family");
  rows_[true_cell.index] = std::move(pmf);
}

const PerturbationDistribution& MechanismFamily::Get(CellId true_cell) const {
  if (!Has(true_cell)) {
    throw InputError("no release distribution for cell " +
                     std::to_string(true_cell.index));
  }
  return *rows_[true_cell.index];
}

}  // namespace trajpriv
