// Copyright 2026 PLD Accountant Authors
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

#ifndef PLDACCT_PLD_HPP_
#define PLDACCT_PLD_HPP_

#include <cstdint>
#include <vector>

namespace pldacct {

// Atoms whose privacy-loss values differ by less than this are merged.
inline constexpr double kMergeTol = 1e-12;

// Probability mass must balance to one within this tolerance.
inline constexpr double kMassTol = 1e-12;

// Exact composition refuses to grow beyond this many intermediate atoms.
inline constexpr std::int64_t kExactAtomBudget = 10'000'000;

struct OutcomeProb {
  double outcome = 0.0;
  double prob = 0.0;
};

// A discrete output distribution: probability mass on real-valued outcomes.
// Outcomes are kept strictly increasing; zero-probability entries are dropped.
class OutputDistribution {
 public:
  explicit OutputDistribution(std::vector<OutcomeProb> atoms);

  const std::vector<OutcomeProb>& atoms() const { return atoms_; }
  double total_prob() const { return total_prob_; }

  // Probability of an exact outcome label, 0 if absent.
  double prob_of(double outcome) const;

 private:
  std::vector<OutcomeProb> atoms_;
  double total_prob_ = 0.0;
};

struct PldAtom {
  double s = 0.0;     // log probability ratio
  double mass = 0.0;  // probability under the numerator distribution
};

// A privacy loss distribution in exact (sparse atom) form, plus the mass of
// outcomes that are possible under the numerator distribution but impossible
// under the denominator (the "infinite loss" component).
class AtomicPld {
 public:
  AtomicPld(std::vector<PldAtom> atoms, double delta_inf);

  const std::vector<PldAtom>& atoms() const { return atoms_; }
  double delta_inf() const { return delta_inf_; }
  double total_mass() const { return total_mass_; }  // finite atoms only

 private:
  std::vector<PldAtom> atoms_;
  double delta_inf_ = 0.0;
  double total_mass_ = 0.0;
};

// Builds the privacy loss distribution of fx over fy: one atom per shared
// outcome t at s = log(fx(t)/fy(t)) with mass fx(t); outcomes carrying fx-mass
// where fy vanishes accumulate into delta_inf. Outcome labels are matched by
// exact equality; callers are responsible for aligning them.
AtomicPld build_pld(const OutputDistribution& fx, const OutputDistribution& fy);

// Tight delta(eps) of the k-fold self-composition, by exact convolution of the
// atom list (equal-s atoms merged between rounds). Intended as a reference
// path; throws if the intermediate atom count would exceed kExactAtomBudget.
double delta_exact(const AtomicPld& pld, double eps, std::int64_t k);

// 1 - (1 - delta_inf)^k.
double delta_infty_composed(double delta_inf, std::int64_t k);

}  // namespace pldacct

#endif  // PLDACCT_PLD_HPP_
