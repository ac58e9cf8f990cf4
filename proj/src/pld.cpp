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

#include "pldacct/pld.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pldacct {
namespace {

// Sorts by s and merges atoms closer than kMergeTol, keeping the first
// representative. Log ratios of equal rationals can differ in the last ulp;
// the tolerance also keeps composition rounds from fragmenting.
std::vector<PldAtom> canonicalize(std::vector<PldAtom> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const PldAtom& a, const PldAtom& b) { return a.s < b.s; });
  std::vector<PldAtom> out;
  out.reserve(atoms.size());
  for (const PldAtom& a : atoms) {
    if (a.mass == 0.0) continue;
    if (!out.empty() && a.s - out.back().s < kMergeTol) {
      out.back().mass += a.mass;
    } else {
      out.push_back(a);
    }
  }
  return out;
}

}  // namespace

OutputDistribution::OutputDistribution(std::vector<OutcomeProb> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const OutcomeProb& a, const OutcomeProb& b) {
              return a.outcome < b.outcome;
            });
  for (const OutcomeProb& a : atoms) {
    if (!std::isfinite(a.outcome) || !std::isfinite(a.prob)) {
      throw std::invalid_argument("output distribution entries must be finite");
    }
    if (a.prob < 0.0 || a.prob > 1.0) {
      throw std::invalid_argument("outcome probability outside [0, 1]");
    }
    if (a.prob == 0.0) continue;
    if (!atoms_.empty() && atoms_.back().outcome == a.outcome) {
      throw std::invalid_argument("duplicate outcome in output distribution");
    }
    atoms_.push_back(a);
    total_prob_ += a.prob;
  }
  if (std::abs(total_prob_ - 1.0) > kMassTol) {
    std::ostringstream msg;
    msg << "output distribution probabilities sum to " << total_prob_
        << ", expected 1 within " << kMassTol;
    throw std::invalid_argument(msg.str());
  }
}

double OutputDistribution::prob_of(double outcome) const {
  auto it = std::lower_bound(
      atoms_.begin(), atoms_.end(), outcome,
      [](const OutcomeProb& a, double t) { return a.outcome < t; });
  if (it != atoms_.end() && it->outcome == outcome) return it->prob;
  return 0.0;
}

AtomicPld::AtomicPld(std::vector<PldAtom> atoms, double delta_inf)
    : atoms_(canonicalize(std::move(atoms))), delta_inf_(delta_inf) {
  if (!(delta_inf_ >= 0.0 && delta_inf_ <= 1.0)) {
    throw std::invalid_argument("delta_inf must lie in [0, 1]");
  }
  for (const PldAtom& a : atoms_) {
    if (!std::isfinite(a.s) || !std::isfinite(a.mass) || a.mass < 0.0) {
      throw std::invalid_argument("PLD atoms must be finite with mass >= 0");
    }
    total_mass_ += a.mass;
  }
}

AtomicPld build_pld(const OutputDistribution& fx, const OutputDistribution& fy) {
  if (fx.atoms().empty()) {
    throw std::invalid_argument("numerator distribution has zero total mass");
  }
  std::vector<PldAtom> atoms;
  double delta_inf = 0.0;
  // Both atom lists are sorted by outcome; walk them in lockstep.
  const auto& ax = fx.atoms();
  const auto& ay = fy.atoms();
  std::size_t j = 0;
  for (const OutcomeProb& x : ax) {
    while (j < ay.size() && ay[j].outcome < x.outcome) ++j;
    if (j < ay.size() && ay[j].outcome == x.outcome) {
      atoms.push_back({std::log(x.prob / ay[j].prob), x.prob});
    } else {
      delta_inf += x.prob;
    }
  }
  return AtomicPld(std::move(atoms), delta_inf);
}

double delta_exact(const AtomicPld& pld, double eps, std::int64_t k) {
  if (k < 1) throw std::invalid_argument("composition count k must be >= 1");
  if (eps < 0.0) throw std::invalid_argument("eps must be >= 0");
  const auto& base = pld.atoms();
  std::vector<PldAtom> cur = {{0.0, 1.0}};
  for (std::int64_t round = 0; round < k; ++round) {
    const std::int64_t next_size =
        static_cast<std::int64_t>(cur.size()) *
        static_cast<std::int64_t>(base.size());
    if (next_size > kExactAtomBudget) {
      std::ostringstream msg;
      msg << "exact composition would produce " << next_size
          << " intermediate atoms, over the budget of " << kExactAtomBudget;
      throw std::invalid_argument(msg.str());
    }
    std::vector<PldAtom> next;
    next.reserve(static_cast<std::size_t>(next_size));
    for (const PldAtom& a : cur) {
      for (const PldAtom& b : base) {
        next.push_back({a.s + b.s, a.mass * b.mass});
      }
    }
    std::sort(next.begin(), next.end(),
              [](const PldAtom& a, const PldAtom& b) { return a.s < b.s; });
    cur.clear();
    for (const PldAtom& a : next) {
      if (!cur.empty() && a.s - cur.back().s < kMergeTol) {
        cur.back().mass += a.mass;
      } else {
        cur.push_back(a);
      }
    }
  }
  double tail = 0.0;
  for (auto it = cur.rbegin(); it != cur.rend() && it->s > eps; ++it) {
    tail += (1.0 - std::exp(eps - it->s)) * it->mass;
  }
  return delta_infty_composed(pld.delta_inf(), k) + tail;
}

double delta_infty_composed(double delta_inf, std::int64_t k) {
  if (k < 1) throw std::invalid_argument("composition count k must be >= 1");
  if (!(delta_inf >= 0.0 && delta_inf <= 1.0)) {
    throw std::invalid_argument("delta_inf must lie in [0, 1]");
  }
  // 1 - (1 - d)^k via expm1/log1p so tiny d survives large k.
  return -std::expm1(static_cast<double>(k) * std::log1p(-delta_inf));
}

}  // namespace pldacct
