// sasv/eval/eer.hpp

// Copyright 2026  SASVKit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "sasv/core/common.hpp"

namespace sasv::eval {

template <class S>
struct EerResult {
  S eer = S(0);        // in [0, 1]
  S threshold = S(0);  // the sweep threshold attaining it
};

// Equal error rate by exhaustive threshold sweep.
//
// Decisions are "accept iff score >= t".  Every distinct score is tried as
// t; FAR(t) is the fraction of negatives >= t and FRR(t) the fraction of
// positives < t.  The reported EER is the midpoint (FAR + FRR) / 2 at the
// threshold minimising |FAR - FRR|.  When several thresholds attain the
// minimal gap, the smallest midpoint wins (this keeps the estimate
// invariant under negating all scores and swapping the lists); among equal
// (gap, midpoint) candidates the smallest threshold is reported.  No ROC
// interpolation.
template <class S>
EerResult<S> ComputeEer(std::span<const S> positives,
                        std::span<const S> negatives) {
  if (positives.empty() || negatives.empty()) {
    throw DataError("compute_eer: positive and negative score lists must be "
                    "non-empty");
  }
  std::vector<S> pos(positives.begin(), positives.end());
  std::vector<S> neg(negatives.begin(), negatives.end());
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());

  std::vector<S> thresholds;
  thresholds.reserve(pos.size() + neg.size());
  std::merge(pos.begin(), pos.end(), neg.begin(), neg.end(),
             std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  const S n_pos = static_cast<S>(pos.size());
  const S n_neg = static_cast<S>(neg.size());
  EerResult<S> best;
  S best_gap = S(-1);
  for (const S t : thresholds) {
    // negatives >= t
    const auto neg_ge = neg.end() - std::lower_bound(neg.begin(), neg.end(), t);
    // positives < t
    const auto pos_lt = std::lower_bound(pos.begin(), pos.end(), t) - pos.begin();
    const S far = static_cast<S>(neg_ge) / n_neg;
    const S frr = static_cast<S>(pos_lt) / n_pos;
    const S gap = std::abs(far - frr);
    const S mid = (far + frr) / S(2);
    if (best_gap < S(0) || gap < best_gap ||
        (gap == best_gap && mid < best.eer)) {
      best_gap = gap;
      best.eer = mid;
      best.threshold = t;
    }
  }
  return best;
}

template <class S>
EerResult<S> ComputeEer(const std::vector<S>& positives,
                        const std::vector<S>& negatives) {
  return ComputeEer(std::span<const S>(positives),
                    std::span<const S>(negatives));
}

}  // namespace sasv::eval
