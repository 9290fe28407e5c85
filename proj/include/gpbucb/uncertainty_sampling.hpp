#pragma once

#include <cstddef>
#include <vector>

#include "gpbucb/errors.hpp"
#include "gpbucb/gp_posterior.hpp"
#include "gpbucb/kernel.hpp"

namespace gpbucb {

struct UncertaintySamplingResult {
  std::vector<std::size_t> indices;
  /// Posterior variance of each pick at the moment it was picked.
  std::vector<double> variances;
};

/// Greedily picks the decision with the largest posterior variance `steps`
/// times, hallucinating each pick into `posterior` before the next one. Ties go
/// to the lowest index. Picks may repeat.
inline UncertaintySamplingResult uncertainty_sampling(GpPosterior& posterior, const DecisionSet& decisions,
                                                      std::size_t steps) {
  if (decisions.dimension() != posterior.dimension()) {
    throw InputError("decision set dimension does not match the kernel");
  }
  UncertaintySamplingResult out;
  out.indices.reserve(steps);
  out.variances.reserve(steps);
  VarianceCache cache(decisions);
  for (std::size_t s = 0; s < steps; ++s) {
    std::size_t best = 0;
    double best_var = cache.variance(posterior, 0);
    for (std::size_t i = 1; i < decisions.size(); ++i) {
      const double v = cache.variance(posterior, i);
      if (v > best_var) {
        best_var = v;
        best = i;
      }
    }
    out.indices.push_back(best);
    out.variances.push_back(best_var);
    posterior.hallucinate(decisions.point(best));
  }
  return out;
}

/// The initialization set D^init of the two-stage algorithm: `init_size` picks
/// of uncertainty sampling starting from `posterior`.
inline std::vector<std::size_t> uncertainty_sampling_init(GpPosterior posterior, const DecisionSet& decisions,
                                                          std::size_t init_size) {
  if (init_size == 0) throw InputError("initialization size must be at least 1");
  return uncertainty_sampling(posterior, decisions, init_size).indices;
}

}  // namespace gpbucb
