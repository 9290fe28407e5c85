#pragma once

#include <random>

#include "gpbucb/kernel.hpp"
#include "oracles.hpp"

namespace testing_support {

inline gpbucb::KernelSpec to_spec(const oracle::Kernel& k) {
  using gpbucb::KernelSpec;
  using gpbucb::MaternSmoothness;
  switch (k.family) {
    case oracle::Family::rbf: return KernelSpec::rbf(k.sv, k.ls);
    case oracle::Family::matern12: return KernelSpec::matern(k.sv, k.ls, MaternSmoothness::half);
    case oracle::Family::matern32: return KernelSpec::matern(k.sv, k.ls, MaternSmoothness::three_halves);
    case oracle::Family::matern52: return KernelSpec::matern(k.sv, k.ls, MaternSmoothness::five_halves);
    case oracle::Family::linear: return KernelSpec::linear(k.ls);
  }
  return KernelSpec::rbf(k.sv, k.ls);
}

/// Random kernel; `family_pick` cycles rbf, matern 1/2, 3/2, 5/2, linear.
inline oracle::Kernel random_kernel(std::mt19937_64& rng, std::size_t d, std::size_t family_pick) {
  std::uniform_real_distribution<double> ls(0.2, 1.5);
  std::uniform_real_distribution<double> sv(0.5, 2.0);
  oracle::Kernel k;
  k.family = static_cast<oracle::Family>(family_pick % 5);
  k.sv = k.family == oracle::Family::linear ? 1.0 : sv(rng);
  k.ls = Eigen::VectorXd(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < k.ls.size(); ++j) k.ls[j] = ls(rng);
  return k;
}

inline gpbucb::DecisionSet to_decisions(const std::vector<Eigen::VectorXd>& pts) {
  return gpbucb::DecisionSet(oracle::as_columns(pts, static_cast<std::size_t>(pts.front().size())));
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace testing_support
