#pragma once

// Covariance functions for the zero-mean GP prior over payoffs, plus the
// finite decision set they are evaluated on.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gpbucb/errors.hpp"

namespace gpbucb {

using PointRef = Eigen::Ref<const Eigen::VectorXd>;

/// Finite, indexed collection of candidate decisions in R^d. Stored one
/// decision per column so that `point(i)` is a contiguous view.
class DecisionSet {
 public:
  explicit DecisionSet(Eigen::MatrixXd points) : points_(std::move(points)) {
    if (points_.cols() == 0) throw InputError("decision set must not be empty");
    if (points_.rows() == 0) throw InputError("decision set dimension must be positive");
    if (!points_.allFinite()) throw InputError("decision set contains non-finite coordinates");
  }

  /// Builds a set from row-wise coordinate lists; every row must have the same length.
  static DecisionSet from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw InputError("decision set must not be empty");
    const std::size_t d = rows.front().size();
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != d) {
        throw InputError("decision " + std::to_string(i) + " has dimension " +
                         std::to_string(rows[i].size()) + ", expected " + std::to_string(d));
      }
      for (std::size_t j = 0; j < d; ++j) {
        pts(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = rows[i][j];
      }
    }
    return DecisionSet(std::move(pts));
  }

  /// Regular grid over the box [lower, upper] with `resolution[j]` evenly spaced
  /// points per axis, endpoints included. The first axis varies fastest.
  static DecisionSet grid(std::span<const double> lower, std::span<const double> upper,
                          std::span<const std::size_t> resolution) {
    const std::size_t d = lower.size();
    if (d == 0 || upper.size() != d || resolution.size() != d) {
      throw InputError("grid bounds and resolution must have the same positive length");
    }
    std::size_t n = 1;
    for (std::size_t j = 0; j < d; ++j) {
      if (resolution[j] == 0) throw InputError("grid resolution must be positive");
      if (!(upper[j] >= lower[j])) throw InputError("grid upper bound below lower bound");
      n *= resolution[j];
    }
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t rest = i;
      for (std::size_t j = 0; j < d; ++j) {
        const std::size_t k = rest % resolution[j];
        rest /= resolution[j];
        const double step = resolution[j] > 1
                                ? (upper[j] - lower[j]) / static_cast<double>(resolution[j] - 1)
                                : 0.0;
        pts(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
            lower[j] + step * static_cast<double>(k);
      }
    }
    return DecisionSet(std::move(pts));
  }

  std::size_t size() const { return static_cast<std::size_t>(points_.cols()); }
  std::size_t dimension() const { return static_cast<std::size_t>(points_.rows()); }

  auto point(std::size_t i) const {
    if (i >= size()) throw InputError("decision index " + std::to_string(i) + " out of range");
    return points_.col(static_cast<Eigen::Index>(i));
  }

  const Eigen::MatrixXd& points() const { return points_; }

 private:
  Eigen::MatrixXd points_;
};

enum class KernelFamily { rbf_ard, matern, linear_ard };

/// Matérn smoothness; only the half-integer orders with closed forms.
enum class MaternSmoothness { half, three_halves, five_halves };

/// Covariance function family and hyperparameters of the GP prior.
///
/// For LinearARD, k(x, x') = sum_j w_j x_j x'_j with w_j = 1 / lengthscale_j^2;
/// `signal_variance` does not enter the linear kernel.
struct KernelSpec {
  KernelFamily family = KernelFamily::rbf_ard;
  double signal_variance = 1.0;
  Eigen::VectorXd lengthscales;
  MaternSmoothness smoothness = MaternSmoothness::five_halves;

  static KernelSpec rbf(double signal_variance, Eigen::VectorXd lengthscales) {
    KernelSpec spec{KernelFamily::rbf_ard, signal_variance, std::move(lengthscales)};
    spec.validate();
    return spec;
  }

  static KernelSpec matern(double signal_variance, Eigen::VectorXd lengthscales,
                           MaternSmoothness smoothness = MaternSmoothness::five_halves) {
    KernelSpec spec{KernelFamily::matern, signal_variance, std::move(lengthscales), smoothness};
    spec.validate();
    return spec;
  }

  static KernelSpec linear(Eigen::VectorXd lengthscales) {
    KernelSpec spec{KernelFamily::linear_ard, 1.0, std::move(lengthscales)};
    spec.validate();
    return spec;
  }

  std::size_t dimension() const { return static_cast<std::size_t>(lengthscales.size()); }
  bool stationary() const { return family != KernelFamily::linear_ard; }

  void validate() const {
    if (lengthscales.size() == 0) throw InputError("kernel needs at least one lengthscale");
    if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
      throw InputError("kernel signal_variance must be positive");
    }
    for (Eigen::Index j = 0; j < lengthscales.size(); ++j) {
      if (!(lengthscales[j] > 0.0) || !std::isfinite(lengthscales[j])) {
        throw InputError("kernel lengthscale " + std::to_string(j) + " must be positive");
      }
    }
  }
};

inline std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::rbf_ard: return "rbf";
    case KernelFamily::matern: return "matern";
    case KernelFamily::linear_ard: return "linear";
  }
  return "unknown";
}

namespace detail {

inline void check_dimension(const KernelSpec& spec, Eigen::Index got) {
  if (got != spec.lengthscales.size()) {
    throw InputError("point dimension " + std::to_string(got) + " does not match kernel dimension " +
                     std::to_string(spec.lengthscales.size()));
  }
}

// Squared distance after per-axis scaling. (a - b)^2 == (b - a)^2 exactly, so the
// result does not depend on argument order.
inline double scaled_sq_distance(const KernelSpec& spec, PointRef x, PointRef y) {
  double r2 = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double diff = (x[j] - y[j]) / spec.lengthscales[j];
    r2 += diff * diff;
  }
  return r2;
}

inline double matern_profile(MaternSmoothness nu, double r) {
  switch (nu) {
    case MaternSmoothness::half: return std::exp(-r);
    case MaternSmoothness::three_halves: {
      const double s = std::sqrt(3.0) * r;
      return (1.0 + s) * std::exp(-s);
    }
    case MaternSmoothness::five_halves: {
      const double s = std::sqrt(5.0) * r;
      return (1.0 + s + s * s / 3.0) * std::exp(-s);
    }
  }
  return 0.0;
}

}  // namespace detail

/// k(x, x'). Symmetric in its arguments bit-for-bit.
inline double eval(const KernelSpec& spec, PointRef x, PointRef y) {
  detail::check_dimension(spec, x.size());
  detail::check_dimension(spec, y.size());
  switch (spec.family) {
    case KernelFamily::rbf_ard:
      return spec.signal_variance * std::exp(-0.5 * detail::scaled_sq_distance(spec, x, y));
    case KernelFamily::matern:
      return spec.signal_variance *
             detail::matern_profile(spec.smoothness, std::sqrt(detail::scaled_sq_distance(spec, x, y)));
    case KernelFamily::linear_ard: {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double l = spec.lengthscales[j];
        acc += (x[j] * y[j]) / (l * l);
      }
      return acc;
    }
  }
  throw InputError("unknown kernel family");
}

/// Row vector k(x, X) for points stored one per column of `points`.
inline Eigen::VectorXd eval_vector(const KernelSpec& spec, PointRef x, const Eigen::MatrixXd& points) {
  Eigen::VectorXd out(points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i) out[i] = eval(spec, x, points.col(i));
  return out;
}

/// K(X, X). Each unordered pair is evaluated once and mirrored.
inline Eigen::MatrixXd eval_matrix(const KernelSpec& spec, const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.cols();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = eval(spec, points.col(i), points.col(j));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

}  // namespace gpbucb
