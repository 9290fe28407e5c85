#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <vector>

#include "gpbucb/errors.hpp"

namespace gpbucb {

/// Lower-triangular Cholesky factor that grows one row at a time.
///
/// Rows are packed contiguously (row i holds i + 1 entries), so appending never
/// moves existing entries and forward substitution reads each row in order. All
/// reductions are plain left-to-right loops: the result of a forward solve on a
/// prefix is bit-identical to the same prefix of a longer solve.
class GrowingCholesky {
 public:
  std::size_t size() const { return size_; }

  double operator()(std::size_t i, std::size_t j) const { return packed_[offset(i) + j]; }
  double diagonal(std::size_t i) const { return packed_[offset(i) + i]; }

  /// Computes solution entries [column.size(), size()) of L v = rhs, where `rhs(j)`
  /// yields the j-th right-hand side entry. Adds the squares of the new entries to
  /// `sq_sum` in order.
  template <class Rhs>
  void extend_forward(Rhs&& rhs, std::vector<double>& column, double& sq_sum) const {
    for (std::size_t j = column.size(); j < size_; ++j) {
      const double* row = packed_.data() + offset(j);
      double acc = rhs(j);
      for (std::size_t m = 0; m < j; ++m) acc -= row[m] * column[m];
      const double v = acc / row[j];
      column.push_back(v);
      sq_sum += v * v;
    }
  }

  /// Appends the row for a new element with covariances `cross` against the
  /// existing elements and variance `diag` (noise already included). If the
  /// pivot is not positive, retries with 1e-10 and then 1e-8 times `jitter_scale`
  /// added to the new diagonal before giving up.
  void append(std::span<const double> cross, double diag, double jitter_scale) {
    if (cross.size() != size_) throw InternalError("cholesky append: cross covariance length mismatch");
    std::vector<double> row;
    row.reserve(size_ + 1);
    double sq = 0.0;
    extend_forward([&](std::size_t j) { return cross[j]; }, row, sq);
    double pivot = diag - sq;
    if (!(pivot > 0.0)) {
      for (double jitter : {1e-10, 1e-8}) {
        pivot = diag + jitter * jitter_scale - sq;
        if (pivot > 0.0) break;
      }
    }
    if (!(pivot > 0.0) || !std::isfinite(pivot)) {
      std::ostringstream msg;
      msg << "cholesky breakdown at row " << size_ << ": pivot " << pivot
          << " after jitter (diagonal " << diag << ", projected " << sq << ")";
      throw NumericalError(msg.str());
    }
    row.push_back(std::sqrt(pivot));
    packed_.insert(packed_.end(), row.begin(), row.end());
    ++size_;
  }

  /// Solves L L^T w = b.
  std::vector<double> solve(std::span<const double> b) const {
    if (b.size() != size_) throw InternalError("cholesky solve: length mismatch");
    std::vector<double> z;
    z.reserve(size_);
    double unused = 0.0;
    extend_forward([&](std::size_t j) { return b[j]; }, z, unused);
    for (std::size_t jj = size_; jj-- > 0;) {
      double acc = z[jj];
      for (std::size_t i = jj + 1; i < size_; ++i) acc -= (*this)(i, jj) * z[i];
      z[jj] = acc / diagonal(jj);
    }
    return z;
  }

  /// log det(L L^T).
  double log_determinant() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < size_; ++i) acc += std::log(diagonal(i));
    return 2.0 * acc;
  }

 private:
  static std::size_t offset(std::size_t i) { return i * (i + 1) / 2; }

  std::vector<double> packed_;
  std::size_t size_ = 0;
};

}  // namespace gpbucb
