#pragma once

#include "grpheat/core.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace grpheat {

/// Tridiagonal matrix in band storage. Row i reads
/// lower[i]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1]; lower[0] and upper[N-1] are ignored.
template <typename T>
struct Tridiagonal {
  VectorT<T> lower;
  VectorT<T> diag;
  VectorT<T> upper;

  explicit Tridiagonal(Eigen::Index size = 0)
      : lower(VectorT<T>::Zero(size)), diag(VectorT<T>::Zero(size)), upper(VectorT<T>::Zero(size)) {}

  Eigen::Index size() const { return diag.size(); }

  VectorT<T> apply(const VectorT<T>& x) const {
    const Eigen::Index n = size();
    VectorT<T> y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      T s = diag[i] * x[i];
      if (i > 0) s += lower[i] * x[i - 1];
      if (i + 1 < n) s += upper[i] * x[i + 1];
      y[i] = s;
    }
    return y;
  }

  /// Returns alpha*I + beta*A.
  Tridiagonal shifted(T alpha, T beta) const {
    Tridiagonal out(size());
    out.lower = beta * lower;
    out.upper = beta * upper;
    out.diag = (beta * diag).array() + alpha;
    return out;
  }
};

/// LU factorization without pivoting (Thomas algorithm), reusable across right-hand sides.
template <typename T>
class ThomasFactorization {
 public:
  /// With `perturb_pivots`, near-zero pivots are replaced by a tiny value instead of
  /// raising; this is what inverse iteration at a converged eigenvalue needs.
  explicit ThomasFactorization(const Tridiagonal<T>& a, bool perturb_pivots = false)
      : lower_(a.lower), inv_pivot_(a.size()), upper_mod_(a.size()) {
    const Eigen::Index n = a.size();
    const T scale = a.diag.cwiseAbs().maxCoeff() + a.lower.cwiseAbs().maxCoeff() +
                    a.upper.cwiseAbs().maxCoeff();
    const T tiny = std::numeric_limits<T>::epsilon() * (scale > 0 ? scale : T(1));
    for (Eigen::Index i = 0; i < n; ++i) {
      T pivot = a.diag[i];
      if (i > 0) pivot -= a.lower[i] * upper_mod_[i - 1];
      if (!(std::abs(pivot) > tiny) || !std::isfinite(pivot)) {
        if (!perturb_pivots || !std::isfinite(pivot))
          throw NumericalError("tridiagonal solve broke down at row " + std::to_string(i) +
                               "; the system is not diagonally dominant, try a smaller dt");
        pivot = pivot < 0 ? -tiny : tiny;
      }
      inv_pivot_[i] = T(1) / pivot;
      upper_mod_[i] = (i + 1 < n) ? a.upper[i] * inv_pivot_[i] : T(0);
    }
  }

  void solve_in_place(VectorT<T>& rhs) const {
    const Eigen::Index n = inv_pivot_.size();
    rhs[0] *= inv_pivot_[0];
    for (Eigen::Index i = 1; i < n; ++i) rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) * inv_pivot_[i];
    for (Eigen::Index i = n - 2; i >= 0; --i) rhs[i] -= upper_mod_[i] * rhs[i + 1];
  }

  VectorT<T> solve(VectorT<T> rhs) const {
    solve_in_place(rhs);
    return rhs;
  }

 private:
  VectorT<T> lower_;
  VectorT<T> inv_pivot_;
  VectorT<T> upper_mod_;
};

}  // namespace grpheat
