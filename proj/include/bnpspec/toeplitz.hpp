#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bnpspec {

/// Symmetric positive definite Toeplitz matrix T with T(i,j) = gamma(|i-j|),
/// factorized once at construction and immutable afterwards (shareable across
/// threads).
///
/// The primary factorization is Durbin's recursion, which yields the innovations
/// form  T^{-1} = A' V^{-1} A  with A unit lower triangular (row k holds the
/// order-k prediction coefficients) and V = diag(v_0..v_{n-1}). Rows are stored
/// with trailing coefficients below 1e-16 of the row mass dropped, so banded
/// inverses (AR working models) cost O(n p). When an innovation variance is not
/// clearly positive the matrix is refactorized by dense Cholesky; if that fails
/// too a NumericError names the first non-positive leading minor.
class ToeplitzMatrix {
 public:
  enum class Method { levinson, cholesky };

  ToeplitzMatrix(std::span<const double> gamma, std::size_t n);

  std::size_t size() const noexcept { return n_; }
  std::span<const double> acf() const noexcept { return gamma_; }
  Method method() const noexcept { return method_; }

  double log_det() const noexcept { return log_det_; }
  std::vector<double> matvec(std::span<const double> x) const;
  std::vector<double> solve(std::span<const double> b) const;
  /// z' T^{-1} z.
  double inverse_quadratic_form(std::span<const double> z) const;
  /// Innovation variances v_k (Levinson) or squared Cholesky diagonal.
  std::span<const double> innovation_variances() const noexcept { return innov_; }

  /// Order-k prediction coefficients phi_{k,1..len}; trimmed.
  std::span<const double> prediction_row(std::size_t k) const;

 private:
  bool factorize_levinson();
  void factorize_cholesky();

  std::size_t n_ = 0;
  std::vector<double> gamma_;
  Method method_ = Method::levinson;
  double log_det_ = 0.0;
  std::vector<double> innov_;
  // Levinson rows, concatenated; row k spans [row_offset_[k], row_offset_[k+1]).
  std::vector<double> rows_;
  std::vector<std::size_t> row_offset_;
  // Dense lower Cholesky factor (row-major) when method_ == cholesky.
  std::vector<double> chol_;
};

/// Wrapper with the name used across the code base.
ToeplitzMatrix toeplitz_from_acf(std::span<const double> gamma, std::size_t n);

}  // namespace bnpspec
