#pragma once

#include "hadamux/common.hpp"

#include <optional>
#include <vector>

namespace hadamux {

struct NnlsOptions {
  // Dual feasibility tolerance relative to max_j ||a_j|| * ||b||.
  double tolerance = 1e-10;
  // 0 selects 3 * (number of unknowns).
  int max_iterations = 0;
  // Use the Sherman-Morrison passive-set solve when A^T A = a I + b J.
  bool exploit_structure = true;
};

struct NnlsResult {
  Vector x;
  int iterations = 0;
  double residual_norm = 0.0;
  bool converged = true;  // false when the iteration cap was hit
  double dual_tolerance = 0.0;
};

/// Lawson-Hanson active-set solver for min ||A x - b|| s.t. x >= 0, working
/// on the normal equations so one factorization of A^T A serves many
/// right-hand sides.
///
/// Passive-set subproblems are solved either with an incrementally grown
/// Cholesky factor of the passive block of A^T A (rebuilt when indices leave
/// the set), or in O(p) with Sherman-Morrison when the Gram matrix has the
/// form a I + b J, which is exactly the case for S-matrices.
class NnlsSolver {
 public:
  explicit NnlsSolver(Matrix a, NnlsOptions options = {});

  NnlsResult solve(const Vector& b) const;

  /// Column-by-column solve of A X = B.
  std::vector<NnlsResult> solve_columns(const Matrix& b) const;

  bool structured() const { return structured_.has_value(); }
  int unknowns() const { return static_cast<int>(a_.cols()); }
  const Matrix& gram() const { return gram_; }

 private:
  struct DiagPlusConstant {
    double diag;   // a
    double fill;   // b
  };

  NnlsResult solve_normal(const Vector& atb, double b_norm, const Vector& b) const;

  Matrix a_;
  Matrix gram_;
  double max_column_norm_ = 0.0;
  NnlsOptions options_;
  std::optional<DiagPlusConstant> structured_;
};

/// One-shot convenience wrapper.
NnlsResult nnls(const Matrix& a, const Vector& b, const NnlsOptions& options = {});

}  // namespace hadamux
