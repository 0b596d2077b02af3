#pragma once

#include "hadamux/common.hpp"

#include <string>
#include <utility>
#include <vector>

namespace hadamux {

/// Binary cyclic Hadamard-S coding matrix.
///
/// Entries are 0/1 with (n+1)/2 ones in every row and column, and
/// S^T S = ((n+1)/4)(I + J). Instances are immutable once built; the only
/// ways to obtain one are build_s_matrix() and SMatrix::from_entries(), both
/// of which enforce the invariants.
class SMatrix {
 public:
  /// Validates `entries` and throws InvalidArgument listing the first failed
  /// check when it is not an S-matrix.
  static SMatrix from_entries(IntMatrix entries);

  int order() const { return static_cast<int>(entries_.rows()); }
  const IntMatrix& entries() const { return entries_; }
  int operator()(int row, int col) const { return entries_(row, col); }

  Matrix as_real() const { return entries_.cast<double>(); }

  /// Short description of how the first row was generated.
  const std::string& convention() const { return convention_; }

 private:
  SMatrix(IntMatrix entries, std::string convention)
      : entries_(std::move(entries)), convention_(std::move(convention)) {}

  friend SMatrix build_s_matrix(int order);

  IntMatrix entries_;
  std::string convention_;
};

bool is_prime(int value);

/// Orders accepted by build_s_matrix: primes p >= 3 with p = 3 (mod 4).
bool is_supported_order(int order);

/// Quadratic-residue (Paley) construction.
///
/// The first row has a 1 at column 0 and at every nonzero quadratic residue
/// modulo `order`; this is the complement of the non-residue indicator and
/// gives row weight (n+1)/2. Row i is row 0 cyclically shifted left by i.
SMatrix build_s_matrix(int order);

/// Closed-form inverse (2/(n+1)) (2 S^T - J).
Matrix s_inverse(const SMatrix& s);

struct ValidationCheck {
  std::string name;
  bool passed = true;
  std::string detail;
  std::vector<std::pair<int, int>> offending;  // (row, col); col = -1 for row-level checks
};

struct ValidationReport {
  int order = 0;
  std::vector<ValidationCheck> checks;
  // Informational: "cyclic (row i+1 = row i shifted left)", or "non-cyclic".
  std::string convention;

  bool ok() const;
  const ValidationCheck* find(const std::string& name) const;
  std::string to_text() const;
};

/// Checks binarity, row/column weights, the correlation property and the
/// residual of the closed-form inverse. Never throws for square input;
/// failures are recorded per check.
ValidationReport validate_s_matrix(const Matrix& m);

}  // namespace hadamux
