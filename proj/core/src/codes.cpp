#include "hadamux/codes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hadamux {
namespace {

constexpr double kInverseResidualTolerance = 1e-10;
constexpr std::size_t kMaxReportedIndices = 16;

std::string qr_convention(int order) {
  std::ostringstream os;
  os << "quadratic-residue complement mod " << order
     << ": r[0]=1, r[j]=1 iff j is a nonzero quadratic residue; rows are left cyclic shifts";
  return os.str();
}

void record(ValidationCheck& check, int row, int col) {
  check.passed = false;
  if (check.offending.size() < kMaxReportedIndices) check.offending.emplace_back(row, col);
}

}  // namespace

bool is_prime(int value) {
  if (value < 2) return false;
  for (int d = 2; d * d <= value; ++d) {
    if (value % d == 0) return false;
  }
  return true;
}

bool is_supported_order(int order) {
  return order >= 3 && order % 4 == 3 && is_prime(order);
}

SMatrix build_s_matrix(int order) {
  if (!is_supported_order(order)) {
    std::ostringstream os;
    os << "unsupported order " << order << ": S-matrix orders must be primes >= 3 congruent to 3 mod 4";
    throw InvalidArgument(os.str());
  }
  std::vector<int> first(order, 0);
  first[0] = 1;
  for (long long x = 1; x < order; ++x) first[(x * x) % order] = 1;

  IntMatrix entries(order, order);
  for (int i = 0; i < order; ++i) {
    for (int j = 0; j < order; ++j) entries(i, j) = first[(i + j) % order];
  }
  return SMatrix(std::move(entries), qr_convention(order));
}

SMatrix SMatrix::from_entries(IntMatrix entries) {
  if (entries.rows() != entries.cols() || entries.rows() == 0) {
    throw InvalidArgument("S-matrix must be square and non-empty");
  }
  const ValidationReport report = validate_s_matrix(entries.cast<double>());
  for (const auto& check : report.checks) {
    if (!check.passed) throw InvalidArgument("not an S-matrix: " + check.name + " failed (" + check.detail + ")");
  }
  return SMatrix(std::move(entries), report.convention);
}

Matrix s_inverse(const SMatrix& s) {
  const int n = s.order();
  const Matrix st = s.as_real().transpose();
  return (2.0 / (n + 1)) * (2.0 * st - Matrix::Ones(n, n));
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  os << "order: " << order << "\n";
  os << "convention: " << convention << "\n";
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) os << "  " << c.detail;
    if (!c.offending.empty()) {
      os << "  at";
      for (const auto& [r, col] : c.offending) {
        os << " (" << r;
        if (col >= 0) os << "," << col;
        os << ")";
      }
    }
    os << "\n";
  }
  os << (ok() ? "valid S-matrix\n" : "NOT a valid S-matrix\n");
  return os.str();
}

ValidationReport validate_s_matrix(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("validate_s_matrix: matrix must be square");
  const int n = static_cast<int>(m.rows());
  ValidationReport report;
  report.order = n;

  ValidationCheck binary{"binary", true, {}, {}};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (m(i, j) != 0.0 && m(i, j) != 1.0) record(binary, i, j);
    }
  }
  if (!binary.passed) binary.detail = "entries other than 0/1";

  // Weight and correlation checks use exact integer arithmetic when the
  // matrix is binary; otherwise rounding is irrelevant because the binary
  // check already failed and these are reported on the real values.
  const bool odd = n % 2 == 1;
  const int expected_weight = (n + 1) / 2;
  ValidationCheck row_weight{"row_weight", true, {}, {}};
  ValidationCheck col_weight{"column_weight", true, {}, {}};
  if (!odd) {
    row_weight.passed = col_weight.passed = false;
    row_weight.detail = col_weight.detail = "order must be odd";
  } else {
    for (int i = 0; i < n; ++i) {
      const double rw = m.row(i).sum();
      if (rw != expected_weight) {
        if (row_weight.passed) {
          std::ostringstream os;
          os << "row " << i << " has weight " << rw << ", expected " << expected_weight;
          row_weight.detail = os.str();
        }
        record(row_weight, i, -1);
      }
      const double cw = m.col(i).sum();
      if (cw != expected_weight) {
        if (col_weight.passed) {
          std::ostringstream os;
          os << "column " << i << " has weight " << cw << ", expected " << expected_weight;
          col_weight.detail = os.str();
        }
        record(col_weight, -1, i);
      }
    }
  }

  ValidationCheck correlation{"correlation", true, {}, {}};
  if (!odd || n < 3) {
    correlation.passed = false;
    correlation.detail = "order must be odd and >= 3";
  } else if (binary.passed) {
    const IntMatrix s = m.cast<int>();
    const IntMatrix gram = s.transpose() * s;
    const int diag = (n + 1) / 2;
    const int off = (n + 1) / 4;
    const bool integral = (n + 1) % 4 == 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const int want = i == j ? diag : off;
        if (!integral || gram(i, j) != want) record(correlation, i, j);
      }
    }
    if (!correlation.passed) correlation.detail = "S^T S != ((n+1)/4)(I+J)";
  } else {
    const Matrix gram = m.transpose() * m;
    const double c = (n + 1) / 4.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double want = i == j ? 2.0 * c : c;
        if (std::abs(gram(i, j) - want) > 1e-9) record(correlation, i, j);
      }
    }
    if (!correlation.passed) correlation.detail = "S^T S != ((n+1)/4)(I+J)";
  }

  ValidationCheck inverse{"inverse_residual", true, {}, {}};
  {
    const Matrix inv = (2.0 / (n + 1)) * (2.0 * m.transpose() - Matrix::Ones(n, n));
    const Matrix residual = m * inv - Matrix::Identity(n, n);
    const double worst = n > 0 ? residual.cwiseAbs().maxCoeff() : 0.0;
    std::ostringstream os;
    os << "max |S S^-1 - I| = " << worst;
    inverse.detail = os.str();
    if (!(worst < kInverseResidualTolerance)) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (std::abs(residual(i, j)) >= kInverseResidualTolerance) record(inverse, i, j);
        }
      }
    }
  }

  bool cyclic = n > 0;
  for (int i = 0; i + 1 < n && cyclic; ++i) {
    for (int j = 0; j < n; ++j) {
      if (m(i + 1, j) != m(i, (j + 1) % n)) {
        cyclic = false;
        break;
      }
    }
  }
  report.convention = cyclic ? "cyclic (row i+1 = row i shifted left)" : "non-cyclic";

  report.checks = {std::move(binary), std::move(row_weight), std::move(col_weight), std::move(correlation),
                   std::move(inverse)};
  return report;
}

}  // namespace hadamux
