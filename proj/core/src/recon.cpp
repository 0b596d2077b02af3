#include "hadamux/recon.hpp"

#include <sstream>

namespace hadamux {
namespace {

void check_shapes(const Matrix& coding, const Matrix& g) {
  if (coding.rows() != coding.cols()) throw InvalidArgument("coding matrix must be square");
  if (g.rows() != coding.rows()) {
    throw InvalidArgument("dimension mismatch: coding order " + std::to_string(coding.rows()) +
                          " vs measurement rows " + std::to_string(g.rows()));
  }
}

bool is_exact_s_matrix(const Matrix& coding) {
  const Eigen::Index n = coding.rows();
  if (n < 3 || n % 4 != 3) return false;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (coding(i, j) != 0.0 && coding(i, j) != 1.0) return false;
    }
  }
  return validate_s_matrix(coding).ok();
}

EmbeddedEstimate closed_form(const Matrix& coding, const Matrix& inverse, const Matrix& g) {
  EmbeddedEstimate est{inverse * g, DecodeMethod::inverse, {}};
  est.diagnostics.closed_form = true;
  est.diagnostics.residual_norm = (coding * est.estimate - g).norm();
  return est;
}

}  // namespace

std::string_view to_string(DecodeMethod m) {
  return m == DecodeMethod::inverse ? "inverse" : "nnls";
}

SubSMatrix calibrate_sub_s(const Matrix& image, const SMatrix& base) {
  const int n = base.order();
  if (image.rows() != n || image.cols() != n) {
    throw InvalidArgument("calibrate_sub_s: image is " + std::to_string(image.rows()) + "x" +
                          std::to_string(image.cols()) + ", code order is " + std::to_string(n));
  }
  Matrix masked = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (base(i, j) == 1) masked(i, j) = std::max(image(i, j), 0.0);
    }
  }
  if (!(masked.maxCoeff() > 0.0)) throw NumericalError("dark frame: no positive intensity at open code positions");
  try {
    return make_sub_s(base, masked);
  } catch (const InvalidArgument& e) {
    throw NumericalError(std::string("calibration failed: ") + e.what());
  }
}

EmbeddedEstimate decode_inverse(const SMatrix& coding, const Matrix& g) {
  const Matrix s = coding.as_real();
  check_shapes(s, g);
  return closed_form(s, s_inverse(coding), g);
}

EmbeddedEstimate decode_inverse(const Matrix& coding, const Matrix& g, const InverseOptions& options) {
  check_shapes(coding, g);
  const Eigen::Index n = coding.rows();
  if (is_exact_s_matrix(coding)) {
    const Matrix inverse = (2.0 / static_cast<double>(n + 1)) * (2.0 * coding.transpose() - Matrix::Ones(n, n));
    return closed_form(coding, inverse, g);
  }
  const Eigen::PartialPivLU<Matrix> lu(coding);
  // rcond() is unreliable once a pivot is exactly zero, so screen the pivots first.
  const Vector pivots = lu.matrixLU().diagonal().cwiseAbs();
  const bool degenerate = !(pivots.minCoeff() > std::numeric_limits<double>::epsilon() * pivots.maxCoeff());
  const double rcond = degenerate ? 0.0 : lu.rcond();
  const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(condition <= options.max_condition)) {
    std::ostringstream os;
    os << "coding matrix is singular or ill-conditioned (condition estimate " << condition << " > "
       << options.max_condition << ")";
    throw NumericalError(os.str());
  }
  EmbeddedEstimate est{lu.solve(g), DecodeMethod::inverse, {}};
  est.diagnostics.condition_estimate = condition;
  est.diagnostics.residual_norm = (coding * est.estimate - g).norm();
  return est;
}

EmbeddedEstimate decode_nnls(const Matrix& coding, const Matrix& g, const NnlsOptions& options) {
  if (g.rows() != coding.rows()) {
    throw InvalidArgument("dimension mismatch: coding rows " + std::to_string(coding.rows()) +
                          " vs measurement rows " + std::to_string(g.rows()));
  }
  const NnlsSolver solver(coding, options);
  const auto results = solver.solve_columns(g);
  EmbeddedEstimate est{Matrix(coding.cols(), g.cols()), DecodeMethod::nnls, {}};
  auto& diag = est.diagnostics;
  diag.iterations.reserve(results.size());
  diag.column_residuals.reserve(results.size());
  double sq = 0.0;
  for (std::size_t c = 0; c < results.size(); ++c) {
    est.estimate.col(static_cast<Eigen::Index>(c)) = results[c].x;
    diag.iterations.push_back(results[c].iterations);
    diag.column_residuals.push_back(results[c].residual_norm);
    sq += results[c].residual_norm * results[c].residual_norm;
    if (!results[c].converged) ++diag.capped_columns;
  }
  diag.residual_norm = std::sqrt(sq);
  return est;
}

RowSpectra shift_extract(const Matrix& embedded) {
  const auto n = embedded.rows();
  const auto m = embedded.cols() - n + 1;
  if (n < 1 || m < 1) throw InvalidArgument("shift_extract: estimate must be n x (n+m-1) with m >= 1");
  RowSpectra out;
  out.rows.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    out.rows.emplace_back(embedded.row(j).segment(j, m).transpose());
    out.source_rows.push_back(static_cast<int>(j));
  }
  return out;
}

RowSpectra shift_extract(const EmbeddedEstimate& estimate) {
  return shift_extract(estimate.estimate);
}

Vector consensus_spectrum(const RowSpectra& rows) {
  if (rows.rows.empty()) throw InvalidArgument("consensus_spectrum: no rows");
  Vector sum = Vector::Zero(rows.rows.front().size());
  for (const auto& r : rows.rows) {
    if (r.size() != sum.size()) throw InvalidArgument("consensus_spectrum: rows differ in length");
    sum += r;
  }
  return sum / static_cast<double>(rows.rows.size());
}

}  // namespace hadamux
