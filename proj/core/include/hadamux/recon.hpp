#pragma once

#include "hadamux/codes.hpp"
#include "hadamux/common.hpp"
#include "hadamux/forward.hpp"
#include "hadamux/nnls.hpp"
#include "hadamux/scene.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace hadamux {

enum class DecodeMethod { inverse, nnls };

std::string_view to_string(DecodeMethod m);

struct SolverDiagnostics {
  // Per column (nnls only).
  std::vector<int> iterations;
  std::vector<double> column_residuals;
  int capped_columns = 0;

  double residual_norm = 0.0;              // ||coding X - g||_F
  std::optional<double> condition_estimate;  // inverse decode via LU only
  bool closed_form = false;                // exact S-matrix inverse used
};

struct EmbeddedEstimate {
  Matrix estimate;  // n x (n+m-1)
  DecodeMethod method = DecodeMethod::inverse;
  SolverDiagnostics diagnostics;
};

/// The n recovered row spectra, not renormalized.
struct RowSpectra {
  std::vector<Vector> rows;
  std::vector<int> source_rows;

  int order() const { return static_cast<int>(rows.size()); }
};

/// Recovers the sub-S matrix from the non-dispersive camera image: clamp
/// negatives, mask positions where the code is closed, divide by the peak,
/// then decompose as make_sub_s does. Throws NumericalError("dark frame")
/// when nothing positive remains.
SubSMatrix calibrate_sub_s(const Matrix& non_dispersive_image, const SMatrix& base);

struct InverseOptions {
  double max_condition = 1e8;
};

/// Exact S-matrix decode through the closed-form inverse.
EmbeddedEstimate decode_inverse(const SMatrix& coding, const Matrix& g);

/// General decode: solves coding X = g with partial-pivoting LU, or the
/// closed-form inverse when `coding` is exactly an S-matrix. Throws
/// NumericalError when the condition estimate exceeds max_condition.
EmbeddedEstimate decode_inverse(const Matrix& coding, const Matrix& g, const InverseOptions& options = {});

/// Column-wise NNLS decode. Hitting the iteration cap is reported in the
/// diagnostics; the best iterate is returned.
EmbeddedEstimate decode_nnls(const Matrix& coding, const Matrix& g, const NnlsOptions& options = {});

inline EmbeddedEstimate decode_inverse(const Matrix& coding, const Measurement& g,
                                       const InverseOptions& options = {}) {
  return decode_inverse(coding, g.data, options);
}
inline EmbeddedEstimate decode_nnls(const Matrix& coding, const Measurement& g, const NnlsOptions& options = {}) {
  return decode_nnls(coding, g.data, options);
}

/// Row j of the result is columns [j, j+m-1] of row j of the estimate.
RowSpectra shift_extract(const Matrix& embedded);
RowSpectra shift_extract(const EmbeddedEstimate& estimate);

/// Arithmetic mean of the rows.
Vector consensus_spectrum(const RowSpectra& rows);

}  // namespace hadamux
