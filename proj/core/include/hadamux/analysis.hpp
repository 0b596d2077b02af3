#pragma once

#include "hadamux/common.hpp"
#include "hadamux/scene.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hadamux {

enum class Method { slit, hts, snapshot, mms };

inline constexpr Method kAllMethods[] = {Method::slit, Method::hts, Method::snapshot, Method::mms};

std::string_view to_string(Method m);
Method parse_method(std::string_view text);

/// Row index used for the consensus (row-averaged) spectrum.
inline constexpr int kConsensusRow = -1;

struct SnrSample {
  Method method = Method::slit;
  double k = 0.0;
  int trial = 0;
  int row = 0;  // kConsensusRow for the consensus spectrum
  double snr_db = 0.0;

  bool consensus() const { return row == kConsensusRow; }
  friend bool operator==(const SnrSample&, const SnrSample&) = default;
};

/// Orders by (method, k, trial, row) with consensus rows last within a trial.
bool sample_order(const SnrSample& a, const SnrSample& b);

/// Reconstructions whose relative squared error is below 1e-20 (SNR above
/// 200 dB) count as exact and map to +infinity.
inline constexpr double kExactSnrDb = 200.0;

/// 10 log10(||f||^2 / ||f - f_hat||^2).
double snr_db(const Vector& truth, const Vector& estimate);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

struct Summary {
  double mean_db = 0.0;
  double std_db = 0.0;          // sample standard deviation
  Interval ci95_mean;           // mean +- 1.96 std / sqrt(N)
  Interval population95;        // mean +- 1.96 std
  double q025 = 0.0;
  double q50 = 0.0;
  double q975 = 0.0;
  std::size_t n = 0;            // finite samples used
  std::size_t infinite = 0;     // exact-reconstruction sentinels excluded
};

/// Sorts internally, so the result is bit-identical for any permutation of
/// the input. Throws InvalidArgument when fewer than two finite values remain.
Summary summarize(std::span<const double> snr_values);
Summary summarize(std::span<const SnrSample> samples);

std::string to_json(const Summary& s, int indent = 2);

/// Linear-interpolation quantile of sorted data (q in [0, 1]).
double quantile_sorted(std::span<const double> sorted, double q);

struct BoundReport {
  double k = 0.0;
  double alpha = 1.0;
  Matrix p_matrix;
  double identity_residual = 0.0;
  // SNR boosts (noise power in / noise power out of the decoder) in dB.
  double empirical_snr_db = 0.0;   // decoding with s_snap
  double hts_snr_db = 0.0;         // decoding the same noise with the ideal S
  double bound_db = 0.0;           // S^T S quadratic form + 10 log10(1 - k)
  double degradation_db = 0.0;     // hts_snr_db - empirical_snr_db
  int samples = 0;
};

/// Noise-only evaluation of the sub-S matrix against the ideal S. Columns of
/// `noise_samples` are realized detector noise vectors of length n.
/// At k = 0 the P matrix is zero and the bound reduces to the S^T S term.
BoundReport eval_bound(const SubSMatrix& sub, const Matrix& noise_samples);

/// 10 log10(1 / (1 - k)).
double predicted_degradation_db(double k);

/// 10 log10((n+1)^2 / (4n)): noise-power reduction of S-matrix decoding
/// relative to one direct measurement.
double theoretical_multiplex_gain(int order);

// Samples CSV: header "method,k,trial,row,snr_db"; consensus rows are
// written as "consensus", infinities as "inf".
void write_samples_csv(std::ostream& out, std::span<const SnrSample> samples);
std::vector<SnrSample> read_samples_csv(std::istream& in, std::string_view source = "<stream>");

}  // namespace hadamux
