#pragma once

#include "hadamux/codes.hpp"
#include "hadamux/common.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hadamux {

/// Peak-normalized spectrum (max value 1, all values >= 0, length >= 2).
struct Spectrum {
  Vector values;
  std::optional<Vector> wavelength_nm;  // strictly increasing when present

  int length() const { return static_cast<int>(values.size()); }
};

enum class SpectrumKind { solar_like, gaussian_lines, flat };

std::string_view to_string(SpectrumKind kind);
SpectrumKind parse_spectrum_kind(std::string_view text);

struct GaussianLine {
  double center = 0.0;  // sample index, must lie in [0, length)
  double width = 1.0;   // standard deviation in samples
  double amplitude = 1.0;
};

struct SpectrumParams {
  // gaussian_lines
  std::vector<GaussianLine> lines;
  // solar_like: blackbody envelope over [min_nm, max_nm] with Fraunhofer-style
  // absorption dips plus `extra_dips` seeded weak dips.
  double min_nm = 380.0;
  double max_nm = 1000.0;
  double temperature_k = 5778.0;
  int extra_dips = 8;
};

/// Deterministic for fixed (kind, length, params, seed). Result is
/// peak-normalized; solar_like also carries its wavelength axis.
Spectrum synth_spectrum(SpectrumKind kind, int length, const SpectrumParams& params, std::uint64_t seed);

/// Reads a one-column (value) or two-column (wavelength_nm,value) CSV with an
/// optional header line and peak-normalizes it.
Spectrum load_spectrum(const std::filesystem::path& path);

/// Same as load_spectrum but from already-read text; `source` names the
/// origin in error messages.
Spectrum parse_spectrum_csv(std::string_view text, std::string_view source = "<memory>");

/// Scales values so the maximum is 1. Throws for negative or all-zero input.
Spectrum normalize_peak(Vector values, std::optional<Vector> wavelength_nm = std::nullopt);

/// Normalized light intensity at the coding aperture.
struct IntensityField {
  Matrix entries;      // n x n, every entry in (0, 1]
  double k = 0.0;      // disturbance the field was sampled with

  int order() const { return static_cast<int>(entries.rows()); }
};

/// Entries drawn independently from Uniform[1-k, 1]; k = 0 gives all ones.
IntensityField sample_intensity(int order, double k, std::uint64_t seed);

/// Sub-Hadamard-S coding matrix with its decomposition.
///
///   s_snap = (S o I) / max(S o I)
///   alpha  = min s_snap over positions where S = 1,  k = 1 - alpha
///   s1     = S - s_snap,   s2 = s_snap - alpha S,    k S = s1 + s2
struct SubSMatrix {
  SMatrix base;
  Matrix s_snap;
  Matrix s1;
  Matrix s2;
  double alpha = 1.0;
  double k = 0.0;
  // max(S o I) before normalization; the non-dispersive camera sees
  // intensity_peak * s_snap.
  double intensity_peak = 1.0;

  int order() const { return base.order(); }
};

SubSMatrix make_sub_s(const SMatrix& base, const IntensityField& intensity);

/// Same decomposition for an arbitrary nonnegative intensity map. Only the
/// positions where base = 1 contribute.
SubSMatrix make_sub_s(const SMatrix& base, const Matrix& intensity);

/// n x (n+m-1) shift embedding: row j holds the spectrum in columns
/// [j, j+m-1] and zeros elsewhere.
struct EmbeddedScene {
  int order = 0;
  int spectrum_length = 0;
  Matrix embedded;
};

EmbeddedScene shift_embed(const Spectrum& f, int order);
EmbeddedScene shift_embed(const Vector& f, int order);

}  // namespace hadamux
