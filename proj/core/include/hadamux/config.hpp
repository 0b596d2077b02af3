#pragma once

#include "hadamux/analysis.hpp"
#include "hadamux/nnls.hpp"
#include "hadamux/recon.hpp"
#include "hadamux/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hadamux {

enum class MmsCoding { ideal, snap };

/// Monte Carlo experiment description.
///
/// Text form is one `key = value` per line with `#` comments; to_text()
/// writes every key so a saved config reproduces the run. Keys:
///
///   order, spectrum_file, synth, length, spectrum_seed, lines,
///   sigma (number or "auto"), slit_target_db, nondispersive_sigma,
///   k_grid ("start:stop:step" or comma list), trials, seed, methods,
///   mms_coding (ideal|snap), bound_k, figure_k, threads, output_dir,
///   nnls_tolerance, nnls_max_iterations, max_condition
struct ExperimentConfig {
  int order = 127;

  std::optional<std::filesystem::path> spectrum_file;
  SpectrumKind synth = SpectrumKind::solar_like;
  int spectrum_length = 0;  // 0: same as order
  std::uint64_t spectrum_seed = 1;
  SpectrumParams spectrum_params;

  // Detector noise. Unset means: calibrate so the slit baseline lands at
  // slit_target_db for the configured spectrum.
  std::optional<double> sigma;
  double slit_target_db = 6.45;
  double nondispersive_sigma = 0.0;

  std::vector<double> k_grid = default_k_grid();
  int trials = 100;
  std::uint64_t seed = 1;
  std::vector<Method> methods{kAllMethods[0], kAllMethods[1], kAllMethods[2], kAllMethods[3]};
  MmsCoding mms_coding = MmsCoding::ideal;

  std::vector<double> bound_k{0.1, 0.3, 0.5, 0.9};
  std::vector<double> figure_k{0.1, 0.5};

  int threads = 0;  // 0: hardware concurrency
  std::filesystem::path output_dir = "hadamux_out";

  NnlsOptions nnls;
  InverseOptions inverse;

  int effective_length() const { return spectrum_length > 0 ? spectrum_length : order; }
  bool has_method(Method m) const;

  /// 0.01, 0.02, ..., 0.99.
  static std::vector<double> default_k_grid();
};

/// Throws InvalidArgument naming the offending key.
void validate(const ExperimentConfig& config);

ExperimentConfig parse_config(std::string_view text, std::string_view source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);
std::string to_text(const ExperimentConfig& config);

/// "start:stop:step" (inclusive) or a comma-separated list.
std::vector<double> parse_k_grid(std::string_view text);

/// Noise sigma that puts the expected slit SNR at `target_db` for `f`.
double calibrate_sigma(const Spectrum& f, double target_db);

}  // namespace hadamux
