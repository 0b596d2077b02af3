#pragma once

#include "hadamux/analysis.hpp"
#include "hadamux/codes.hpp"
#include "hadamux/config.hpp"
#include "hadamux/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hadamux {

/// Seed-splitting contract. For grid index k_index and trial index t:
///
///   trial_seed      = derive_seed(master_seed, k_index * trials + t)
///   intensity field = derive_seed(trial_seed, 0)
///   detector noise  = derive_seed(trial_seed, 1)   (HTS exposure i: derive_seed(that, i))
///   intensity cam   = derive_seed(trial_seed, 2)
///   slit row r      = derive_seed(derive_seed(trial_seed, 3), r)
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t k_index, int trials, int trial);

inline constexpr const char* kSeedRule =
    "trial_seed = derive_seed(master_seed, k_index * trials + trial_index); "
    "streams per trial: 0 intensity field, 1 detector noise (HTS exposure i uses derive_seed(stream1, i)), "
    "2 intensity camera, 3 slit (row r uses derive_seed(stream3, r)); "
    "derive_seed(s, i) = splitmix64(splitmix64(s) ^ splitmix64(i + 0x632BE59BD9B4E019)); "
    "Rng = mt19937_64 seeded with splitmix64(seed), 53-bit uniforms, Box-Muller normals";

/// Spectra shown in the example-spectra output for one trial.
struct ExampleSpectra {
  double k = 0.0;
  Vector truth;
  std::map<Method, Vector> spectra;  // consensus for slit/hts/snapshot, median-SNR row for mms
  int mms_row = -1;
};

struct TrialOutcome {
  std::vector<SnrSample> samples;
  std::optional<ExampleSpectra> spectra;
  std::optional<BoundReport> bound;
};

/// Fixed parts of an experiment (S-matrix, spectrum, embedding, sigma),
/// built once and shared read-only by every trial.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  const SMatrix& s_matrix() const { return s_; }
  const Spectrum& spectrum() const { return spectrum_; }
  const EmbeddedScene& scene() const { return scene_; }
  double sigma() const { return sigma_; }

  /// One scene and noise realization evaluated by every configured method.
  TrialOutcome run_trial(double k, std::uint64_t seed, int trial_index = 0, bool keep_spectra = false,
                         bool eval_bound_report = false) const;

 private:
  ExperimentConfig config_;
  SMatrix s_;
  Spectrum spectrum_;
  EmbeddedScene scene_;
  double sigma_ = 0.0;
};

/// Writes the forward-model data of one trial (same seeds as run_trial) as
/// CSV into `dir`: coding.csv, s_snap.csv, scene.csv, slit.csv, hts.csv,
/// snapshot_dispersive.csv, non_dispersive.csv.
void dump_measurements(const Experiment& experiment, double k, std::uint64_t seed,
                       const std::filesystem::path& dir);

/// Convenience: builds an Experiment and runs one trial.
std::vector<SnrSample> run_trial(const ExperimentConfig& config, double k, std::uint64_t seed);

struct MethodSummary {
  Method method = Method::slit;
  double k = 0.0;
  std::optional<Summary> rows;       // per-row samples
  std::optional<Summary> consensus;  // one sample per trial
  std::size_t row_samples = 0;
  std::size_t infinite = 0;
};

struct BoundAggregate {
  double k = 0.0;
  int trials = 0;
  double mean_realized_k = 0.0;
  double mean_empirical_snr_db = 0.0;
  double mean_hts_snr_db = 0.0;
  double mean_bound_db = 0.0;
  double mean_degradation_db = 0.0;
  double predicted_degradation_db = 0.0;
  double max_identity_residual = 0.0;
};

struct TrialFailure {
  double k = 0.0;
  int trial = 0;
  std::string message;
};

struct SweepResult {
  ExperimentConfig config;
  double sigma = 0.0;
  std::vector<SnrSample> samples;  // sorted by sample_order
  std::vector<MethodSummary> summaries;
  std::vector<BoundAggregate> bounds;
  std::vector<ExampleSpectra> examples;
  std::vector<TrialFailure> failures;
  double wall_seconds = 0.0;
  int threads = 1;

  const MethodSummary* find(Method m, double k) const;
};

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

/// Runs the k grid x trials. Trials are independent and run on a worker pool;
/// results are assembled in a fixed order so output does not depend on
/// scheduling. A failing trial is recorded and the sweep continues.
SweepResult run_sweep(const ExperimentConfig& config, const ProgressCallback& progress = {});

/// Recomputes summaries from samples (used after loading saved results).
std::vector<MethodSummary> summarize_samples(const std::vector<SnrSample>& samples,
                                             const std::vector<Method>& methods, const std::vector<double>& k_grid);

/// Writes samples.csv, summaries.json, fig5.csv, fig6.csv, fig7.csv,
/// table1.json, bounds.csv, meta.json, config.txt and report.txt into
/// `outdir`. A directory written this way can be read back by load_result.
void emit_report(const SweepResult& result, const std::filesystem::path& outdir);

SweepResult load_result(const std::filesystem::path& dir);

/// The human-readable report text (also written as report.txt).
std::string report_text(const SweepResult& result);

// Published benchmark values the report compares against.
inline constexpr double kReferenceHtsSlitGapDb = 8.455;
inline constexpr double kReferenceGapK01Db = 0.715;
inline constexpr double kReferenceGapK05Db = 2.515;

}  // namespace hadamux
