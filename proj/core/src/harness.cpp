#include "hadamux/harness.hpp"

#include "hadamux/csv.hpp"
#include "hadamux/forward.hpp"
#include "hadamux/recon.hpp"
#include "hadamux/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

namespace hadamux {
namespace {

constexpr std::uint64_t kStreamIntensity = 0;
constexpr std::uint64_t kStreamDetector = 1;
constexpr std::uint64_t kStreamCamera = 2;
constexpr std::uint64_t kStreamSlit = 3;

Spectrum make_spectrum(const ExperimentConfig& c) {
  if (c.spectrum_file) {
    Spectrum f = load_spectrum(*c.spectrum_file);
    return f;
  }
  return synth_spectrum(c.synth, c.effective_length(), c.spectrum_params, c.spectrum_seed);
}

bool contains_k(const std::vector<double>& list, double k) {
  return std::any_of(list.begin(), list.end(), [k](double v) { return std::abs(v - k) < 1e-9; });
}

void append_rows(std::vector<SnrSample>& out, Method method, double k, int trial, const RowSpectra& rows,
                 const Vector& truth) {
  for (std::size_t r = 0; r < rows.rows.size(); ++r) {
    out.push_back({method, k, trial, rows.source_rows[r], snr_db(truth, rows.rows[r])});
  }
  out.push_back({method, k, trial, kConsensusRow, snr_db(truth, consensus_spectrum(rows))});
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t k_index, int trials, int trial) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(k_index) * static_cast<std::uint64_t>(trials) +
                                      static_cast<std::uint64_t>(trial));
}

Experiment::Experiment(ExperimentConfig config)
    : config_((validate(config), std::move(config))),
      s_(build_s_matrix(config_.order)),
      spectrum_(make_spectrum(config_)),
      scene_(shift_embed(spectrum_, config_.order)) {
  sigma_ = config_.sigma ? *config_.sigma : calibrate_sigma(spectrum_, config_.slit_target_db);
}

TrialOutcome Experiment::run_trial(double k, std::uint64_t seed, int trial_index, bool keep_spectra,
                                   bool eval_bound_report) const {
  const auto& c = config_;
  const Vector& truth = spectrum_.values;
  const int n = c.order;
  TrialOutcome out;
  out.samples.reserve(c.methods.size() * static_cast<std::size_t>(n + 1));
  if (keep_spectra) out.spectra = ExampleSpectra{k, truth, {}, -1};

  const NoiseSpec detector{sigma_, derive_seed(seed, kStreamDetector)};

  if (c.has_method(Method::slit)) {
    const std::uint64_t slit_seed = derive_seed(seed, kStreamSlit);
    RowSpectra rows;
    for (int r = 0; r < n; ++r) {
      const Measurement m = measure_slit(spectrum_, {sigma_, derive_seed(slit_seed, static_cast<std::uint64_t>(r))});
      rows.rows.emplace_back(m.data.row(0).transpose());
      rows.source_rows.push_back(r);
    }
    append_rows(out.samples, Method::slit, k, trial_index, rows, truth);
    if (keep_spectra) out.spectra->spectra[Method::slit] = consensus_spectrum(rows);
  }

  if (c.has_method(Method::hts)) {
    const Measurement g = measure_hts(s_, scene_, detector);
    const RowSpectra rows = shift_extract(decode_inverse(s_, g.data));
    append_rows(out.samples, Method::hts, k, trial_index, rows, truth);
    if (keep_spectra) out.spectra->spectra[Method::hts] = consensus_spectrum(rows);
  }

  const bool need_sub = c.has_method(Method::snapshot) || c.has_method(Method::mms) || eval_bound_report;
  if (!need_sub) return out;

  const SubSMatrix sub = make_sub_s(s_, sample_intensity(n, k, derive_seed(seed, kStreamIntensity)));
  const SnapshotFrame frame =
      measure_snapshot(sub, scene_, detector, {c.nondispersive_sigma, derive_seed(seed, kStreamCamera)});

  if (c.has_method(Method::snapshot)) {
    const SubSMatrix calibrated = calibrate_sub_s(frame.non_dispersive, s_);
    const RowSpectra rows = shift_extract(decode_inverse(calibrated.s_snap, frame.dispersive.data, c.inverse));
    append_rows(out.samples, Method::snapshot, k, trial_index, rows, truth);
    if (keep_spectra) out.spectra->spectra[Method::snapshot] = consensus_spectrum(rows);
  }

  if (c.has_method(Method::mms)) {
    // Same physical single-shot frame; the decoder is only given the code.
    const Matrix coding = c.mms_coding == MmsCoding::ideal ? s_.as_real() : sub.s_snap;
    const EmbeddedEstimate est = decode_nnls(coding, frame.dispersive.data, c.nnls);
    const RowSpectra rows = shift_extract(est);
    const std::size_t first = out.samples.size();
    append_rows(out.samples, Method::mms, k, trial_index, rows, truth);
    if (keep_spectra) {
      // Median-SNR row as the representative spectrum.
      std::vector<std::pair<double, int>> order;
      for (std::size_t i = first; i < out.samples.size(); ++i) {
        if (!out.samples[i].consensus()) order.emplace_back(out.samples[i].snr_db, out.samples[i].row);
      }
      std::sort(order.begin(), order.end());
      const int row = order[(order.size() - 1) / 2].second;
      out.spectra->spectra[Method::mms] = rows.rows[static_cast<std::size_t>(row)];
      out.spectra->mms_row = row;
    }
  }

  if (eval_bound_report) {
    const Matrix noise = frame.dispersive.data - sub.s_snap * scene_.embedded;
    if (noise.squaredNorm() > 0.0) out.bound = eval_bound(sub, noise);
  }
  return out;
}

void dump_measurements(const Experiment& experiment, double k, std::uint64_t seed, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const auto& c = experiment.config();
  const SMatrix& s = experiment.s_matrix();
  const double sigma = experiment.sigma();
  const NoiseSpec detector{sigma, derive_seed(seed, kStreamDetector)};

  Matrix slit(c.order, experiment.spectrum().length());
  const std::uint64_t slit_seed = derive_seed(seed, kStreamSlit);
  for (int r = 0; r < c.order; ++r) {
    slit.row(r) = measure_slit(experiment.spectrum(), {sigma, derive_seed(slit_seed, static_cast<std::uint64_t>(r))}).data;
  }
  const SubSMatrix sub = make_sub_s(s, sample_intensity(c.order, k, derive_seed(seed, kStreamIntensity)));
  const SnapshotFrame frame =
      measure_snapshot(sub, experiment.scene(), detector, {c.nondispersive_sigma, derive_seed(seed, kStreamCamera)});

  csv::write_file(dir / "coding.csv", csv::format_int_matrix(s.entries()));
  csv::write_file(dir / "s_snap.csv", csv::format_matrix(sub.s_snap));
  csv::write_file(dir / "scene.csv", csv::format_matrix(experiment.scene().embedded));
  csv::write_file(dir / "slit.csv", csv::format_matrix(slit));
  csv::write_file(dir / "hts.csv", csv::format_matrix(measure_hts(s, experiment.scene(), detector).data));
  csv::write_file(dir / "snapshot_dispersive.csv", csv::format_matrix(frame.dispersive.data));
  csv::write_file(dir / "non_dispersive.csv", csv::format_matrix(frame.non_dispersive));
}

std::vector<SnrSample> run_trial(const ExperimentConfig& config, double k, std::uint64_t seed) {
  return Experiment(config).run_trial(k, seed).samples;
}

const MethodSummary* SweepResult::find(Method m, double k) const {
  for (const auto& s : summaries) {
    if (s.method == m && std::abs(s.k - k) < 1e-9) return &s;
  }
  return nullptr;
}

std::vector<MethodSummary> summarize_samples(const std::vector<SnrSample>& samples,
                                             const std::vector<Method>& methods, const std::vector<double>& k_grid) {
  std::map<std::pair<Method, double>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& s : samples) {
    auto& g = groups[{s.method, s.k}];
    (s.consensus() ? g.second : g.first).push_back(s.snr_db);
  }
  std::vector<Method> ordered = methods;
  std::sort(ordered.begin(), ordered.end());
  std::vector<MethodSummary> out;
  for (Method m : ordered) {
    for (double k : k_grid) {
      MethodSummary ms{m, k, std::nullopt, std::nullopt, 0, 0};
      const auto it = groups.find({m, k});
      if (it != groups.end()) {
        const auto& [rows, cons] = it->second;
        ms.row_samples = rows.size();
        ms.infinite = static_cast<std::size_t>(
            std::count_if(rows.begin(), rows.end(), [](double v) { return std::isinf(v); }));
        try {
          ms.rows = summarize(rows);
        } catch (const InvalidArgument&) {
        }
        try {
          ms.consensus = summarize(cons);
        } catch (const InvalidArgument&) {
        }
      }
      out.push_back(std::move(ms));
    }
  }
  return out;
}

SweepResult run_sweep(const ExperimentConfig& config, const ProgressCallback& progress) {
  const auto started = std::chrono::steady_clock::now();
  const Experiment experiment(config);
  const auto& c = experiment.config();

  const std::size_t tasks = c.k_grid.size() * static_cast<std::size_t>(c.trials);
  std::vector<TrialOutcome> outcomes(tasks);
  std::vector<std::optional<std::string>> errors(tasks);

  int threads = c.threads > 0 ? c.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(tasks, 1)));

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t task = next.fetch_add(1);
      if (task >= tasks) return;
      const std::size_t k_index = task / static_cast<std::size_t>(c.trials);
      const int trial = static_cast<int>(task % static_cast<std::size_t>(c.trials));
      const double k = c.k_grid[k_index];
      try {
        outcomes[task] = experiment.run_trial(k, trial_seed(c.seed, k_index, c.trials, trial), trial,
                                              trial == 0 && contains_k(c.figure_k, k), contains_k(c.bound_k, k));
      } catch (const std::exception& e) {
        errors[task] = e.what();
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(finished, tasks);
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  SweepResult result;
  result.config = c;
  result.sigma = experiment.sigma();
  result.threads = threads;
  std::size_t total = 0;
  for (const auto& o : outcomes) total += o.samples.size();
  result.samples.reserve(total);

  std::map<double, BoundAggregate> bounds;
  for (std::size_t task = 0; task < tasks; ++task) {
    const std::size_t k_index = task / static_cast<std::size_t>(c.trials);
    const int trial = static_cast<int>(task % static_cast<std::size_t>(c.trials));
    const double k = c.k_grid[k_index];
    if (errors[task]) {
      result.failures.push_back({k, trial, *errors[task]});
      continue;
    }
    auto& o = outcomes[task];
    result.samples.insert(result.samples.end(), o.samples.begin(), o.samples.end());
    if (o.spectra) result.examples.push_back(std::move(*o.spectra));
    if (o.bound) {
      auto& b = bounds[k];
      b.k = k;
      ++b.trials;
      b.mean_realized_k += o.bound->k;
      b.mean_empirical_snr_db += o.bound->empirical_snr_db;
      b.mean_hts_snr_db += o.bound->hts_snr_db;
      b.mean_bound_db += o.bound->bound_db;
      b.mean_degradation_db += o.bound->degradation_db;
      b.max_identity_residual = std::max(b.max_identity_residual, o.bound->identity_residual);
    }
    o = TrialOutcome{};
  }
  for (auto& [k, b] : bounds) {
    const double t = b.trials;
    b.mean_realized_k /= t;
    b.mean_empirical_snr_db /= t;
    b.mean_hts_snr_db /= t;
    b.mean_bound_db /= t;
    b.mean_degradation_db /= t;
    b.predicted_degradation_db = predicted_degradation_db(k);
    result.bounds.push_back(b);
  }

  std::stable_sort(result.samples.begin(), result.samples.end(), sample_order);
  result.summaries = summarize_samples(result.samples, c.methods, c.k_grid);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace hadamux
