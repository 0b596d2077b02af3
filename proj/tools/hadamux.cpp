// hadamux: snapshot Hadamard-transform spectrometry simulator.
//
// Exit codes: 0 success, 1 validation / argument failure, 2 I/O error.

#include "hadamux/analysis.hpp"
#include "hadamux/codes.hpp"
#include "hadamux/config.hpp"
#include "hadamux/csv.hpp"
#include "hadamux/harness.hpp"
#include "hadamux/recon.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace hadamux;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

int cmd_gen_matrix(int order, const std::string& out) {
  const SMatrix s = build_s_matrix(order);
  const std::string text = csv::format_int_matrix(s.entries());
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    csv::write_file(out, text);
  }
  return kExitOk;
}

int cmd_validate(const std::string& path) {
  const Matrix m = csv::read_matrix(path);
  if (m.rows() != m.cols()) {
    std::cout << "FAIL square  matrix is " << m.rows() << "x" << m.cols() << "\n";
    return kExitValidation;
  }
  const ValidationReport report = validate_s_matrix(m);
  std::cout << report.to_text();
  return report.ok() ? kExitOk : kExitValidation;
}

struct SimulateArgs {
  double k = 0.0;
  std::optional<double> sigma;
  int order = 127;
  std::uint64_t seed = 1;
  std::string spectrum;
  std::string synth = "solar_like";
  int length = 0;
  std::uint64_t spectrum_seed = 1;
  int trials = 1;
  double nondispersive_sigma = 0.0;
  std::string methods = "slit,hts,snapshot,mms";
  std::string dump_dir;
  std::string out_dir;
};

int cmd_simulate(const SimulateArgs& a) {
  ExperimentConfig c;
  c.order = a.order;
  if (!a.spectrum.empty()) c.spectrum_file = a.spectrum;
  c.synth = parse_spectrum_kind(a.synth);
  c.spectrum_length = a.length;
  c.spectrum_seed = a.spectrum_seed;
  c.sigma = a.sigma;
  c.nondispersive_sigma = a.nondispersive_sigma;
  c.k_grid = {a.k};
  c.trials = a.trials;
  c.seed = a.seed;
  c.methods.clear();
  for (auto m : csv::split(a.methods)) c.methods.push_back(parse_method(m));
  c.bound_k = {a.k};
  c.figure_k = {a.k};
  c.threads = 0;
  validate(c);

  if (!a.dump_dir.empty()) {
    const Experiment experiment(c);
    dump_measurements(experiment, a.k, trial_seed(c.seed, 0, c.trials, 0), a.dump_dir);
  }

  const SweepResult r = run_sweep(c);
  std::cout << "k = " << csv::format(a.k) << "  order = " << c.order << "  sigma = " << csv::format(r.sigma)
            << "  trials = " << c.trials << "\n";
  std::cout << std::left << std::setw(10) << "method" << std::right << std::setw(10) << "mean_db" << std::setw(10)
            << "std_db" << std::setw(10) << "q2.5" << std::setw(10) << "q97.5" << std::setw(14) << "consensus_db"
            << "\n";
  for (const auto& s : r.summaries) {
    std::cout << std::left << std::setw(10) << to_string(s.method) << std::right << std::fixed << std::setprecision(3);
    if (s.rows) {
      std::cout << std::setw(10) << s.rows->mean_db << std::setw(10) << s.rows->std_db << std::setw(10) << s.rows->q025
                << std::setw(10) << s.rows->q975;
    } else {
      std::cout << std::setw(40) << (s.infinite ? "exact (inf)" : "n/a");
    }
    if (s.consensus) {
      std::cout << std::setw(14) << s.consensus->mean_db;
    } else {
      // a single trial yields one consensus value
      double value = 0.0;
      bool found = false;
      for (const auto& smp : r.samples) {
        if (smp.method == s.method && smp.consensus()) {
          value = smp.snr_db;
          found = true;
          break;
        }
      }
      std::cout << std::setw(14) << (found ? csv::format(value) : std::string("n/a"));
    }
    std::cout << "\n";
    std::cout.unsetf(std::ios::fixed);
  }
  if (!r.bounds.empty()) {
    const auto& b = r.bounds.front();
    std::cout << "bound: empirical " << csv::format(b.mean_empirical_snr_db) << " dB, lower bound "
              << csv::format(b.mean_bound_db) << " dB, degradation " << csv::format(b.mean_degradation_db)
              << " dB (predicted " << csv::format(b.predicted_degradation_db) << ")\n";
  }
  for (const auto& f : r.failures) std::cerr << "trial " << f.trial << " failed: " << f.message << "\n";
  if (!a.out_dir.empty()) emit_report(r, a.out_dir);
  return r.failures.empty() ? kExitOk : kExitValidation;
}

int cmd_sweep(const std::string& config_path, const std::string& out_override, int threads, bool quiet) {
  ExperimentConfig c = load_config(config_path);
  if (!out_override.empty()) c.output_dir = out_override;
  if (threads >= 0) c.threads = threads;
  ProgressCallback progress;
  if (!quiet) {
    progress = [last = std::size_t{0}](std::size_t done, std::size_t total) mutable {
      const std::size_t pct = done * 100 / total;
      if (pct != last || done == total) {
        last = pct;
        std::cerr << "\rsweep: " << done << "/" << total << " trials (" << pct << "%)" << std::flush;
        if (done == total) std::cerr << "\n";
      }
    };
  }
  const SweepResult r = run_sweep(c, progress);
  emit_report(r, c.output_dir);
  if (!quiet) std::cout << report_text(r);
  if (!quiet) std::cerr << "wrote " << c.output_dir.string() << "\n";
  return r.failures.empty() ? kExitOk : kExitValidation;
}

int cmd_report(const std::string& in, const std::string& out) {
  const SweepResult r = load_result(in);
  emit_report(r, out);
  std::cout << report_text(r);
  return kExitOk;
}

int cmd_decode(const std::string& coding_path, const std::string& measurement_path, const std::string& method,
               const std::string& out, bool consensus, double max_condition) {
  const Matrix coding = csv::read_matrix(coding_path);
  const Matrix g = csv::read_matrix(measurement_path);
  EmbeddedEstimate est;
  if (method == "inverse") {
    est = decode_inverse(coding, g, InverseOptions{max_condition});
  } else if (method == "nnls") {
    est = decode_nnls(coding, g);
    if (est.diagnostics.capped_columns > 0) {
      std::cerr << "warning: " << est.diagnostics.capped_columns << " column(s) hit the NNLS iteration cap\n";
    }
  } else {
    throw InvalidArgument("--method must be 'inverse' or 'nnls'");
  }
  const RowSpectra rows = shift_extract(est);
  Matrix table;
  if (consensus) {
    table = consensus_spectrum(rows).transpose();
  } else {
    table.resize(rows.order(), rows.rows.front().size());
    for (int i = 0; i < rows.order(); ++i) table.row(i) = rows.rows[static_cast<std::size_t>(i)].transpose();
  }
  const std::string text = csv::format_matrix(table);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    csv::write_file(out, text);
  }
  std::cerr << "residual norm " << csv::format(est.diagnostics.residual_norm) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hadamux: snapshot Hadamard-transform spectrometry simulator"};
  app.require_subcommand(1);

  int order = 127;
  std::string out;
  auto* gen = app.add_subcommand("gen-matrix", "Write an S-matrix as 0/1 CSV");
  gen->add_option("--order", order, "Matrix order (prime, = 3 mod 4)")->required();
  gen->add_option("--out", out, "Output CSV file (default stdout)");

  std::string matrix_path;
  auto* val = app.add_subcommand("validate", "Check a CSV matrix against the S-matrix invariants");
  val->add_option("--matrix", matrix_path, "Matrix CSV")->required();

  SimulateArgs sim;
  auto* simc = app.add_subcommand("simulate", "Run trials at a single disturbance k and print SNR summaries");
  simc->add_option("--k", sim.k, "Intensity disturbance in [0, 1)")->required();
  simc->add_option("--sigma", sim.sigma, "Detector noise sigma (default: calibrated to a 6.45 dB slit baseline)");
  simc->add_option("--order", sim.order, "S-matrix order");
  simc->add_option("--seed", sim.seed, "Master seed");
  auto* spectrum_opt = simc->add_option("--spectrum", sim.spectrum, "Spectrum CSV (value or wavelength_nm,value)");
  simc->add_option("--synth", sim.synth, "Synthetic spectrum: solar_like, gaussian_lines, flat")->excludes(spectrum_opt);
  simc->add_option("--length", sim.length, "Synthetic spectrum length (default: order)");
  simc->add_option("--spectrum-seed", sim.spectrum_seed, "Synthetic spectrum seed");
  simc->add_option("--trials", sim.trials, "Number of trials");
  simc->add_option("--nondispersive-sigma", sim.nondispersive_sigma, "Noise sigma of the intensity camera");
  simc->add_option("--methods", sim.methods, "Comma-separated methods");
  simc->add_option("--dump-measurements", sim.dump_dir, "Write trial 0 measurement matrices as CSV into DIR");
  simc->add_option("--out", sim.out_dir, "Also write the full report into DIR");

  std::string config_path;
  std::string sweep_out;
  int threads = -1;
  bool quiet = false;
  auto* sweep = app.add_subcommand("sweep", "Run a Monte Carlo sweep described by a config file");
  sweep->add_option("--config", config_path, "key = value config file")->required();
  sweep->add_option("--out", sweep_out, "Override output_dir");
  sweep->add_option("--threads", threads, "Worker threads (0: all cores)");
  sweep->add_flag("--quiet", quiet, "No progress or report on stdout");

  std::string report_in;
  std::string report_out;
  auto* rep = app.add_subcommand("report", "Regenerate report files from a saved sweep directory");
  rep->add_option("--in", report_in, "Sweep output directory")->required();
  rep->add_option("--out", report_out, "Report output directory")->required();

  std::string coding_path;
  std::string measurement_path;
  std::string method = "inverse";
  std::string decode_out;
  bool consensus = false;
  double max_condition = 1e8;
  auto* dec = app.add_subcommand("decode", "Decode a CSV measurement with a CSV coding matrix");
  dec->add_option("--coding", coding_path, "n x n coding matrix CSV")->required();
  dec->add_option("--measurement", measurement_path, "n x (n+m-1) measurement CSV")->required();
  dec->add_option("--method", method, "inverse or nnls");
  dec->add_option("--out", decode_out, "Output CSV (default stdout), one spectrum per line");
  dec->add_flag("--consensus", consensus, "Emit only the row-averaged spectrum");
  dec->add_option("--max-condition", max_condition, "Reject coding matrices above this condition estimate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*gen) return cmd_gen_matrix(order, out);
    if (*val) return cmd_validate(matrix_path);
    if (*simc) return cmd_simulate(sim);
    if (*sweep) return cmd_sweep(config_path, sweep_out, threads, quiet);
    if (*rep) return cmd_report(report_in, report_out);
    if (*dec) return cmd_decode(coding_path, measurement_path, method, decode_out, consensus, max_condition);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
