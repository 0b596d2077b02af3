#include "hadamux/config.hpp"

#include "hadamux/codes.hpp"
#include "hadamux/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace hadamux {
namespace {

double round12(double v) {
  return std::round(v * 1e12) / 1e12;
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += csv::format(values[i]);
  }
  return out;
}

double to_double(std::string_view key, std::string_view value) {
  const auto v = csv::parse_double(value);
  if (!v || !std::isfinite(*v)) throw InvalidArgument("config: " + std::string(key) + ": not a number: '" + std::string(value) + "'");
  return *v;
}

long long to_integer(std::string_view key, std::string_view value) {
  long long out = 0;
  value = csv::trim(value);
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
    throw InvalidArgument("config: " + std::string(key) + ": not an integer: '" + std::string(value) + "'");
  }
  return out;
}

std::uint64_t to_seed(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  value = csv::trim(value);
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
    throw InvalidArgument("config: " + std::string(key) + ": not an unsigned 64-bit seed: '" + std::string(value) + "'");
  }
  return out;
}

// "center:width:amplitude;center:width:amplitude"
std::vector<GaussianLine> parse_lines(std::string_view text) {
  std::vector<GaussianLine> lines;
  for (auto item : csv::split(text, ';')) {
    if (item.empty()) continue;
    const auto parts = csv::split(item, ':');
    if (parts.size() != 3) throw InvalidArgument("config: lines: expected center:width:amplitude, got '" + std::string(item) + "'");
    lines.push_back({to_double("lines", parts[0]), to_double("lines", parts[1]), to_double("lines", parts[2])});
  }
  return lines;
}

}  // namespace

std::vector<double> ExperimentConfig::default_k_grid() {
  return parse_k_grid("0.01:0.99:0.01");
}

bool ExperimentConfig::has_method(Method m) const {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

std::vector<double> parse_k_grid(std::string_view text) {
  text = csv::trim(text);
  std::vector<double> grid;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = csv::split(text, ':');
    if (parts.size() != 3) throw InvalidArgument("k_grid: expected start:stop:step");
    const double start = to_double("k_grid", parts[0]);
    const double stop = to_double("k_grid", parts[1]);
    const double step = to_double("k_grid", parts[2]);
    if (!(step > 0.0) || stop < start) throw InvalidArgument("k_grid: need step > 0 and stop >= start");
    const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long long i = 0; i < count; ++i) grid.push_back(round12(start + static_cast<double>(i) * step));
  } else {
    for (auto item : csv::split(text, ',')) {
      if (item.empty()) continue;
      grid.push_back(to_double("k_grid", item));
    }
  }
  if (grid.empty()) throw InvalidArgument("k_grid: empty grid");
  return grid;
}

void validate(const ExperimentConfig& c) {
  if (!is_supported_order(c.order)) {
    throw InvalidArgument("config: order " + std::to_string(c.order) + " is not a supported S-matrix order (prime, = 3 mod 4)");
  }
  if (c.spectrum_length != 0 && c.spectrum_length < 2) throw InvalidArgument("config: length must be >= 2");
  if (c.sigma && !(*c.sigma >= 0.0)) throw InvalidArgument("config: sigma must be >= 0");
  if (!(c.nondispersive_sigma >= 0.0)) throw InvalidArgument("config: nondispersive_sigma must be >= 0");
  if (c.k_grid.empty()) throw InvalidArgument("config: k_grid is empty");
  for (double k : c.k_grid) {
    if (!(k >= 0.0 && k < 1.0)) throw InvalidArgument("config: k_grid value " + csv::format(k) + " outside [0, 1)");
  }
  for (double k : c.bound_k) {
    if (!(k >= 0.0 && k < 1.0)) throw InvalidArgument("config: bound_k value " + csv::format(k) + " outside [0, 1)");
  }
  if (c.trials < 1) throw InvalidArgument("config: trials must be >= 1");
  if (c.threads < 0) throw InvalidArgument("config: threads must be >= 0");
  std::vector<Method> sorted = c.methods;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw InvalidArgument("config: duplicate method");
}

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
  ExperimentConfig c;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = csv::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidArgument(std::string(source) + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = csv::trim(line.substr(0, eq));
    const auto value = csv::trim(line.substr(eq + 1));
    try {
      if (key == "order") {
        c.order = static_cast<int>(to_integer(key, value));
      } else if (key == "spectrum_file") {
        if (value.empty()) {
          c.spectrum_file.reset();
        } else {
          c.spectrum_file = std::filesystem::path(std::string(value));
        }
      } else if (key == "synth") {
        c.synth = parse_spectrum_kind(value);
      } else if (key == "length") {
        c.spectrum_length = static_cast<int>(to_integer(key, value));
      } else if (key == "spectrum_seed") {
        c.spectrum_seed = to_seed(key, value);
      } else if (key == "lines") {
        c.spectrum_params.lines = parse_lines(value);
      } else if (key == "sigma") {
        if (value == "auto") {
          c.sigma.reset();
        } else {
          c.sigma = to_double(key, value);
        }
      } else if (key == "slit_target_db") {
        c.slit_target_db = to_double(key, value);
      } else if (key == "nondispersive_sigma") {
        c.nondispersive_sigma = to_double(key, value);
      } else if (key == "k_grid") {
        c.k_grid = parse_k_grid(value);
      } else if (key == "trials") {
        c.trials = static_cast<int>(to_integer(key, value));
      } else if (key == "seed") {
        c.seed = to_seed(key, value);
      } else if (key == "methods") {
        c.methods.clear();
        for (auto m : csv::split(value, ',')) {
          if (!m.empty()) c.methods.push_back(parse_method(m));
        }
      } else if (key == "mms_coding") {
        if (value == "ideal") {
          c.mms_coding = MmsCoding::ideal;
        } else if (value == "snap") {
          c.mms_coding = MmsCoding::snap;
        } else {
          throw InvalidArgument("mms_coding must be 'ideal' or 'snap'");
        }
      } else if (key == "bound_k") {
        c.bound_k = value.empty() ? std::vector<double>{} : parse_k_grid(value);
      } else if (key == "figure_k") {
        c.figure_k = value.empty() ? std::vector<double>{} : parse_k_grid(value);
      } else if (key == "threads") {
        c.threads = static_cast<int>(to_integer(key, value));
      } else if (key == "output_dir") {
        c.output_dir = std::filesystem::path(std::string(value));
      } else if (key == "nnls_tolerance") {
        c.nnls.tolerance = to_double(key, value);
      } else if (key == "nnls_max_iterations") {
        c.nnls.max_iterations = static_cast<int>(to_integer(key, value));
      } else if (key == "max_condition") {
        c.inverse.max_condition = to_double(key, value);
      } else {
        throw InvalidArgument("unknown key '" + std::string(key) + "'");
      }
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(csv::read_file(path), path.string());
}

std::string to_text(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "order = " << c.order << "\n";
  os << "spectrum_file = " << (c.spectrum_file ? c.spectrum_file->string() : std::string()) << "\n";
  os << "synth = " << to_string(c.synth) << "\n";
  os << "length = " << c.spectrum_length << "\n";
  os << "spectrum_seed = " << c.spectrum_seed << "\n";
  if (!c.spectrum_params.lines.empty()) {
    os << "lines = ";
    for (std::size_t i = 0; i < c.spectrum_params.lines.size(); ++i) {
      const auto& l = c.spectrum_params.lines[i];
      if (i) os << ';';
      os << csv::format(l.center) << ':' << csv::format(l.width) << ':' << csv::format(l.amplitude);
    }
    os << "\n";
  }
  os << "sigma = " << (c.sigma ? csv::format(*c.sigma) : std::string("auto")) << "\n";
  os << "slit_target_db = " << csv::format(c.slit_target_db) << "\n";
  os << "nondispersive_sigma = " << csv::format(c.nondispersive_sigma) << "\n";
  os << "k_grid = " << join_doubles(c.k_grid) << "\n";
  os << "trials = " << c.trials << "\n";
  os << "seed = " << c.seed << "\n";
  os << "methods = ";
  for (std::size_t i = 0; i < c.methods.size(); ++i) os << (i ? "," : "") << to_string(c.methods[i]);
  os << "\n";
  os << "mms_coding = " << (c.mms_coding == MmsCoding::ideal ? "ideal" : "snap") << "\n";
  os << "bound_k = " << join_doubles(c.bound_k) << "\n";
  os << "figure_k = " << join_doubles(c.figure_k) << "\n";
  os << "threads = " << c.threads << "\n";
  os << "output_dir = " << c.output_dir.string() << "\n";
  os << "nnls_tolerance = " << csv::format(c.nnls.tolerance) << "\n";
  os << "nnls_max_iterations = " << c.nnls.max_iterations << "\n";
  os << "max_condition = " << csv::format(c.inverse.max_condition) << "\n";
  return os.str();
}

double calibrate_sigma(const Spectrum& f, double target_db) {
  const double mean_power = f.values.squaredNorm() / static_cast<double>(f.length());
  return std::sqrt(mean_power / std::pow(10.0, target_db / 10.0));
}

}  // namespace hadamux
