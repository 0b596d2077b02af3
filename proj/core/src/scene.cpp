#include "hadamux/scene.hpp"

#include "hadamux/csv.hpp"
#include "hadamux/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace hadamux {
namespace {

struct Dip {
  double center_nm;
  double width_nm;
  double depth;
};

// Prominent solar absorption features (Ca K/H, G band, H-beta, Mg b, Na D,
// H-alpha, telluric O2 B/A, H2O).
constexpr std::array<Dip, 11> kFraunhofer{{
    {393.4, 1.2, 0.55},
    {396.8, 1.2, 0.50},
    {430.8, 1.5, 0.25},
    {486.1, 1.0, 0.30},
    {517.3, 1.5, 0.20},
    {589.3, 1.0, 0.35},
    {656.3, 1.2, 0.35},
    {686.7, 2.0, 0.30},
    {759.4, 2.5, 0.55},
    {822.7, 6.0, 0.20},
    {940.0, 12.0, 0.45},
}};

double planck(double wavelength_nm, double temperature_k) {
  constexpr double h = 6.62607015e-34;
  constexpr double c = 2.99792458e8;
  constexpr double kb = 1.380649e-23;
  const double lambda = wavelength_nm * 1e-9;
  return 1.0 / (std::pow(lambda, 5) * std::expm1(h * c / (lambda * kb * temperature_k)));
}

Vector solar_like(int length, const SpectrumParams& p, std::uint64_t seed, Vector& axis) {
  if (!(p.max_nm > p.min_nm) || p.min_nm <= 0.0) throw InvalidArgument("solar_like: need 0 < min_nm < max_nm");
  if (!(p.temperature_k > 0.0)) throw InvalidArgument("solar_like: temperature must be positive");
  if (p.extra_dips < 0) throw InvalidArgument("solar_like: extra_dips must be >= 0");

  Rng rng(seed);
  std::vector<Dip> dips;
  const double span = p.max_nm - p.min_nm;
  // Scale line widths so narrow dips remain visible at coarse sampling.
  const double pitch = span / std::max(1, length - 1);
  for (const auto& d : kFraunhofer) {
    if (d.center_nm < p.min_nm || d.center_nm > p.max_nm) continue;
    const double jitter = rng.uniform(0.85, 1.15);
    dips.push_back({d.center_nm, std::max(d.width_nm, 0.8 * pitch), d.depth * jitter});
  }
  for (int i = 0; i < p.extra_dips; ++i) {
    dips.push_back({rng.uniform(p.min_nm, p.max_nm), rng.uniform(0.8, 2.5) * pitch, rng.uniform(0.05, 0.25)});
  }

  axis.resize(length);
  Vector values(length);
  for (int i = 0; i < length; ++i) {
    const double nm = p.min_nm + span * i / std::max(1, length - 1);
    axis(i) = nm;
    double transmission = 1.0;
    for (const auto& d : dips) {
      const double z = (nm - d.center_nm) / d.width_nm;
      transmission *= 1.0 - d.depth * std::exp(-0.5 * z * z);
    }
    values(i) = planck(nm, p.temperature_k) * transmission;
  }
  return values;
}

Vector gaussian_lines(int length, const SpectrumParams& p) {
  if (p.lines.empty()) throw InvalidArgument("gaussian_lines: at least one line is required");
  Vector values = Vector::Zero(length);
  for (const auto& line : p.lines) {
    if (!(line.center >= 0.0 && line.center < length)) {
      std::ostringstream os;
      os << "gaussian_lines: line center " << line.center << " outside [0, " << length << ")";
      throw InvalidArgument(os.str());
    }
    if (!(line.width > 0.0)) throw InvalidArgument("gaussian_lines: line width must be positive");
    if (line.amplitude < 0.0) throw InvalidArgument("gaussian_lines: line amplitude must be >= 0");
    for (int i = 0; i < length; ++i) {
      const double z = (i - line.center) / line.width;
      values(i) += line.amplitude * std::exp(-0.5 * z * z);
    }
  }
  return values;
}

}  // namespace

std::string_view to_string(SpectrumKind kind) {
  switch (kind) {
    case SpectrumKind::solar_like: return "solar_like";
    case SpectrumKind::gaussian_lines: return "gaussian_lines";
    case SpectrumKind::flat: return "flat";
  }
  return "?";
}

SpectrumKind parse_spectrum_kind(std::string_view text) {
  if (text == "solar_like" || text == "solar") return SpectrumKind::solar_like;
  if (text == "gaussian_lines" || text == "lines") return SpectrumKind::gaussian_lines;
  if (text == "flat") return SpectrumKind::flat;
  throw InvalidArgument("unknown spectrum kind '" + std::string(text) + "' (solar_like, gaussian_lines, flat)");
}

Spectrum normalize_peak(Vector values, std::optional<Vector> wavelength_nm) {
  if (values.size() < 2) throw InvalidArgument("spectrum needs at least 2 samples");
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values(i))) throw InvalidArgument("non-finite spectrum value at row " + std::to_string(i + 1));
    if (values(i) < 0.0) throw InvalidArgument("negative value at row " + std::to_string(i + 1));
  }
  const double peak = values.maxCoeff();
  if (!(peak > 0.0)) throw InvalidArgument("spectrum is identically zero; cannot peak-normalize");
  values /= peak;
  if (wavelength_nm) {
    if (wavelength_nm->size() != values.size()) throw InvalidArgument("wavelength axis length mismatch");
    for (Eigen::Index i = 1; i < wavelength_nm->size(); ++i) {
      if (!((*wavelength_nm)(i) > (*wavelength_nm)(i - 1))) {
        throw InvalidArgument("wavelengths not strictly increasing at row " + std::to_string(i + 1));
      }
    }
  }
  return Spectrum{std::move(values), std::move(wavelength_nm)};
}

Spectrum synth_spectrum(SpectrumKind kind, int length, const SpectrumParams& params, std::uint64_t seed) {
  if (length < 2) throw InvalidArgument("spectrum length must be >= 2, got " + std::to_string(length));
  switch (kind) {
    case SpectrumKind::flat:
      return normalize_peak(Vector::Ones(length));
    case SpectrumKind::gaussian_lines:
      return normalize_peak(gaussian_lines(length, params));
    case SpectrumKind::solar_like: {
      Vector axis;
      Vector values = solar_like(length, params, seed, axis);
      return normalize_peak(std::move(values), std::move(axis));
    }
  }
  throw InvalidArgument("unknown spectrum kind");
}

Spectrum parse_spectrum_csv(std::string_view text, std::string_view source) {
  std::vector<double> wavelengths;
  std::vector<double> values;
  std::size_t columns = 0;
  std::size_t line_no = 0;
  std::size_t start = 0;
  bool seen_data = false;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = csv::trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    std::vector<double> parsed;
    bool numeric = true;
    for (auto f : fields) {
      const auto v = csv::parse_double(f);
      if (!v) {
        numeric = false;
        break;
      }
      parsed.push_back(*v);
    }
    if (!numeric) {
      if (!seen_data) {
        seen_data = true;  // header line
        continue;
      }
      throw IoError(std::string(source) + ":" + std::to_string(line_no) + ": not a number");
    }
    seen_data = true;
    if (columns == 0) {
      columns = parsed.size();
      if (columns != 1 && columns != 2) {
        throw IoError(std::string(source) + ":" + std::to_string(line_no) +
                      ": spectrum CSV must have 1 (value) or 2 (wavelength_nm,value) columns");
      }
    } else if (parsed.size() != columns) {
      throw IoError(std::string(source) + ":" + std::to_string(line_no) + ": inconsistent column count");
    }
    if (columns == 2) wavelengths.push_back(parsed[0]);
    values.push_back(parsed.back());
  }
  if (values.size() < 2) throw InvalidArgument(std::string(source) + ": fewer than 2 rows");
  Vector v = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  std::optional<Vector> axis;
  if (columns == 2) axis = Eigen::Map<const Vector>(wavelengths.data(), static_cast<Eigen::Index>(wavelengths.size()));
  return normalize_peak(std::move(v), std::move(axis));
}

Spectrum load_spectrum(const std::filesystem::path& path) {
  return parse_spectrum_csv(csv::read_file(path), path.string());
}

IntensityField sample_intensity(int order, double k, std::uint64_t seed) {
  if (order < 1) throw InvalidArgument("intensity field order must be >= 1");
  if (!(k >= 0.0 && k < 1.0)) {
    std::ostringstream os;
    os << "disturbance k must lie in [0, 1), got " << k;
    throw InvalidArgument(os.str());
  }
  IntensityField field{Matrix::Ones(order, order), k};
  if (k == 0.0) return field;
  Rng rng(seed);
  // Row-major fill so the stream layout does not depend on Eigen storage order.
  for (int i = 0; i < order; ++i) {
    for (int j = 0; j < order; ++j) field.entries(i, j) = 1.0 - k * rng.uniform();
  }
  return field;
}

SubSMatrix make_sub_s(const SMatrix& base, const IntensityField& intensity) {
  return make_sub_s(base, intensity.entries);
}

SubSMatrix make_sub_s(const SMatrix& base, const Matrix& intensity) {
  const int n = base.order();
  if (intensity.rows() != n || intensity.cols() != n) {
    throw InvalidArgument("make_sub_s: intensity field is " + std::to_string(intensity.rows()) + "x" +
                          std::to_string(intensity.cols()) + ", coding matrix order is " + std::to_string(n));
  }
  const Matrix s = base.as_real();
  const Matrix product = s.cwiseProduct(intensity);
  const double peak = product.maxCoeff();
  if (!(peak > 0.0)) throw InvalidArgument("make_sub_s: coded intensity is all zero; cannot normalize");

  SubSMatrix sub{base, product / peak, Matrix(), Matrix(), 1.0, 0.0, peak};
  double alpha = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (base(i, j) == 1) alpha = std::min(alpha, sub.s_snap(i, j));
    }
  }
  if (!(alpha > 0.0)) {
    throw InvalidArgument("make_sub_s: an open code position has zero intensity; sub-S matrix is undefined");
  }
  sub.alpha = alpha;
  sub.k = 1.0 - alpha;
  sub.s1 = s - sub.s_snap;
  sub.s2 = sub.s_snap - alpha * s;
  return sub;
}

EmbeddedScene shift_embed(const Vector& f, int order) {
  if (order < 1) throw InvalidArgument("shift_embed: order must be >= 1");
  const int m = static_cast<int>(f.size());
  if (m < 2) throw InvalidArgument("shift_embed: spectrum length must be >= 2");
  EmbeddedScene scene{order, m, Matrix::Zero(order, order + m - 1)};
  for (int j = 0; j < order; ++j) scene.embedded.row(j).segment(j, m) = f.transpose();
  return scene;
}

EmbeddedScene shift_embed(const Spectrum& f, int order) {
  return shift_embed(f.values, order);
}

}  // namespace hadamux
