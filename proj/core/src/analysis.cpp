#include "hadamux/analysis.hpp"

#include "hadamux/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

namespace hadamux {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::slit: return "slit";
    case Method::hts: return "hts";
    case Method::snapshot: return "snapshot";
    case Method::mms: return "mms";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  for (Method m : kAllMethods) {
    if (text == to_string(m)) return m;
  }
  throw InvalidArgument("unknown method '" + std::string(text) + "' (slit, hts, snapshot, mms)");
}

bool sample_order(const SnrSample& a, const SnrSample& b) {
  if (a.method != b.method) return a.method < b.method;
  if (a.k != b.k) return a.k < b.k;
  if (a.trial != b.trial) return a.trial < b.trial;
  // consensus (-1) sorts after all rows
  const auto key = [](int row) { return row == kConsensusRow ? std::numeric_limits<int>::max() : row; };
  return key(a.row) < key(b.row);
}

double snr_db(const Vector& truth, const Vector& estimate) {
  if (truth.size() != estimate.size()) throw InvalidArgument("snr_db: length mismatch");
  const double signal = truth.squaredNorm();
  if (!(signal > 0.0)) throw InvalidArgument("snr_db: truth is all zero");
  const double error = (truth - estimate).squaredNorm();
  const double ratio = signal / error;  // +inf when error == 0
  const double db = 10.0 * std::log10(ratio);
  if (db > kExactSnrDb) return std::numeric_limits<double>::infinity();
  return db;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidArgument("quantile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Summary summarize(std::span<const double> values) {
  std::vector<double> finite;
  finite.reserve(values.size());
  std::size_t infinite = 0;
  for (double v : values) {
    if (std::isinf(v) && v > 0) {
      ++infinite;
    } else if (std::isfinite(v)) {
      finite.push_back(v);
    } else {
      throw InvalidArgument("summarize: non-finite SNR value");
    }
  }
  if (finite.size() < 2) {
    throw InvalidArgument("summarize: need at least 2 finite samples, got " + std::to_string(finite.size()));
  }
  std::sort(finite.begin(), finite.end());

  Summary s;
  s.n = finite.size();
  s.infinite = infinite;
  const double count = static_cast<double>(s.n);
  double sum = 0.0;
  for (double v : finite) sum += v;
  s.mean_db = sum / count;
  double ss = 0.0;
  for (double v : finite) ss += (v - s.mean_db) * (v - s.mean_db);
  s.std_db = std::sqrt(ss / (count - 1.0));
  const double half_ci = 1.96 * s.std_db / std::sqrt(count);
  const double half_pop = 1.96 * s.std_db;
  s.ci95_mean = {s.mean_db - half_ci, s.mean_db + half_ci};
  s.population95 = {s.mean_db - half_pop, s.mean_db + half_pop};
  s.q025 = quantile_sorted(finite, 0.025);
  s.q50 = quantile_sorted(finite, 0.5);
  s.q975 = quantile_sorted(finite, 0.975);
  return s;
}

Summary summarize(std::span<const SnrSample> samples) {
  std::vector<double> values;
  values.reserve(samples.size());
  for (const auto& s : samples) values.push_back(s.snr_db);
  return summarize(values);
}

std::string to_json(const Summary& s, int indent) {
  nlohmann::ordered_json j;
  j["mean_db"] = s.mean_db;
  j["std_db"] = s.std_db;
  j["ci95_mean"] = {s.ci95_mean.lo, s.ci95_mean.hi};
  j["population95"] = {s.population95.lo, s.population95.hi};
  j["quantiles"] = {{"q2.5", s.q025}, {"q50", s.q50}, {"q97.5", s.q975}};
  j["n"] = s.n;
  j["infinite_excluded"] = s.infinite;
  return j.dump(indent);
}

double predicted_degradation_db(double k) {
  if (!(k >= 0.0 && k < 1.0)) throw InvalidArgument("predicted_degradation_db: k must lie in [0, 1)");
  return 10.0 * std::log10(1.0 / (1.0 - k));
}

double theoretical_multiplex_gain(int order) {
  if (order < 1) throw InvalidArgument("theoretical_multiplex_gain: order must be >= 1");
  const double n = order;
  return 10.0 * std::log10((n + 1.0) * (n + 1.0) / (4.0 * n));
}

BoundReport eval_bound(const SubSMatrix& sub, const Matrix& noise_samples) {
  const int n = sub.order();
  if (!(sub.k < 1.0)) throw InvalidArgument("eval_bound: k must be < 1");
  if (noise_samples.rows() != n || noise_samples.cols() < 1) {
    throw InvalidArgument("eval_bound: noise samples must be n x N with N >= 1");
  }
  const double k = sub.k;
  const Matrix s = sub.base.as_real();
  const Matrix sts = s.transpose() * s;
  const Matrix coded_gram = sub.s_snap.transpose() * sub.s_snap;  // (S - S1)^T (S - S1)

  BoundReport r;
  r.k = k;
  r.alpha = sub.alpha;
  r.samples = static_cast<int>(noise_samples.cols());
  if (k > 0.0) {
    const Matrix s2ts2 = sub.s2.transpose() * sub.s2;
    const Matrix cross = sub.s1.transpose() * sub.s2;
    r.p_matrix = cross + cross.transpose() + ((2.0 - k) / (1.0 - k)) * s2ts2;
    const Matrix rhs = (1.0 - k) * (1.0 - k) * sts + ((1.0 - k) / k) * r.p_matrix;
    r.identity_residual = (coded_gram - rhs).cwiseAbs().maxCoeff();
  } else {
    r.p_matrix = Matrix::Zero(n, n);
    r.identity_residual = (coded_gram - sts).cwiseAbs().maxCoeff();
  }

  const double noise_power = noise_samples.squaredNorm();
  const Matrix transformed = sub.s_snap.partialPivLu().solve(noise_samples);  // n'_snap
  const double transformed_power = transformed.squaredNorm();
  const Matrix hts_noise = s_inverse(sub.base) * noise_samples;

  r.empirical_snr_db = 10.0 * std::log10(noise_power / transformed_power);
  r.hts_snr_db = 10.0 * std::log10(noise_power / hts_noise.squaredNorm());
  const double quadratic = (s * transformed).squaredNorm() / transformed_power;
  r.bound_db = 10.0 * std::log10(quadratic) + 10.0 * std::log10(1.0 - k);
  r.degradation_db = r.hts_snr_db - r.empirical_snr_db;
  return r;
}

void write_samples_csv(std::ostream& out, std::span<const SnrSample> samples) {
  out << "method,k,trial,row,snr_db\n";
  for (const auto& s : samples) {
    out << to_string(s.method) << ',' << csv::format(s.k) << ',' << s.trial << ',';
    if (s.consensus()) {
      out << "consensus";
    } else {
      out << s.row;
    }
    out << ',' << csv::format(s.snr_db) << '\n';
  }
}

std::vector<SnrSample> read_samples_csv(std::istream& in, std::string_view source) {
  std::vector<SnrSample> out;
  std::string line;
  std::size_t line_no = 0;
  const auto fail = [&](const std::string& what) {
    throw IoError(std::string(source) + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = csv::trim(line);
    if (trimmed.empty()) continue;
    if (line_no == 1) {
      if (trimmed != "method,k,trial,row,snr_db") fail("unexpected samples header");
      continue;
    }
    const auto fields = csv::split(trimmed);
    if (fields.size() != 5) fail("expected 5 fields");
    SnrSample s;
    try {
      s.method = parse_method(fields[0]);
    } catch (const InvalidArgument& e) {
      fail(e.what());
    }
    const auto k = csv::parse_double(fields[1]);
    const auto trial = csv::parse_double(fields[2]);
    const auto snr = csv::parse_double(fields[4]);
    if (!k || !trial || !snr) fail("malformed number");
    s.k = *k;
    s.trial = static_cast<int>(*trial);
    if (fields[3] == "consensus") {
      s.row = kConsensusRow;
    } else {
      const auto row = csv::parse_double(fields[3]);
      if (!row) fail("malformed row index");
      s.row = static_cast<int>(*row);
    }
    s.snr_db = *snr;
    out.push_back(s);
  }
  return out;
}

}  // namespace hadamux
