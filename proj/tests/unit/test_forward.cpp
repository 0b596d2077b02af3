#include <doctest.h>

#include "hadamux/analysis.hpp"
#include "hadamux/forward.hpp"
#include "hadamux/rng.hpp"
#include "oracles.hpp"

#include <cmath>
#include <vector>

using namespace hadamux;

namespace {

std::vector<double> flatten(const Matrix& m) { return {m.data(), m.data() + m.size()}; }

}  // namespace

TEST_CASE("zero sigma leaves the signal untouched") {
  const Matrix x = Matrix::Random(4, 6);
  CHECK(add_noise(x, {0.0, 3}) == x);
}

TEST_CASE("noise variance and determinism") {
  const Matrix zeros = Matrix::Zero(1, 100000);
  const Matrix a = add_noise(zeros, {1.0, 42});
  CHECK(oracle::sample_variance(flatten(a)) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(a.mean()) < 0.01);
  CHECK(add_noise(zeros, {1.0, 42}) == a);
  CHECK(add_noise(zeros, {1.0, 43}) != a);
  const Matrix scaled = add_noise(zeros, {0.25, 42});
  CHECK((scaled - 0.25 * a).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("rng streams are reproducible and derive_seed separates them") {
  Rng a(5);
  Rng b(5);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("slit measurement") {
  const Spectrum f = synth_spectrum(SpectrumKind::solar_like, 31, {}, 1);
  const Measurement clean = measure_slit(f, {0.0, 1});
  CHECK(clean.architecture == Architecture::slit);
  CHECK(clean.data.rows() == 1);
  CHECK(clean.data.cols() == 31);
  CHECK(Vector(clean.data.row(0).transpose()) == f.values);
}

TEST_CASE("slit SNR of a flat spectrum at sigma 0.1 is 20 dB") {
  const Spectrum f = synth_spectrum(SpectrumKind::flat, 64, {}, 1);
  double noise = 0.0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    const Measurement m = measure_slit(f, {0.1, derive_seed(9, static_cast<std::uint64_t>(t))});
    noise += (m.data.row(0).transpose() - f.values).squaredNorm();
  }
  const double snr = 10.0 * std::log10(f.values.squaredNorm() * trials / noise);
  CHECK(snr == doctest::Approx(20.0).epsilon(0.15 / 20.0));
}

TEST_CASE("HTS noiseless product by hand for n = 3") {
  const double a = 2.0;
  const double b = 5.0;
  Vector f(2);
  f << a, b;
  IntMatrix e(3, 3);
  e << 1, 0, 1, 0, 1, 1, 1, 1, 0;
  const SMatrix s = SMatrix::from_entries(e);
  const Measurement m = measure_hts(s, shift_embed(f, 3), {0.0, 0});
  // rows of S times [[a,b,0,0],[0,a,b,0],[0,0,a,b]]
  Matrix expected(3, 4);
  expected << a, b, a, b, 0, a, a + b, b, a, a + b, b, 0;
  CHECK(m.data == expected);
  CHECK(m.architecture == Architecture::hts);
}

TEST_CASE("HTS of a dark scene is pure noise with one fresh stream per exposure") {
  const SMatrix s = build_s_matrix(7);
  EmbeddedScene dark = shift_embed(Vector::Ones(5), 7);
  dark.embedded.setZero();
  const NoiseSpec noise{0.3, 77};
  const Measurement m = measure_hts(s, dark, noise);
  for (int i = 0; i < 7; ++i) {
    const Matrix row_noise = add_noise(Matrix::Zero(1, 11), {0.3, derive_seed(77, static_cast<std::uint64_t>(i))});
    CHECK(Matrix(m.data.row(i)) == row_noise);
  }
  CHECK(m.data.row(0) != m.data.row(1));
}

TEST_CASE("HTS is linear in the scene") {
  const SMatrix s = build_s_matrix(11);
  const Spectrum f1 = synth_spectrum(SpectrumKind::solar_like, 9, {}, 1);
  const Spectrum f2 = synth_spectrum(SpectrumKind::solar_like, 9, {}, 2);
  const double a = 0.7;
  const double b = -1.3;
  const Measurement combined = measure_hts(s, shift_embed(Vector(a * f1.values + b * f2.values), 11), {});
  const Matrix separate =
      a * measure_hts(s, shift_embed(f1, 11), {}).data + b * measure_hts(s, shift_embed(f2, 11), {}).data;
  CHECK((combined.data - separate).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("HTS dimension mismatch") {
  CHECK_THROWS_AS(measure_hts(build_s_matrix(7), shift_embed(Vector::Ones(4), 3), {}), std::invalid_argument);
}

TEST_CASE("snapshot at k = 0 matches noiseless HTS") {
  const SMatrix s = build_s_matrix(7);
  const EmbeddedScene scene = shift_embed(synth_spectrum(SpectrumKind::solar_like, 7, {}, 3), 7);
  const SubSMatrix sub = make_sub_s(s, sample_intensity(7, 0.0, 1));
  const SnapshotFrame frame = measure_snapshot(sub, scene, {}, {});
  CHECK(frame.dispersive.data == measure_hts(s, scene, {}).data);
  CHECK(frame.non_dispersive == s.as_real());
  CHECK(frame.dispersive.architecture == Architecture::snapshot_dispersive);
}

TEST_CASE("snapshot noiseless dispersive path and unnormalized intensity image") {
  const SMatrix s = build_s_matrix(31);
  const EmbeddedScene scene = shift_embed(synth_spectrum(SpectrumKind::solar_like, 20, {}, 3), 31);
  const IntensityField field = sample_intensity(31, 0.5, 8);
  const SubSMatrix sub = make_sub_s(s, field);
  const SnapshotFrame frame = measure_snapshot(sub, scene, {}, {});
  CHECK(frame.dispersive.data == sub.s_snap * scene.embedded);
  const Matrix coded = s.as_real().cwiseProduct(field.entries);
  CHECK((frame.non_dispersive - coded).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(frame.truth.s_snap == sub.s_snap);
}

TEST_CASE("snapshot uses one noise realization for the whole frame") {
  const int n = 31;
  const SMatrix s = build_s_matrix(n);
  const EmbeddedScene scene = shift_embed(synth_spectrum(SpectrumKind::solar_like, 10, {}, 3), n);
  const SubSMatrix sub = make_sub_s(s, sample_intensity(n, 0.3, 8));
  const NoiseSpec noise{0.2, 1234};
  const SnapshotFrame frame = measure_snapshot(sub, scene, noise, {0.05, 99});
  const Matrix single = add_noise(Matrix::Zero(n, n + 9), noise);
  CHECK((frame.dispersive.data - sub.s_snap * scene.embedded - single).cwiseAbs().maxCoeff() < 1e-12);
  // HTS with the same base seed draws a different stream for every row.
  const Matrix hts_noise = measure_hts(s, scene, noise).data - s.as_real() * scene.embedded;
  CHECK((hts_noise.row(1) - single.row(1)).cwiseAbs().maxCoeff() > 0.0);
  CHECK(frame.non_dispersive != sub.s_snap * sub.intensity_peak);
}

TEST_CASE("column model equivalence of the snapshot measurement") {
  const int n = 19;
  const SMatrix s = build_s_matrix(n);
  const EmbeddedScene scene = shift_embed(synth_spectrum(SpectrumKind::solar_like, 12, {}, 5), n);
  const SubSMatrix sub = make_sub_s(s, sample_intensity(n, 0.6, 2));
  const NoiseSpec noise{0.1, 5};
  const Matrix g = measure_snapshot(sub, scene, noise, {}).dispersive.data;
  const Matrix e = add_noise(Matrix::Zero(n, scene.embedded.cols()), noise);
  for (Eigen::Index c = 0; c < g.cols(); ++c) {
    const Vector col = sub.s_snap * scene.embedded.col(c) + e.col(c);
    CHECK((g.col(c) - col).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("MMS measurement equals the snapshot dispersive field") {
  const int n = 31;
  const SMatrix s = build_s_matrix(n);
  const EmbeddedScene scene = shift_embed(synth_spectrum(SpectrumKind::solar_like, 31, {}, 3), n);
  const SubSMatrix sub = make_sub_s(s, sample_intensity(n, 0.5, 4));
  const NoiseSpec noise{0.3, 17};
  const Measurement mms = measure_mms(sub, scene, noise);
  CHECK(mms.data == measure_snapshot(sub, scene, noise, {0.1, 2}).dispersive.data);
  CHECK(mms.data.rows() == n);
  CHECK(mms.data.cols() == 2 * n - 1);
  CHECK_THROWS_AS(measure_mms(sub, shift_embed(Vector::Ones(3), 7), noise), std::invalid_argument);
}
