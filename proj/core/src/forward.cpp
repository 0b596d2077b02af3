#include "hadamux/forward.hpp"

#include "hadamux/rng.hpp"

#include <string>

namespace hadamux {
namespace {

void check_sigma(const NoiseSpec& noise) {
  if (!(noise.sigma >= 0.0)) throw InvalidArgument("noise sigma must be >= 0");
}

void check_order(int coding_order, const EmbeddedScene& scene) {
  if (coding_order != scene.order || scene.embedded.rows() != scene.order) {
    throw InvalidArgument("dimension mismatch: coding order " + std::to_string(coding_order) +
                          " vs scene order " + std::to_string(scene.order));
  }
}

}  // namespace

std::string_view to_string(Architecture a) {
  switch (a) {
    case Architecture::slit: return "slit";
    case Architecture::hts: return "hts";
    case Architecture::snapshot_dispersive: return "snapshot_dispersive";
  }
  return "?";
}

Matrix add_noise(const Matrix& signal, const NoiseSpec& noise) {
  check_sigma(noise);
  Matrix out = signal;
  if (noise.sigma == 0.0) return out;
  Rng rng(noise.seed);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) += noise.sigma * rng.gaussian();
  }
  return out;
}

Measurement measure_slit(const Spectrum& f, const NoiseSpec& noise) {
  return {Architecture::slit, add_noise(f.values.transpose(), noise)};
}

Measurement measure_hts(const SMatrix& s, const EmbeddedScene& scene, const NoiseSpec& noise) {
  check_order(s.order(), scene);
  check_sigma(noise);
  Matrix data = s.as_real() * scene.embedded;
  if (noise.sigma > 0.0) {
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      const NoiseSpec exposure{noise.sigma, derive_seed(noise.seed, static_cast<std::uint64_t>(i))};
      data.row(i) = add_noise(data.row(i), exposure);
    }
  }
  return {Architecture::hts, std::move(data)};
}

SnapshotFrame measure_snapshot(const SubSMatrix& sub, const EmbeddedScene& scene, const NoiseSpec& dispersive_noise,
                               const NoiseSpec& nondispersive_noise) {
  check_order(sub.order(), scene);
  Measurement dispersive{Architecture::snapshot_dispersive, add_noise(sub.s_snap * scene.embedded, dispersive_noise)};
  Matrix image = add_noise(sub.intensity_peak * sub.s_snap, nondispersive_noise);
  return {std::move(dispersive), std::move(image), sub};
}

Measurement measure_mms(const SubSMatrix& sub, const EmbeddedScene& scene, const NoiseSpec& noise) {
  check_order(sub.order(), scene);
  return {Architecture::snapshot_dispersive, add_noise(sub.s_snap * scene.embedded, noise)};
}

}  // namespace hadamux
