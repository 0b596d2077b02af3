#pragma once

#include "hadamux/codes.hpp"
#include "hadamux/common.hpp"
#include "hadamux/scene.hpp"

#include <cstdint>
#include <string_view>

namespace hadamux {

/// Additive white Gaussian detector noise.
struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

enum class Architecture { slit, hts, snapshot_dispersive };

std::string_view to_string(Architecture a);

/// Detector data. Shapes:
///   slit                 1 x m
///   hts                  n x (n+m-1), row i is exposure i
///   snapshot_dispersive  n x (n+m-1), one frame
struct Measurement {
  Architecture architecture = Architecture::slit;
  Matrix data;
};

/// signal + e, e i.i.d. N(0, sigma^2) drawn row-major from `noise.seed`.
/// sigma = 0 returns the signal unchanged.
Matrix add_noise(const Matrix& signal, const NoiseSpec& noise);

/// Direct single-shot measurement of every spectral channel.
Measurement measure_slit(const Spectrum& f, const NoiseSpec& noise);

/// n sequential coded exposures S F + E. Exposure i draws its noise from
/// derive_seed(noise.seed, i), so every exposure carries a fresh realization.
Measurement measure_hts(const SMatrix& s, const EmbeddedScene& scene, const NoiseSpec& noise);

/// One-shot dual-path frame.
struct SnapshotFrame {
  Measurement dispersive;  // s_snap F + E1, a single realization from dispersive_noise.seed
  Matrix non_dispersive;   // intensity_peak * s_snap + E2 (the un-normalized S o I image)
  SubSMatrix truth;        // realization that produced both paths; oracle use only
};

SnapshotFrame measure_snapshot(const SubSMatrix& sub, const EmbeddedScene& scene, const NoiseSpec& dispersive_noise,
                               const NoiseSpec& nondispersive_noise);

/// Same single-shot dispersive measurement without the intensity camera.
Measurement measure_mms(const SubSMatrix& sub, const EmbeddedScene& scene, const NoiseSpec& noise);

}  // namespace hadamux
