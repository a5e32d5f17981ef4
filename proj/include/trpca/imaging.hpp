#pragma once

#include "trpca/netpbm.hpp"
#include "trpca/solver.hpp"
#include "trpca/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace trpca {

enum class StackKind { Grayscale, Color };

/// Equally sized 8-bit planes: grayscale frames, or the R, G, B channels of
/// one color image. Each plane is row-major, height * width bytes.
struct ImageStack {
  Index height = 0;
  Index width = 0;
  StackKind kind = StackKind::Grayscale;
  std::vector<std::vector<std::uint8_t>> frames;

  Index frame_count() const { return static_cast<Index>(frames.size()); }
  /// Throws ShapeError if frames disagree with the extents (or are absent).
  void validate() const;
};

/// PGM -> one grayscale frame; PPM -> three color planes.
ImageStack stack_from_image(const NetpbmImage& img);
/// Loads every path as a single PGM frame (a face-recovery stack).
ImageStack load_grayscale_stack(const std::vector<std::filesystem::path>& paths);
/// Color stacks become one PPM; grayscale stacks one PGM per frame.
std::vector<NetpbmImage> stack_to_images(const ImageStack& stack);

/// height x width x frames, pixel / 255.
Tensor3 stack_to_tensor(const ImageStack& stack);
/// Clamps to [0, 1] and rounds to 8 bits.
ImageStack tensor_to_stack(const Tensor3& t, StackKind kind);

/// Boolean tensor-shaped mask of corrupted entries.
struct PixelMask {
  TensorDims dims;
  std::vector<std::uint8_t> bits;

  bool operator()(Index i, Index j, Index k) const {
    return bits[static_cast<std::size_t>(i + dims.n1 * (j + dims.n2 * k))] != 0;
  }
  Index count() const;
  Index count_slice(Index k) const;
  /// 255 where any frontal slice is corrupted at (i, j).
  NetpbmImage union_image() const;
  /// 255 where slice k is corrupted.
  NetpbmImage slice_image(Index k) const;
};

struct Corruption {
  Tensor3 corrupted;
  PixelMask mask;
};

/// In every frontal slice independently, replaces round(fraction * n1 * n2)
/// uniformly chosen positions by i.i.d. uniform values in [0, 1].
Corruption corrupt_pixels(const Tensor3& x, double fraction, std::uint64_t seed);

/// 10 log10(peak^2 / MSE). Identical inputs give +infinity.
double psnr(const Tensor3& reference, const Tensor3& estimate, double peak = 1.0);

/// Elementwise clamp to [lo, hi].
Tensor3 clamp(const Tensor3& t, double lo = 0.0, double hi = 1.0);

struct DenoiseReport {
  double psnr_trpca = 0.0;
  std::optional<double> psnr_baseline;
  double corruption_fraction = 0.0;
  int solver_iterations = 0;
  bool converged = false;
};

struct BaselineResult {
  double psnr = 0.0;
  int solver_iterations = 0;  ///< max over slices
  bool converged = false;     ///< every slice converged
  Tensor3 low_rank;           ///< clamped to [0, 1]
  Tensor3 sparse;
};

struct DenoiseOutput {
  DenoiseReport report;
  Tensor3 clean;
  Tensor3 corrupted;
  PixelMask mask;
  Tensor3 low_rank;  ///< clamped to [0, 1]
  Tensor3 sparse;
  std::optional<Tensor3> baseline_low_rank;
};

/// Matrix RPCA on every frontal slice separately (the same solver at
/// n3 = 1) with lambda = 1/sqrt(max(h, w)); config.lambda is ignored.
/// Scores the clamped reassembly against `image`.
BaselineResult rpca_channelwise_baseline(const ImageStack& image, const Tensor3& corrupted,
                                         const SolverConfig& config);

/// Corrupts `image`, recovers it with TRPCA (and optionally the channelwise
/// baseline), and scores the clamped low-rank part against the original.
DenoiseOutput denoise(const ImageStack& image, double fraction, std::uint64_t seed, const SolverConfig& config,
                      bool with_baseline);

/// Procedural color scene (gradient background, flat rectangles and
/// ellipses, faint shared texture) for exercising the denoiser.
NetpbmImage make_test_image(int height, int width, std::uint64_t seed);

}  // namespace trpca
