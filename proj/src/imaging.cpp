#include "trpca/imaging.hpp"

#include "trpca/errors.hpp"
#include "trpca/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace trpca {

namespace {

NetpbmImage plane_image(Index height, Index width, const std::vector<std::uint8_t>& plane) {
  NetpbmImage img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  img.channels = 1;
  img.pixels = plane;
  return img;
}

}  // namespace

void ImageStack::validate() const {
  if (height < 1 || width < 1 || frames.empty()) throw ShapeError("image stack is empty");
  if (kind == StackKind::Color && frames.size() != 3) throw ShapeError("color stacks hold exactly 3 channels");
  for (const auto& f : frames) {
    if (static_cast<Index>(f.size()) != height * width) throw ShapeError("image frames differ in size");
  }
}

ImageStack stack_from_image(const NetpbmImage& img) {
  ImageStack s;
  s.height = img.height;
  s.width = img.width;
  s.kind = img.channels == 3 ? StackKind::Color : StackKind::Grayscale;
  const auto plane = static_cast<std::size_t>(img.width) * img.height;
  s.frames.assign(static_cast<std::size_t>(img.channels), std::vector<std::uint8_t>(plane));
  for (std::size_t p = 0; p < plane; ++p) {
    for (int c = 0; c < img.channels; ++c) s.frames[c][p] = img.pixels[p * img.channels + c];
  }
  s.validate();
  return s;
}

ImageStack load_grayscale_stack(const std::vector<std::filesystem::path>& paths) {
  if (paths.empty()) throw ShapeError("no frames to load");
  ImageStack s;
  s.kind = StackKind::Grayscale;
  for (const auto& path : paths) {
    const NetpbmImage img = read_netpbm(path);
    if (img.channels != 1) throw ParseError(path.string() + ": stack frames must be PGM");
    if (s.frames.empty()) {
      s.height = img.height;
      s.width = img.width;
    } else if (img.height != s.height || img.width != s.width) {
      throw ShapeError(path.string() + ": frame size differs from the first frame");
    }
    s.frames.push_back(img.pixels);
  }
  s.validate();
  return s;
}

std::vector<NetpbmImage> stack_to_images(const ImageStack& stack) {
  stack.validate();
  std::vector<NetpbmImage> out;
  if (stack.kind == StackKind::Color) {
    NetpbmImage img;
    img.width = static_cast<int>(stack.width);
    img.height = static_cast<int>(stack.height);
    img.channels = 3;
    const auto plane = static_cast<std::size_t>(stack.width * stack.height);
    img.pixels.resize(plane * 3);
    for (std::size_t p = 0; p < plane; ++p) {
      for (std::size_t c = 0; c < 3; ++c) img.pixels[p * 3 + c] = stack.frames[c][p];
    }
    out.push_back(std::move(img));
  } else {
    for (const auto& f : stack.frames) out.push_back(plane_image(stack.height, stack.width, f));
  }
  return out;
}

Tensor3 stack_to_tensor(const ImageStack& stack) {
  stack.validate();
  Tensor3 t(TensorDims(stack.height, stack.width, stack.frame_count()));
  for (Index k = 0; k < stack.frame_count(); ++k) {
    const auto& f = stack.frames[static_cast<std::size_t>(k)];
    for (Index i = 0; i < stack.height; ++i) {
      for (Index j = 0; j < stack.width; ++j) t(i, j, k) = f[static_cast<std::size_t>(i * stack.width + j)] / 255.0;
    }
  }
  return t;
}

ImageStack tensor_to_stack(const Tensor3& t, StackKind kind) {
  ImageStack s;
  s.height = t.n1();
  s.width = t.n2();
  s.kind = kind;
  s.frames.assign(static_cast<std::size_t>(t.n3()), std::vector<std::uint8_t>(static_cast<std::size_t>(t.n1() * t.n2())));
  for (Index k = 0; k < t.n3(); ++k) {
    for (Index i = 0; i < t.n1(); ++i) {
      for (Index j = 0; j < t.n2(); ++j) {
        const double v = std::clamp(t(i, j, k), 0.0, 1.0);
        s.frames[k][static_cast<std::size_t>(i * t.n2() + j)] = static_cast<std::uint8_t>(std::lround(v * 255.0));
      }
    }
  }
  s.validate();
  return s;
}

Index PixelMask::count() const { return static_cast<Index>(std::count(bits.begin(), bits.end(), 1)); }

Index PixelMask::count_slice(Index k) const {
  const auto plane = dims.slice_size();
  const auto first = bits.begin() + k * plane;
  return static_cast<Index>(std::count(first, first + plane, 1));
}

NetpbmImage PixelMask::union_image() const {
  std::vector<std::uint8_t> plane(static_cast<std::size_t>(dims.slice_size()), 0);
  for (Index k = 0; k < dims.n3; ++k) {
    for (Index i = 0; i < dims.n1; ++i) {
      for (Index j = 0; j < dims.n2; ++j) {
        if ((*this)(i, j, k)) plane[static_cast<std::size_t>(i * dims.n2 + j)] = 255;
      }
    }
  }
  return plane_image(dims.n1, dims.n2, plane);
}

NetpbmImage PixelMask::slice_image(Index k) const {
  std::vector<std::uint8_t> plane(static_cast<std::size_t>(dims.slice_size()), 0);
  for (Index i = 0; i < dims.n1; ++i) {
    for (Index j = 0; j < dims.n2; ++j) {
      if ((*this)(i, j, k)) plane[static_cast<std::size_t>(i * dims.n2 + j)] = 255;
    }
  }
  return plane_image(dims.n1, dims.n2, plane);
}

Corruption corrupt_pixels(const Tensor3& x, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("corruption fraction must lie in [0, 1]");
  Corruption c{x, PixelMask{x.dims(), std::vector<std::uint8_t>(static_cast<std::size_t>(x.size()), 0)}};
  const Index plane = x.dims().slice_size();
  const auto per_slice = static_cast<Index>(std::llround(fraction * static_cast<double>(plane)));
  Rng rng(seed);
  std::vector<Index> order(static_cast<std::size_t>(plane));
  auto data = c.corrupted.data();
  for (Index k = 0; k < x.n3(); ++k) {
    std::iota(order.begin(), order.end(), Index{0});
    for (Index n = 0; n < per_slice; ++n) {
      const auto pick = n + static_cast<Index>(rng.below(static_cast<std::uint64_t>(plane - n)));
      std::swap(order[n], order[pick]);
      const Index at = k * plane + order[n];
      data[at] = rng.uniform();
      c.mask.bits[static_cast<std::size_t>(at)] = 1;
    }
  }
  return c;
}

double psnr(const Tensor3& reference, const Tensor3& estimate, double peak) {
  require_same_dims(reference, estimate, "psnr");
  if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be positive");
  const double mse = (reference.flat() - estimate.flat()).squaredNorm() / static_cast<double>(reference.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

Tensor3 clamp(const Tensor3& t, double lo, double hi) {
  Tensor3 out(t.dims());
  out.flat() = t.flat().cwiseMax(lo).cwiseMin(hi);
  return out;
}

BaselineResult rpca_channelwise_baseline(const ImageStack& image, const Tensor3& corrupted,
                                         const SolverConfig& config) {
  const Tensor3 clean = stack_to_tensor(image);
  require_same_dims(clean, corrupted, "rpca_channelwise_baseline");
  SolverConfig per_slice = config;
  per_slice.lambda.reset();

  BaselineResult out{0.0, 0, true, Tensor3(corrupted.dims()), Tensor3(corrupted.dims())};
  for (Index k = 0; k < corrupted.n3(); ++k) {
    const TrpcaResult res = solve(Tensor3::from_matrix(corrupted.slice(k)), per_slice);
    out.low_rank.slice(k) = res.L.slice(0);
    out.sparse.slice(k) = res.E.slice(0);
    out.solver_iterations = std::max(out.solver_iterations, res.iterations);
    out.converged = out.converged && res.converged;
  }
  out.low_rank = clamp(out.low_rank);
  out.psnr = psnr(clean, out.low_rank);
  return out;
}

DenoiseOutput denoise(const ImageStack& image, double fraction, std::uint64_t seed, const SolverConfig& config,
                      bool with_baseline) {
  DenoiseOutput out;
  out.clean = stack_to_tensor(image);
  Corruption c = corrupt_pixels(out.clean, fraction, seed);
  out.corrupted = std::move(c.corrupted);
  out.mask = std::move(c.mask);

  const TrpcaResult res = solve(out.corrupted, config);
  out.low_rank = clamp(res.L);
  out.sparse = res.E;
  out.report.corruption_fraction = fraction;
  out.report.solver_iterations = res.iterations;
  out.report.converged = res.converged;
  out.report.psnr_trpca = psnr(out.clean, out.low_rank);

  if (with_baseline) {
    BaselineResult base = rpca_channelwise_baseline(image, out.corrupted, config);
    out.report.psnr_baseline = base.psnr;
    out.baseline_low_rank = std::move(base.low_rank);
  }
  return out;
}

NetpbmImage make_test_image(int height, int width, std::uint64_t seed) {
  if (height < 8 || width < 8) throw std::invalid_argument("make_test_image: image too small");
  Rng rng(seed);
  auto color = [&rng] {
    return std::array<double, 3>{rng.uniform(), rng.uniform(), rng.uniform()};
  };
  const auto h = static_cast<std::size_t>(height);
  const auto w = static_cast<std::size_t>(width);
  std::vector<std::array<double, 3>> px(h * w);

  // Background: blend of two colors along a random direction.
  const auto c0 = color();
  const auto c1 = color();
  const double angle = 2.0 * 3.14159265358979323846 * rng.uniform();
  const double dx = std::cos(angle), dy = std::sin(angle);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      const double t = 0.5 + 0.5 * (dx * (static_cast<double>(j) / w - 0.5) + dy * (static_cast<double>(i) / h - 0.5));
      for (int c = 0; c < 3; ++c) px[i * w + j][c] = (1.0 - t) * c0[c] + t * c1[c];
    }
  }

  const int rects = 3 + static_cast<int>(rng.below(4));
  for (int n = 0; n < rects; ++n) {
    const auto col = color();
    const std::size_t top = rng.below(h - 4), left = rng.below(w - 4);
    const std::size_t bottom = std::min(h, top + 4 + rng.below(h / 2));
    const std::size_t right = std::min(w, left + 4 + rng.below(w / 2));
    for (std::size_t i = top; i < bottom; ++i) {
      for (std::size_t j = left; j < right; ++j) px[i * w + j] = col;
    }
  }

  const int ellipses = 1 + static_cast<int>(rng.below(2));
  for (int n = 0; n < ellipses; ++n) {
    const auto col = color();
    const double ci = rng.uniform() * h, cj = rng.uniform() * w;
    const double ri = 3.0 + rng.uniform() * h / 4.0, rj = 3.0 + rng.uniform() * w / 4.0;
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < w; ++j) {
        const double u = (static_cast<double>(i) - ci) / ri, v = (static_cast<double>(j) - cj) / rj;
        if (u * u + v * v <= 1.0) px[i * w + j] = col;
      }
    }
  }

  // Faint luminance texture shared by all channels.
  const double fi = 0.05 + 0.3 * rng.uniform(), fj = 0.05 + 0.3 * rng.uniform();
  NetpbmImage img;
  img.width = width;
  img.height = height;
  img.channels = 3;
  img.pixels.resize(h * w * 3);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      const double tex = 0.04 * std::sin(fi * static_cast<double>(i)) * std::sin(fj * static_cast<double>(j));
      for (int c = 0; c < 3; ++c) {
        const double v = std::clamp(px[i * w + j][c] + tex, 0.0, 1.0);
        img.pixels[(i * w + j) * 3 + c] = static_cast<std::uint8_t>(std::lround(v * 255.0));
      }
    }
  }
  return img;
}

}  // namespace trpca
