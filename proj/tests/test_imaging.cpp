#include "trpca/errors.hpp"
#include "trpca/imaging.hpp"
#include "trpca/netpbm.hpp"
#include "trpca/synth.hpp"
#include "trpca/t_algebra.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

using namespace trpca;
namespace fs = std::filesystem;

namespace {

NetpbmImage parse(const std::string& bytes) {
  std::istringstream in(bytes);
  return read_netpbm(in);
}

std::string serialize(const NetpbmImage& img) {
  std::ostringstream out;
  write_netpbm(out, img);
  return out.str();
}

ImageStack gray_stack(Index h, Index w, Index frames, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  ImageStack s;
  s.height = h;
  s.width = w;
  for (Index k = 0; k < frames; ++k) {
    std::vector<std::uint8_t> f(static_cast<std::size_t>(h * w));
    for (auto& v : f) v = static_cast<std::uint8_t>(eng() % 256);
    s.frames.push_back(std::move(f));
  }
  return s;
}

// Frame k is the circular convolution sum_j a_{k-j} b_j^T of nonnegative bump profiles:
// tubal rank 1 as a tensor, yet every frame has high matrix rank.
ImageStack rank_one_stack(Index h, Index w, Index frames) {
  const auto bump = [](Index len, double centre, double width) {
    Eigen::VectorXd v(len);
    for (Index i = 0; i < len; ++i) v[i] = std::exp(-std::pow((static_cast<double>(i) - centre) / width, 2));
    return v;
  };
  std::vector<Eigen::VectorXd> a, b;
  for (Index j = 0; j < frames; ++j) {
    const double fa = std::fmod(0.618 * static_cast<double>(j), 1.0);
    const double fb = std::fmod(0.382 * static_cast<double>(j) + 0.2, 1.0);
    a.push_back(bump(h, static_cast<double>(h) * (0.15 + 0.7 * fa), 0.12 * static_cast<double>(h)));
    b.push_back(bump(w, static_cast<double>(w) * (0.15 + 0.7 * fb), 0.12 * static_cast<double>(w)));
  }
  std::vector<Eigen::MatrixXd> conv(static_cast<std::size_t>(frames));
  double peak = 0.0;
  for (Index k = 0; k < frames; ++k) {
    Eigen::MatrixXd& f = conv[static_cast<std::size_t>(k)];
    f = Eigen::MatrixXd::Zero(h, w);
    for (Index j = 0; j < frames; ++j) f += a[static_cast<std::size_t>((k - j + frames) % frames)] * b[static_cast<std::size_t>(j)].transpose();
    peak = std::max(peak, f.maxCoeff());
  }
  ImageStack s;
  s.height = h;
  s.width = w;
  for (const Eigen::MatrixXd& f : conv) {
    std::vector<std::uint8_t> px(static_cast<std::size_t>(h * w));
    for (Index r = 0; r < h; ++r) {
      for (Index c = 0; c < w; ++c) {
        px[static_cast<std::size_t>(r * w + c)] = static_cast<std::uint8_t>(std::lround(242.0 * f(r, c) / peak));
      }
    }
    s.frames.push_back(std::move(px));
  }
  return s;
}

}  // namespace

// --- Netpbm --------------------------------------------------------------

TEST(Netpbm, ParsesHeadersWithComments) {
  const std::string bytes = std::string("P5\n# comment line\n3 # width\n2\n255\n") + std::string("\x01\x02\x03\x04\x05\xff", 6);
  const NetpbmImage img = parse(bytes);
  EXPECT_EQ(img.width, 3);
  EXPECT_EQ(img.height, 2);
  EXPECT_EQ(img.channels, 1);
  EXPECT_EQ(img.at(1, 2), 255);
  EXPECT_EQ(img.at(0, 1), 2);
}

TEST(Netpbm, MaxvalByteMayLookLikeWhitespace) {
  // The single whitespace after maxval ends the header; the next byte (a newline value) is pixel data.
  const std::string bytes = std::string("P5 1 2 255\n") + std::string("\n\t", 2);
  const NetpbmImage img = parse(bytes);
  EXPECT_EQ(img.pixels, (std::vector<std::uint8_t>{'\n', '\t'}));
}

TEST(Netpbm, ColorRoundTrip) {
  NetpbmImage img{4, 3, 3, {}};
  for (int n = 0; n < 36; ++n) img.pixels.push_back(static_cast<std::uint8_t>(n * 7));
  const std::string bytes = serialize(img);
  EXPECT_EQ(bytes.substr(0, 11), "P6\n4 3\n255\n");
  const NetpbmImage back = parse(bytes);
  EXPECT_EQ(back.pixels, img.pixels);
  EXPECT_EQ(back.at(2, 3, 2), img.pixels[(2 * 4 + 3) * 3 + 2]);
}

TEST(Netpbm, RejectsMalformed) {
  for (const std::string& bad : {std::string("P3\n1 1\n255\n\x01\x02\x03"), std::string("P5\n1 1\n65535\n\x00\x01", 14),
                                 std::string("P5\n2 2\n255\n\x01\x02", 13), std::string("P5\n0 2\n255\n"),
                                 std::string("P5\n-1 2\n255\n\x01"), std::string("P5\n2"), std::string(""),
                                 std::string("P5\n1 1\n255x\x01")}) {
    EXPECT_THROW(parse(bad), ParseError) << bad;
  }
}

// --- stacks and tensors --------------------------------------------------

TEST(ImageStack, TensorRoundTrip) {
  const ImageStack s = gray_stack(5, 7, 4, 1);
  const Tensor3 t = stack_to_tensor(s);
  EXPECT_EQ(t.dims(), TensorDims(5, 7, 4));
  EXPECT_DOUBLE_EQ(t(2, 3, 1), s.frames[1][2 * 7 + 3] / 255.0);
  EXPECT_EQ(tensor_to_stack(t, StackKind::Grayscale).frames, s.frames);

  const ImageStack single = gray_stack(4, 4, 1, 2);
  EXPECT_EQ(stack_to_tensor(single).n3(), 1);
}

TEST(ImageStack, TensorToStackClampsAndRounds) {
  Tensor3 t(TensorDims(1, 3, 1));
  t(0, 0, 0) = -0.2;
  t(0, 1, 0) = 1.7;
  t(0, 2, 0) = 0.5;
  const ImageStack s = tensor_to_stack(t, StackKind::Grayscale);
  EXPECT_EQ(s.frames[0], (std::vector<std::uint8_t>{0, 255, 128}));
}

TEST(ImageStack, ColorImageBecomesThreeSlices) {
  NetpbmImage img{2, 2, 3, {10, 20, 30, 11, 21, 31, 12, 22, 32, 13, 23, 33}};
  const ImageStack s = stack_from_image(img);
  EXPECT_EQ(s.kind, StackKind::Color);
  const Tensor3 t = stack_to_tensor(s);
  EXPECT_EQ(t.dims(), TensorDims(2, 2, 3));
  EXPECT_DOUBLE_EQ(t(1, 0, 2) * 255.0, 32.0);
  EXPECT_EQ(stack_to_images(s).front().pixels, img.pixels);
}

TEST(ImageStack, ValidationAndLoading) {
  ImageStack s = gray_stack(3, 3, 2, 3);
  s.frames[1].pop_back();
  EXPECT_THROW(s.validate(), ShapeError);
  EXPECT_THROW(stack_to_tensor(s), ShapeError);

  const fs::path dir = fs::temp_directory_path() / "trpca_imaging_test";
  fs::create_directories(dir);
  write_netpbm(dir / "a.pgm", NetpbmImage{3, 2, 1, std::vector<std::uint8_t>(6, 1)});
  write_netpbm(dir / "b.pgm", NetpbmImage{3, 2, 1, std::vector<std::uint8_t>(6, 2)});
  write_netpbm(dir / "c.pgm", NetpbmImage{2, 3, 1, std::vector<std::uint8_t>(6, 3)});
  const ImageStack ok = load_grayscale_stack({dir / "a.pgm", dir / "b.pgm"});
  EXPECT_EQ(ok.frame_count(), 2);
  EXPECT_EQ(ok.frames[1][0], 2);
  EXPECT_THROW(load_grayscale_stack({dir / "a.pgm", dir / "c.pgm"}), ShapeError);
  fs::remove_all(dir);
}

TEST(ImageStack, IdenticalFramesHaveTheFrameRankAsTubalRank) {
  // Identical frames put all energy in the zero-frequency slice, so the tubal
  // rank is the rank of the frame itself.
  const ImageStack one = gray_stack(6, 5, 1, 4);
  ImageStack same = one;
  for (int k = 1; k < 32; ++k) same.frames.push_back(one.frames[0]);
  const Tensor3 t = stack_to_tensor(same);
  const auto mr = multi_rank(t);
  EXPECT_EQ(mr[0], 5);
  for (std::size_t k = 1; k < mr.size(); ++k) EXPECT_EQ(mr[k], 0);

  EXPECT_EQ(tubal_rank(stack_to_tensor(rank_one_stack(24, 20, 32)), 1e-2), 1);
}

// --- corruption and PSNR -------------------------------------------------

TEST(Corruption, ZeroFractionIsIdentity) {
  const Tensor3 x = stack_to_tensor(gray_stack(8, 8, 3, 5));
  const Corruption c = corrupt_pixels(x, 0.0, 1);
  EXPECT_EQ(c.mask.count(), 0);
  EXPECT_EQ(norm_fro(c.corrupted - x), 0.0);
  EXPECT_THROW(corrupt_pixels(x, 1.5, 1), std::invalid_argument);
}

TEST(Corruption, ExactCountsAndUntouchedEntries) {
  const Tensor3 x = stack_to_tensor(gray_stack(20, 15, 4, 6));
  const Corruption c = corrupt_pixels(x, 0.1, 9);
  for (Index k = 0; k < 4; ++k) EXPECT_EQ(c.mask.count_slice(k), 30);
  for (Index k = 0; k < 4; ++k) {
    for (Index j = 0; j < 15; ++j) {
      for (Index i = 0; i < 20; ++i) {
        if (!c.mask(i, j, k)) {
          EXPECT_EQ(c.corrupted(i, j, k), x(i, j, k));
        } else {
          EXPECT_GE(c.corrupted(i, j, k), 0.0);
          EXPECT_LT(c.corrupted(i, j, k), 1.0);
        }
      }
    }
  }
  const Corruption again = corrupt_pixels(x, 0.1, 9);
  EXPECT_EQ(again.mask.bits, c.mask.bits);
  EXPECT_EQ(norm_fro(again.corrupted - c.corrupted), 0.0);
}

TEST(Corruption, UnionAcrossColorChannels) {
  // Independent 10% per channel touches 1 - 0.9^3 = 27.1% of pixel positions on average.
  const Tensor3 x(TensorDims(100, 100, 3));
  double touched = 0.0;
  const int reps = 10;
  for (int rep = 0; rep < reps; ++rep) {
    const NetpbmImage u = corrupt_pixels(x, 0.1, 100 + rep).mask.union_image();
    touched += static_cast<double>(std::count(u.pixels.begin(), u.pixels.end(), 255)) / 1e4;
  }
  EXPECT_NEAR(touched / reps, 0.271, 0.005);
}

TEST(Psnr, ClosedFormsAndSymmetry) {
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tensor3 ref(TensorDims(6, 5, 3)), est(ref.dims());
  for (Index n = 0; n < ref.size(); ++n) {
    ref.data()[n] = u(eng);
    est.data()[n] = u(eng);
  }
  Tensor3 shifted = ref;
  shifted.flat().array() += 0.1;
  EXPECT_NEAR(psnr(ref, shifted), 20.0, 1e-10);
  EXPECT_TRUE(std::isinf(psnr(ref, ref)));

  double mse = 0.0;
  for (Index n = 0; n < ref.size(); ++n) mse += std::pow(ref.data()[n] - est.data()[n], 2);
  mse /= static_cast<double>(ref.size());
  EXPECT_NEAR(psnr(ref, est), 10.0 * std::log10(1.0 / mse), 1e-10);
  EXPECT_DOUBLE_EQ(psnr(ref, est), psnr(est, ref));
  EXPECT_NEAR(psnr(255.0 * ref, 255.0 * est, 255.0), psnr(ref, est), 1e-10);
  EXPECT_THROW(psnr(ref, Tensor3(TensorDims(6, 5, 2))), ShapeError);
}

// --- denoising -----------------------------------------------------------

TEST(Denoise, CleanLowRankStackIsRecoveredExactly) {
  const ImageStack s = rank_one_stack(24, 20, 8);
  const DenoiseOutput out = denoise(s, 0.0, 1, SolverConfig{}, false);
  EXPECT_EQ(out.mask.count(), 0);
  EXPECT_GE(out.report.psnr_trpca, 45.0);
}

TEST(Denoise, SyntheticLowRankTensor) {
  const TensorDims d(40, 40, 8);
  Tensor3 l = gen_low_rank(d, 2, 12);
  const double lo = l.flat().minCoeff(), hi = l.flat().maxCoeff();
  l.flat() = (l.flat().array() - lo) / (hi - lo);
  const Corruption c = corrupt_pixels(l, 0.1, 4);
  const TrpcaResult r = solve(c.corrupted, SolverConfig{});
  const Tensor3 rec = clamp(r.L);
  EXPECT_LE(relative_error(rec, l), 1e-2);
  EXPECT_GE(psnr(l, rec), 40.0);
}

TEST(Denoise, RankOneStackBeatsFramewiseBaseline) {
  const ImageStack s = rank_one_stack(32, 28, 32);
  const DenoiseOutput out = denoise(s, 0.1, 7, SolverConfig{}, true);
  EXPECT_TRUE(out.report.converged);
  EXPECT_LE(relative_error(out.low_rank, out.clean), 1e-2);
  ASSERT_TRUE(out.report.psnr_baseline.has_value());
  EXPECT_GT(out.report.psnr_trpca, *out.report.psnr_baseline);
  RecordProperty("psnr_trpca", std::to_string(out.report.psnr_trpca));
  RecordProperty("psnr_baseline", std::to_string(*out.report.psnr_baseline));
}

TEST(Denoise, SingleChannelBaselineEqualsTrpca) {
  const ImageStack s = gray_stack(16, 12, 1, 8);
  const DenoiseOutput out = denoise(s, 0.1, 2, SolverConfig{}, true);
  ASSERT_TRUE(out.report.psnr_baseline.has_value());
  EXPECT_EQ(out.report.psnr_trpca, *out.report.psnr_baseline);
}

TEST(Denoise, Deterministic) {
  const ImageStack s = stack_from_image(make_test_image(24, 20, 5));
  const DenoiseOutput a = denoise(s, 0.1, 3, SolverConfig{}, false);
  const DenoiseOutput b = denoise(s, 0.1, 3, SolverConfig{}, false);
  EXPECT_EQ(a.report.psnr_trpca, b.report.psnr_trpca);
  EXPECT_EQ(norm_fro(a.low_rank - b.low_rank), 0.0);
}

TEST(MakeTestImage, DeterministicColorImage) {
  const NetpbmImage a = make_test_image(32, 40, 1);
  EXPECT_EQ(a.channels, 3);
  EXPECT_EQ(a.width, 40);
  EXPECT_EQ(a.height, 32);
  EXPECT_EQ(a.pixels, make_test_image(32, 40, 1).pixels);
  EXPECT_NE(a.pixels, make_test_image(32, 40, 2).pixels);
  EXPECT_THROW(make_test_image(4, 40, 1), std::invalid_argument);
}
