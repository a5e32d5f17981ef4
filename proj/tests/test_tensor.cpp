#include "oracles.hpp"
#include "trpca/errors.hpp"
#include "trpca/tensor.hpp"
#include "trpca/tensor_io.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

using namespace trpca;

TEST(TensorDims, RejectsNonPositiveExtents) {
  EXPECT_THROW(TensorDims(0, 2, 2), ShapeError);
  EXPECT_THROW(TensorDims(2, -1, 2), ShapeError);
  EXPECT_THROW(TensorDims(2, 2, 0), ShapeError);
  const TensorDims d(3, 5, 2);
  EXPECT_EQ(d.n_max(), 5);
  EXPECT_EQ(d.n_min(), 3);
  EXPECT_EQ(d.numel(), 30);
}

TEST(Tensor3, ZerosHaveZeroEntriesAndNorms) {
  for (const TensorDims d : {TensorDims(2, 2, 2), TensorDims(1, 1, 1), TensorDims(3, 2, 4)}) {
    const Tensor3 z = Tensor3::zeros(d);
    EXPECT_EQ(z.size(), d.numel());
    for (double v : z.data()) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(norm_fro(z), 0.0);
    EXPECT_EQ(norm_l1(z), 0.0);
    EXPECT_EQ(norm_inf(z), 0.0);
  }
}

TEST(Tensor3, StorageOrderIsFrontalSliceContiguous) {
  std::vector<double> v(24);
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = static_cast<double>(n);
  const Tensor3 t = Tensor3::from_data(TensorDims(2, 3, 4), v);
  for (Index k = 0; k < 4; ++k) {
    for (Index j = 0; j < 3; ++j) {
      for (Index i = 0; i < 2; ++i) EXPECT_EQ(t(i, j, k), static_cast<double>(i + 2 * (j + 3 * k)));
    }
  }
  EXPECT_EQ(t.slice(2)(1, 2), t(1, 2, 2));
}

TEST(Tensor3, FromDataValidates) {
  EXPECT_THROW(Tensor3::from_data(TensorDims(2, 2, 2), std::vector<double>(7)), ShapeError);
  std::vector<double> bad(8, 0.0);
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Tensor3::from_data(TensorDims(2, 2, 2), bad), std::invalid_argument);
}

TEST(Tensor3, CheckedAccessThrowsIndexError) {
  Tensor3 t(TensorDims(2, 3, 4));
  EXPECT_NO_THROW(t.at(1, 2, 3));
  EXPECT_THROW(t.at(2, 0, 0), IndexError);
  EXPECT_THROW(t.at(0, -1, 0), IndexError);
  EXPECT_THROW(t.slice(4), IndexError);
  EXPECT_THROW(frontal_slice(t, -1), IndexError);
}

TEST(Tensor3, FrontalSliceReadsBackEntries) {
  oracle::Gen gen(11);
  const Tensor3 a = gen.tensor(TensorDims(3, 4, 3));
  const Eigen::MatrixXd s = frontal_slice(a, 1);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 4; ++j) EXPECT_EQ(s(i, j), a(i, j, 1));
  }
}

TEST(Tensor3, FromSlicesRejectsMismatch) {
  EXPECT_THROW(Tensor3::from_slices({}), ShapeError);
  EXPECT_THROW(Tensor3::from_slices({Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 3)}), ShapeError);
  const Tensor3 t = Tensor3::from_slices({Eigen::MatrixXd::Ones(2, 3), 2.0 * Eigen::MatrixXd::Ones(2, 3)});
  EXPECT_EQ(t.dims(), TensorDims(2, 3, 2));
  EXPECT_EQ(t(1, 2, 1), 2.0);
}

TEST(Tensor3, ArithmeticRequiresMatchingDims) {
  Tensor3 a(TensorDims(2, 2, 2)), b(TensorDims(2, 2, 3));
  EXPECT_THROW(a += b, ShapeError);
  EXPECT_THROW(inner_product(a, b), ShapeError);
}

TEST(InnerProduct, HandSummed2x2x2) {
  Tensor3 a(TensorDims(2, 2, 2)), b(TensorDims(2, 2, 2));
  double expected = 0.0;
  for (Index n = 0; n < 8; ++n) {
    a.data()[n] = static_cast<double>(n + 1);
    b.data()[n] = (n % 2 ? -1.0 : 0.5) * static_cast<double>(n);
  }
  // 1*0 + 2*-1 + 3*1 + 4*-3 + 5*2 + 6*-5 + 7*3 + 8*-7
  expected = 0.0 - 2.0 + 3.0 - 12.0 + 10.0 - 30.0 + 21.0 - 56.0;
  EXPECT_DOUBLE_EQ(inner_product(a, b), expected);
  EXPECT_EQ(inner_product(a, Tensor3(a.dims())), 0.0);
}

TEST(Norms, AllOnes) {
  Tensor3 t(TensorDims(2, 2, 2));
  t.flat().setOnes();
  EXPECT_DOUBLE_EQ(norm_l1(t), 8.0);
  EXPECT_DOUBLE_EQ(norm_inf(t), 1.0);
  EXPECT_DOUBLE_EQ(norm_fro(t), std::sqrt(8.0));
}

TEST(Norms, RandomMatchFlattenedBruteForce) {
  oracle::Gen gen(3);
  const Tensor3 t = gen.tensor(TensorDims(3, 3, 3));
  double l1 = 0.0, inf = 0.0, sq = 0.0;
  for (Index k = 0; k < 3; ++k) {
    for (Index j = 0; j < 3; ++j) {
      for (Index i = 0; i < 3; ++i) {
        const double v = t(i, j, k);
        l1 += std::abs(v);
        inf = std::max(inf, std::abs(v));
        sq += v * v;
      }
    }
  }
  EXPECT_NEAR(norm_l1(t), l1, 1e-12 * l1);
  EXPECT_EQ(norm_inf(t), inf);
  EXPECT_NEAR(norm_fro(t), std::sqrt(sq), 1e-12 * std::sqrt(sq));
}

TEST(NormsProperty, InnerProductAndOrdering) {
  oracle::Gen gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    Tensor3 t = gen.tensor(gen.dims(5, 5, 5));
    if (trial % 7 == 0) t *= 1e-6;
    const double fro = norm_fro(t);
    EXPECT_NEAR(inner_product(t, t), fro * fro, 1e-12 * fro * fro);
    EXPECT_GE(norm_l1(t), fro * (1 - 1e-15));
    EXPECT_GE(fro, norm_inf(t) * (1 - 1e-15));
  }
}

TEST(Basis, UnitReadbackAndDecomposition) {
  oracle::Gen gen(17);
  for (int trial = 0; trial < 30; ++trial) {
    const TensorDims d = gen.dims(4, 4, 4);
    const Tensor3 a = gen.tensor(d);
    Tensor3 sum(d);
    for (Index k = 0; k < d.n3; ++k) {
      for (Index j = 0; j < d.n2; ++j) {
        for (Index i = 0; i < d.n1; ++i) {
          const Tensor3 e = basis_unit(i, j, k, d);
          EXPECT_EQ(inner_product(e, a), a(i, j, k));
          sum += inner_product(e, a) * e;
        }
      }
    }
    EXPECT_LE(norm_fro(sum - a), 1e-12 * norm_fro(a));
  }
}

TEST(Basis, ColumnAndTube) {
  const Tensor3 c = basis_column(0, 2, 2);
  EXPECT_EQ(c.dims(), TensorDims(2, 1, 2));
  EXPECT_EQ(c(0, 0, 0), 1.0);
  EXPECT_EQ(norm_l1(c), 1.0);
  const Tensor3 tube = basis_tube(2, 4);
  EXPECT_EQ(tube.dims(), TensorDims(1, 1, 4));
  EXPECT_EQ(tube(0, 0, 2), 1.0);
  EXPECT_EQ(norm_l1(tube), 1.0);
  EXPECT_THROW(basis_column(2, 2, 2), IndexError);
  EXPECT_THROW(basis_tube(4, 4), IndexError);
}

// --- TNS3 I/O -------------------------------------------------------------

namespace {

std::string bytes_of(const Tensor3& t) {
  std::ostringstream out;
  write_tensor(out, t);
  return out.str();
}

void put_u64(std::string& s, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) s.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

}  // namespace

TEST(TensorIo, ByteLayout) {
  const Tensor3 t = Tensor3::from_data(TensorDims(2, 1, 1), {1.0, -2.5});
  std::string expected = "TNS3";
  put_u64(expected, 2);
  put_u64(expected, 1);
  put_u64(expected, 1);
  put_u64(expected, std::bit_cast<std::uint64_t>(1.0));
  put_u64(expected, std::bit_cast<std::uint64_t>(-2.5));
  EXPECT_EQ(bytes_of(t), expected);
}

TEST(TensorIo, RoundTripIsExact) {
  oracle::Gen gen(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor3 t = gen.tensor(gen.dims(5, 5, 5));
    std::istringstream in(bytes_of(t));
    const Tensor3 back = read_tensor(in);
    ASSERT_EQ(back.dims(), t.dims());
    for (Index n = 0; n < t.size(); ++n) EXPECT_EQ(back.data()[n], t.data()[n]);
  }
}

TEST(TensorIo, RejectsMalformedInput) {
  const std::string good = bytes_of(Tensor3::from_data(TensorDims(1, 2, 1), {3.0, 4.0}));
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return read_tensor(in);
  };
  EXPECT_NO_THROW(parse(good));
  std::string bad_magic = good;
  bad_magic[3] = '4';
  EXPECT_THROW(parse(bad_magic), ParseError);
  EXPECT_THROW(parse(good.substr(0, good.size() - 1)), ParseError);
  EXPECT_THROW(parse(good.substr(0, 10)), ParseError);
  EXPECT_THROW(parse(good + "x"), ParseError);
  EXPECT_THROW(parse(""), ParseError);

  std::string zero = "TNS3";
  put_u64(zero, 0);
  put_u64(zero, 1);
  put_u64(zero, 1);
  EXPECT_THROW(parse(zero), ParseError);

  std::string nan = "TNS3";
  put_u64(nan, 1);
  put_u64(nan, 1);
  put_u64(nan, 1);
  put_u64(nan, std::bit_cast<std::uint64_t>(std::numeric_limits<double>::quiet_NaN()));
  EXPECT_THROW(parse(nan), ParseError);

  std::string huge = "TNS3";
  put_u64(huge, 1ull << 40);
  put_u64(huge, 1ull << 40);
  put_u64(huge, 1);
  EXPECT_THROW(parse(huge), ParseError);
}
