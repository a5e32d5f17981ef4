#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace trpca {

using Index = Eigen::Index;

/// Extents of a third-order tensor. All three are at least 1.
struct TensorDims {
  Index n1 = 1;
  Index n2 = 1;
  Index n3 = 1;

  TensorDims() = default;
  TensorDims(Index rows, Index cols, Index depth);

  Index n_max() const { return n1 > n2 ? n1 : n2; }
  Index n_min() const { return n1 < n2 ? n1 : n2; }
  Index slice_size() const { return n1 * n2; }
  Index numel() const { return n1 * n2 * n3; }

  friend bool operator==(const TensorDims&, const TensorDims&) = default;
};

/// Dense real n1 x n2 x n3 array.
///
/// Storage is frontal-slice contiguous: entry (i, j, k) lives at
/// i + n1 * (j + n2 * k), so each frontal slice is a column-major n1 x n2
/// matrix and every tube (i, j, :) has stride n1 * n2. Indices are 0-based.
class Tensor3 {
 public:
  using SliceMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstSliceMap = Eigen::Map<const Eigen::MatrixXd>;

  Tensor3() : Tensor3(TensorDims{}) {}
  explicit Tensor3(TensorDims dims);

  static Tensor3 zeros(TensorDims dims) { return Tensor3(dims); }
  /// Takes ownership of `values` laid out in storage order. Rejects a length
  /// mismatch (ShapeError) and non-finite entries (std::invalid_argument).
  static Tensor3 from_data(TensorDims dims, std::vector<double> values);
  /// Builds a tensor whose k-th frontal slice is slices[k].
  static Tensor3 from_slices(const std::vector<Eigen::MatrixXd>& slices);
  static Tensor3 from_matrix(const Eigen::MatrixXd& m);

  const TensorDims& dims() const { return dims_; }
  Index n1() const { return dims_.n1; }
  Index n2() const { return dims_.n2; }
  Index n3() const { return dims_.n3; }
  Index size() const { return static_cast<Index>(data_.size()); }

  double operator()(Index i, Index j, Index k) const { return data_[offset(i, j, k)]; }
  double& operator()(Index i, Index j, Index k) { return data_[offset(i, j, k)]; }
  /// Bounds-checked access; throws IndexError.
  double at(Index i, Index j, Index k) const;

  /// Mutable view of frontal slice k; throws IndexError.
  SliceMap slice(Index k);
  ConstSliceMap slice(Index k) const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  /// Whole tensor as a flat column vector (storage order).
  Eigen::Map<Eigen::VectorXd> flat() { return {data_.data(), size()}; }
  Eigen::Map<const Eigen::VectorXd> flat() const { return {data_.data(), size()}; }

  bool all_finite() const;

  Tensor3& operator+=(const Tensor3& other);
  Tensor3& operator-=(const Tensor3& other);
  Tensor3& operator*=(double s);

  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
  friend Tensor3 operator*(Tensor3 a, double s) { return a *= s; }
  friend Tensor3 operator*(double s, Tensor3 a) { return a *= s; }

 private:
  Index offset(Index i, Index j, Index k) const { return i + dims_.n1 * (j + dims_.n2 * k); }

  TensorDims dims_;
  std::vector<double> data_;
};

/// Copy of frontal slice k (0-based).
Eigen::MatrixXd frontal_slice(const Tensor3& a, Index k);

/// Sum of a_ijk * b_ijk. Throws ShapeError on mismatched dims.
double inner_product(const Tensor3& a, const Tensor3& b);

double norm_l1(const Tensor3& a);
double norm_inf(const Tensor3& a);
double norm_fro(const Tensor3& a);

/// Column basis: n x 1 x n3 with a single 1 at (i, 0, 0).
Tensor3 basis_column(Index i, Index n, Index n3);
/// Tube basis: 1 x 1 x n3 with a single 1 at (0, 0, k).
Tensor3 basis_tube(Index k, Index n3);
/// e_ijk = column(i) * tube(k) * column(j)^T under the t-product, which is
/// the unit tensor with a single 1 at (i, j, k).
Tensor3 basis_unit(Index i, Index j, Index k, TensorDims dims);

void require_same_dims(const Tensor3& a, const Tensor3& b, const char* what);

}  // namespace trpca
