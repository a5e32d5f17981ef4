#pragma once

#include "trpca/tensor.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

namespace trpca {

using Complex = std::complex<double>;

/// Relative threshold (against the largest spectral singular value) below
/// which a singular value counts as zero for rank purposes.
inline constexpr double kDefaultRankTol = 1e-8;

/// Complex n1 x n2 x n3 array holding frontal slices in the Fourier domain.
/// Same storage order as Tensor3.
class SpectralTensor3 {
 public:
  using SliceMap = Eigen::Map<Eigen::MatrixXcd>;
  using ConstSliceMap = Eigen::Map<const Eigen::MatrixXcd>;

  explicit SpectralTensor3(TensorDims dims)
      : dims_(dims), data_(static_cast<std::size_t>(dims.numel()), Complex(0.0, 0.0)) {}

  const TensorDims& dims() const { return dims_; }
  Index n1() const { return dims_.n1; }
  Index n2() const { return dims_.n2; }
  Index n3() const { return dims_.n3; }

  Complex operator()(Index i, Index j, Index k) const { return data_[offset(i, j, k)]; }
  Complex& operator()(Index i, Index j, Index k) { return data_[offset(i, j, k)]; }

  SliceMap slice(Index k) { return {data_.data() + k * dims_.slice_size(), dims_.n1, dims_.n2}; }
  ConstSliceMap slice(Index k) const { return {data_.data() + k * dims_.slice_size(), dims_.n1, dims_.n2}; }

  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

 private:
  Index offset(Index i, Index j, Index k) const { return i + dims_.n1 * (j + dims_.n2 * k); }

  TensorDims dims_;
  std::vector<Complex> data_;
};

/// t-SVD factors A = U * S * V^T. U is n1 x rank x n3, S is rank x rank x n3
/// (f-diagonal), V is n2 x rank x n3. rank = min(n1, n2) unless skinny.
struct TSvd {
  Tensor3 U;
  Tensor3 S;
  Tensor3 V;
  bool skinny = false;
  Index rank = 0;
};

// --- Fourier layer -------------------------------------------------------

/// Unnormalized forward DFT of every tube A(i, j, :).
SpectralTensor3 dft3(const Tensor3& a);

/// Inverse DFT (1/n3 normalization). The imaginary residue must stay below
/// `tol` times the largest output magnitude, otherwise SymmetryError.
Tensor3 idft3(const SpectralTensor3& a, double tol = 1e-8);

/// Number of Fourier slices that determine a real tensor: floor(n3/2) + 1.
inline Index unique_slice_count(Index n3) { return n3 / 2 + 1; }

/// Slices equal to their own conjugate mirror (k = 0 and, for even n3, n3/2)
/// are real whenever the spatial tensor is real.
inline bool is_self_conjugate_slice(Index k, Index n3) { return k == 0 || 2 * k == n3; }

/// Overwrites slices k > n3/2 with conj(slice n3 - k).
void fill_conjugate_slices(SpectralTensor3& a);

/// Thin SVD of one Fourier slice. Self-conjugate slices go through the real
/// SVD so their factors stay real. Throws NumericError tagged with `k`.
struct SliceSvd {
  Eigen::MatrixXcd U;
  Eigen::VectorXd sigma;
  Eigen::MatrixXcd V;
};
SliceSvd slice_svd(const SpectralTensor3& a, Index k, bool with_vectors);

/// Singular values of every Fourier slice (n3 entries, descending each).
std::vector<Eigen::VectorXd> spectral_singular_values(const Tensor3& a);

// --- Matricizations ------------------------------------------------------

/// Block circulant matrix (n1*n3 x n2*n3); block (r, c) is slice (r - c) mod n3.
Eigen::MatrixXd bcirc(const Tensor3& a);
/// Frontal slices stacked vertically (n1*n3 x n2).
Eigen::MatrixXd unfold(const Tensor3& a);
/// Inverse of unfold. Rows must be divisible by n3 (ShapeError).
Tensor3 fold(const Eigen::MatrixXd& m, Index n3);

// --- t-product algebra ---------------------------------------------------

/// t-product of n1 x n2 x n3 and n2 x l x n3 tensors, via slicewise products
/// in the Fourier domain.
Tensor3 tprod(const Tensor3& a, const Tensor3& b);
/// Literal fold(bcirc(a) * unfold(b)). Dense and slow; a reference path.
Tensor3 tprod_oracle(const Tensor3& a, const Tensor3& b);
/// Transposes every frontal slice and reverses the order of slices 2..n3.
Tensor3 ttranspose(const Tensor3& a);
/// n x n x n3 tensor whose first frontal slice is the identity.
Tensor3 identity_tensor(Index n, Index n3);
/// Q^T * Q and Q * Q^T both within `tol` (Frobenius) of the identity.
bool is_orthogonal(const Tensor3& q, double tol);

// --- t-SVD, ranks and norms ----------------------------------------------

TSvd tsvd(const Tensor3& a);
/// Factors truncated to the leading r singular tubes, 1 <= r <= min(n1, n2).
TSvd skinny_tsvd(const Tensor3& a, Index r);

/// Per-Fourier-slice rank; a singular value counts if it exceeds
/// tol * (largest singular value over all slices).
std::vector<Index> multi_rank(const Tensor3& a, double tol = kDefaultRankTol);
Index tubal_rank(const Tensor3& a, double tol = kDefaultRankTol);
double average_rank(const Tensor3& a, double tol = kDefaultRankTol);

/// Tensor nuclear norm: mean of the nuclear norms of the Fourier slices.
double tnn(const Tensor3& a);
/// Largest singular value over all Fourier slices.
double spectral_norm(const Tensor3& a);

}  // namespace trpca
