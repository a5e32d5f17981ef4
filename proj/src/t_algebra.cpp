#include "trpca/t_algebra.hpp"

#include "trpca/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <string>

namespace trpca {

namespace {

void check_tprod_dims(const Tensor3& a, const Tensor3& b) {
  if (a.n2() != b.n1() || a.n3() != b.n3()) {
    throw ShapeError("t-product needs n1 x n2 x n3 times n2 x l x n3, got inner extents " +
                     std::to_string(a.n2()) + " vs " + std::to_string(b.n1()) + " and depths " +
                     std::to_string(a.n3()) + " vs " + std::to_string(b.n3()));
  }
}

TSvd factorize(const Tensor3& a, Index r, bool skinny) {
  const Index n1 = a.n1(), n2 = a.n2(), n3 = a.n3();
  const SpectralTensor3 abar = dft3(a);
  SpectralTensor3 ubar(TensorDims(n1, r, n3));
  SpectralTensor3 sbar(TensorDims(r, r, n3));
  SpectralTensor3 vbar(TensorDims(n2, r, n3));
  for (Index k = 0; k < unique_slice_count(n3); ++k) {
    const SliceSvd svd = slice_svd(abar, k, true);
    ubar.slice(k) = svd.U.leftCols(r);
    vbar.slice(k) = svd.V.leftCols(r);
    sbar.slice(k).diagonal() = svd.sigma.head(r).cast<Complex>();
  }
  fill_conjugate_slices(ubar);
  fill_conjugate_slices(sbar);
  fill_conjugate_slices(vbar);
  return TSvd{idft3(ubar), idft3(sbar), idft3(vbar), skinny, r};
}

}  // namespace

SpectralTensor3 dft3(const Tensor3& a) {
  SpectralTensor3 out(a.dims());
  const Index n3 = a.n3();
  const Index plane = a.dims().slice_size();
  const auto src = a.data();
  auto dst = out.data();
  if (n3 == 1) {
    std::copy(src.begin(), src.end(), dst.begin());
    return out;
  }
  Eigen::FFT<double> fft;
  std::vector<Complex> tube(static_cast<std::size_t>(n3));
  std::vector<Complex> spec(static_cast<std::size_t>(n3));
  for (Index p = 0; p < plane; ++p) {
    for (Index k = 0; k < n3; ++k) tube[k] = src[p + k * plane];
    fft.fwd(spec, tube);
    for (Index k = 0; k < n3; ++k) dst[p + k * plane] = spec[k];
  }
  return out;
}

Tensor3 idft3(const SpectralTensor3& a, double tol) {
  Tensor3 out(a.dims());
  const Index n3 = a.n3();
  const Index plane = a.dims().slice_size();
  const auto src = a.data();
  auto dst = out.data();
  double max_mag = 0.0;
  double max_imag = 0.0;
  auto take = [&](Index at, Complex z) {
    dst[at] = z.real();
    max_mag = std::max(max_mag, std::abs(z));
    max_imag = std::max(max_imag, std::abs(z.imag()));
  };
  if (n3 == 1) {
    for (Index p = 0; p < plane; ++p) take(p, src[p]);
  } else {
    Eigen::FFT<double> fft;
    std::vector<Complex> spec(static_cast<std::size_t>(n3));
    std::vector<Complex> tube(static_cast<std::size_t>(n3));
    for (Index p = 0; p < plane; ++p) {
      for (Index k = 0; k < n3; ++k) spec[k] = src[p + k * plane];
      fft.inv(tube, spec);
      for (Index k = 0; k < n3; ++k) take(p + k * plane, tube[k]);
    }
  }
  if (max_imag > tol * max_mag) {
    throw SymmetryError("inverse DFT: imaginary residue " + std::to_string(max_imag) + " exceeds " +
                        std::to_string(tol) + " x " + std::to_string(max_mag) +
                        "; spectrum is not conjugate symmetric");
  }
  return out;
}

void fill_conjugate_slices(SpectralTensor3& a) {
  const Index n3 = a.n3();
  for (Index k = unique_slice_count(n3); k < n3; ++k) a.slice(k) = a.slice(n3 - k).conjugate();
}

SliceSvd slice_svd(const SpectralTensor3& a, Index k, bool with_vectors) {
  if (k < 0 || k >= a.n3()) throw IndexError("Fourier slice " + std::to_string(k) + " out of range");
  const unsigned int opts = with_vectors ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : 0u;
  SliceSvd out;
  if (is_self_conjugate_slice(k, a.n3())) {
    const Eigen::MatrixXd re = a.slice(k).real();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(re, opts);
    if (svd.info() != Eigen::Success) {
      throw NumericError("SVD failed on Fourier slice " + std::to_string(k), static_cast<std::size_t>(k));
    }
    out.sigma = svd.singularValues();
    if (with_vectors) {
      out.U = svd.matrixU().cast<Complex>();
      out.V = svd.matrixV().cast<Complex>();
    }
  } else {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(a.slice(k), opts);
    if (svd.info() != Eigen::Success) {
      throw NumericError("SVD failed on Fourier slice " + std::to_string(k), static_cast<std::size_t>(k));
    }
    out.sigma = svd.singularValues();
    if (with_vectors) {
      out.U = svd.matrixU();
      out.V = svd.matrixV();
    }
  }
  return out;
}

std::vector<Eigen::VectorXd> spectral_singular_values(const Tensor3& a) {
  const Index n3 = a.n3();
  const SpectralTensor3 abar = dft3(a);
  std::vector<Eigen::VectorXd> out(static_cast<std::size_t>(n3));
  for (Index k = 0; k < unique_slice_count(n3); ++k) out[k] = slice_svd(abar, k, false).sigma;
  for (Index k = unique_slice_count(n3); k < n3; ++k) out[k] = out[n3 - k];
  return out;
}

Eigen::MatrixXd bcirc(const Tensor3& a) {
  const Index n1 = a.n1(), n2 = a.n2(), n3 = a.n3();
  Eigen::MatrixXd m(n1 * n3, n2 * n3);
  for (Index r = 0; r < n3; ++r) {
    for (Index c = 0; c < n3; ++c) m.block(r * n1, c * n2, n1, n2) = a.slice((r - c + n3) % n3);
  }
  return m;
}

Eigen::MatrixXd unfold(const Tensor3& a) {
  Eigen::MatrixXd m(a.n1() * a.n3(), a.n2());
  for (Index k = 0; k < a.n3(); ++k) m.middleRows(k * a.n1(), a.n1()) = a.slice(k);
  return m;
}

Tensor3 fold(const Eigen::MatrixXd& m, Index n3) {
  if (n3 < 1 || m.rows() == 0 || m.rows() % n3 != 0) {
    throw ShapeError("fold: " + std::to_string(m.rows()) + " rows not divisible into " + std::to_string(n3) +
                     " slices");
  }
  const Index n1 = m.rows() / n3;
  Tensor3 t(TensorDims(n1, m.cols(), n3));
  for (Index k = 0; k < n3; ++k) t.slice(k) = m.middleRows(k * n1, n1);
  return t;
}

Tensor3 tprod(const Tensor3& a, const Tensor3& b) {
  check_tprod_dims(a, b);
  const Index n3 = a.n3();
  const SpectralTensor3 abar = dft3(a);
  const SpectralTensor3 bbar = dft3(b);
  SpectralTensor3 cbar(TensorDims(a.n1(), b.n2(), n3));
  for (Index k = 0; k < unique_slice_count(n3); ++k) cbar.slice(k).noalias() = abar.slice(k) * bbar.slice(k);
  fill_conjugate_slices(cbar);
  return idft3(cbar);
}

Tensor3 tprod_oracle(const Tensor3& a, const Tensor3& b) {
  check_tprod_dims(a, b);
  return fold(bcirc(a) * unfold(b), a.n3());
}

Tensor3 ttranspose(const Tensor3& a) {
  const Index n3 = a.n3();
  Tensor3 t(TensorDims(a.n2(), a.n1(), n3));
  t.slice(0) = a.slice(0).transpose();
  for (Index k = 1; k < n3; ++k) t.slice(k) = a.slice(n3 - k).transpose();
  return t;
}

Tensor3 identity_tensor(Index n, Index n3) {
  Tensor3 t(TensorDims(n, n, n3));
  t.slice(0).setIdentity();
  return t;
}

bool is_orthogonal(const Tensor3& q, double tol) {
  if (q.n1() != q.n2()) {
    throw ShapeError("is_orthogonal needs square frontal slices, got " + std::to_string(q.n1()) + " x " +
                     std::to_string(q.n2()));
  }
  const Tensor3 id = identity_tensor(q.n1(), q.n3());
  const Tensor3 qt = ttranspose(q);
  return norm_fro(tprod(qt, q) - id) <= tol && norm_fro(tprod(q, qt) - id) <= tol;
}

TSvd tsvd(const Tensor3& a) { return factorize(a, a.dims().n_min(), false); }

TSvd skinny_tsvd(const Tensor3& a, Index r) {
  if (r < 1 || r > a.dims().n_min()) {
    throw IndexError("skinny t-SVD rank " + std::to_string(r) + " outside [1, " +
                     std::to_string(a.dims().n_min()) + "]");
  }
  return factorize(a, r, true);
}

std::vector<Index> multi_rank(const Tensor3& a, double tol) {
  if (tol < 0.0) throw std::invalid_argument("rank tolerance must be nonnegative");
  const auto sv = spectral_singular_values(a);
  double sigma_max = 0.0;
  for (const auto& s : sv) {
    if (s.size() > 0) sigma_max = std::max(sigma_max, s(0));
  }
  const double cut = tol * sigma_max;
  std::vector<Index> ranks;
  ranks.reserve(sv.size());
  for (const auto& s : sv) ranks.push_back(static_cast<Index>((s.array() > cut).count()));
  return ranks;
}

Index tubal_rank(const Tensor3& a, double tol) {
  const auto ranks = multi_rank(a, tol);
  return *std::max_element(ranks.begin(), ranks.end());
}

double average_rank(const Tensor3& a, double tol) {
  const auto ranks = multi_rank(a, tol);
  double total = 0.0;
  for (Index r : ranks) total += static_cast<double>(r);
  return total / static_cast<double>(ranks.size());
}

double tnn(const Tensor3& a) {
  double total = 0.0;
  for (const auto& s : spectral_singular_values(a)) total += s.sum();
  return total / static_cast<double>(a.n3());
}

double spectral_norm(const Tensor3& a) {
  double best = 0.0;
  for (const auto& s : spectral_singular_values(a)) {
    if (s.size() > 0) best = std::max(best, s(0));
  }
  return best;
}

}  // namespace trpca
