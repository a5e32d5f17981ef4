#include "trpca/prox.hpp"

#include "trpca/t_algebra.hpp"

#include <cmath>
#include <stdexcept>

namespace trpca {

namespace {

void require_positive(double tau, const char* what) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument(std::string(what) + ": threshold must be positive and finite");
  }
}

}  // namespace

Tensor3 tsvt(const Tensor3& y, double tau) {
  require_positive(tau, "tsvt");
  const Index n3 = y.n3();
  SpectralTensor3 ybar = dft3(y);
  for (Index k = 0; k < unique_slice_count(n3); ++k) {
    const SliceSvd svd = slice_svd(ybar, k, true);
    const Index keep = (svd.sigma.array() > tau).count();
    auto out = ybar.slice(k);
    if (keep == 0) {
      out.setZero();
      continue;
    }
    const Eigen::VectorXd shrunk = svd.sigma.head(keep).array() - tau;
    out.noalias() = svd.U.leftCols(keep) * shrunk.cast<Complex>().asDiagonal() * svd.V.leftCols(keep).adjoint();
  }
  fill_conjugate_slices(ybar);
  return idft3(ybar);
}

Tensor3 soft_threshold(const Tensor3& y, double tau) {
  require_positive(tau, "soft_threshold");
  Tensor3 out(y.dims());
  out.flat() = y.flat().unaryExpr([tau](double v) {
    const double mag = std::abs(v) - tau;
    return mag > 0.0 ? std::copysign(mag, v) : 0.0;
  });
  return out;
}

}  // namespace trpca
