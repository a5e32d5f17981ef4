#pragma once

#include "trpca/tensor.hpp"

namespace trpca {

/// Tensor singular value thresholding: the minimizer of
/// tau * tnn(L) + 0.5 * ||L - Y||_F^2.
///
/// With the 1/n3 factor in the nuclear norm and the matching 1/n3 in
/// Parseval, the problem splits into independent per-Fourier-slice matrix
/// problems that all shrink by exactly tau. Throws std::invalid_argument
/// unless tau > 0.
Tensor3 tsvt(const Tensor3& y, double tau);

/// Entrywise sign(y) * max(|y| - tau, 0), the prox of tau * ||.||_1.
Tensor3 soft_threshold(const Tensor3& y, double tau);

}  // namespace trpca
