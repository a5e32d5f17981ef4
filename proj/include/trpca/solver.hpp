#pragma once

#include "trpca/t_algebra.hpp"
#include "trpca/tensor.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace trpca {

/// ADMM parameters for min tnn(L) + lambda * ||E||_1 s.t. X = L + E.
struct SolverConfig {
  /// Weight on the l1 term; unset means default_lambda(X.dims()).
  std::optional<double> lambda;
  double rho = 1.1;
  double mu0 = 1e-3;
  double mu_max = 1e10;
  double eps = 1e-8;
  int max_iter = 500;

  /// Throws std::invalid_argument when a field is out of its domain.
  void validate() const;
};

/// Infinity-norm stopping quantities of one iteration.
struct Residuals {
  double delta_L = 0.0;
  double delta_E = 0.0;
  double feasibility = 0.0;
};

struct TrpcaResult {
  Tensor3 L;
  Tensor3 E;
  int iterations = 0;
  bool converged = false;
  std::vector<Residuals> residual_history;
  double mu_final = 0.0;
  double lambda = 0.0;
};

/// State after an iteration, handed to an optional observer. `mu` is the
/// penalty that produced this iterate (before the increase).
struct IterateView {
  int iteration;
  const Tensor3& L;
  const Tensor3& E;
  const Tensor3& Y;
  double mu;
  Residuals residuals;
};
using IterateObserver = std::function<void(const IterateView&)>;

/// 1 / sqrt(max(n1, n2) * n3).
double default_lambda(const TensorDims& dims);

/// Runs the ADMM iteration from L = E = Y = 0:
///   L <- tsvt(X - E - Y/mu, 1/mu)
///   E <- soft_threshold(X - L - Y/mu, lambda/mu)
///   Y <- Y + mu (L + E - X)
///   mu <- min(rho mu, mu_max)
/// until the changes in L and E and the feasibility gap are all <= eps in
/// the infinity norm. Hitting max_iter returns converged = false.
/// Throws std::invalid_argument for non-finite X or a bad config.
TrpcaResult solve(const Tensor3& x, const SolverConfig& config, const IterateObserver& observer = {});

/// Smallest mu satisfying each tensor incoherence inequality for L's skinny
/// t-SVD at its tubal rank r. Because the rows of U carry total energy r,
/// mu_u >= n3 always (likewise mu_v); n3 is the perfectly spread case.
struct IncoherenceReport {
  double mu_u = 0.0;
  double mu_v = 0.0;
  double mu_joint = 0.0;
  Index r = 0;
};

/// Throws std::invalid_argument if L has tubal rank 0 at `tol`.
IncoherenceReport incoherence_report(const Tensor3& l, double tol = kDefaultRankTol);

/// Applies "key = value" lines (keys: lambda, rho, mu0, mu_max, eps,
/// max_iter; '#' starts a comment) on top of `base`. Unknown keys and
/// malformed values throw ParseError.
SolverConfig parse_config(std::istream& in, SolverConfig base = {});
SolverConfig load_config(const std::filesystem::path& path, SolverConfig base = {});

}  // namespace trpca
