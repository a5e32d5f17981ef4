#pragma once

#include "trpca/solver.hpp"
#include "trpca/tensor.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

namespace trpca {

/// Support of exactly m entries drawn uniformly, values +-1.
struct UniformSupport {
  Index m = 0;
};
/// Each entry independently +1 or -1 with probability rho_s / 2 each.
struct BernoulliSupport {
  double rho_s = 0.0;
};
using SparsityModel = std::variant<UniformSupport, BernoulliSupport>;

struct TrialSpec {
  TensorDims dims;
  Index r = 1;  ///< tubal rank of L0; 0 gives L0 = 0
  SparsityModel sparsity = UniformSupport{};
  std::uint64_t seed = 0;
  double success_tol = 1e-3;

  void validate() const;
};

struct TrialOutcome {
  Index rank_hat = 0;
  Index nnz_hat = 0;
  double rel_err_L = 0.0;
  double rel_err_E = 0.0;
  bool success = false;
  int iterations = 0;
  bool converged = false;
  double wall_time = 0.0;  ///< seconds
};

struct TrialData {
  Tensor3 L0;
  Tensor3 E0;
  Tensor3 X;
};

struct PhaseTrial {
  Index row = 0;  ///< index into rho_values
  Index col = 0;  ///< index into r_fractions
  int trial = 0;
  TrialSpec spec;
  TrialOutcome outcome;
};

struct PhaseGrid {
  std::vector<double> r_fractions;
  std::vector<double> rho_values;
  int trials_per_cell = 0;
  /// rows follow rho_values, columns follow r_fractions.
  Eigen::MatrixXd success_fraction;
  std::vector<PhaseTrial> trials;
};

/// P * Q with P (n1 x r x n3) and Q (r x n2 x n3) i.i.d. N(0, 1/n1).
Tensor3 gen_low_rank(const TensorDims& dims, Index r, std::uint64_t seed);
Tensor3 gen_sparse_uniform(const TensorDims& dims, Index m, std::uint64_t seed);
Tensor3 gen_sparse_bernoulli(const TensorDims& dims, double rho_s, std::uint64_t seed);

/// Draws L0 and E0 from independent streams derived from spec.seed.
TrialData generate_trial(const TrialSpec& spec);

/// ||a - b||_F / ||b||_F, or the absolute error when b = 0.
double relative_error(const Tensor3& estimate, const Tensor3& truth);

/// Entries with |e| > 1e-8 * ||E||_inf.
Index count_nonzeros(const Tensor3& e);

TrialOutcome run_trial(const TrialSpec& spec, const SolverConfig& config);

/// Tubal rank used for a rank fraction: max(1, round(frac * min(n1, n2))).
Index rank_for_fraction(const TensorDims& dims, double r_fraction);

/// Runs `trials` Bernoulli-model instances per (rho_s, r/n) cell. Trial seeds
/// are derived from (base_seed, row, col, trial), so the result does not
/// depend on `threads` (0 picks the hardware concurrency).
PhaseGrid phase_grid(const TensorDims& dims, const std::vector<double>& r_fractions,
                     const std::vector<double>& rho_values, int trials, std::uint64_t base_seed,
                     const SolverConfig& config, unsigned threads = 1);

}  // namespace trpca
