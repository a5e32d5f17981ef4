#include "trpca/synth.hpp"

#include "trpca/errors.hpp"
#include "trpca/random.hpp"
#include "trpca/t_algebra.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

namespace trpca {

namespace {

Tensor3 gaussian_tensor(const TensorDims& dims, double stddev, Rng& rng) {
  Tensor3 t(dims);
  for (double& v : t.data()) v = stddev * rng.normal();
  return t;
}

}  // namespace

void TrialSpec::validate() const {
  if (r < 0 || r > dims.n_min()) {
    throw std::invalid_argument("trial rank " + std::to_string(r) + " outside [0, " + std::to_string(dims.n_min()) +
                                "]");
  }
  if (const auto* u = std::get_if<UniformSupport>(&sparsity)) {
    if (u->m < 0 || u->m > dims.numel()) throw std::invalid_argument("support size m out of range");
  } else if (const auto* b = std::get_if<BernoulliSupport>(&sparsity)) {
    if (!(b->rho_s >= 0.0 && b->rho_s <= 1.0)) throw std::invalid_argument("rho_s must lie in [0, 1]");
  }
  if (!(success_tol > 0.0)) throw std::invalid_argument("success_tol must be positive");
}

Tensor3 gen_low_rank(const TensorDims& dims, Index r, std::uint64_t seed) {
  if (r < 0 || r > dims.n_min()) {
    throw IndexError("gen_low_rank: rank " + std::to_string(r) + " outside [0, " + std::to_string(dims.n_min()) + "]");
  }
  if (r == 0) return Tensor3(dims);
  Rng rng(seed);
  const double stddev = 1.0 / std::sqrt(static_cast<double>(dims.n1));
  const Tensor3 p = gaussian_tensor(TensorDims(dims.n1, r, dims.n3), stddev, rng);
  const Tensor3 q = gaussian_tensor(TensorDims(r, dims.n2, dims.n3), stddev, rng);
  return tprod(p, q);
}

Tensor3 gen_sparse_uniform(const TensorDims& dims, Index m, std::uint64_t seed) {
  const Index total = dims.numel();
  if (m < 0 || m > total) throw std::invalid_argument("gen_sparse_uniform: m out of range");
  Rng rng(seed);
  // Partial Fisher-Yates: the first m entries of `order` are a uniform m-subset.
  std::vector<Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Index{0});
  Tensor3 s(dims);
  auto data = s.data();
  for (Index n = 0; n < m; ++n) {
    const auto pick = n + static_cast<Index>(rng.below(static_cast<std::uint64_t>(total - n)));
    std::swap(order[n], order[pick]);
    data[order[n]] = rng.coin() ? 1.0 : -1.0;
  }
  return s;
}

Tensor3 gen_sparse_bernoulli(const TensorDims& dims, double rho_s, std::uint64_t seed) {
  if (!(rho_s >= 0.0 && rho_s <= 1.0)) throw std::invalid_argument("gen_sparse_bernoulli: rho_s out of [0, 1]");
  Rng rng(seed);
  Tensor3 s(dims);
  for (double& v : s.data()) {
    const double u = rng.uniform();
    if (u < 0.5 * rho_s) {
      v = 1.0;
    } else if (u < rho_s) {
      v = -1.0;
    }
  }
  return s;
}

TrialData generate_trial(const TrialSpec& spec) {
  spec.validate();
  TrialData d;
  d.L0 = gen_low_rank(spec.dims, spec.r, derive_seed(spec.seed, {1}));
  const std::uint64_t sparse_seed = derive_seed(spec.seed, {2});
  if (const auto* u = std::get_if<UniformSupport>(&spec.sparsity)) {
    d.E0 = gen_sparse_uniform(spec.dims, u->m, sparse_seed);
  } else {
    d.E0 = gen_sparse_bernoulli(spec.dims, std::get<BernoulliSupport>(spec.sparsity).rho_s, sparse_seed);
  }
  d.X = d.L0 + d.E0;
  return d;
}

double relative_error(const Tensor3& estimate, const Tensor3& truth) {
  const double err = norm_fro(estimate - truth);
  const double ref = norm_fro(truth);
  return ref > 0.0 ? err / ref : err;
}

Index count_nonzeros(const Tensor3& e) {
  const double cut = 1e-8 * norm_inf(e);
  return static_cast<Index>((e.flat().array().abs() > cut).count());
}

TrialOutcome run_trial(const TrialSpec& spec, const SolverConfig& config) {
  const TrialData d = generate_trial(spec);
  const auto start = std::chrono::steady_clock::now();
  const TrpcaResult res = solve(d.X, config);
  const auto stop = std::chrono::steady_clock::now();

  TrialOutcome out;
  out.rank_hat = tubal_rank(res.L);
  out.nnz_hat = count_nonzeros(res.E);
  out.rel_err_L = relative_error(res.L, d.L0);
  out.rel_err_E = relative_error(res.E, d.E0);
  out.success = out.rel_err_L <= spec.success_tol;
  out.iterations = res.iterations;
  out.converged = res.converged;
  out.wall_time = std::chrono::duration<double>(stop - start).count();
  return out;
}

Index rank_for_fraction(const TensorDims& dims, double r_fraction) {
  const auto r = static_cast<Index>(std::llround(r_fraction * static_cast<double>(dims.n_min())));
  return std::clamp<Index>(r, 1, dims.n_min());
}

PhaseGrid phase_grid(const TensorDims& dims, const std::vector<double>& r_fractions,
                     const std::vector<double>& rho_values, int trials, std::uint64_t base_seed,
                     const SolverConfig& config, unsigned threads) {
  if (r_fractions.empty() || rho_values.empty()) throw std::invalid_argument("phase_grid: empty axis");
  if (trials < 1) throw std::invalid_argument("phase_grid: trials must be >= 1");

  PhaseGrid grid;
  grid.r_fractions = r_fractions;
  grid.rho_values = rho_values;
  grid.trials_per_cell = trials;
  const auto rows = static_cast<Index>(rho_values.size());
  const auto cols = static_cast<Index>(r_fractions.size());
  for (Index row = 0; row < rows; ++row) {
    for (Index col = 0; col < cols; ++col) {
      for (int t = 0; t < trials; ++t) {
        PhaseTrial pt;
        pt.row = row;
        pt.col = col;
        pt.trial = t;
        pt.spec.dims = dims;
        pt.spec.r = rank_for_fraction(dims, r_fractions[col]);
        pt.spec.sparsity = BernoulliSupport{rho_values[row]};
        pt.spec.seed = derive_seed(base_seed, {static_cast<std::uint64_t>(row), static_cast<std::uint64_t>(col),
                                               static_cast<std::uint64_t>(t)});
        pt.spec.validate();
        grid.trials.push_back(pt);
      }
    }
  }

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.trials.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t n = next++; n < grid.trials.size(); n = next++) {
      try {
        grid.trials[n].outcome = run_trial(grid.trials[n].spec, config);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  grid.success_fraction = Eigen::MatrixXd::Zero(rows, cols);
  for (const auto& pt : grid.trials) {
    if (pt.outcome.success) grid.success_fraction(pt.row, pt.col) += 1.0;
  }
  grid.success_fraction /= static_cast<double>(trials);
  return grid;
}

}  // namespace trpca
