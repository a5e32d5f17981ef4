#include "trpca/solver.hpp"

#include "trpca/errors.hpp"
#include "trpca/prox.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>

namespace trpca {

void SolverConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (lambda && !positive(*lambda)) throw std::invalid_argument("lambda must be positive");
  if (!std::isfinite(rho) || rho < 1.0) throw std::invalid_argument("rho must be >= 1");
  if (!positive(mu0)) throw std::invalid_argument("mu0 must be positive");
  if (!positive(mu_max)) throw std::invalid_argument("mu_max must be positive");
  if (mu0 > mu_max) throw std::invalid_argument("mu0 must not exceed mu_max");
  if (!positive(eps)) throw std::invalid_argument("eps must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be positive");
}

double default_lambda(const TensorDims& dims) {
  return 1.0 / std::sqrt(static_cast<double>(dims.n_max()) * static_cast<double>(dims.n3));
}

TrpcaResult solve(const Tensor3& x, const SolverConfig& config, const IterateObserver& observer) {
  if (!x.all_finite()) throw std::invalid_argument("solve: input tensor has non-finite entries");
  config.validate();

  TrpcaResult result;
  result.lambda = config.lambda.value_or(default_lambda(x.dims()));
  result.L = Tensor3(x.dims());
  result.E = Tensor3(x.dims());
  Tensor3 y(x.dims());
  Tensor3 work(x.dims());
  double mu = config.mu0;

  const auto xf = x.flat();
  for (int it = 1; it <= config.max_iter; ++it) {
    work.flat() = xf - result.E.flat() - y.flat() / mu;
    Tensor3 l_next = tsvt(work, 1.0 / mu);

    work.flat() = xf - l_next.flat() - y.flat() / mu;
    Tensor3 e_next = soft_threshold(work, result.lambda / mu);

    work.flat() = l_next.flat() + e_next.flat() - xf;
    y.flat() += mu * work.flat();

    const Residuals res{
        (l_next.flat() - result.L.flat()).lpNorm<Eigen::Infinity>(),
        (e_next.flat() - result.E.flat()).lpNorm<Eigen::Infinity>(),
        work.flat().lpNorm<Eigen::Infinity>(),
    };
    result.residual_history.push_back(res);
    if (observer) observer(IterateView{it, l_next, e_next, y, mu, res});

    result.L = std::move(l_next);
    result.E = std::move(e_next);
    result.iterations = it;
    mu = std::min(config.rho * mu, config.mu_max);

    if (res.delta_L <= config.eps && res.delta_E <= config.eps && res.feasibility <= config.eps) {
      result.converged = true;
      break;
    }
  }
  result.mu_final = mu;
  return result;
}

IncoherenceReport incoherence_report(const Tensor3& l, double tol) {
  const Index r = tubal_rank(l, tol);
  if (r == 0) throw std::invalid_argument("incoherence_report: tensor has tubal rank 0");
  const TSvd f = skinny_tsvd(l, r);
  const double n1 = static_cast<double>(l.n1());
  const double n2 = static_cast<double>(l.n2());
  const double n3 = static_cast<double>(l.n3());
  const double rr = static_cast<double>(r);

  // ||U^T * e_i||_F equals the Frobenius norm of the horizontal slice U(i, :, :).
  auto max_row_energy = [](const Tensor3& u) {
    Eigen::VectorXd energy = Eigen::VectorXd::Zero(u.n1());
    for (Index k = 0; k < u.n3(); ++k) energy += u.slice(k).rowwise().squaredNorm();
    return energy.maxCoeff();
  };
  const double joint = norm_inf(tprod(f.U, ttranspose(f.V)));

  IncoherenceReport rep;
  rep.r = r;
  rep.mu_u = n1 * n3 / rr * max_row_energy(f.U);
  rep.mu_v = n2 * n3 / rr * max_row_energy(f.V);
  rep.mu_joint = n1 * n2 * n3 * n3 / rr * joint * joint;
  return rep;
}

SolverConfig parse_config(std::istream& in, SolverConfig base) {
  auto trim = [](std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return std::string{};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  };
  auto to_double = [](const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
      throw ParseError("config: bad value '" + v + "' for " + key);
    }
    return out;
  };

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "lambda") {
      base.lambda = to_double(key, value);
    } else if (key == "rho") {
      base.rho = to_double(key, value);
    } else if (key == "mu0") {
      base.mu0 = to_double(key, value);
    } else if (key == "mu_max") {
      base.mu_max = to_double(key, value);
    } else if (key == "eps") {
      base.eps = to_double(key, value);
    } else if (key == "max_iter") {
      int v = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ParseError("config: bad value '" + value + "' for max_iter");
      }
      base.max_iter = v;
    } else {
      throw ParseError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return base;
}

SolverConfig load_config(const std::filesystem::path& path, SolverConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return parse_config(in, std::move(base));
}

}  // namespace trpca
