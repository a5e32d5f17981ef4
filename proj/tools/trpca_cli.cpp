// trpca: command-line front end for the t-SVD algebra and the TRPCA solver.
//
// Exit codes: 0 success, 2 input error, 3 solver hit max_iter, 1 other failure.

#include "trpca/errors.hpp"
#include "trpca/imaging.hpp"
#include "trpca/netpbm.hpp"
#include "trpca/random.hpp"
#include "trpca/solver.hpp"
#include "trpca/synth.hpp"
#include "trpca/t_algebra.hpp"
#include "trpca/tensor_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace trpca;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;
constexpr int kExitNotConverged = 3;

/// Fixed formatting so CSV bytes do not depend on stream state.
std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

unsigned thread_count() {
  if (const char* env = std::getenv("TRPCA_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 0) return static_cast<unsigned>(v);
  }
  return 1;
}

/// Writes to `path`, or stdout when empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

struct SolverFlags {
  std::optional<double> lambda;
  std::string config_path;
  std::optional<double> rho, mu0, mu_max, eps;
  std::optional<int> max_iter;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--lambda", lambda, "l1 weight (default 1/sqrt(max(n1,n2) n3))");
    cmd->add_option("--config", config_path, "key=value solver config file")->check(CLI::ExistingFile);
    cmd->add_option("--rho", rho, "penalty growth factor");
    cmd->add_option("--mu0", mu0, "initial penalty");
    cmd->add_option("--mu-max", mu_max, "penalty cap");
    cmd->add_option("--eps", eps, "stopping tolerance");
    cmd->add_option("--max-iter", max_iter, "iteration cap");
  }

  SolverConfig build() const {
    SolverConfig cfg = config_path.empty() ? SolverConfig{} : load_config(config_path);
    if (lambda) cfg.lambda = lambda;
    if (rho) cfg.rho = *rho;
    if (mu0) cfg.mu0 = *mu0;
    if (mu_max) cfg.mu_max = *mu_max;
    if (eps) cfg.eps = *eps;
    if (max_iter) cfg.max_iter = *max_iter;
    cfg.validate();
    return cfg;
  }
};

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) v[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  return v;
}

std::string join(const std::vector<Index>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

// ---------------------------------------------------------------------------

int cmd_tsvd(const std::string& input, double tol, bool as_json) {
  const Tensor3 a = read_tensor(fs::path(input));
  const auto ranks = multi_rank(a, tol);
  const Index trank = *std::max_element(ranks.begin(), ranks.end());
  const double nuclear = tnn(a);
  const double spectral = spectral_norm(a);
  std::optional<IncoherenceReport> inc;
  if (trank > 0) inc = incoherence_report(a, tol);

  if (as_json) {
    nlohmann::json j;
    j["dims"] = {a.n1(), a.n2(), a.n3()};
    j["multi_rank"] = ranks;
    j["tubal_rank"] = trank;
    j["average_rank"] = average_rank(a, tol);
    j["tnn"] = nuclear;
    j["spectral_norm"] = spectral;
    if (inc) {
      j["incoherence"] = {{"r", inc->r}, {"mu_u", inc->mu_u}, {"mu_v", inc->mu_v}, {"mu_joint", inc->mu_joint}};
    } else {
      j["incoherence"] = nullptr;
    }
    std::cout << j.dump(2) << '\n';
    return kExitOk;
  }
  std::cout << "dims: " << a.n1() << " x " << a.n2() << " x " << a.n3() << '\n'
            << "multi_rank: " << join(ranks) << '\n'
            << "tubal_rank: " << trank << '\n'
            << "average_rank: " << num(average_rank(a, tol)) << '\n'
            << "tnn: " << num(nuclear) << '\n'
            << "spectral_norm: " << num(spectral) << '\n';
  if (inc) {
    std::cout << "incoherence: r=" << inc->r << " mu_u=" << num(inc->mu_u) << " mu_v=" << num(inc->mu_v)
              << " mu_joint=" << num(inc->mu_joint) << '\n';
  } else {
    std::cout << "incoherence: n/a (zero tensor)\n";
  }
  return kExitOk;
}

int cmd_solve(const std::string& input, const SolverFlags& flags, const std::string& out_l, const std::string& out_e,
              bool as_json) {
  const Tensor3 x = read_tensor(fs::path(input));
  const SolverConfig cfg = flags.build();
  const TrpcaResult res = solve(x, cfg);
  if (!out_l.empty()) write_tensor(fs::path(out_l), res.L);
  if (!out_e.empty()) write_tensor(fs::path(out_e), res.E);

  const Residuals last = res.residual_history.empty() ? Residuals{} : res.residual_history.back();
  const Index rank = tubal_rank(res.L);
  const Index nnz = count_nonzeros(res.E);
  if (as_json) {
    nlohmann::json j;
    j["dims"] = {x.n1(), x.n2(), x.n3()};
    j["lambda"] = res.lambda;
    j["lambda_default"] = !cfg.lambda.has_value();
    j["iterations"] = res.iterations;
    j["converged"] = res.converged;
    j["mu_final"] = res.mu_final;
    j["residuals"] = {{"delta_L", last.delta_L}, {"delta_E", last.delta_E}, {"feasibility", last.feasibility}};
    j["tubal_rank_L"] = rank;
    j["nnz_E"] = nnz;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "dims: " << x.n1() << " x " << x.n2() << " x " << x.n3() << '\n'
              << "lambda: " << num(res.lambda) << (cfg.lambda ? "" : " (default)") << '\n'
              << "iterations: " << res.iterations << '\n'
              << "converged: " << (res.converged ? "yes" : "no") << '\n'
              << "residuals: delta_L=" << num(last.delta_L) << " delta_E=" << num(last.delta_E)
              << " feasibility=" << num(last.feasibility) << '\n'
              << "tubal_rank_L: " << rank << '\n'
              << "nnz_E: " << nnz << '\n';
  }
  return res.converged ? kExitOk : kExitNotConverged;
}

struct GenFlags {
  std::string kind = "trial";
  Index n1 = 50, n2 = 50, n3 = 50;
  Index r = 5;
  std::optional<Index> m;
  std::optional<double> rho_s;
  std::uint64_t seed = 1;
  std::string out, out_l0, out_e0;
};

int cmd_gen(const GenFlags& g) {
  const TensorDims dims(g.n1, g.n2, g.n3);
  if (g.kind == "identity") {
    if (g.n1 != g.n2) throw std::invalid_argument("identity needs n1 == n2");
    write_tensor(fs::path(g.out), identity_tensor(g.n1, g.n3));
  } else if (g.kind == "zeros") {
    write_tensor(fs::path(g.out), Tensor3::zeros(dims));
  } else if (g.kind == "trial") {
    TrialSpec spec;
    spec.dims = dims;
    spec.r = g.r;
    spec.seed = g.seed;
    if (g.rho_s) {
      spec.sparsity = BernoulliSupport{*g.rho_s};
    } else {
      spec.sparsity = UniformSupport{g.m.value_or(dims.numel() / 10)};
    }
    const TrialData d = generate_trial(spec);
    write_tensor(fs::path(g.out), d.X);
    if (!g.out_l0.empty()) write_tensor(fs::path(g.out_l0), d.L0);
    if (!g.out_e0.empty()) write_tensor(fs::path(g.out_e0), d.E0);
    std::cout << "# trpca gen seed=" << g.seed << '\n';
  } else {
    throw std::invalid_argument("unknown --kind " + g.kind);
  }
  return kExitOk;
}

int cmd_table1(Index n, Index n3, double r_frac, double m_frac, int seeds, std::uint64_t seed,
               const std::string& out_path, bool timing, const SolverFlags& flags) {
  const SolverConfig cfg = flags.build();
  const TensorDims dims(n, n, n3);
  const Index r = rank_for_fraction(dims, r_frac);
  const auto m = static_cast<Index>(std::llround(m_frac * static_cast<double>(dims.numel())));
  std::cout << "# trpca table1 seed=" << seed << " seeds=" << seeds << " n=" << n << " n3=" << n3 << " r=" << r
            << " m=" << m << '\n';
  Output out(out_path);
  auto& os = out.stream();
  os << "n,n3,r,m,seed,rank_hat,nnz_hat,rel_err_L,rel_err_E,success,iterations,converged";
  os << (timing ? ",wall_time\n" : "\n");
  for (int s = 0; s < seeds; ++s) {
    TrialSpec spec;
    spec.dims = dims;
    spec.r = r;
    spec.sparsity = UniformSupport{m};
    spec.seed = seed + static_cast<std::uint64_t>(s);
    const TrialOutcome o = run_trial(spec, cfg);
    os << n << ',' << n3 << ',' << r << ',' << m << ',' << spec.seed << ',' << o.rank_hat << ',' << o.nnz_hat << ','
       << num(o.rel_err_L) << ',' << num(o.rel_err_E) << ',' << (o.success ? 1 : 0) << ',' << o.iterations << ','
       << (o.converged ? 1 : 0);
    if (timing) os << ',' << num(o.wall_time);
    os << '\n' << std::flush;
  }
  return kExitOk;
}

struct PhaseFlags {
  Index n = 40, n3 = 20;
  std::string grid = "10";
  double r_min = 0.02, r_max = 0.4, rho_min = 0.02, rho_max = 0.4;
  int trials = 3;
  std::uint64_t seed = 1;
  std::string out = "phase";
  bool timing = false;
};

int cmd_phase(const PhaseFlags& p, const SolverFlags& flags) {
  const SolverConfig cfg = flags.build();
  int rows = 0, cols = 0;
  if (const auto x = p.grid.find('x'); x != std::string::npos) {
    rows = std::stoi(p.grid.substr(0, x));
    cols = std::stoi(p.grid.substr(x + 1));
  } else {
    rows = cols = std::stoi(p.grid);
  }
  if (rows < 1 || cols < 1) throw std::invalid_argument("--grid must be N or RxC with positive sizes");
  const auto r_fracs = linspace(p.r_min, p.r_max, cols);
  const auto rhos = linspace(p.rho_min, p.rho_max, rows);
  std::cout << "# trpca phase seed=" << p.seed << " n=" << p.n << " n3=" << p.n3 << " grid=" << rows << "x" << cols
            << " trials=" << p.trials << '\n';

  const TensorDims dims(p.n, p.n, p.n3);
  const PhaseGrid grid = phase_grid(dims, r_fracs, rhos, p.trials, p.seed, cfg, thread_count());

  Output trials_out(p.out + "_trials.csv");
  auto& ts = trials_out.stream();
  ts << "r_frac,rho_s,trial,n,n3,r,seed,rank_hat,nnz_hat,rel_err_L,rel_err_E,success,iterations,converged";
  ts << (p.timing ? ",wall_time\n" : "\n");
  for (const auto& t : grid.trials) {
    const auto& o = t.outcome;
    ts << num(grid.r_fractions[t.col]) << ',' << num(grid.rho_values[t.row]) << ',' << t.trial << ',' << p.n << ','
       << p.n3 << ',' << t.spec.r << ',' << t.spec.seed << ',' << o.rank_hat << ',' << o.nnz_hat << ','
       << num(o.rel_err_L) << ',' << num(o.rel_err_E) << ',' << (o.success ? 1 : 0) << ',' << o.iterations << ','
       << (o.converged ? 1 : 0);
    if (p.timing) ts << ',' << num(o.wall_time);
    ts << '\n';
  }

  Output grid_out(p.out + "_grid.csv");
  auto& gs = grid_out.stream();
  gs << "rho_s";
  for (double r : grid.r_fractions) gs << ',' << num(r);
  gs << '\n';
  for (Index row = 0; row < grid.success_fraction.rows(); ++row) {
    gs << num(grid.rho_values[row]);
    for (Index col = 0; col < grid.success_fraction.cols(); ++col) gs << ',' << num(grid.success_fraction(row, col));
    gs << '\n';
  }
  std::cout << "wrote " << p.out << "_trials.csv and " << p.out << "_grid.csv\n";
  return kExitOk;
}

struct DenoiseFlags {
  std::string input;
  double fraction = 0.1;
  std::uint64_t seed = 1;
  bool baseline = false;
  std::string out_dir = ".";
  std::string report;
};

void write_stack(const ImageStack& s, const fs::path& dir, const std::string& stem) {
  const auto images = stack_to_images(s);
  if (s.kind == StackKind::Color) {
    write_netpbm(dir / (stem + ".ppm"), images.front());
    return;
  }
  if (images.size() == 1) {
    write_netpbm(dir / (stem + ".pgm"), images.front());
    return;
  }
  for (std::size_t k = 0; k < images.size(); ++k) {
    char idx[32];
    std::snprintf(idx, sizeof idx, "_%03zu", k);
    write_netpbm(dir / (stem + idx + ".pgm"), images[k]);
  }
}

int cmd_denoise(const DenoiseFlags& d, const SolverFlags& flags) {
  const SolverConfig cfg = flags.build();
  const fs::path input(d.input);
  ImageStack stack;
  std::string stem;
  if (fs::is_directory(input)) {
    std::vector<fs::path> frames;
    for (const auto& entry : fs::directory_iterator(input)) {
      if (entry.is_regular_file() && entry.path().extension() == ".pgm") frames.push_back(entry.path());
    }
    std::sort(frames.begin(), frames.end());
    if (frames.empty()) throw ParseError(input.string() + ": no .pgm frames found");
    stack = load_grayscale_stack(frames);
    stem = input.filename().empty() ? input.parent_path().filename().string() : input.filename().string();
  } else {
    const auto ext = input.extension().string();
    if (ext != ".ppm" && ext != ".pgm") throw ParseError(input.string() + ": unsupported format (need .ppm/.pgm)");
    stack = stack_from_image(read_netpbm(input));
    stem = input.stem().string();
  }

  std::cout << "# trpca denoise seed=" << d.seed << " fraction=" << num(d.fraction) << " input=" << d.input << '\n';
  const DenoiseOutput out = denoise(stack, d.fraction, d.seed, cfg, d.baseline);

  const fs::path dir(d.out_dir);
  fs::create_directories(dir);
  write_stack(tensor_to_stack(out.low_rank, stack.kind), dir, stem + "_L");
  Tensor3 sparse_mag(out.sparse.dims());
  sparse_mag.flat() = out.sparse.flat().cwiseAbs();
  write_stack(tensor_to_stack(sparse_mag, stack.kind), dir, stem + "_E");
  write_stack(tensor_to_stack(out.corrupted, stack.kind), dir, stem + "_noisy");
  if (stack.kind == StackKind::Color || stack.frame_count() == 1) {
    write_netpbm(dir / (stem + "_mask.pgm"), out.mask.union_image());
  } else {
    for (Index k = 0; k < stack.frame_count(); ++k) {
      char idx[32];
      std::snprintf(idx, sizeof idx, "_%03td", static_cast<std::ptrdiff_t>(k));
      write_netpbm(dir / (stem + "_mask" + idx + ".pgm"), out.mask.slice_image(k));
    }
  }
  if (out.baseline_low_rank) write_stack(tensor_to_stack(*out.baseline_low_rank, stack.kind), dir, stem + "_rpca");

  const fs::path report = d.report.empty() ? dir / "report.csv" : fs::path(d.report);
  const bool fresh = !fs::exists(report) || fs::file_size(report) == 0;
  std::ofstream rep(report, std::ios::binary | std::ios::app);
  if (!rep) throw std::runtime_error("cannot open " + report.string());
  if (fresh) rep << "file,fraction,seed,psnr_trpca,psnr_baseline,iterations\n";
  rep << input.filename().string() << ',' << num(d.fraction) << ',' << d.seed << ',' << num(out.report.psnr_trpca)
      << ',' << (out.report.psnr_baseline ? num(*out.report.psnr_baseline) : "") << ','
      << out.report.solver_iterations << '\n';

  std::cout << "psnr_trpca: " << num(out.report.psnr_trpca) << " dB\n";
  if (out.report.psnr_baseline) std::cout << "psnr_baseline: " << num(*out.report.psnr_baseline) << " dB\n";
  std::cout << "iterations: " << out.report.solver_iterations << '\n';
  return kExitOk;
}

int cmd_corpus(int count, int height, int width, std::uint64_t seed, const std::string& out_dir) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "scene_%02d.ppm", i);
    write_netpbm(dir / name, make_test_image(height, width, derive_seed(seed, {static_cast<std::uint64_t>(i)})));
  }
  std::cout << "# trpca corpus seed=" << seed << " wrote " << count << " images to " << out_dir << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor robust PCA via the t-SVD and ADMM"};
  app.require_subcommand(1);

  std::string input;
  double tol = kDefaultRankTol;
  bool as_json = false;
  auto* tsvd_cmd = app.add_subcommand("tsvd", "t-SVD ranks, norms and incoherence of a TNS3 tensor");
  tsvd_cmd->add_option("input", input, "TNS3 tensor file")->required();
  tsvd_cmd->add_option("--tol", tol, "relative rank tolerance");
  tsvd_cmd->add_flag("--json", as_json, "machine-readable output");

  SolverFlags solver_flags;
  std::string out_l, out_e;
  auto* solve_cmd = app.add_subcommand("solve", "decompose X = L + E with TRPCA");
  solve_cmd->add_option("input", input, "TNS3 tensor file")->required();
  solver_flags.add_to(solve_cmd);
  solve_cmd->add_option("--out-L", out_l, "low-rank output (TNS3)");
  solve_cmd->add_option("--out-E", out_e, "sparse output (TNS3)");
  solve_cmd->add_flag("--json", as_json, "machine-readable output");

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen", "write a synthetic TNS3 tensor");
  gen_cmd->add_option("--kind", gen.kind, "trial | identity | zeros")->check(CLI::IsMember({"trial", "identity", "zeros"}));
  gen_cmd->add_option("--n1", gen.n1);
  gen_cmd->add_option("--n2", gen.n2);
  gen_cmd->add_option("--n3", gen.n3);
  gen_cmd->add_option("--r", gen.r, "tubal rank of L0");
  gen_cmd->add_option("--m", gen.m, "support size of E0 (uniform model)");
  gen_cmd->add_option("--rho-s", gen.rho_s, "Bernoulli sparsity of E0");
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--out", gen.out, "output X")->required();
  gen_cmd->add_option("--out-L0", gen.out_l0);
  gen_cmd->add_option("--out-E0", gen.out_e0);

  Index t_n = 100, t_n3 = 100;
  double r_frac = 0.1, m_frac = 0.1;
  int seeds = 1;
  std::uint64_t seed = 1;
  std::string out_path;
  bool timing = false;
  auto* table_cmd = app.add_subcommand("table1", "exact recovery over random trials");
  table_cmd->add_option("--n", t_n);
  table_cmd->add_option("--n3", t_n3);
  table_cmd->add_option("--r-frac", r_frac);
  table_cmd->add_option("--m-frac", m_frac);
  table_cmd->add_option("--seeds", seeds, "number of trials")->check(CLI::PositiveNumber);
  table_cmd->add_option("--seed", seed, "first trial seed");
  table_cmd->add_option("--out", out_path, "CSV path (default stdout)");
  table_cmd->add_flag("--timing", timing, "append a wall_time column");
  solver_flags.add_to(table_cmd);

  PhaseFlags phase;
  auto* phase_cmd = app.add_subcommand("phase", "rank/sparsity phase-transition grid");
  phase_cmd->add_option("--n", phase.n);
  phase_cmd->add_option("--n3", phase.n3);
  phase_cmd->add_option("--grid", phase.grid, "N or RxC (rows = rho_s, cols = r/n)");
  phase_cmd->add_option("--r-min", phase.r_min);
  phase_cmd->add_option("--r-max", phase.r_max);
  phase_cmd->add_option("--rho-min", phase.rho_min);
  phase_cmd->add_option("--rho-max", phase.rho_max);
  phase_cmd->add_option("--trials", phase.trials)->check(CLI::PositiveNumber);
  phase_cmd->add_option("--seed", phase.seed);
  phase_cmd->add_option("--out", phase.out, "output prefix for _trials.csv and _grid.csv");
  phase_cmd->add_flag("--timing", phase.timing, "append a wall_time column");
  solver_flags.add_to(phase_cmd);

  DenoiseFlags dn;
  auto* denoise_cmd = app.add_subcommand("denoise", "corrupt and recover a PPM/PGM image or a PGM stack directory");
  denoise_cmd->add_option("input", dn.input, "image file or directory of PGM frames")->required();
  denoise_cmd->add_option("--fraction", dn.fraction, "fraction of pixels corrupted per frame/channel");
  denoise_cmd->add_option("--seed", dn.seed);
  denoise_cmd->add_flag("--baseline", dn.baseline, "also run channelwise matrix RPCA");
  denoise_cmd->add_option("--out-dir", dn.out_dir);
  denoise_cmd->add_option("--report", dn.report, "CSV to append to (default <out-dir>/report.csv)");
  solver_flags.add_to(denoise_cmd);

  int count = 10, height = 96, width = 96;
  std::string corpus_dir = "corpus";
  auto* corpus_cmd = app.add_subcommand("corpus", "write procedural color test images");
  corpus_cmd->add_option("--count", count)->check(CLI::PositiveNumber);
  corpus_cmd->add_option("--height", height);
  corpus_cmd->add_option("--width", width);
  corpus_cmd->add_option("--seed", seed);
  corpus_cmd->add_option("--out-dir", corpus_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*tsvd_cmd) return cmd_tsvd(input, tol, as_json);
    if (*solve_cmd) return cmd_solve(input, solver_flags, out_l, out_e, as_json);
    if (*gen_cmd) return cmd_gen(gen);
    if (*table_cmd) return cmd_table1(t_n, t_n3, r_frac, m_frac, seeds, seed, out_path, timing, solver_flags);
    if (*phase_cmd) return cmd_phase(phase, solver_flags);
    if (*denoise_cmd) return cmd_denoise(dn, solver_flags);
    if (*corpus_cmd) return cmd_corpus(count, height, width, seed, corpus_dir);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::out_of_range& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    const bool io = dynamic_cast<const NumericError*>(&e) == nullptr;
    return io ? kExitInput : kExitFailure;
  }
  return kExitFailure;
}
