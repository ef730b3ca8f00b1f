// hxd: fit, evaluate and sample AHCE models, run goodness-of-fit tests and
// execute experiment configs.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "hxd/ahce.hpp"
#include "hxd/checks.hpp"
#include "hxd/datagen.hpp"
#include "hxd/experiments.hpp"
#include "hxd/gof.hpp"
#include "hxd/io.hpp"
#include "hxd/parallel.hpp"

namespace {

using namespace hxd;

constexpr int kExitBadInput = 2;
constexpr int kExitOutOfCube = 3;

struct Globals {
  std::uint64_t seed = 0;
  unsigned threads = 0;
  int verbosity = 0;
};

struct DistFlags {
  std::string type = "uniform";
  std::vector<double> a, b;
  int dim = 1;
  double dof = 3.0;
  double shift = 0.2;
  std::string boundary = "clamp";

  void add(CLI::App* cmd, const std::string& prefix) {
    cmd->add_option("--" + prefix, type, "uniform, product-beta, t-mapped or beta-plus-uniform")
        ->check(CLI::IsMember({"uniform", "product-beta", "t-mapped", "beta-plus-uniform"}));
    cmd->add_option("--" + prefix + "-a", a, "Beta a per dimension")->delimiter(',');
    cmd->add_option("--" + prefix + "-b", b, "Beta b per dimension")->delimiter(',');
    cmd->add_option("--" + prefix + "-dim", dim, "dimension of uniform / t-mapped laws");
    cmd->add_option("--" + prefix + "-dof", dof);
    cmd->add_option("--" + prefix + "-shift", shift);
    cmd->add_option("--" + prefix + "-boundary", boundary)->check(CLI::IsMember({"clamp", "truncate"}));
  }

  SyntheticDist build() const {
    SyntheticDist d;
    if (type == "uniform") d = Uniform{dim};
    else if (type == "product-beta") d = ProductBeta{a, b};
    else if (type == "t-mapped") d = StudentTMapped{dof, dim};
    else
      d = BetaPlusUniform{a, b, shift,
                          boundary == "truncate" ? BetaPlusUniform::Boundary::Truncate : BetaPlusUniform::Boundary::Clamp};
    validate(d);
    return d;
  }
};

struct PolicyFlags {
  std::string basis = "fourier";
  std::string policy = "wahba";
  double alpha = 1.0;
  double nu = 0.5;
  double scale_c = 1.0;
  std::optional<double> variance_c;
  std::optional<int> level;

  void add(CLI::App* cmd) {
    cmd->add_option("--basis", basis)->check(CLI::IsMember({"fourier", "haar", "wavelet"}));
    cmd->add_option("--policy", policy)->check(CLI::IsMember({"wahba", "truncation-fourier", "truncation-wavelet"}));
    cmd->add_option("--alpha", alpha, "smoothness");
    cmd->add_option("--nu", nu, "log exponent of the truncation rules");
    cmd->add_option("--scale-c", scale_c, "truncation constant");
    cmd->add_option("--variance-c", variance_c, "Wahba constant; per-index sample variance when absent");
    cmd->add_option("--level", level, "Wahba level cap");
  }

  SmoothingPolicy build() const {
    if (policy == "truncation-fourier") return TruncationFourier{alpha, nu, scale_c};
    if (policy == "truncation-wavelet") return TruncationWavelet{alpha, nu, scale_c};
    return Wahba{alpha, variance_c, level};
  }
};

SampleMatrix read_samples(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_samples_csv(in);
}

std::string samples_text(const SampleMatrix& s) {
  std::ostringstream out;
  write_samples_csv(out, s);
  return out.str();
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") std::cout << content << std::flush;
  else write_file_atomic(path, content);
}

unsigned threads_from_env() {
  if (const char* env = std::getenv("HXD_THREADS")) {
    try {
      return static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      throw std::invalid_argument("HXD_THREADS must be a non-negative integer");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive hyperbolic cross density estimation and goodness-of-fit testing"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::optional<unsigned> threads_flag;
  app.add_option("--seed", g.seed, "master seed for every random stream");
  app.add_option("--threads", threads_flag, "worker threads (default: HXD_THREADS, then all cores)");
  app.add_flag("-v,--verbose", g.verbosity, "log progress to stderr");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "fit an AHCE model to a CSV sample");
  std::string fit_in, fit_out;
  PolicyFlags fit_policy;
  fit_cmd->add_option("--input", fit_in, "headerless CSV, one point per row")->required();
  fit_cmd->add_option("--out", fit_out, "model path (table CSV; metadata at <out>.json)")->required();
  fit_policy.add(fit_cmd);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a fitted model at points");
  std::string eval_model, eval_points, eval_out;
  eval_cmd->add_option("--model", eval_model)->required();
  eval_cmd->add_option("--points", eval_points, "headerless CSV of points in [0,1]^D")->required();
  eval_cmd->add_option("--out", eval_out, "output file; stdout when absent");

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "draw from a fitted model");
  std::string sample_model, sample_out;
  std::size_t sample_n = 0;
  sample_cmd->add_option("--model", sample_model)->required();
  sample_cmd->add_option("-n,--count", sample_n)->required()->check(CLI::PositiveNumber);
  sample_cmd->add_option("--out", sample_out, "output file; stdout when absent");

  // draw
  auto* draw_cmd = app.add_subcommand("draw", "draw from a synthetic law");
  DistFlags draw_dist;
  std::size_t draw_n = 0;
  std::string draw_out;
  draw_dist.add(draw_cmd, "dist");
  draw_cmd->add_option("-n,--count", draw_n)->required()->check(CLI::PositiveNumber);
  draw_cmd->add_option("--out", draw_out, "output file; stdout when absent");

  // gof
  auto* gof_cmd = app.add_subcommand("gof", "test a sample against a product null density");
  std::string gof_in, gof_out;
  DistFlags gof_null;
  GofConfig gof_cfg;
  std::string gof_basis = "haar";
  std::optional<int> gof_level_flag;
  gof_cmd->add_option("--input", gof_in)->required();
  gof_null.add(gof_cmd, "null");
  gof_cmd->add_option("--basis", gof_basis)->check(CLI::IsMember({"fourier", "haar", "wavelet"}));
  gof_cmd->add_option("--level", gof_level_flag, "kernel level; automatic from --alpha when absent");
  gof_cmd->add_option("--alpha", gof_cfg.alpha, "smoothness used by the automatic level");
  gof_cmd->add_option("-B,--bootstrap", gof_cfg.bootstrap_reps)->check(CLI::PositiveNumber);
  gof_cmd->add_option("--significance", gof_cfg.significance)->check(CLI::Range(0.0, 1.0));
  gof_cmd->add_flag("--center-bootstrap", gof_cfg.center_bootstrap);
  gof_cmd->add_option("--out", gof_out, "also write the CSV row to this file");

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "run an experiment config");
  std::string exp_config, exp_dir = ".";
  exp_cmd->add_option("--config", exp_config)->required();
  exp_cmd->add_option("--out-dir", exp_dir, "directory for <id>_rows.csv, <id>_plot.csv, <id>_summary.txt");

  // selfcheck
  auto* check_cmd = app.add_subcommand("selfcheck", "run the fast invariant battery");
  bool corrupt = false;
  check_cmd->add_flag("--corrupt-layout", corrupt, "test fixture: scramble the coefficient layout")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  auto log = [&](const std::string& msg) {
    if (g.verbosity > 0) std::cerr << "hxd: " << msg << '\n';
  };

  try {
    g.threads = threads_flag ? *threads_flag : threads_from_env();
    set_thread_count(g.threads);

    if (*fit_cmd) {
      const auto samples = read_samples(fit_in);
      log("read " + std::to_string(samples.rows()) + " points");
      const auto model = fit(samples, basis_from_string(fit_policy.basis), fit_policy.build());
      save_model(model, fit_out);
      std::cout << "n,D,l,coefficients\n"
                << model.n() << ',' << model.dim() << ',' << model.level() << ',' << model.cross().size() << '\n';
    } else if (*eval_cmd) {
      const auto model = load_model(eval_model);
      const auto points = read_samples(eval_points);
      if (points.dim() != static_cast<std::size_t>(model.dim()))
        throw std::invalid_argument("points have " + std::to_string(points.dim()) + " columns, model has D = " +
                                    std::to_string(model.dim()));
      std::string text;
      for (double v : evaluate_many(model, points)) text += format_double(v) + '\n';
      emit(eval_out, text);
    } else if (*sample_cmd) {
      const auto model = load_model(sample_model);
      emit(sample_out, samples_text(sample(model, sample_n, g.seed)));
    } else if (*draw_cmd) {
      emit(draw_out, samples_text(draw(draw_dist.build(), draw_n, g.seed)));
    } else if (*gof_cmd) {
      const auto samples = read_samples(gof_in);
      const auto null = gof_null.build();
      if (dist_dim(null) != static_cast<int>(samples.dim()))
        throw std::invalid_argument("null dimension does not match the sample's column count");
      gof_cfg.basis = basis_from_string(gof_basis);
      gof_cfg.seed = g.seed;
      const int level = gof_level_flag ? *gof_level_flag : gof_level(gof_cfg, samples.rows(), static_cast<int>(samples.dim()));
      gof_cfg.level = level;
      log("kernel level " + std::to_string(level));
      const auto run = run_test(samples, null_density_for(null, gof_cfg.basis, level), gof_cfg);
      const std::string text = gof_csv_header() + '\n' + gof_csv_row(run) + '\n';
      std::cout << text;
      if (!gof_out.empty()) write_file_atomic(gof_out, text);
      return run.reject ? 1 : 0;
    } else if (*exp_cmd) {
      auto spec = load_experiment_spec(exp_config);
      if (app.count("--seed") > 0) spec.seed = g.seed;
      log("running " + to_string(spec.kind) + " experiment '" + spec.id + "'");
      const auto result = run_experiment(spec);
      const std::filesystem::path dir(exp_dir);
      std::filesystem::create_directories(dir);
      write_file_atomic((dir / (spec.id + "_rows.csv")).string(), rows_csv(result.rows));
      write_file_atomic((dir / (spec.id + "_plot.csv")).string(), plot_series_csv(result.rows));
      const std::string summary = summary_text(spec, result);
      write_file_atomic((dir / (spec.id + "_summary.txt")).string(), summary);
      std::cout << summary;
    } else if (*check_cmd) {
      SelfcheckOptions opts;
      opts.seed = g.seed == 0 ? 1 : g.seed;
      opts.corrupt_layout = corrupt;
      bool all = true;
      for (const auto& r : run_selfcheck(opts)) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        all = all && r.pass;
      }
      return all ? 0 : 1;
    }
  } catch (const OutOfCubeError& e) {
    std::cerr << "hxd: " << e.what() << '\n';
    return kExitOutOfCube;
  } catch (const std::exception& e) {
    std::cerr << "hxd: " << e.what() << '\n';
    return kExitBadInput;
  }
  return 0;
}
