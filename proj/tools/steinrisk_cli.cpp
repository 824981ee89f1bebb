// steinrisk: shrinkage factors, minimax certification, the posterior-mean
// identity, the improper-prior divergence probe, and Monte Carlo risk curves.
//
// Exit codes: 0 success, 2 configuration error, 3 domain error,
// 4 a checked property failed.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using namespace steinrisk;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> n_reps;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
  std::optional<int> k;
  std::optional<double> V;
  std::optional<double> y_norm_sq;
  std::optional<double> theta_norm_sq;
  std::vector<double> eps;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "Experiment config (JSON)");
  sub->add_option("--seed", o.seed, "Master seed");
  sub->add_option("--n-reps", o.n_reps, "Monte Carlo replicates per cell");
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--threads", o.threads, "Worker threads (0: all cores)");
  sub->add_option("--k", o.k, "Dimension k");
  sub->add_option("--V", o.V, "Sampling variance V");
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_experiment_config(o.config);
  if (o.k || o.V) {
    if (o.k && *o.k < 1) throw DomainError("--k: must be >= 1");
    if (o.V && !(*o.V > 0.0)) throw DomainError("--V: must be > 0");
    cfg.model = ModelConfig(o.k.value_or(cfg.model.k()), o.V.value_or(cfg.model.V()), cfg.model.A());
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.n_reps) {
    if (*o.n_reps < 2) throw DomainError("--n-reps: must be >= 2");
    cfg.n_reps = *o.n_reps;
  }
  if (o.out) cfg.output_path = *o.out;
  if (o.threads) cfg.threads = *o.threads;
  if (o.theta_norm_sq) cfg.divergence.theta_norm_sq = *o.theta_norm_sq;
  if (!o.eps.empty()) cfg.divergence.eps = o.eps;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shrinkage estimators for the two-level normal means model"};
  app.require_subcommand(1);

  Overrides o;
  auto* shrink = app.add_subcommand("shrink", "Shrink factor, coefficient and g per estimator");
  add_common(shrink, o);
  shrink->add_option("--y-norm-sq", o.y_norm_sq, "|y|^2");

  auto* fig = app.add_subcommand("figure1", "Risk curves for both panels, written as CSV");
  add_common(fig, o);

  auto* minimax = app.add_subcommand("check-minimax", "Baranchik certification per estimator");
  add_common(minimax, o);

  auto* post = app.add_subcommand("posterior-identity", "Two-piece decomposition of E(B | y)");
  add_common(post, o);
  post->add_option("--y-norm-sq", o.y_norm_sq, "|y|^2");

  auto* div = app.add_subcommand("divergence", "Prior mass over (-V, -eps) as eps shrinks");
  add_common(div, o);
  div->add_option("--theta-norm-sq", o.theta_norm_sq, "|theta|^2");
  div->add_option("--eps", o.eps, "Strictly decreasing eps values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitConfig;
  }

  try {
    ExperimentConfig cfg = resolve(o);
    if (o.y_norm_sq) {
      if (shrink->parsed()) {
        cfg.shrink_y.reset();
        cfg.shrink_y_norm_sq = *o.y_norm_sq;
      }
      cfg.posterior_y_norm_sq = *o.y_norm_sq;
    }
    if (shrink->parsed()) return cli::cmd_shrink(cfg, std::cout);
    if (fig->parsed()) return cli::cmd_figure1(cfg, std::cout);
    if (minimax->parsed()) return cli::cmd_check_minimax(cfg, std::cout);
    if (post->parsed()) return cli::cmd_posterior_identity(cfg, std::cout);
    if (div->parsed()) return cli::cmd_divergence(cfg, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return cli::kExitDomain;
  } catch (const SingularInputError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return cli::kExitDomain;
  } catch (const EvaluationError& e) {
    std::cerr << "evaluation error: " << e.what() << '\n';
    return cli::kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return cli::kExitConfig;
}
