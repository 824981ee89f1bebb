#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "commands.hpp"
#include "steinrisk/csv.hpp"
#include "steinrisk/experiment.hpp"

using namespace steinrisk;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

fs::path scratch_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("steinrisk_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Run run_cli(const std::string& args) {
  const auto log = fs::temp_directory_path() / "steinrisk_cli_test_stdout.txt";
  const std::string cmd = std::string(STEINRISK_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kConfigs = STEINRISK_CONFIG_DIR;

}  // namespace

// --- config parsing ------------------------------------------------------

TEST(Config, DefaultsMatchRiskEngine) {
  const auto cfg = parse_experiment_config("{}");
  EXPECT_EQ(cfg.model.k(), 10);
  EXPECT_EQ(cfg.model.V(), 1.0);
  EXPECT_EQ(cfg.n_reps, RiskRunOptions{}.n_reps);
  EXPECT_EQ(cfg.seed, RiskRunOptions{}.seed);
  EXPECT_TRUE(cfg.crn);
  EXPECT_EQ(cfg.theta_grid, theta_range(0.0, 12.0, 0.5));
}

TEST(Config, ParsesAllSections) {
  const auto cfg = parse_experiment_config(R"({
    "model": {"k": 6, "V": 2.5, "A": 1.0},
    "estimators": [{"kind": "ADM", "m": 1.5, "c": 1.2, "name": "adm-a"}, {"kind": "ADM"}, {"kind": "MLE"}],
    "run": {"theta_grid": [0, 1, 2.5], "n_reps": 99, "seed": 18446744073709551615, "crn": false,
            "threads": 3, "output_path": "x"},
    "shrink": {"y": [1, 2, 3, 4, 5, 6]},
    "minimax": {"t_min": 1e-3, "t_max": 1e3, "points": 50},
    "posterior": {"y_norm_sq": 4.5},
    "divergence": {"theta_norm_sq": 2, "eps": [0.1, 0.01], "upper_cuts": [10]}
  })");
  EXPECT_EQ(cfg.model, ModelConfig(6, 2.5, 1.0));
  const auto ests = cfg.build_estimators();
  ASSERT_EQ(ests.size(), 3u);
  EXPECT_EQ(ests[0].name(), "adm-a");
  EXPECT_EQ(*ests[0].adm_params(), AdmParams(1.5, 1.2));
  EXPECT_EQ(*ests[1].adm_params(), AdmParams(2.0, 1.0));  // (k-2)/2
  EXPECT_EQ(cfg.theta_grid, (std::vector<double>{0, 1, 2.5}));
  EXPECT_EQ(cfg.n_reps, 99);
  EXPECT_EQ(cfg.seed, 18446744073709551615ull);
  EXPECT_FALSE(cfg.crn);
  EXPECT_EQ(cfg.threads, 3u);
  EXPECT_EQ(cfg.shrink_y->size(), 6u);
  EXPECT_EQ(cfg.minimax_grid.points, 50);
  EXPECT_EQ(*cfg.posterior_y_norm_sq, 4.5);
  EXPECT_EQ(cfg.divergence.eps, (std::vector<double>{0.1, 0.01}));
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(parse_experiment_config(R"({"modle": {}})"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"model": {"k": 3, "sigma": 1}})"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"estimators": [{"kind": "ADM", "mm": 3}]})"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"run": {"theta_grid": {"start": 0, "stop": 1, "stp": 1}}})"),
               ConfigError);
}

TEST(Config, SyntaxAndTypeErrorsAreConfigErrors) {
  EXPECT_THROW(parse_experiment_config("{"), ConfigError);
  EXPECT_THROW(parse_experiment_config("[]"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"model": {"k": 3.5}})"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"run": {"seed": -1}})"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"estimators": [{"kind": "Stein"}]})"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"estimators": [{"kind": "Custom"}]})"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"estimators": [{"kind": "JamesStein", "m": 2}]})"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"estimators": [{"kind": "MLE", "name": "a,b"}]})"), ConfigError);
}

TEST(Config, DomainErrorsNameTheField) {
  auto message = [](const char* text) {
    try {
      parse_experiment_config(text);
    } catch (const DomainError& e) {
      return std::string(e.what());
    }
    return std::string("no DomainError");
  };
  EXPECT_EQ(message(R"({"model": {"k": 0}})").rfind("model.k", 0), 0u);
  EXPECT_EQ(message(R"({"model": {"V": -1}})").rfind("model.V", 0), 0u);
  EXPECT_EQ(message(R"({"estimators": [{"kind": "ADM", "m": -1}]})").rfind("estimators[0]", 0), 0u);
  EXPECT_EQ(message(R"({"run": {"n_reps": 1}})").rfind("run.n_reps", 0), 0u);
  EXPECT_EQ(message(R"({"run": {"theta_grid": [1, 0.5]}})").rfind("run.theta_grid", 0), 0u);
  EXPECT_EQ(message(R"({"shrink": {"y": [1, 2]}})").rfind("shrink.y", 0), 0u);
}

TEST(Config, ShippedConfigsParse) {
  for (const auto& entry : fs::directory_iterator(kConfigs))
    EXPECT_NO_THROW(load_experiment_config(entry.path().string())) << entry.path();
  EXPECT_THROW(load_experiment_config("/nonexistent/config.json"), ConfigError);
}

// --- CSV -------------------------------------------------------------------

TEST(Csv, RoundTripIsExact) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> ud(0.0, 20.0);
  std::vector<RiskPoint> pts;
  for (int i = 0; i < 300; ++i)
    pts.push_back({"est" + std::to_string(i % 7), ud(rng), ud(rng), ud(rng) * 1e-3,
                   static_cast<std::int64_t>(rng() % 1000000 + 2), rng()});
  std::stringstream ss;
  csv::write_risk_table(ss, pts, {"first comment", "second"});
  const auto table = csv::read_risk_table(ss);
  EXPECT_EQ(table.points, pts);
  EXPECT_EQ(table.comments, (std::vector<std::string>{"first comment", "second"}));
}

TEST(Csv, CurveRoundTrip) {
  const ModelConfig cfg(10, 1.0);
  RiskRunOptions opt;
  opt.n_reps = 500;
  const auto curve = risk_curve(figure1::all_estimators(cfg), {0.0, 2.0, 4.0}, cfg, opt);
  std::stringstream ss;
  csv::write_risk_table(ss, curve.points());
  EXPECT_EQ(csv::read_risk_table(ss).points, curve.points());
}

TEST(Csv, Format) {
  std::stringstream ss;
  csv::write_risk_table(ss, {{"JS", 0.5, 2.0, 0.01, 10, 3}}, {"note"});
  EXPECT_EQ(ss.str(),
            "# note\ntheta_norm,estimator,risk_hat,std_err,n_reps,seed\n"
            "0.5,JS,2,0.01,10,3\n");
  std::stringstream bad("theta,estimator\n");
  EXPECT_THROW(csv::read_risk_table(bad), csv::ParseError);
  std::stringstream short_row(std::string(csv::kRiskHeader) + "\n1,JS,2\n");
  EXPECT_THROW(csv::read_risk_table(short_row), csv::ParseError);
}

// --- commands in-process -----------------------------------------------------

TEST(Commands, Shrink) {
  auto cfg = load_experiment_config(kConfigs + "/shrink.json");
  std::ostringstream out;
  EXPECT_EQ(cli::cmd_shrink(cfg, out), cli::kExitOk);
  const auto text = out.str();
  EXPECT_NE(text.find("JS                                      0.5"), std::string::npos) << text;
  // ADM at T = 8 (frozen mpmath value 0.41230473516044695709).
  EXPECT_NE(text.find("0.4123047352"), std::string::npos) << text;

  cfg.shrink_y_norm_sq = 4.0;
  out.str("");
  cli::cmd_shrink(cfg, out);
  EXPECT_NE(out.str().find("sign reversal"), std::string::npos);
  EXPECT_NE(out.str().find("total shrinkage"), std::string::npos);

  cfg.shrink_y_norm_sq = 0.0;
  EXPECT_THROW(cli::cmd_shrink(cfg, out), SingularInputError);
}

TEST(Commands, ShrinkWithVectorPrintsEstimates) {
  auto cfg = parse_experiment_config(R"({"model": {"k": 3}, "estimators": [{"kind": "MLE"}],
                                          "shrink": {"y": [1, 2, 3]}})");
  std::ostringstream out;
  cli::cmd_shrink(cfg, out);
  EXPECT_NE(out.str().find("delta = 1 2 3"), std::string::npos) << out.str();
}

TEST(Commands, CheckMinimax) {
  auto cfg = load_experiment_config(kConfigs + "/check_minimax.json");
  cfg.output_path = scratch_dir("minimax").string();
  std::ostringstream out;
  EXPECT_EQ(cli::cmd_check_minimax(cfg, out), cli::kExitInvariant);  // includes ADM(m=20)
  const auto csv_text = slurp(fs::path(cfg.output_path) / "minimax.csv");
  EXPECT_EQ(csv_text.rfind(kMinimaxCsvHeader, 0), 0u);
  EXPECT_NE(csv_text.find("ADM:m=20:c=1,10,"), std::string::npos);

  cfg.estimators.pop_back();
  out.str("");
  EXPECT_EQ(cli::cmd_check_minimax(cfg, out), cli::kExitOk);
}

TEST(Commands, PosteriorIdentity) {
  auto cfg = load_experiment_config(kConfigs + "/posterior_identity.json");
  std::ostringstream out;
  EXPECT_EQ(cli::cmd_posterior_identity(cfg, out), cli::kExitOk);
  EXPECT_NE(out.str().find("normalized E(B|y) = 2.16216216216216"), std::string::npos) << out.str();
  cfg.model = ModelConfig(5, 1.0);
  EXPECT_THROW(cli::cmd_posterior_identity(cfg, out), DomainError);
}

TEST(Commands, Divergence) {
  auto cfg = load_experiment_config(kConfigs + "/divergence.json");
  std::ostringstream out;
  EXPECT_EQ(cli::cmd_divergence(cfg, out), cli::kExitOk);
  EXPECT_NE(out.str().find("contrast stabilized"), std::string::npos);
  cfg.divergence.eps = {1e-3, 1e-2};
  EXPECT_THROW(cli::cmd_divergence(cfg, out), DomainError);
}

// --- process level -----------------------------------------------------------

TEST(Process, ExitCodes) {
  const auto dir = scratch_dir("exit");
  EXPECT_EQ(run_cli("shrink --config " + kConfigs + "/shrink.json").code, 0);
  EXPECT_EQ(run_cli("shrink").code, 2);  // no |y|^2 anywhere
  EXPECT_EQ(run_cli("shrink --config /nonexistent.json --y-norm-sq 1").code, 2);
  EXPECT_EQ(run_cli("shrink --config " + write_file(dir / "bad.json", R"({"model": {"kk": 3}})") + " --y-norm-sq 1")
                .code,
            2);
  EXPECT_EQ(run_cli("shrink --config " + write_file(dir / "k0.json", R"({"model": {"k": 0}})") + " --y-norm-sq 1")
                .code,
            3);
  EXPECT_EQ(run_cli("shrink --y-norm-sq 0").code, 3);  // plain JS singular at y = 0
  EXPECT_EQ(run_cli("shrink --y-norm-sq 16 --bogus").code, 2);
  EXPECT_EQ(run_cli("nosuchcommand").code, 2);
  EXPECT_EQ(run_cli("").code, 2);
  EXPECT_EQ(run_cli("--help").code, 0);

  EXPECT_EQ(run_cli("check-minimax --out " + dir.string()).code, 0);
  EXPECT_EQ(run_cli("check-minimax --config " + kConfigs + "/check_minimax.json --out " + dir.string()).code, 4);

  EXPECT_EQ(run_cli("posterior-identity --k 10 --V 1 --y-norm-sq 16").code, 0);
  EXPECT_EQ(run_cli("posterior-identity --k 10 --V 1 --y-norm-sq 8").code, 0);
  const auto odd = run_cli("posterior-identity --k 7 --V 1 --y-norm-sq 8");
  EXPECT_EQ(odd.code, 3);
  EXPECT_NE(odd.out.find("even"), std::string::npos);

  EXPECT_EQ(run_cli("divergence --k 4 --V 1 --theta-norm-sq 1 --eps 1e-2 1e-3 1e-4").code, 0);
  EXPECT_EQ(run_cli("divergence --k 4 --eps 1e-3 1e-2").code, 3);
  EXPECT_EQ(run_cli("divergence --k 5").code, 3);

  EXPECT_EQ(run_cli("figure1 --k 10 --n-reps 1").code, 3);
}

TEST(Process, Figure1IsByteIdenticalAcrossRunsAndThreads) {
  const auto a = scratch_dir("fig_a"), b = scratch_dir("fig_b");
  const std::string common = "figure1 --config " + kConfigs + "/figure1.json --n-reps 20000 --seed 99";
  const auto ra = run_cli(common + " --threads 1 --out " + a.string());
  const auto rb = run_cli(common + " --threads 4 --out " + b.string());
  EXPECT_EQ(ra.code, rb.code);
  for (const char* f : {"left_panel.csv", "right_panel.csv"}) {
    const auto ta = slurp(a / f), tb = slurp(b / f);
    EXPECT_FALSE(ta.empty());
    EXPECT_EQ(ta, tb) << f;
  }
  std::ifstream right(a / "right_panel.csv");
  const auto table = csv::read_risk_table(right);
  EXPECT_EQ(table.points.size(), 25u * 3u);
  bool omitted_note = false;
  for (const auto& c : table.comments) omitted_note = omitted_note || c.find("admissible") != std::string::npos;
  EXPECT_TRUE(omitted_note);
  std::ifstream left(a / "left_panel.csv");
  EXPECT_EQ(csv::read_risk_table(left).points.size(), 25u * 6u);
}
