#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sts/commands.hpp"
#include "sts/io.hpp"
#include "sts/verify.hpp"

using namespace sts;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

size_t line_count(const std::string& text) {
  size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

std::string fresh_dir(const std::string& name) {
  std::string dir = "/tmp/sts_cli_" + name;
  fs::remove_all(dir);
  return dir;
}

const char* kTrainCfg = R"({
  "task": {"T": 8, "q": 2, "d": 2},
  "d_e": 32,
  "pe_threshold": 0.5,
  "pe_policy": "stochastic",
  "eta": 0.5,
  "steps": 20,
  "batch": 32,
  "seed": 7,
  "log_every": 10,
  "eval": {"n_eval": 64}
})";

}  // namespace

TEST_CASE("cmd_ode: artifacts, row counts, exit codes") {
  std::string dir = fresh_dir("ode");
  CHECK(cmd::cmd_ode(10, 2, 3, 0.1, 50, dir) == 0);
  std::string csv = slurp(dir + "/trajectory.csv");
  CHECK(csv.rfind("t,C,alpha,s_plus,loss_closed_form\n", 0) == 0);
  CHECK(line_count(csv) == 52);  // header + 51 rows
  CHECK(fs::exists(dir + "/ode.svg"));
  CHECK(fs::exists(dir + "/manifest.json"));

  std::string dir0 = fresh_dir("ode0");
  CHECK(cmd::cmd_ode(10, 2, 3, 0.1, 0, dir0) == 0);
  CHECK(line_count(slurp(dir0 + "/trajectory.csv")) == 2);

  std::string dirbad = fresh_dir("odebad");
  CHECK(cmd::cmd_ode(4, 7, 3, 0.1, 10, dirbad) == 1);  // q >= T
}

TEST_CASE("cmd_train: success, trace contract, determinism") {
  std::string dir = fresh_dir("train1");
  REQUIRE(cmd::cmd_train(kTrainCfg, dir) == 0);
  std::string trace = slurp(dir + "/trace.csv");
  CHECK(trace.rfind("step,loss,inv_loss,cos_w,cos_v,c_hat,alpha_hat,"
                    "s_plus_hat,offblock_ratio",
                    0) == 0);
  CHECK(line_count(trace) == 4);  // header + rows at t = 0, 10, 20
  CHECK(fs::exists(dir + "/manifest.json"));
  CHECK(fs::exists(dir + "/loss.svg"));
  CHECK(fs::exists(dir + "/inv_loss.svg"));
  CHECK(fs::exists(dir + "/cosines.svg"));
  CHECK(fs::exists(dir + "/checkpoint/W.csv"));
  CHECK(fs::exists(dir + "/checkpoint/V.csv"));
  CHECK(fs::exists(dir + "/checkpoint/header.json"));

  std::string dir2 = fresh_dir("train2");
  REQUIRE(cmd::cmd_train(kTrainCfg, dir2) == 0);
  CHECK(slurp(dir2 + "/trace.csv") == trace);  // byte-identical rerun
}

TEST_CASE("cmd_train: config errors exit 1") {
  std::string dir = fresh_dir("trainbad");
  CHECK(cmd::cmd_train("{not json", dir) == 1);
  CHECK(cmd::cmd_train(R"({"task":{"T":8,"q":2,"d":2},"bogus_key":1})", dir) == 1);
  CHECK(cmd::cmd_train(R"({"task":{"T":8,"q":9,"d":2}})", dir) == 1);
}

TEST_CASE("cmd_train: PE sampling failure exits 2, divergence exits 3") {
  std::string dir = fresh_dir("trainpe");
  const char* pe_cfg = R"({
    "task": {"T": 10, "q": 2, "d": 2},
    "d_e": 16, "pe_threshold": 0.01, "max_attempts": 20,
    "pe_policy": "stochastic", "steps": 5, "batch": 8, "seed": 1
  })";
  CHECK(cmd::cmd_train(pe_cfg, dir) == 2);
  CHECK(fs::exists(dir + "/trace.csv"));  // partial artifacts still written

  std::string dird = fresh_dir("traindiv");
  const char* div_cfg = R"({
    "task": {"T": 10, "q": 2, "d": 4},
    "pe_policy": "onehot",
    "init": {"kind": "gaussian", "sigma": 5.0},
    "eta": 1e8, "steps": 200, "batch": 16, "seed": 5, "log_every": 50
  })";
  CHECK(cmd::cmd_train(div_cfg, dird) == 3);
}

TEST_CASE("cmd_lengthgen: empty T2_list exits 1, twin runs write traces") {
  std::string dirbad = fresh_dir("lgbad");
  CHECK(cmd::cmd_lengthgen(kTrainCfg, dirbad) == 1);

  const char* lg_cfg = R"({
    "task": {"T": 8, "q": 2, "d": 2},
    "d_e": 32, "pe_threshold": 0.5, "pe_policy": "stochastic",
    "eta": 0.5, "steps": 20, "batch": 32, "seed": 7, "log_every": 10,
    "eval": {"n_eval": 64, "T2_list": [10, 12], "T_max": 20}
  })";
  std::string dir = fresh_dir("lg");
  REQUIRE(cmd::cmd_lengthgen(lg_cfg, dir) == 0);
  std::string st = slurp(dir + "/trace_stochastic.csv");
  std::string fx = slurp(dir + "/trace_fixed.csv");
  CHECK(st.find("ood_T10_q2") != std::string::npos);
  CHECK(st.find("ood_T12_q2") != std::string::npos);
  CHECK(fx.find("ood_T10_q2") != std::string::npos);
  CHECK(fs::exists(dir + "/lengthgen_T10.svg"));
  CHECK(fs::exists(dir + "/lengthgen_T12.svg"));
  CHECK(fs::exists(dir + "/lengthgen_summary.csv"));
}

TEST_CASE("cmd_fcn: report and plot for a tiny width sweep") {
  const char* fcn_cfg = R"({
    "task": {"T": 5, "q": 2, "d": 2},
    "seed": 3,
    "fcn": {"widths": [3, 6], "steps": 200, "batch": 32, "eta": 1e-3,
            "n_eval": 2000, "adversarial_count": 2}
  })";
  std::string dir = fresh_dir("fcn");
  REQUIRE(cmd::cmd_fcn(fcn_cfg, dir) == 0);
  std::string rep = slurp(dir + "/fcn_report.json");
  CHECK(rep.find("\"width\": 3") != std::string::npos);
  CHECK(rep.find("\"bound\"") != std::string::npos);
  std::string csv = slurp(dir + "/loss_vs_width.csv");
  CHECK(csv.rfind("width,mc_loss,std_err,bound,applicable,adversarial\n", 0) == 0);
  CHECK(line_count(csv) == 3);
  CHECK(fs::exists(dir + "/fcn.svg"));

  std::string dirbad = fresh_dir("fcnbad");
  CHECK(cmd::cmd_fcn(kTrainCfg, dirbad) == 1);  // missing fcn section
}

TEST_CASE("cmd_heatmap: snapshots rendered") {
  const char* hm_cfg = R"({
    "task": {"T": 6, "q": 2, "d": 3},
    "pe_policy": "onehot",
    "init": {"kind": "gaussian"},
    "eta": 0.5, "steps": 10, "batch": 32, "seed": 2, "log_every": 5,
    "heatmap_snapshots": [0, 5]
  })";
  std::string dir = fresh_dir("hm");
  REQUIRE(cmd::cmd_heatmap(hm_cfg, dir) == 0);
  for (const char* f : {"W_t0.svg", "V_t0.svg", "W_t5.svg", "V_t5.svg",
                        "W_t10.svg", "V_t10.svg"})
    CHECK(fs::exists(dir + "/" + f));
  CHECK(fs::exists(dir + "/checkpoint/W.csv"));
}

TEST_CASE("cmd_verify: passing suite and corrupted negative control") {
  CHECK(cmd::cmd_verify("reduced", 1) == 0);
  CHECK(cmd::cmd_verify("no_such_suite", 1) == 1);
  auto bad = verify::suite_gradients(1, /*corrupt_gradients=*/true);
  CHECK_FALSE(verify::all_pass(bad));
  auto good = verify::suite_gradients(1, false);
  CHECK(verify::all_pass(good));
}

TEST_CASE("trace and trajectory CSVs round-trip losslessly") {
  const char* cfg = R"({
    "task": {"T": 8, "q": 2, "d": 2},
    "d_e": 32, "pe_threshold": 0.5, "pe_policy": "stochastic",
    "eta": 0.5, "steps": 10, "batch": 32, "seed": 11, "log_every": 5,
    "eval": {"n_eval": 64, "T2_list": [10], "T_max": 16}
  })";
  std::string dir = fresh_dir("rt");
  REQUIRE(cmd::cmd_train(cfg, dir) == 0);
  train::TrainTrace tr = io::read_trace_csv(dir + "/trace.csv");
  std::string copy = dir + "/trace_copy.csv";
  io::write_trace_csv(tr, copy);
  CHECK(slurp(copy) == slurp(dir + "/trace.csv"));

  std::string dir2 = fresh_dir("rt2");
  REQUIRE(cmd::cmd_ode(10, 2, 3, 0.1, 20, dir2) == 0);
  auto rows = io::read_trajectory_csv(dir2 + "/trajectory.csv");
  io::write_trajectory_csv(rows, dir2 + "/trajectory_copy.csv");
  CHECK(slurp(dir2 + "/trajectory_copy.csv") == slurp(dir2 + "/trajectory.csv"));
}

TEST_CASE("config overrides") {
  std::string merged = io::apply_overrides(
      kTrainCfg, {"seed=42", "task.T=12", "eval.n_eval=128"});
  io::FullConfig fc = io::parse_config_json(merged);
  CHECK(fc.train.seed == 42);
  CHECK(fc.train.task.T == 12);
  CHECK(fc.train.eval.n_eval == 128);
  CHECK_THROWS_AS(io::apply_overrides(kTrainCfg, {"no_equals_sign"}), Error);
}
