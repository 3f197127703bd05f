#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sts.h"

namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string fresh_dir(const std::string& name) {
  std::string dir = "/tmp/sts_capi_" + name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("trajectory handle lifecycle") {
  sts_trajectory* tr = sts_reduced_simulate(10, 2, 3, 0.1, 100);
  REQUIRE(tr != nullptr);
  CHECK(sts_trajectory_rows(tr) == 101);
  double row[5];
  REQUIRE(sts_trajectory_row(tr, 0, row) == 0);
  CHECK(row[0] == 0.0);
  CHECK(row[1] == 0.0);  // C
  CHECK(row[2] == 0.0);  // alpha
  CHECK(row[3] == doctest::Approx(0.1).epsilon(1e-14));  // s_plus = 1/T
  CHECK(sts_trajectory_row(tr, 500, row) != 0);
  CHECK(std::strlen(sts_last_error()) > 0);

  std::string path = "/tmp/sts_capi_traj.csv";
  CHECK(sts_trajectory_write_csv(tr, path.c_str()) == 0);
  CHECK(slurp(path).rfind("t,C,alpha,s_plus,loss_closed_form\n", 0) == 0);
  sts_trajectory_free(tr);
  fs::remove(path);

  CHECK(sts_reduced_simulate(4, 9, 3, 0.1, 10) == nullptr);  // q >= T
  CHECK(std::strlen(sts_last_error()) > 0);
}

TEST_CASE("encoding handle lifecycle") {
  sts_encoding* oh = sts_encoding_one_hot(5);
  REQUIRE(oh != nullptr);
  int d_e = 0, T = 0;
  CHECK(sts_encoding_dims(oh, &d_e, &T) == 0);
  CHECK(d_e == 5);
  CHECK(T == 5);
  CHECK(sts_encoding_coherence(oh) == 0.0);
  CHECK(sts_encoding_entry(oh, 2, 2) == 1.0);
  CHECK(sts_encoding_entry(oh, 0, 2) == 0.0);
  CHECK(std::isnan(sts_encoding_entry(oh, 9, 9)));
  sts_encoding_free(oh);

  sts_encoding* pe = sts_encoding_sample(7, 128, 10, 2, 0.5, 0, 1000);
  REQUIRE(pe != nullptr);
  CHECK(sts_encoding_dims(pe, &d_e, &T) == 0);
  CHECK(d_e == 128);
  CHECK(T == 10);
  CHECK(sts_encoding_coherence(pe) <= 0.5);
  std::string path = "/tmp/sts_capi_pe.csv";
  CHECK(sts_encoding_export_csv(pe, path.c_str()) == 0);
  CHECK(slurp(path).rfind("d_e,T,kind,delta\n", 0) == 0);
  sts_encoding_free(pe);
  fs::remove(path);

  CHECK(sts_encoding_sample(7, 16, 10, 2, 0.01, 0, 20) == nullptr);
  CHECK(std::strlen(sts_last_error()) > 0);
}

TEST_CASE("override plumbing") {
  const char* base = R"({"task":{"T":8,"q":2,"d":2},"seed":1})";
  const char* ovs[] = {"seed=99", "task.T=10"};
  char* merged = sts_config_apply_overrides(base, ovs, 2);
  REQUIRE(merged != nullptr);
  std::string m = merged;
  sts_string_free(merged);
  CHECK(m.find("99") != std::string::npos);
  CHECK(m.find("10") != std::string::npos);

  CHECK(sts_config_apply_overrides("{bad", ovs, 2) == nullptr);
}

TEST_CASE("commands through the C surface: determinism end to end") {
  const char* cfg = R"({
    "task": {"T": 8, "q": 2, "d": 2},
    "d_e": 32, "pe_threshold": 0.5, "pe_policy": "stochastic",
    "eta": 0.5, "steps": 20, "batch": 32, "seed": 7, "log_every": 10,
    "eval": {"n_eval": 64}
  })";
  std::string d1 = fresh_dir("t1"), d2 = fresh_dir("t2");
  REQUIRE(sts_cmd_train(cfg, d1.c_str()) == 0);
  REQUIRE(sts_cmd_train(cfg, d2.c_str()) == 0);
  CHECK(slurp(d1 + "/trace.csv") == slurp(d2 + "/trace.csv"));
  CHECK(slurp(d1 + "/checkpoint/W.csv") == slurp(d2 + "/checkpoint/W.csv"));
  CHECK(slurp(d1 + "/checkpoint/V.csv") == slurp(d2 + "/checkpoint/V.csv"));

  std::string od = fresh_dir("ode");
  CHECK(sts_cmd_ode(10, 2, 3, 0.1, 25, od.c_str()) == 0);
  CHECK(fs::exists(od + "/trajectory.csv"));

  CHECK(sts_cmd_train("{bad json", fresh_dir("bad").c_str()) == 1);
  CHECK(sts_cmd_verify("no_such_suite", 0) == 1);
}
