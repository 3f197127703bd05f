// Thin CLI over the shared C API (sts.h). All behavior lives in the library.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sts.h"

namespace {

struct CommonArgs {
  std::string config;
  std::string out = ".";
  std::vector<std::string> overrides;
  bool has_seed = false;
  uint64_t seed = 0;
};

void add_common(CLI::App* sub, CommonArgs& a, bool config_required) {
  auto* c = sub->add_option("--config", a.config, "JSON config file");
  if (config_required) c->required();
  sub->add_option("--out", a.out, "output directory");
  sub->add_option("--seed", a.seed, "override the config seed")
      ->each([&a](const std::string&) { a.has_seed = true; });
  sub->add_option("--override", a.overrides,
                  "dotted.key=value config override (repeatable)");
}

// Reads the config, applies overrides (seed last), returns 0 and fills
// `json_out` on success; prints a diagnostic and returns 1 otherwise.
int load_config(const CommonArgs& a, std::string& json_out) {
  std::ifstream f(a.config);
  if (!f) {
    std::fprintf(stderr, "sts: cannot read config %s\n", a.config.c_str());
    return 1;
  }
  std::stringstream ss;
  ss << f.rdbuf();
  std::string text = ss.str();

  std::vector<std::string> ovs = a.overrides;
  if (a.has_seed) ovs.push_back("seed=" + std::to_string(a.seed));
  if (ovs.empty()) {
    json_out = text;
    return 0;
  }
  std::vector<const char*> ptrs;
  for (const auto& s : ovs) ptrs.push_back(s.c_str());
  char* merged = sts_config_apply_overrides(text.c_str(), ptrs.data(), ptrs.size());
  if (!merged) {
    std::fprintf(stderr, "sts: %s\n", sts_last_error());
    return 1;
  }
  json_out = merged;
  sts_string_free(merged);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse token selection lab"};
  app.require_subcommand(1);

  CommonArgs train_a, lengthgen_a, fcn_a, heatmap_a;
  auto* train = app.add_subcommand("train", "train the attention model");
  add_common(train, train_a, true);
  auto* lengthgen =
      app.add_subcommand("lengthgen", "fixed vs stochastic PE length generalization");
  add_common(lengthgen, lengthgen_a, true);
  auto* fcn = app.add_subcommand("fcn", "FCN baseline across widths");
  add_common(fcn, fcn_a, true);
  auto* heatmap = app.add_subcommand("heatmap", "parameter heat maps over training");
  add_common(heatmap, heatmap_a, true);

  int ode_T = 20, ode_q = 2, ode_d = 4;
  double ode_eta = 0.05;
  long ode_steps = 10000;
  std::string ode_out = ".";
  auto* ode = app.add_subcommand("ode", "reduced (C, alpha) dynamics");
  ode->add_option("--T", ode_T, "sequence length")->required();
  ode->add_option("--q", ode_q, "subset size")->required();
  ode->add_option("--d", ode_d, "token dimension")->required();
  ode->add_option("--eta", ode_eta, "step size")->required();
  ode->add_option("--steps", ode_steps, "number of updates")->required();
  ode->add_option("--out", ode_out, "output directory");

  std::string suite = "all";
  uint64_t verify_seed = 0;
  auto* verify = app.add_subcommand("verify", "run property suites");
  verify->add_option("suite", suite,
                     "encoding|gradients|reduced|bounds|all (default all)");
  verify->add_option("--seed", verify_seed, "suite RNG seed");

  CLI11_PARSE(app, argc, argv);

  if (*ode) return sts_cmd_ode(ode_T, ode_q, ode_d, ode_eta, ode_steps, ode_out.c_str());
  if (*verify) return sts_cmd_verify(suite.c_str(), verify_seed);

  const CommonArgs& a = *train   ? train_a
                        : *lengthgen ? lengthgen_a
                        : *fcn       ? fcn_a
                                     : heatmap_a;
  std::string json;
  if (int rc = load_config(a, json)) return rc;
  if (*train) return sts_cmd_train(json.c_str(), a.out.c_str());
  if (*lengthgen) return sts_cmd_lengthgen(json.c_str(), a.out.c_str());
  if (*fcn) return sts_cmd_fcn(json.c_str(), a.out.c_str());
  return sts_cmd_heatmap(json.c_str(), a.out.c_str());
}
