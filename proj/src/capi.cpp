#include "sts.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "sts/commands.hpp"
#include "sts/encoding.hpp"
#include "sts/error.hpp"
#include "sts/io.hpp"
#include "sts/reduced.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const char* msg) { g_last_error = msg ? msg : "unknown error"; }

// Runs f, captures any exception into the thread-local error slot, and
// returns fallback on failure.
template <typename F>
auto guarded(F&& f, decltype(f()) fallback) -> decltype(f()) {
  try {
    g_last_error.clear();
    return f();
  } catch (const std::exception& e) {
    set_error(e.what());
  } catch (...) {
    set_error("unknown error");
  }
  return fallback;
}

}  // namespace

struct sts_trajectory {
  std::vector<sts::reduced::TrajectoryRow> rows;
};

struct sts_encoding {
  sts::pe::PosEncoding pe;
};

extern "C" {

const char* sts_last_error(void) { return g_last_error.c_str(); }

int sts_cmd_train(const char* config_json, const char* out_dir) {
  return guarded(
      [&] { return sts::cmd::cmd_train(config_json ? config_json : "",
                                       out_dir ? out_dir : "."); },
      1);
}

int sts_cmd_ode(int T, int q, int d, double eta, long steps, const char* out_dir) {
  return guarded(
      [&] { return sts::cmd::cmd_ode(T, q, d, eta, steps,
                                     out_dir ? out_dir : "."); },
      1);
}

int sts_cmd_lengthgen(const char* config_json, const char* out_dir) {
  return guarded(
      [&] { return sts::cmd::cmd_lengthgen(config_json ? config_json : "",
                                           out_dir ? out_dir : "."); },
      1);
}

int sts_cmd_fcn(const char* config_json, const char* out_dir) {
  return guarded(
      [&] { return sts::cmd::cmd_fcn(config_json ? config_json : "",
                                     out_dir ? out_dir : "."); },
      1);
}

int sts_cmd_verify(const char* suite, uint64_t seed) {
  return guarded(
      [&] { return sts::cmd::cmd_verify(suite ? suite : "all", seed); }, 1);
}

int sts_cmd_heatmap(const char* config_json, const char* out_dir) {
  return guarded(
      [&] { return sts::cmd::cmd_heatmap(config_json ? config_json : "",
                                         out_dir ? out_dir : "."); },
      1);
}

char* sts_config_apply_overrides(const char* config_json,
                                 const char* const* overrides, size_t n) {
  return guarded(
      [&]() -> char* {
        std::vector<std::string> ovs;
        for (size_t i = 0; i < n; ++i)
          ovs.emplace_back(overrides[i] ? overrides[i] : "");
        std::string out = sts::io::apply_overrides(
            config_json ? config_json : "", ovs);
        char* buf = static_cast<char*>(std::malloc(out.size() + 1));
        if (!buf) throw std::bad_alloc();
        std::memcpy(buf, out.c_str(), out.size() + 1);
        return buf;
      },
      nullptr);
}

void sts_string_free(char* s) { std::free(s); }

sts_trajectory* sts_reduced_simulate(int T, int q, int d, double eta, long steps) {
  return guarded(
      [&]() -> sts_trajectory* {
        return new sts_trajectory{
            sts::reduced::simulate_onehot(T, q, d, eta, steps)};
      },
      nullptr);
}

long sts_trajectory_rows(const sts_trajectory* tr) {
  return tr ? static_cast<long>(tr->rows.size()) : 0;
}

int sts_trajectory_row(const sts_trajectory* tr, long i, double out[5]) {
  if (!tr || !out || i < 0 || i >= static_cast<long>(tr->rows.size())) {
    set_error("trajectory row out of range");
    return 1;
  }
  const auto& r = tr->rows[static_cast<size_t>(i)];
  out[0] = static_cast<double>(r.t);
  out[1] = r.C;
  out[2] = r.alpha;
  out[3] = r.s_plus;
  out[4] = r.loss;
  return 0;
}

int sts_trajectory_write_csv(const sts_trajectory* tr, const char* path) {
  if (!tr || !path) {
    set_error("null trajectory or path");
    return 1;
  }
  return guarded(
      [&] {
        sts::io::write_trajectory_csv(tr->rows, path);
        return 0;
      },
      1);
}

void sts_trajectory_free(sts_trajectory* tr) { delete tr; }

sts_encoding* sts_encoding_one_hot(int T) {
  return guarded(
      [&]() -> sts_encoding* {
        return new sts_encoding{sts::pe::one_hot_pe(T)};
      },
      nullptr);
}

sts_encoding* sts_encoding_sample(uint64_t seed, int d_e, int T, int q,
                                  double delta, int exact_mode,
                                  int max_attempts) {
  return guarded(
      [&]() -> sts_encoding* {
        sts::num::RngStream rng = sts::num::RngStream::from(seed, "pe.capi");
        auto mode = exact_mode ? sts::pe::RipMode::Exact
                               : sts::pe::RipMode::Pairwise;
        return new sts_encoding{
            sts::pe::sample_rip_pe(rng, d_e, T, q, delta, mode, max_attempts)};
      },
      nullptr);
}

int sts_encoding_dims(const sts_encoding* e, int* d_e, int* T) {
  if (!e) {
    set_error("null encoding");
    return 1;
  }
  if (d_e) *d_e = e->pe.d_e;
  if (T) *T = e->pe.T;
  return 0;
}

double sts_encoding_coherence(const sts_encoding* e) {
  if (!e) {
    set_error("null encoding");
    return std::nan("");
  }
  return guarded([&] { return sts::pe::measure_coherence(e->pe.E); },
                 std::nan(""));
}

double sts_encoding_entry(const sts_encoding* e, int i, int j) {
  if (!e || i < 0 || i >= e->pe.E.rows || j < 0 || j >= e->pe.E.cols) {
    set_error("encoding entry out of range");
    return std::nan("");
  }
  return e->pe.E.at(i, j);
}

int sts_encoding_export_csv(const sts_encoding* e, const char* path) {
  if (!e || !path) {
    set_error("null encoding or path");
    return 1;
  }
  return guarded(
      [&] {
        sts::pe::export_csv(e->pe, path);
        return 0;
      },
      1);
}

void sts_encoding_free(sts_encoding* e) { delete e; }

}  // extern "C"
