#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sts/fcn.hpp"
#include "sts/reduced.hpp"
#include "sts/trainer.hpp"

namespace sts::io {

// ---- CSV ----------------------------------------------------------------

void write_mat_csv(const num::Mat& m, const std::string& path);
num::Mat read_mat_csv(const std::string& path);

// Trace CSV: header
// step,loss,inv_loss,cos_w,cos_v,c_hat,alpha_hat,s_plus_hat,offblock_ratio
// followed by one ood_T{T2}_q{q2} column per OOD key.
void write_trace_csv(const train::TrainTrace& trace, const std::string& path);
train::TrainTrace read_trace_csv(const std::string& path);

// Reduced trajectory CSV: t,C,alpha,s_plus,loss_closed_form.
void write_trajectory_csv(const std::vector<reduced::TrajectoryRow>& rows,
                          const std::string& path);
std::vector<reduced::TrajectoryRow> read_trajectory_csv(const std::string& path);

// Checkpoint: <dir>/W.csv, <dir>/V.csv, <dir>/header.json.
void save_checkpoint(const model::ModelParams& p, pe::PeKind kind, long step,
                     const std::string& dir);
model::ModelParams load_checkpoint(const std::string& dir,
                                   pe::PeKind* kind = nullptr,
                                   long* step = nullptr);

// ---- SVG ----------------------------------------------------------------

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

void write_line_svg(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<Series>& series, bool log_y = false);

void write_heatmap_svg(const std::string& path, const std::string& title,
                       const num::Mat& m);

// ---- Config -------------------------------------------------------------

struct FcnCmdConfig {
  std::vector<int> widths;
  long steps = 10000;
  int batch = 128;
  double eta = 1e-3;
  bool adam = true;
  long n_eval = 100000;
  int adversarial_count = 20;
  std::string transformer_ref;  // optional checkpoint dir for reference line
};

struct FullConfig {
  train::TrainConfig train;
  std::optional<FcnCmdConfig> fcn;
  std::vector<long> heatmap_snapshots = {0, 100, 500};
};

// Parse a JSON config. Unknown keys anywhere are a hard Config error.
FullConfig parse_config_json(const std::string& text);
FullConfig parse_config_file(const std::string& path);

// Apply "--override dotted.key=value" assignments to raw JSON text.
std::string apply_overrides(const std::string& text,
                            const std::vector<std::string>& overrides);

std::string config_to_json(const FullConfig& cfg);

// Run manifest, written before any long computation.
void write_manifest(const std::string& dir, const std::string& command,
                    const std::string& config_json, uint64_t seed,
                    const std::vector<std::string>& outputs);

void ensure_dir(const std::string& dir);

}  // namespace sts::io
