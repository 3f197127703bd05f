#include "sts/io.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sts/format.hpp"

namespace sts::io {

using nlohmann::json;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create directory " + dir);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::Io, "cannot open for writing: " + path);
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::Io, "cannot open for reading: " + path);
  return f;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

}  // namespace

void write_mat_csv(const num::Mat& m, const std::string& path) {
  auto f = open_out(path);
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) {
      if (j) f << ",";
      f << fmt_g17(m.at(i, j));
    }
    f << "\n";
  }
}

num::Mat read_mat_csv(const std::string& path) {
  auto f = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto toks = split_csv(line);
    std::vector<double> r;
    r.reserve(toks.size());
    for (auto& t : toks) r.push_back(std::stod(t));
    rows.push_back(std::move(r));
  }
  if (rows.empty()) fail(ErrorCode::Io, "empty matrix CSV: " + path);
  num::Mat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      fail(ErrorCode::Io, "ragged matrix CSV: " + path);
    for (size_t j = 0; j < rows[i].size(); ++j)
      m.at(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
  }
  return m;
}

void write_trace_csv(const train::TrainTrace& trace, const std::string& path) {
  auto f = open_out(path);
  f << "step,loss,inv_loss,cos_w,cos_v,c_hat,alpha_hat,s_plus_hat,offblock_ratio";
  for (auto [T2, q2] : trace.ood_keys) f << ",ood_T" << T2 << "_q" << q2;
  f << "\n";
  for (const auto& r : trace.rows) {
    f << r.step << "," << fmt_g17(r.loss) << "," << fmt_g17(r.inv_loss) << ","
      << fmt_g17(r.cos_w) << "," << fmt_g17(r.cos_v) << "," << fmt_g17(r.C_hat)
      << "," << fmt_g17(r.alpha_hat) << "," << fmt_g17(r.s_plus_hat) << ","
      << fmt_g17(r.offblock_ratio);
    for (double o : r.ood) f << "," << fmt_g17(o);
    f << "\n";
  }
}

train::TrainTrace read_trace_csv(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line)) fail(ErrorCode::Io, "empty trace CSV: " + path);
  auto header = split_csv(line);
  train::TrainTrace trace;
  for (size_t i = 9; i < header.size(); ++i) {
    int T2 = 0, q2 = 0;
    if (std::sscanf(header[i].c_str(), "ood_T%d_q%d", &T2, &q2) != 2)
      fail(ErrorCode::Io, "bad trace header column: " + header[i]);
    trace.ood_keys.emplace_back(T2, q2);
  }
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto toks = split_csv(line);
    if (toks.size() != header.size())
      fail(ErrorCode::Io, "ragged trace CSV: " + path);
    train::TraceRow r;
    r.step = std::stol(toks[0]);
    r.loss = std::stod(toks[1]);
    r.inv_loss = std::stod(toks[2]);
    r.cos_w = std::stod(toks[3]);
    r.cos_v = std::stod(toks[4]);
    r.C_hat = std::stod(toks[5]);
    r.alpha_hat = std::stod(toks[6]);
    r.s_plus_hat = std::stod(toks[7]);
    r.offblock_ratio = std::stod(toks[8]);
    for (size_t i = 9; i < toks.size(); ++i) r.ood.push_back(std::stod(toks[i]));
    trace.rows.push_back(std::move(r));
  }
  return trace;
}

void write_trajectory_csv(const std::vector<reduced::TrajectoryRow>& rows,
                          const std::string& path) {
  auto f = open_out(path);
  f << "t,C,alpha,s_plus,loss_closed_form\n";
  for (const auto& r : rows)
    f << r.t << "," << fmt_g17(r.C) << "," << fmt_g17(r.alpha) << ","
      << fmt_g17(r.s_plus) << "," << fmt_g17(r.loss) << "\n";
}

std::vector<reduced::TrajectoryRow> read_trajectory_csv(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line) || line != "t,C,alpha,s_plus,loss_closed_form")
    fail(ErrorCode::Io, "bad trajectory header: " + path);
  std::vector<reduced::TrajectoryRow> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto toks = split_csv(line);
    if (toks.size() != 5) fail(ErrorCode::Io, "ragged trajectory CSV: " + path);
    rows.push_back({std::stol(toks[0]), std::stod(toks[1]), std::stod(toks[2]),
                    std::stod(toks[3]), std::stod(toks[4])});
  }
  return rows;
}

void save_checkpoint(const model::ModelParams& p, pe::PeKind kind, long step,
                     const std::string& dir) {
  ensure_dir(dir);
  write_mat_csv(p.W, dir + "/W.csv");
  write_mat_csv(p.V, dir + "/V.csv");
  json h;
  h["d"] = p.d;
  h["d_e"] = p.d_e;
  h["pe_kind"] = (kind == pe::PeKind::OneHot) ? "onehot" : "rademacher";
  h["step"] = step;
  open_out(dir + "/header.json") << h.dump(2) << "\n";
}

model::ModelParams load_checkpoint(const std::string& dir, pe::PeKind* kind,
                                   long* step) {
  json h = json::parse(open_in(dir + "/header.json"));
  model::ModelParams p;
  p.d = h.at("d").get<int>();
  p.d_e = h.at("d_e").get<int>();
  p.W = read_mat_csv(dir + "/W.csv");
  p.V = read_mat_csv(dir + "/V.csv");
  if (p.W.rows != p.d + p.d_e || p.V.rows != p.d)
    fail(ErrorCode::Io, "checkpoint shape mismatch in " + dir);
  if (kind)
    *kind = h.at("pe_kind").get<std::string>() == "onehot" ? pe::PeKind::OneHot
                                                           : pe::PeKind::Rademacher;
  if (step) *step = h.at("step").get<long>();
  return p;
}

// ---- SVG ----------------------------------------------------------------

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

double nice_transform(double v, bool log_y) {
  if (!log_y) return v;
  return std::log10(std::max(v, 1e-300));
}

}  // namespace

void write_line_svg(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<Series>& series, bool log_y) {
  const int W = 720, H = 480, ml = 80, mr = 140, mt = 50, mb = 60;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      double y = nice_transform(s.y[i], log_y);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
  }
  if (ymin > ymax) {
    ymin = 0;
    ymax = 1;
  }
  if (xmax - xmin < 1e-12) xmax = xmin + 1;
  if (ymax - ymin < 1e-12) ymax = ymin + 1;

  auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr);
  };
  auto py = [&](double yv) {
    return H - mb - (yv - ymin) / (ymax - ymin) * (H - mt - mb);
  };

  auto f = open_out(path);
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
    << "\" height=\"" << H << "\">\n";
  f << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  f << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
    << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
  // axes
  f << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
    << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  f << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
    << H - mb << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    double xv = xmin + (xmax - xmin) * k / 5.0;
    double yv = ymin + (ymax - ymin) * k / 5.0;
    f << "<text x=\"" << px(xv) << "\" y=\"" << H - mb + 18
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << fmt_g17(std::round(xv * 100) / 100) << "</text>\n";
    std::string ylab = log_y ? ("1e" + fmt_g17(std::round(yv * 10) / 10))
                             : fmt_g17(std::round(yv * 1000) / 1000);
    f << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << ylab << "</text>\n";
  }
  f << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 14
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
    << xlabel << "</text>\n";
  f << "<text x=\"20\" y=\"" << (mt + H - mb) / 2
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
    << "transform=\"rotate(-90 20 " << (mt + H - mb) / 2 << ")\">"
    << (log_y ? ylabel + " (log10)" : ylabel) << "</text>\n";

  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % 8];
    f << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < s.x.size(); ++i)
      f << px(s.x[i]) << "," << py(nice_transform(s.y[i], log_y)) << " ";
    f << "\"/>\n";
    double ly = mt + 18.0 * (si + 1);
    f << "<line x1=\"" << W - mr + 10 << "\" y1=\"" << ly << "\" x2=\""
      << W - mr + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    f << "<text x=\"" << W - mr + 40 << "\" y=\"" << ly + 4
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name << "</text>\n";
  }
  f << "</svg>\n";
}

void write_heatmap_svg(const std::string& path, const std::string& title,
                       const num::Mat& m) {
  double amax = 1e-12;
  for (double x : m.a) amax = std::max(amax, std::abs(x));
  const int cell = std::max(4, 360 / std::max(m.rows, m.cols));
  const int ml = 40, mt = 50;
  int W = ml + m.cols * cell + 40, H = mt + m.rows * cell + 40;
  auto f = open_out(path);
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
    << "\" height=\"" << H << "\">\n";
  f << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  f << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
    << "font-family=\"sans-serif\" font-size=\"15\">" << title
    << " (|max|=" << fmt_g17(std::round(amax * 1000) / 1000) << ")</text>\n";
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) {
      double v = m.at(i, j) / amax;  // [-1, 1]
      int r, g, b;
      if (v >= 0) {  // white -> red
        r = 255;
        g = b = static_cast<int>(255 * (1.0 - v));
      } else {  // white -> blue
        b = 255;
        r = g = static_cast<int>(255 * (1.0 + v));
      }
      f << "<rect x=\"" << ml + j * cell << "\" y=\"" << mt + i * cell
        << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb("
        << r << "," << g << "," << b << ")\"/>\n";
    }
  }
  f << "</svg>\n";
}

// ---- Config -------------------------------------------------------------

namespace {

void check_keys(const json& j, const std::string& path,
                const std::vector<std::string>& allowed) {
  if (!j.is_object()) fail(ErrorCode::Config, "config: " + path + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok)
      fail(ErrorCode::Config, "config: unknown key '" + path + it.key() + "'");
  }
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

FullConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::Config, std::string("config: invalid JSON: ") + e.what());
  }

  check_keys(j, "", {"task", "d_e", "delta", "pe_threshold", "rip_mode",
                     "max_attempts", "pe_policy", "estimator", "optimizer",
                     "eta", "anneal", "steps", "batch", "init", "seed",
                     "x_query", "log_every", "eval", "fcn", "heatmap_snapshots"});

  FullConfig fc;
  train::TrainConfig& c = fc.train;

  if (!j.contains("task")) fail(ErrorCode::Config, "config: missing 'task'");
  check_keys(j["task"], "task.", {"T", "q", "d"});
  c.task.T = j["task"].at("T").get<int>();
  c.task.q = j["task"].at("q").get<int>();
  c.task.d = j["task"].at("d").get<int>();

  get_if(j, "d_e", c.d_e);
  get_if(j, "delta", c.delta);
  get_if(j, "pe_threshold", c.pe_threshold);
  if (j.contains("rip_mode")) {
    std::string m = j["rip_mode"].get<std::string>();
    if (m == "pairwise")
      c.rip_mode = pe::RipMode::Pairwise;
    else if (m == "exact")
      c.rip_mode = pe::RipMode::Exact;
    else
      fail(ErrorCode::Config, "config: rip_mode must be 'pairwise' or 'exact'");
  }
  get_if(j, "max_attempts", c.max_attempts);

  if (j.contains("pe_policy")) {
    std::string p = j["pe_policy"].get<std::string>();
    if (p == "onehot")
      c.pe_policy = train::PePolicyKind::OneHot;
    else if (p == "fixed")
      c.pe_policy = train::PePolicyKind::FixedRademacher;
    else if (p == "stochastic")
      c.pe_policy = train::PePolicyKind::Stochastic;
    else
      fail(ErrorCode::Config,
           "config: pe_policy must be 'onehot', 'fixed' or 'stochastic'");
  }

  if (j.contains("estimator")) {
    check_keys(j["estimator"], "estimator.", {"kind", "n_outer", "n_inner"});
    std::string k = j["estimator"].at("kind").get<std::string>();
    if (k == "surrogate") {
      c.nested = false;
    } else if (k == "nested") {
      c.nested = true;
      get_if(j["estimator"], "n_outer", c.n_outer);
      get_if(j["estimator"], "n_inner", c.n_inner);
    } else {
      fail(ErrorCode::Config, "config: estimator.kind must be 'surrogate' or 'nested'");
    }
  }

  if (j.contains("optimizer")) {
    check_keys(j["optimizer"], "optimizer.", {"kind", "beta1", "beta2", "eps"});
    std::string k = j["optimizer"].at("kind").get<std::string>();
    if (k == "sgd") {
      c.adam = false;
    } else if (k == "adam") {
      c.adam = true;
      get_if(j["optimizer"], "beta1", c.beta1);
      get_if(j["optimizer"], "beta2", c.beta2);
      get_if(j["optimizer"], "eps", c.eps_adam);
    } else {
      fail(ErrorCode::Config, "config: optimizer.kind must be 'sgd' or 'adam'");
    }
  }

  get_if(j, "eta", c.eta);
  if (j.contains("anneal")) {
    check_keys(j["anneal"], "anneal.", {"step", "factor"});
    c.anneal_step = j["anneal"].at("step").get<long>();
    get_if(j["anneal"], "factor", c.anneal_factor);
  }
  get_if(j, "steps", c.steps);
  get_if(j, "batch", c.batch);

  if (j.contains("init")) {
    check_keys(j["init"], "init.", {"kind", "sigma"});
    std::string k = j["init"].at("kind").get<std::string>();
    if (k == "zero") {
      c.gaussian_init = false;
    } else if (k == "gaussian") {
      c.gaussian_init = true;
      get_if(j["init"], "sigma", c.init_sigma);
    } else {
      fail(ErrorCode::Config, "config: init.kind must be 'zero' or 'gaussian'");
    }
  }

  get_if(j, "seed", c.seed);
  if (j.contains("x_query")) {
    std::string k = j["x_query"].get<std::string>();
    if (k == "zero")
      c.gaussian_x_query = false;
    else if (k == "gaussian")
      c.gaussian_x_query = true;
    else
      fail(ErrorCode::Config, "config: x_query must be 'zero' or 'gaussian'");
  }
  get_if(j, "log_every", c.log_every);

  if (j.contains("eval")) {
    check_keys(j["eval"], "eval.", {"n_eval", "T2_list", "q2_list", "T_max"});
    get_if(j["eval"], "n_eval", c.eval.n_eval);
    get_if(j["eval"], "T2_list", c.eval.T2_list);
    get_if(j["eval"], "q2_list", c.eval.q2_list);
    get_if(j["eval"], "T_max", c.eval.T_max);
  }

  if (j.contains("fcn")) {
    check_keys(j["fcn"], "fcn.",
               {"widths", "steps", "batch", "eta", "optimizer", "n_eval",
                "adversarial_count", "transformer_ref"});
    FcnCmdConfig fcc;
    fcc.widths = j["fcn"].at("widths").get<std::vector<int>>();
    get_if(j["fcn"], "steps", fcc.steps);
    get_if(j["fcn"], "batch", fcc.batch);
    get_if(j["fcn"], "eta", fcc.eta);
    if (j["fcn"].contains("optimizer")) {
      std::string k = j["fcn"]["optimizer"].get<std::string>();
      if (k == "sgd")
        fcc.adam = false;
      else if (k == "adam")
        fcc.adam = true;
      else
        fail(ErrorCode::Config, "config: fcn.optimizer must be 'sgd' or 'adam'");
    }
    get_if(j["fcn"], "n_eval", fcc.n_eval);
    get_if(j["fcn"], "adversarial_count", fcc.adversarial_count);
    get_if(j["fcn"], "transformer_ref", fcc.transformer_ref);
    fc.fcn = fcc;
  }

  get_if(j, "heatmap_snapshots", fc.heatmap_snapshots);

  c.validate();
  return fc;
}

FullConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::Config, "config: cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_json(ss.str());
}

std::string apply_overrides(const std::string& text,
                            const std::vector<std::string>& overrides) {
  if (overrides.empty()) return text;
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::Config, std::string("config: invalid JSON: ") + e.what());
  }
  for (const auto& ov : overrides) {
    auto eq = ov.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::Config, "override must be key=value: " + ov);
    std::string key = ov.substr(0, eq), val = ov.substr(eq + 1);
    json parsed;
    try {
      parsed = json::parse(val);
    } catch (...) {
      parsed = val;  // treat as string
    }
    json* cur = &j;
    size_t pos = 0;
    for (;;) {
      auto dot = key.find('.', pos);
      std::string part = key.substr(pos, dot == std::string::npos ? dot : dot - pos);
      if (dot == std::string::npos) {
        (*cur)[part] = parsed;
        break;
      }
      cur = &(*cur)[part];
      pos = dot + 1;
    }
  }
  return j.dump(2);
}

std::string config_to_json(const FullConfig& fc) {
  const train::TrainConfig& c = fc.train;
  json j;
  j["task"] = {{"T", c.task.T}, {"q", c.task.q}, {"d", c.task.d}};
  j["d_e"] = c.d_e;
  j["delta"] = c.delta;
  if (c.pe_threshold > 0) j["pe_threshold"] = c.pe_threshold;
  j["rip_mode"] = c.rip_mode == pe::RipMode::Pairwise ? "pairwise" : "exact";
  j["max_attempts"] = c.max_attempts;
  j["pe_policy"] = c.pe_policy == train::PePolicyKind::OneHot ? "onehot"
                   : c.pe_policy == train::PePolicyKind::FixedRademacher
                       ? "fixed"
                       : "stochastic";
  if (c.nested)
    j["estimator"] = {{"kind", "nested"}, {"n_outer", c.n_outer}, {"n_inner", c.n_inner}};
  else
    j["estimator"] = {{"kind", "surrogate"}};
  if (c.adam)
    j["optimizer"] = {{"kind", "adam"}, {"beta1", c.beta1}, {"beta2", c.beta2},
                      {"eps", c.eps_adam}};
  else
    j["optimizer"] = {{"kind", "sgd"}};
  j["eta"] = c.eta;
  if (c.anneal_step >= 0)
    j["anneal"] = {{"step", c.anneal_step}, {"factor", c.anneal_factor}};
  j["steps"] = c.steps;
  j["batch"] = c.batch;
  if (c.gaussian_init) {
    j["init"] = {{"kind", "gaussian"}};
    if (c.init_sigma > 0) j["init"]["sigma"] = c.init_sigma;
  } else {
    j["init"] = {{"kind", "zero"}};
  }
  j["seed"] = c.seed;
  j["x_query"] = c.gaussian_x_query ? "gaussian" : "zero";
  j["log_every"] = c.log_every;
  j["eval"] = {{"n_eval", c.eval.n_eval},
               {"T2_list", c.eval.T2_list},
               {"q2_list", c.eval.q2_list},
               {"T_max", c.eval.T_max}};
  if (fc.fcn) {
    j["fcn"] = {{"widths", fc.fcn->widths},     {"steps", fc.fcn->steps},
                {"batch", fc.fcn->batch},       {"eta", fc.fcn->eta},
                {"optimizer", fc.fcn->adam ? "adam" : "sgd"},
                {"n_eval", fc.fcn->n_eval},
                {"adversarial_count", fc.fcn->adversarial_count}};
    if (!fc.fcn->transformer_ref.empty())
      j["fcn"]["transformer_ref"] = fc.fcn->transformer_ref;
  }
  j["heatmap_snapshots"] = fc.heatmap_snapshots;
  return j.dump(2);
}

void write_manifest(const std::string& dir, const std::string& command,
                    const std::string& config_json, uint64_t seed,
                    const std::vector<std::string>& outputs) {
  ensure_dir(dir);
  json j;
  j["command"] = command;
  j["config"] = json::parse(config_json);
  j["seed"] = seed;
  j["build"] = std::string("sts ") +
#if defined(__clang__)
               "clang " + std::to_string(__clang_major__);
#elif defined(__GNUC__)
               "gcc " + std::to_string(__GNUC__);
#else
               "unknown-compiler";
#endif
  auto now = std::chrono::system_clock::now();
  j["start_unix_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                           now.time_since_epoch())
                           .count();
  j["outputs"] = outputs;
  open_out(dir + "/manifest.json") << j.dump(2) << "\n";
}

}  // namespace sts::io
