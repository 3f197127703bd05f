#include "sts/encoding.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sts/format.hpp"

namespace sts::pe {

namespace {

// Visit all k-subsets of {0..n-1} (lexicographic).
template <typename F>
void for_each_subset(int n, int k, F&& f) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    f(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

num::Mat gram(const num::Mat& E) {
  int T = E.cols, d_e = E.rows;
  num::Mat g(T, T);
  for (int i = 0; i < T; ++i)
    for (int j = i; j < T; ++j) {
      double s = 0.0;
      for (int k = 0; k < d_e; ++k) s += E.at(k, i) * E.at(k, j);
      g.at(i, j) = s;
      g.at(j, i) = s;
    }
  return g;
}

}  // namespace

PosEncoding one_hot_pe(int T) {
  if (T < 1) fail(ErrorCode::Config, "one_hot_pe: T must be >= 1");
  PosEncoding pe;
  pe.kind = PeKind::OneHot;
  pe.E = num::Mat::identity(T);
  pe.delta = 0.0;
  pe.T = T;
  pe.d_e = T;
  return pe;
}

double measure_coherence(const num::Mat& E) {
  if (E.cols < 2) fail(ErrorCode::Config, "measure_coherence: T must be >= 2");
  num::Mat g = gram(E);
  double mx = 0.0;
  for (int i = 0; i < E.cols; ++i)
    for (int j = i + 1; j < E.cols; ++j)
      mx = std::max(mx, std::abs(g.at(i, j)));
  return mx;
}

bool exact_rip_check(const num::Mat& E, int q, double delta) {
  int T = E.cols;
  num::Mat g = gram(E);

  int k = std::min(3 * q, T);
  bool ok = true;
  for_each_subset(T, k, [&](const std::vector<int>& S) {
    if (!ok) return;
    num::Mat sub(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) sub.at(a, b) = g.at(S[a], S[b]);
    auto ev = num::symmetric_eigenvalues(sub);
    if (ev.front() < 1.0 - delta - 1e-9 || ev.back() > 1.0 + delta + 1e-9)
      ok = false;
  });
  if (!ok) return false;

  // Cross blocks E_A^T E_B for disjoint A (|A|=q), B (|B|=min(2q, T-q)).
  int kb = std::min(2 * q, T - q);
  if (kb >= 1) {
    for_each_subset(T, q, [&](const std::vector<int>& A) {
      if (!ok) return;
      std::vector<int> rest;
      rest.reserve(T - q);
      {
        size_t ai = 0;
        for (int t = 0; t < T; ++t) {
          if (ai < A.size() && A[ai] == t) {
            ++ai;
            continue;
          }
          rest.push_back(t);
        }
      }
      for_each_subset(static_cast<int>(rest.size()), kb,
                      [&](const std::vector<int>& Bi) {
                        if (!ok) return;
                        num::Mat cross(q, kb);
                        for (int a = 0; a < q; ++a)
                          for (int b = 0; b < kb; ++b)
                            cross.at(a, b) = g.at(A[a], rest[Bi[b]]);
                        if (num::operator_norm(cross) > delta + 1e-9) ok = false;
                      });
    });
  }
  return ok;
}

PosEncoding sample_rip_pe(num::RngStream& rng, int d_e, int T, int q,
                          double delta, RipMode mode, int max_attempts) {
  if (d_e < 1 || T < 2 || q < 1)
    fail(ErrorCode::Config, "sample_rip_pe: invalid dimensions");
  if (mode == RipMode::Exact && (T > 24 || q > 3))
    fail(ErrorCode::Config,
         "sample_rip_pe: exact mode limited to T <= 24, q <= 3");

  double scale = 1.0 / std::sqrt(static_cast<double>(d_e));
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    num::Mat E(d_e, T);
    for (double& x : E.a) x = (rng.next_u64() >> 63) ? scale : -scale;
    bool pass;
    if (mode == RipMode::Pairwise) {
      pass = measure_coherence(E) <= delta;
    } else {
      pass = exact_rip_check(E, q, delta);
    }
    if (pass) {
      PosEncoding pe;
      pe.kind = PeKind::Rademacher;
      pe.E = std::move(E);
      pe.delta = delta;
      pe.T = T;
      pe.d_e = d_e;
      return pe;
    }
  }
  fail(ErrorCode::PeSamplingFailed,
       "sample_rip_pe: max_attempts exhausted (d_e=" + std::to_string(d_e) +
           ", T=" + std::to_string(T) + ", delta=" + fmt_g17(delta) + ")");
}

SubsetEncoding subset_encoding(const PosEncoding& pe, const std::vector<int>& y) {
  int q = static_cast<int>(y.size());
  if (q < 1) fail(ErrorCode::InvalidSubsetEncoding, "subset_encoding: empty y");
  std::vector<int> ys = y;
  std::sort(ys.begin(), ys.end());
  for (int i = 0; i < q; ++i) {
    if (ys[i] < 0 || ys[i] >= pe.T)
      fail(ErrorCode::InvalidSubsetEncoding, "subset_encoding: index out of range");
    if (i > 0 && ys[i] == ys[i - 1])
      fail(ErrorCode::InvalidSubsetEncoding, "subset_encoding: duplicate index");
  }

  SubsetEncoding enc;
  enc.y = ys;
  enc.e_y.assign(pe.d_e, 0.0);

  if (pe.kind == PeKind::OneHot) {
    for (int i : ys) enc.e_y[i] = 1.0;
    return enc;
  }

  num::Mat G(q, q);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) {
      double s = 0.0;
      for (int k = 0; k < pe.d_e; ++k) s += pe.E.at(k, ys[a]) * pe.E.at(k, ys[b]);
      G.at(a, b) = s;
    }
  std::vector<double> ones(q, 1.0);
  std::vector<double> w;
  try {
    w = num::solve_gram(G, ones);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IllConditionedGram)
      fail(ErrorCode::InvalidSubsetEncoding,
           std::string("subset_encoding: ") + e.what());
    throw;
  }
  for (int a = 0; a < q; ++a)
    for (int k = 0; k < pe.d_e; ++k) enc.e_y[k] += pe.E.at(k, ys[a]) * w[a];
  return enc;
}

DualCertReport verify_dual_certificate(const PosEncoding& pe,
                                       const SubsetEncoding& enc) {
  DualCertReport rep;
  std::vector<char> in_y(pe.T, 0);
  for (int i : enc.y) in_y[i] = 1;
  for (int i = 0; i < pe.T; ++i) {
    double dot = 0.0;
    for (int k = 0; k < pe.d_e; ++k) dot += pe.E.at(k, i) * enc.e_y[k];
    if (in_y[i])
      rep.max_in_err = std::max(rep.max_in_err, std::abs(dot - 1.0));
    else
      rep.max_out = std::max(rep.max_out, std::abs(dot));
  }
  double n2 = 0.0;
  for (double x : enc.e_y) n2 += x * x;
  rep.norm = std::sqrt(n2);
  return rep;
}

void export_csv(const PosEncoding& pe, const std::string& path) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::Io, "export_csv: cannot open " + path);
  f << "d_e,T,kind,delta\n";
  f << pe.d_e << "," << pe.T << ","
    << (pe.kind == PeKind::OneHot ? "onehot" : "rademacher") << ","
    << fmt_g17(pe.delta) << "\n";
  for (int i = 0; i < pe.d_e; ++i) {
    for (int j = 0; j < pe.T; ++j) {
      if (j) f << ",";
      f << fmt_g17(pe.E.at(i, j));
    }
    f << "\n";
  }
}

PosEncoding import_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::Io, "import_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("d_e,T,kind,delta", 0) != 0)
    fail(ErrorCode::Io, "import_csv: bad header in " + path);
  if (!std::getline(f, line)) fail(ErrorCode::Io, "import_csv: truncated " + path);
  PosEncoding pe;
  {
    std::stringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    pe.d_e = std::stoi(tok);
    std::getline(ss, tok, ',');
    pe.T = std::stoi(tok);
    std::getline(ss, tok, ',');
    pe.kind = (tok == "onehot") ? PeKind::OneHot : PeKind::Rademacher;
    std::getline(ss, tok, ',');
    pe.delta = std::stod(tok);
  }
  pe.E = num::Mat(pe.d_e, pe.T);
  for (int i = 0; i < pe.d_e; ++i) {
    if (!std::getline(f, line)) fail(ErrorCode::Io, "import_csv: truncated " + path);
    std::stringstream ss(line);
    std::string tok;
    for (int j = 0; j < pe.T; ++j) {
      if (!std::getline(ss, tok, ','))
        fail(ErrorCode::Io, "import_csv: short row in " + path);
      pe.E.at(i, j) = std::stod(tok);
    }
  }
  return pe;
}

}  // namespace sts::pe
