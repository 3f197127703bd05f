#include "sts/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace sts::num {

void Mat::check_finite(const char* who) const {
  for (double x : a) {
    if (!std::isfinite(x)) {
      fail(ErrorCode::NumericalInput,
           std::string(who) + ": non-finite matrix entry");
    }
  }
}

namespace {

inline uint64_t splitmix64(uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline uint64_t derive(uint64_t key, uint64_t x) {
  uint64_t s = key ^ x;
  return splitmix64(s);
}

uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream RngStream::from(uint64_t master_seed, std::string_view label) {
  RngStream r;
  r.key = derive(derive(master_seed, fnv1a64(label)), 0);
  uint64_t seq = r.key;
  for (auto& w : r.s) w = splitmix64(seq);
  return r;
}

RngStream RngStream::substream(uint64_t i, uint64_t j) const {
  RngStream r;
  r.key = derive(derive(key, i + 1), j + 1);
  uint64_t seq = r.key;
  for (auto& w : r.s) w = splitmix64(seq);
  return r;
}

uint64_t RngStream::next_u64() {
  // xoshiro256++
  const uint64_t result = rotl(s[0] + s[3], 23) + s[0];
  const uint64_t t = s[1] << 17;
  s[2] ^= s[0];
  s[3] ^= s[1];
  s[1] ^= s[2];
  s[0] ^= s[3];
  s[2] ^= t;
  s[3] = rotl(s[3], 45);
  return result;
}

double RngStream::uniform01() {
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_cached) {
    has_cached = false;
    return cached;
  }
  double u1 = uniform01();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  cached = r * std::sin(a);
  has_cached = true;
  return r * std::cos(a);
}

uint64_t RngStream::below(uint64_t n) {
  uint64_t threshold = (0ULL - n) % n;  // 2^64 mod n
  for (;;) {
    uint64_t x = next_u64();
    if (x >= threshold) return x % n;
  }
}

std::vector<double> softmax_col(const std::vector<double>& v) {
  if (v.empty()) fail(ErrorCode::NumericalInput, "softmax_col: empty input");
  double mx = v[0];
  for (double x : v) {
    if (!std::isfinite(x))
      fail(ErrorCode::NumericalInput, "softmax_col: non-finite input");
    mx = std::max(mx, x);
  }
  std::vector<double> out(v.size());
  double z = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    z += out[i];
  }
  for (double& x : out) x /= z;
  return out;
}

Mat gaussian_matrix(RngStream& rng, int rows, int cols) {
  Mat m(rows, cols);
  for (double& x : m.a) x = rng.normal();
  return m;
}

std::vector<double> symmetric_eigenvalues(const Mat& S) {
  if (S.rows != S.cols) fail(ErrorCode::Shape, "symmetric_eigenvalues: not square");
  int n = S.rows;
  Mat a = S;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a.at(p, q) * a.at(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a.at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a.at(k, p), akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a.at(p, k), aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a.at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double operator_norm(const Mat& M) {
  int n = std::min(M.rows, M.cols);
  Mat g(n, n);
  if (M.rows <= M.cols) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < M.cols; ++k) s += M.at(i, k) * M.at(j, k);
        g.at(i, j) = s;
      }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < M.rows; ++k) s += M.at(k, i) * M.at(k, j);
        g.at(i, j) = s;
      }
  }
  auto ev = symmetric_eigenvalues(g);
  return std::sqrt(std::max(0.0, ev.back()));
}

std::vector<double> solve_gram(const Mat& G, const std::vector<double>& b,
                               double cond_max) {
  if (G.rows != G.cols || static_cast<size_t>(G.rows) != b.size())
    fail(ErrorCode::Shape, "solve_gram: shape mismatch");
  int n = G.rows;
  double scale = 0.0;
  for (double x : G.a) scale = std::max(scale, std::abs(x));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(G.at(i, j) - G.at(j, i)) > 1e-12 * std::max(1.0, scale))
        fail(ErrorCode::NumericalInput, "solve_gram: G not symmetric");

  auto ev = symmetric_eigenvalues(G);
  double lo = ev.front(), hi = ev.back();
  if (lo <= 0.0 || hi / lo > cond_max)
    fail(ErrorCode::IllConditionedGram, "solve_gram: ill-conditioned Gram");

  // Cholesky G = L L^T
  Mat L(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = G.at(i, j);
      for (int k = 0; k < j; ++k) s -= L.at(i, k) * L.at(j, k);
      if (i == j) {
        if (s <= 0.0)
          fail(ErrorCode::IllConditionedGram, "solve_gram: not positive definite");
        L.at(i, i) = std::sqrt(s);
      } else {
        L.at(i, j) = s / L.at(j, j);
      }
    }
  }
  std::vector<double> y(n), x(n);
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= L.at(i, k) * y[k];
    y[i] = s / L.at(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < n; ++k) s -= L.at(k, i) * x[k];
    x[i] = s / L.at(i, i);
  }
  return x;
}

std::vector<double> null_space_vector(const Mat& A) {
  if (A.rows >= A.cols)
    fail(ErrorCode::Shape, "null_space_vector: requires m < n");
  int m = A.rows, n = A.cols;
  Mat u = A;
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < n && r < m; ++c) {
    int p = r;
    for (int i = r + 1; i < m; ++i)
      if (std::abs(u.at(i, c)) > std::abs(u.at(p, c))) p = i;
    if (std::abs(u.at(p, c)) < 1e-12) continue;
    if (p != r)
      for (int j = 0; j < n; ++j) std::swap(u.at(p, j), u.at(r, j));
    double piv = u.at(r, c);
    for (int j = 0; j < n; ++j) u.at(r, j) /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == r) continue;
      double f = u.at(i, c);
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) u.at(i, j) -= f * u.at(r, j);
    }
    pivot_col.push_back(c);
    ++r;
  }

  std::vector<char> is_pivot(n, 0);
  for (int c : pivot_col) is_pivot[c] = 1;

  std::vector<double> best;
  double best_lead = -1.0;
  for (int fc = 0; fc < n; ++fc) {
    if (is_pivot[fc]) continue;
    std::vector<double> v(n, 0.0);
    v[fc] = 1.0;
    for (size_t k = 0; k < pivot_col.size(); ++k)
      v[pivot_col[k]] = -u.at(static_cast<int>(k), fc);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    double lead = 0.0;
    int lead_i = -1;
    for (int i = 0; i < n; ++i)
      if (std::abs(v[i]) > 1e-12) {
        lead = v[i];
        lead_i = i;
        break;
      }
    (void)lead_i;
    if (std::abs(lead) > best_lead) {
      best_lead = std::abs(lead);
      if (lead < 0)
        for (double& x : v) x = -x;
      best = std::move(v);
    }
  }
  return best;
}

double frobenius_cosine(const Mat& A, const Mat& B) {
  if (A.rows != B.rows || A.cols != B.cols)
    fail(ErrorCode::Shape, "frobenius_cosine: shape mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < A.a.size(); ++i) {
    dot += A.a[i] * B.a[i];
    na += A.a[i] * A.a[i];
    nb += B.a[i] * B.a[i];
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  if (na < 1e-300 || nb < 1e-300) return 0.0;
  return dot / (na * nb);
}

}  // namespace sts::num
