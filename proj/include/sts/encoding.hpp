#pragma once

#include <string>
#include <vector>

#include "sts/numerics.hpp"

namespace sts::pe {

enum class PeKind { OneHot, Rademacher };
enum class RipMode { Pairwise, Exact };

// Positional encoding matrix E (d_e x T). Columns are the per-position
// vectors e_i. delta records the near-orthogonality parameter the matrix
// was sampled/checked against.
struct PosEncoding {
  PeKind kind = PeKind::OneHot;
  num::Mat E;
  double delta = 0.0;
  int T = 0;
  int d_e = 0;
};

// Subset encoding e_y: the vector with <e_i, e_y> = 1 for i in y.
// y uses 0-based position indices, kept sorted.
struct SubsetEncoding {
  std::vector<int> y;
  std::vector<double> e_y;
};

struct DualCertReport {
  double max_in_err = 0.0;  // max |<e_i,e_y>| - 1 over i in y
  double max_out = 0.0;     // max |<e_j,e_y>| over j not in y
  double norm = 0.0;        // |e_y|
};

PosEncoding one_hot_pe(int T);

// Rejection-samples scaled-Rademacher (+-1/sqrt(d_e)) matrices until the
// requested check passes.
//   Pairwise: max_{i != j} |<e_i, e_j>| <= delta.
//   Exact: eigenvalues of every Gram submatrix on <= 3q columns lie in
//     [1-delta, 1+delta], and the operator norm of every cross Gram block
//     E_A^T E_B with disjoint |A| <= q, |B| <= 2q is <= delta. By eigenvalue
//     interlacing / singular-value monotonicity it suffices to enumerate
//     |S| = min(3q, T) and (|A|, |B|) = (q, 2q). Enforced T <= 24, q <= 3.
// Throws PeSamplingFailed when max_attempts is exhausted.
PosEncoding sample_rip_pe(num::RngStream& rng, int d_e, int T, int q,
                          double delta, RipMode mode, int max_attempts = 10000);

// Exact RIP/orthogonality check as described above (exposed for tests).
bool exact_rip_check(const num::Mat& E, int q, double delta);

// max_{i != j} |<e_i, e_j>| over all column pairs.
double measure_coherence(const num::Mat& E);

// One-hot: sum of selected columns. Rademacher: e_y = E_y (E_y^T E_y)^{-1} 1.
// Throws InvalidSubsetEncoding if the Gram system is ill-conditioned.
SubsetEncoding subset_encoding(const PosEncoding& pe, const std::vector<int>& y);

DualCertReport verify_dual_certificate(const PosEncoding& pe,
                                       const SubsetEncoding& enc);

// CSV export: header line "d_e,T,kind,delta", one line of those values,
// then the entries of E row by row (17 significant digits).
void export_csv(const PosEncoding& pe, const std::string& path);
PosEncoding import_csv(const std::string& path);

}  // namespace sts::pe
