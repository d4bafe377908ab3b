#ifndef NBGEC_CW_HPP
#define NBGEC_CW_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "nbgec/features.hpp"

namespace nbgec {

// Inverse standard-normal CDF, p in (0,1). Rational approximation refined by
// one Halley step; accurate to well under 1e-8.
double inverse_normal_cdf(double p);

// Diagonal confidence-weighted linear classifier: a Gaussian over weights
// with mean mu and per-coordinate variance sigma, updated online so each
// example is classified correctly with probability at least eta.
struct CWModel {
  std::vector<double> mu;
  std::vector<double> sigma;  // strictly positive
  double eta = 0.9;
  double phi = 0.0;  // inverse_normal_cdf(eta)
  double tau = 0.0;  // decision threshold on the margin

  static CWModel make(std::size_t dim, double eta = 0.9,
                      double initial_variance = 1.0);

  std::string to_string() const;
  static CWModel from_string(std::string_view text);
};

struct CWTrainConfig {
  int epochs = 10;
  double eta = 0.9;
  double initial_variance = 1.0;
  std::uint64_t shuffle_seed = 1;
};

// One online update with label y in {-1,+1}, enforcing the margin
// constraint y*(mu'.x) = phi * sum_i sigma'_i x_i^2 whenever it was
// violated (m = y*(mu.x) < phi * v with v = sum_i sigma_i x_i^2):
//   mu_i    += alpha y sigma_i x_i
//   sigma_i  = 1 / (1/sigma_i + 2 alpha phi x_i^2)
// where alpha starts from the rank-one closed form
//   (-(1+2 phi m) + sqrt((1+2 phi m)^2 - 8 phi (m - phi v))) / (4 phi v)
// and is refined so the constraint holds exactly under the diagonal
// variance law. Only coordinates with x_i != 0 are touched; alpha = 0
// leaves the model unchanged.
void cw_update(CWModel& model, const SparseVector& x, int y);

// Online training: `epochs` passes, each shuffled with a generator seeded by
// shuffle_seed + epoch index. Labels: valid -> +1, invalid -> -1. Strictly
// sequential; the result depends on example order by construction.
CWModel cw_train(std::span<const SparseVector> xs, std::span<const int> ys,
                 std::size_t dim, const CWTrainConfig& cfg);

// Signed margin mu.x.
double score(const CWModel& model, const SparseVector& x);

// valid iff score >= tau.
bool classify(const CWModel& model, const SparseVector& x);

// Fraction of examples whose decision at threshold 0 matches the label
// (classifier quality is always measured before threshold tuning).
double accuracy(const CWModel& model, std::span<const SparseVector> xs,
                std::span<const int> ys);

// Grid search for the decision threshold over [-0.5, 0.5] step 0.01 (101
// points). `evaluate_at` returns the downstream corpus F0.5 of edit
// selection on the dev set at a given threshold; ties break toward the
// smallest threshold.
double tune_threshold(const std::function<double(double)>& evaluate_at);

}  // namespace nbgec

#endif  // NBGEC_CW_HPP
