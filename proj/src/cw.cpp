#include "nbgec/cw.hpp"

#include <cmath>
#include <numeric>

#include "nbgec/util.hpp"

namespace nbgec {

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw Error("inverse_normal_cdf domain is (0,1)");

  // Acklam's rational approximation (relative error < 1.2e-9).
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
          c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley refinement against the exact CDF.
  double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

CWModel CWModel::make(std::size_t dim, double eta, double initial_variance) {
  CWModel m;
  m.mu.assign(dim, 0.0);
  m.sigma.assign(dim, initial_variance);
  m.eta = eta;
  m.phi = inverse_normal_cdf(eta);
  m.tau = 0.0;
  return m;
}

void cw_update(CWModel& model, const SparseVector& x, int y) {
  const double phi = model.phi;
  double m = 0.0, v = 0.0;
  for (const auto& [i, xi] : x) {
    m += model.mu[std::size_t(i)] * xi;
    v += model.sigma[std::size_t(i)] * xi * xi;
  }
  m *= y;
  if (v <= 0.0) return;        // zero vector: nothing to update
  if (m >= phi * v) return;    // margin constraint already satisfied

  // alpha must satisfy the post-update constraint under the diagonal
  // variance law:  m + alpha v = phi * sum_i x_i^2 sigma_i / (1 + 2 alpha
  // phi sigma_i x_i^2).  The rank-one closed form is exact for a single
  // active coordinate and a lower bound otherwise; refine it by Newton on
  // the strictly increasing gap.
  const double b = 1.0 + 2.0 * phi * m;
  double alpha =
      (-b + std::sqrt(b * b - 8.0 * phi * (m - phi * v))) / (4.0 * phi * v);
  if (!(alpha > 0.0)) return;

  for (int iter = 0; iter < 50; ++iter) {
    double shrunk = 0.0, slope = v;
    for (const auto& [i, xi] : x) {
      double t = model.sigma[std::size_t(i)] * xi * xi;
      double den = 1.0 + 2.0 * alpha * phi * t;
      shrunk += t / den;
      slope += 2.0 * phi * phi * t * t / (den * den);
    }
    double gap = (m + alpha * v) - phi * shrunk;
    if (std::abs(gap) <= 1e-12) break;
    alpha -= gap / slope;
    if (alpha <= 0.0) {
      alpha = 0.0;
      break;
    }
  }
  if (alpha <= 0.0) return;

  for (const auto& [i, xi] : x) {
    auto idx = std::size_t(i);
    model.mu[idx] += alpha * y * model.sigma[idx] * xi;
    model.sigma[idx] = 1.0 / (1.0 / model.sigma[idx] +
                              2.0 * alpha * phi * xi * xi);
  }
}

CWModel cw_train(std::span<const SparseVector> xs, std::span<const int> ys,
                 std::size_t dim, const CWTrainConfig& cfg) {
  if (xs.empty()) throw Error("cannot train on zero examples");
  if (xs.size() != ys.size()) throw Error("examples/labels size mismatch");

  CWModel model = CWModel::make(dim, cfg.eta, cfg.initial_variance);
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng(cfg.shuffle_seed + std::uint64_t(epoch));
    rng.shuffle(order);
    for (std::size_t idx : order) cw_update(model, xs[idx], ys[idx]);
  }
  return model;
}

double score(const CWModel& model, const SparseVector& x) {
  double s = 0.0;
  for (const auto& [i, xi] : x) s += model.mu[std::size_t(i)] * xi;
  return s;
}

bool classify(const CWModel& model, const SparseVector& x) {
  return score(model, x) >= model.tau;
}

double accuracy(const CWModel& model, std::span<const SparseVector> xs,
                std::span<const int> ys) {
  if (xs.empty()) throw Error("accuracy over zero examples");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    bool predicted_valid = score(model, xs[i]) >= 0.0;
    if (predicted_valid == (ys[i] > 0)) ++correct;
  }
  return double(correct) / double(xs.size());
}

double tune_threshold(const std::function<double(double)>& evaluate_at) {
  double best_tau = -0.50;
  double best_f = -1.0;
  for (int step = -50; step <= 50; ++step) {
    double tau = double(step) / 100.0;
    double f = evaluate_at(tau);
    if (f > best_f) {
      best_f = f;
      best_tau = tau;
    }
  }
  return best_tau;
}

std::string CWModel::to_string() const {
  std::string out = "cw eta " + format_double(eta) + " phi " +
                    format_double(phi) + " tau " + format_double(tau) +
                    " dim " + std::to_string(mu.size()) + "\n";
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] == 0.0 && sigma[i] == 1.0) continue;  // untrained coordinate
    out += std::to_string(i) + " " + format_double(mu[i]) + " " +
           format_double(sigma[i]) + "\n";
  }
  return out;
}

CWModel CWModel::from_string(std::string_view text) {
  auto lines = split(text, '\n');
  if (lines.empty()) throw ParseError("empty model file");
  auto header = split_ws(lines[0]);
  if (header.size() != 9 || header[0] != "cw" || header[1] != "eta" ||
      header[3] != "phi" || header[5] != "tau" || header[7] != "dim")
    throw ParseError("bad model header \"" + lines[0] + "\"", 1);
  CWModel m;
  m.eta = parse_double(header[2], 1);
  m.phi = parse_double(header[4], 1);
  m.tau = parse_double(header[6], 1);
  long dim = parse_long(header[8], 1);
  if (dim < 0) throw ParseError("negative dim", 1);
  m.mu.assign(std::size_t(dim), 0.0);
  m.sigma.assign(std::size_t(dim), 1.0);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto fields = split_ws(lines[i]);
    if (fields.size() != 3)
      throw ParseError("expected \"<id> <mu> <sigma>\"", i + 1);
    long id = parse_long(fields[0], i + 1);
    if (id < 0 || id >= dim)
      throw ParseError("weight id out of range", i + 1);
    m.mu[std::size_t(id)] = parse_double(fields[1], i + 1);
    m.sigma[std::size_t(id)] = parse_double(fields[2], i + 1);
  }
  return m;
}

}  // namespace nbgec
