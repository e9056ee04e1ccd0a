#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "quorum/error.hpp"
#include "quorum/label_matrix.hpp"

namespace quorum {

// Two-coin EM for binary crowd labels. A focal class k binarizes the matrix
// on the fly: x_ij = 1 when labeler i chose k, 0 when it chose another class,
// and missing labels stay out of every sum and product. Per labeler, alpha_i
// is the probability of voting 1 when the truth is 1 and beta_i the
// probability of voting 0 when the truth is 0; u_j is the posterior that item
// j's truth is 1 and v the prevalence. Likelihood products run in the log
// domain; 689-factor products underflow in plain arithmetic.

struct em_options {
  double tol = 1e-6;  // max |delta u_j| between iterations
  int max_iter = 500;
};

struct em_params {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> u;
  double v = 0.5;
};

struct em_result {
  em_params params;
  int iterations = 0;
  bool converged = false;
  std::vector<double> loglik;  // observed-data log-likelihood per iteration
};

namespace detail {

inline double clamp_prob(double p) {
  return std::clamp(p, 1e-9, 1.0 - 1e-9);
}

}  // namespace detail

// Posterior mean of the binarized labels per item; 0.5 when nobody labeled.
inline std::vector<double> init_unsupervised(const label_matrix& m, int focal_class) {
  std::vector<double> u(m.items(), 0.5);
  for (int j = 1; j <= m.items(); ++j) {
    const auto& entries = m.item_entries(j);
    if (entries.empty()) continue;
    double ones = 0.0;
    for (const auto& e : entries) ones += e.label == focal_class ? 1.0 : 0.0;
    u[j - 1] = ones / double(entries.size());
  }
  return u;
}

// Weighted-averaging initialization: u_j is the WA-weighted mean of the
// binarized labels over the labelers who labeled j, normalized by the
// participating weight mass; 0.5 when no weight participates.
inline std::vector<double> init_supervised(const label_matrix& m, int focal_class,
                                           const std::vector<double>& wa_weights) {
  if (int(wa_weights.size()) != m.labelers())
    throw domain_error("weight vector length must equal the labeler count");
  std::vector<double> u(m.items(), 0.5);
  for (int j = 1; j <= m.items(); ++j) {
    double mass = 0.0, vote = 0.0;
    for (const auto& e : m.item_entries(j)) {
      mass += wa_weights[e.labeler - 1];
      if (e.label == focal_class) vote += wa_weights[e.labeler - 1];
    }
    if (mass > 0.0) u[j - 1] = std::clamp(vote / mass, 0.0, 1.0);
  }
  return u;
}

// Bayes-rule posterior for every item at fixed parameters:
//   u_j = a_j v / (a_j v + b_j (1 - v)),
// a_j and b_j being the class-1 and class-0 likelihoods of item j's labels.
inline std::vector<double> em_posteriors(const label_matrix& m, int focal_class,
                                         const std::vector<double>& alpha,
                                         const std::vector<double>& beta,
                                         double v) {
  v = detail::clamp_prob(v);
  std::vector<double> u(m.items());
  for (int j = 1; j <= m.items(); ++j) {
    double log_a = 0.0, log_b = 0.0;
    for (const auto& e : m.item_entries(j)) {
      const double a = detail::clamp_prob(alpha[e.labeler - 1]);
      const double b = detail::clamp_prob(beta[e.labeler - 1]);
      if (e.label == focal_class) {
        log_a += std::log(a);
        log_b += std::log(1.0 - b);
      } else {
        log_a += std::log(1.0 - a);
        log_b += std::log(b);
      }
    }
    const double gap = log_b + std::log(1.0 - v) - log_a - std::log(v);
    u[j - 1] = 1.0 / (1.0 + std::exp(gap));
  }
  return u;
}

// Observed-data log-likelihood sum_j log(v a_j + (1-v) b_j), log-domain.
inline double em_loglik(const label_matrix& m, int focal_class,
                        const std::vector<double>& alpha,
                        const std::vector<double>& beta, double v) {
  v = detail::clamp_prob(v);
  double total = 0.0;
  for (int j = 1; j <= m.items(); ++j) {
    double log_a = 0.0, log_b = 0.0;
    for (const auto& e : m.item_entries(j)) {
      const double a = detail::clamp_prob(alpha[e.labeler - 1]);
      const double b = detail::clamp_prob(beta[e.labeler - 1]);
      if (e.label == focal_class) {
        log_a += std::log(a);
        log_b += std::log(1.0 - b);
      } else {
        log_a += std::log(1.0 - a);
        log_b += std::log(b);
      }
    }
    const double hi = std::max(log_a + std::log(v), log_b + std::log(1.0 - v));
    total += hi + std::log(std::exp(log_a + std::log(v) - hi) +
                           std::exp(log_b + std::log(1.0 - v) - hi));
  }
  return total;
}

// M-step estimates restricted to the items each labeler actually labeled. A
// labeler whose posterior mass degenerates to zero gets the uninformative 0.5.
inline void em_mstep(const label_matrix& m, int focal_class,
                     const std::vector<double>& u, std::vector<double>& alpha,
                     std::vector<double>& beta) {
  const int L = m.labelers();
  std::vector<double> alpha_num(L, 0.0), alpha_den(L, 0.0);
  std::vector<double> beta_num(L, 0.0), beta_den(L, 0.0);
  for (int j = 1; j <= m.items(); ++j)
    for (const auto& e : m.item_entries(j)) {
      const int i = e.labeler - 1;
      const double x = e.label == focal_class ? 1.0 : 0.0;
      alpha_num[i] += u[j - 1] * x;
      alpha_den[i] += u[j - 1];
      beta_num[i] += (1.0 - u[j - 1]) * (1.0 - x);
      beta_den[i] += 1.0 - u[j - 1];
    }
  alpha.resize(L);
  beta.resize(L);
  for (int i = 0; i < L; ++i) {
    alpha[i] = alpha_den[i] > 0.0 ? alpha_num[i] / alpha_den[i] : 0.5;
    beta[i] = beta_den[i] > 0.0 ? beta_num[i] / beta_den[i] : 0.5;
  }
}

inline em_result em_fit(const label_matrix& m, int focal_class,
                        std::vector<double> u, const em_options& opt = {}) {
  if (m.items() < 1) throw domain_error("em needs at least one item");
  if (int(u.size()) != m.items())
    throw domain_error("initial posterior length must equal item count");
  for (double p : u)
    if (!(p >= 0.0 && p <= 1.0))
      throw domain_error("initial posteriors must lie in [0, 1]");

  em_result result;
  std::vector<double> alpha, beta;
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    em_mstep(m, focal_class, u, alpha, beta);
    double v = 0.0;
    for (double p : u) v += p;
    v /= double(m.items());
    auto next = em_posteriors(m, focal_class, alpha, beta, v);
    result.loglik.push_back(em_loglik(m, focal_class, alpha, beta, v));
    double delta = 0.0;
    for (int j = 0; j < m.items(); ++j)
      delta = std::max(delta, std::abs(next[j] - u[j]));
    u = std::move(next);
    ++result.iterations;
    if (delta < opt.tol) {
      result.converged = true;
      break;
    }
  }
  result.params.alpha = std::move(alpha);
  result.params.beta = std::move(beta);
  double v = 0.0;
  for (double p : u) v += p;
  result.params.v = v / double(m.items());
  result.params.u = std::move(u);
  return result;
}

// ceil(u - 1/2) taken literally: the exact 0.5 boundary predicts 0.
inline int em_predict_binary(const em_params& params, int item) {
  return params.u[item - 1] > 0.5 ? 1 : 0;
}

enum class em_init { unsupervised, supervised };

// One binary EM per class on the k-vs-rest binarization; items take the class
// with the highest posterior, ties to the smallest index. `all_converged`
// reports whether every per-class fit met its tolerance.
inline std::vector<int> em_multiclass(const label_matrix& m,
                                      const em_options& opt, em_init mode,
                                      const std::vector<double>& wa_weights = {},
                                      bool* all_converged = nullptr) {
  if (all_converged) *all_converged = true;
  std::vector<std::vector<double>> posteriors;
  for (int k = 1; k <= m.classes(); ++k) {
    auto u0 = mode == em_init::supervised ? init_supervised(m, k, wa_weights)
                                          : init_unsupervised(m, k);
    auto result = em_fit(m, k, std::move(u0), opt);
    if (all_converged && !result.converged) *all_converged = false;
    posteriors.push_back(std::move(result.params.u));
  }
  std::vector<int> labels(m.items());
  for (int j = 0; j < m.items(); ++j) {
    int best = 1;
    double best_u = posteriors[0][j];
    for (int k = 2; k <= m.classes(); ++k)
      if (posteriors[k - 1][j] > best_u) {
        best = k;
        best_u = posteriors[k - 1][j];
      }
    labels[j] = best;
  }
  return labels;
}

}  // namespace quorum
