#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "quorum/error.hpp"
#include "quorum/label_matrix.hpp"

namespace quorum {

// Hinge-loss + lambda * l1 labeler weighting, solved as the saddle point of
//
//   L(w, alpha) = lambda ||w||_1 - sum_j alpha_j (y_j w'X_j - 1),
//   0 <= alpha_j <= 1/N_s,
//
// by alternating projected subgradient steps: w moves +/- s_w along the
// projected direction g = (1/lambda) sum_j alpha_j y_j X_j with the sign that
// does not increase L (if both signs increase it, w stays put, which happens
// exactly in the large-lambda shrinkage regime where 0 is already optimal);
// alpha then ascends along 1 - y_j w'X_j and is projected back into its box.
// Iteration stops when both blocks move less than tol in l2 norm.

struct saddle_options {
  double lambda = 1.0;
  double step_w = 0.01;
  double step_alpha = 0.01;
  double tol = 0.01;
  int max_iter = 100000;
};

struct saddle_result {
  std::vector<double> w;       // iterate with the lowest primal objective
  std::vector<double> w_last;  // iterate at loop exit
  std::vector<double> alpha;
  double primal = 0.0;  // objective of w
  int iterations = 0;
  bool converged = false;
  int stalled_steps = 0;  // iterations where neither w direction was taken
};

// The objective the whole procedure minimizes:
// (1/N_s) sum_j max(0, 1 - y_j w'X_j) + lambda ||w||_1.
inline double saddle_primal(const std::vector<double>& w,
                            const std::vector<std::vector<double>>& views,
                            const std::vector<int>& y, double lambda) {
  double hinge = 0.0;
  for (std::size_t j = 0; j < views.size(); ++j) {
    double dot = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) dot += w[i] * views[j][i];
    hinge += std::max(0.0, 1.0 - y[j] * dot);
  }
  double l1 = 0.0;
  for (double x : w) l1 += std::abs(x);
  return hinge / double(views.size()) + lambda * l1;
}

// Clips a candidate subgradient of ||w||_1 into [-1, 1] entrywise: in-range
// entries pass through, out-of-range entries are rescaled by the infinity
// norm (max absolute entry).
inline std::vector<double> proj_subgradient(const std::vector<double>& g) {
  double inf_norm = 0.0;
  for (double x : g) inf_norm = std::max(inf_norm, std::abs(x));
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] = std::abs(g[i]) <= 1.0 ? g[i] : g[i] / inf_norm;
  return out;
}

// Projects multipliers onto [0, 1/N_s]: negatives clamp to zero, in-range
// entries pass through, oversized entries are rescaled by the infinity norm
// times N_s.
inline std::vector<double> proj_multipliers(const std::vector<double>& a,
                                            int train_size) {
  if (train_size < 1) throw domain_error("train size must be >= 1");
  const double cap = 1.0 / double(train_size);
  double inf_norm = 0.0;
  for (double x : a) inf_norm = std::max(inf_norm, std::abs(x));
  std::vector<double> out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] < 0.0)
      out[j] = 0.0;
    else if (a[j] <= cap)
      out[j] = a[j];
    else
      out[j] = a[j] / (inf_norm * train_size);
  }
  return out;
}

inline double lagrangian(const std::vector<double>& w,
                         const std::vector<double>& alpha,
                         const std::vector<std::vector<double>>& views,
                         const std::vector<int>& y, double lambda) {
  double value = 0.0;
  for (double x : w) value += std::abs(x);
  value *= lambda;
  for (std::size_t j = 0; j < views.size(); ++j) {
    double dot = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) dot += w[i] * views[j][i];
    value -= alpha[j] * (y[j] * dot - 1.0);
  }
  return value;
}

// Gradient of L with respect to w where it exists (no zero entry in w):
// lambda sign(w) - sum_j alpha_j y_j X_j.
inline std::vector<double> lagrangian_gradient_w(
    const std::vector<double>& w, const std::vector<double>& alpha,
    const std::vector<std::vector<double>>& views, const std::vector<int>& y,
    double lambda) {
  std::vector<double> grad(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    grad[i] = w[i] > 0.0 ? lambda : (w[i] < 0.0 ? -lambda : 0.0);
  for (std::size_t j = 0; j < views.size(); ++j)
    for (std::size_t i = 0; i < w.size(); ++i)
      grad[i] -= alpha[j] * y[j] * views[j][i];
  return grad;
}

// Gradient of L with respect to alpha_j: 1 - y_j w'X_j.
inline std::vector<double> lagrangian_gradient_alpha(
    const std::vector<double>& w, const std::vector<std::vector<double>>& views,
    const std::vector<int>& y) {
  std::vector<double> grad(views.size());
  for (std::size_t j = 0; j < views.size(); ++j) {
    double dot = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) dot += w[i] * views[j][i];
    grad[j] = 1.0 - y[j] * dot;
  }
  return grad;
}

inline saddle_result saddle_solve(
    const std::vector<std::vector<double>>& views, const std::vector<int>& y,
    const saddle_options& opt = {},
    std::vector<std::pair<double, double>>* wstep_trace = nullptr) {
  const std::size_t n = views.size();
  if (n < 1) throw domain_error("saddle needs at least one training item");
  if (y.size() != n) throw domain_error("label count must match view count");
  for (int label : y)
    if (label != 1 && label != -1) throw domain_error("labels must be +1 or -1");
  if (opt.lambda < 0.0) throw domain_error("lambda must be nonnegative");
  if (!(opt.tol > 0.0)) throw domain_error("tol must be positive");
  const std::size_t dim = views[0].size();

  saddle_result result;
  result.w_last.assign(dim, 0.0);
  result.alpha.assign(n, 1.0 / double(n));
  // Constant-step subgradient iterations are not descent methods; the
  // returned weight vector is the iterate with the lowest primal objective
  // seen, the usual best-point convention.
  result.w = result.w_last;
  result.primal = saddle_primal(result.w_last, views, y, opt.lambda);

  std::vector<double> direction(dim), mass(dim);
  int iter = 0;
  for (; iter < opt.max_iter; ++iter) {
    // mass = sum_j alpha_j y_j X_j; the Lagrangian at fixed alpha is
    // lambda ||w||_1 - w'mass + sum alpha, so candidate evaluations are O(L).
    std::fill(mass.begin(), mass.end(), 0.0);
    double alpha_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      alpha_sum += result.alpha[j];
      for (std::size_t i = 0; i < dim; ++i)
        mass[i] += result.alpha[j] * y[j] * views[j][i];
    }
    for (std::size_t i = 0; i < dim; ++i)
      direction[i] = opt.lambda > 0.0 ? mass[i] / opt.lambda : mass[i];
    direction = proj_subgradient(direction);

    auto partial = [&](const std::vector<double>& w) {
      double value = 0.0;
      for (std::size_t i = 0; i < dim; ++i)
        value += opt.lambda * std::abs(w[i]) - w[i] * mass[i];
      return value + alpha_sum;
    };
    std::vector<double> minus(dim), plus(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      minus[i] = result.w_last[i] - opt.step_w * direction[i];
      plus[i] = result.w_last[i] + opt.step_w * direction[i];
    }
    const double l_now = partial(result.w_last);
    const double l_minus = partial(minus);
    const double l_plus = partial(plus);

    double w_delta = 0.0;
    if (std::min(l_minus, l_plus) <= l_now) {
      const auto& next = l_minus <= l_plus ? minus : plus;
      for (std::size_t i = 0; i < dim; ++i) {
        const double d = next[i] - result.w_last[i];
        w_delta += d * d;
      }
      if (wstep_trace)
        wstep_trace->push_back({l_now, std::min(l_minus, l_plus)});
      result.w_last = next;
    } else {
      ++result.stalled_steps;
      if (wstep_trace) wstep_trace->push_back({l_now, l_now});
    }

    // 1 - y_j w'X_j doubles as the alpha ascent direction and the hinge
    // values of the primal objective at the fresh iterate.
    auto grad = lagrangian_gradient_alpha(result.w_last, views, y);
    double hinge = 0.0;
    for (double gj : grad) hinge += std::max(0.0, gj);
    double l1 = 0.0;
    for (double wi : result.w_last) l1 += std::abs(wi);
    const double primal = hinge / double(n) + opt.lambda * l1;
    if (primal < result.primal) {
      result.primal = primal;
      result.w = result.w_last;
    }

    std::vector<double> moved(n);
    for (std::size_t j = 0; j < n; ++j)
      moved[j] = result.alpha[j] + opt.step_alpha * grad[j];
    auto next_alpha = proj_multipliers(moved, int(n));
    double a_delta = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = next_alpha[j] - result.alpha[j];
      a_delta += d * d;
    }
    result.alpha = std::move(next_alpha);

    if (std::sqrt(w_delta) < opt.tol && std::sqrt(a_delta) < opt.tol) {
      result.converged = true;
      ++iter;
      break;
    }
  }
  result.iterations = iter;
  return result;
}

// Nonnegative truncation: unreliable (negative-weight) labelers are dropped
// rather than inverted.
inline std::vector<double> robustify(const std::vector<double>& w) {
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = std::max(w[i], 0.0);
  return out;
}

// sign(w'X) with sign(0) = +1.
inline int saddle_predict_binary(const std::vector<double>& w,
                                 const std::vector<double>& view) {
  double dot = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) dot += w[i] * view[i];
  return dot >= 0.0 ? 1 : -1;
}

// Per-class weight vectors from the one-vs-all reduction; argmax of
// w_k' signed_view(j, k) with the smallest-index tie rule. Classes without a
// trained vector (empty weights) score -infinity.
inline int saddle_predict_multiclass(
    const std::vector<std::vector<double>>& per_class_w, const label_matrix& m,
    int item) {
  int best = 1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= int(per_class_w.size()); ++k) {
    if (per_class_w[k - 1].empty()) continue;
    const auto view = m.signed_view(item, k);
    double score = 0.0;
    for (std::size_t i = 0; i < view.size(); ++i)
      score += per_class_w[k - 1][i] * view[i];
    if (score > best_score) {
      best = k;
      best_score = score;
    }
  }
  return best;
}

// Single reliability vector for the robust variant: the positive parts of
// the per-class weight vectors summed over classes. Feeds weighted_plurality.
inline std::vector<double> robust_reliability(
    const std::vector<std::vector<double>>& per_class_w, int labelers) {
  std::vector<double> out(labelers, 0.0);
  for (const auto& w : per_class_w)
    for (std::size_t i = 0; i < w.size(); ++i) out[i] += std::max(w[i], 0.0);
  return out;
}

}  // namespace quorum
