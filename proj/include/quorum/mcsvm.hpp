#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "quorum/error.hpp"
#include "quorum/label_matrix.hpp"

namespace quorum {

// Crammer-Singer multi-class SVM over one-hot views, trained in the dual:
//
//   max_tau  -1/2 sum_jz (X_j'X_z)(tau_j' tau_z) + lambda sum_j tau_j' e_{y_j}
//   s.t.     tau_j <= 1_{y_j} entrywise,  1' tau_j = 0   for every column j.
//
// Projected gradient ascent with step 1/trace(Gram); each step projects every
// column back onto its feasible polytope with the sort-based water-filling
// below.

struct mcsvm_options {
  double lambda = 10.0;
  double tol = 1e-9;  // sup-norm of the projected residual
  int max_iter = 100000;
};

struct mcsvm_model {
  std::vector<std::vector<double>> tau;  // one column per training item
  std::vector<std::vector<double>> support_views;
  std::vector<int> support_labels;
  double lambda = 0.0;
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Euclidean projection of v onto {nu : nu_k <= [k == y], sum_k nu_k = 0}.
// With z = v - e_y the multiplier theta solves sum_k max(theta - z_k, 0) = 1,
// found exactly by scanning the sorted z; then nu_k = min(v_k - theta, u_k).
inline std::vector<double> mcsvm_project_column(const std::vector<double>& v,
                                                int y_class) {
  const int k = int(v.size());
  if (y_class < 1 || y_class > k) throw domain_error("class out of range");
  std::vector<double> z(v);
  z[y_class - 1] -= 1.0;
  std::vector<double> sorted(z);
  std::sort(sorted.begin(), sorted.end());
  double theta = 0.0;
  double prefix = 0.0;
  for (int r = 1; r <= k; ++r) {
    prefix += sorted[r - 1];
    const double candidate = (1.0 + prefix) / r;
    if (candidate > sorted[r - 1] - 1e-15 &&
        (r == k || candidate <= sorted[r] + 1e-15)) {
      theta = candidate;
      break;
    }
  }
  std::vector<double> out(v.size());
  for (int i = 0; i < k; ++i) {
    const double bound = i == y_class - 1 ? 1.0 : 0.0;
    out[i] = std::min(v[i] - theta, bound);
  }
  return out;
}

inline double mcsvm_objective(const std::vector<std::vector<double>>& gram,
                              const std::vector<int>& y,
                              const std::vector<std::vector<double>>& tau,
                              double lambda) {
  const std::size_t n = y.size();
  double value = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    value += lambda * tau[j][y[j] - 1];
    for (std::size_t z = 0; z < n; ++z) {
      double dot = 0.0;
      for (std::size_t k = 0; k < tau[j].size(); ++k) dot += tau[j][k] * tau[z][k];
      value -= 0.5 * gram[j][z] * dot;
    }
  }
  return value;
}

inline std::vector<std::vector<double>> mcsvm_gram(
    const std::vector<std::vector<double>>& views) {
  const std::size_t n = views.size();
  std::vector<std::vector<double>> gram(n, std::vector<double>(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t z = j; z < n; ++z) {
      double dot = 0.0;
      for (std::size_t d = 0; d < views[j].size(); ++d)
        dot += views[j][d] * views[z][d];
      gram[j][z] = gram[z][j] = dot;
    }
  return gram;
}

// Gradient of the dual objective with respect to column j.
inline std::vector<double> mcsvm_column_gradient(
    const std::vector<std::vector<double>>& gram, const std::vector<int>& y,
    const std::vector<std::vector<double>>& tau, double lambda, std::size_t j) {
  const std::size_t classes = tau[0].size();
  std::vector<double> grad(classes, 0.0);
  grad[y[j] - 1] = lambda;
  for (std::size_t z = 0; z < tau.size(); ++z)
    for (std::size_t k = 0; k < classes; ++k)
      grad[k] -= gram[j][z] * tau[z][k];
  return grad;
}

inline mcsvm_model mcsvm_train(const std::vector<std::vector<double>>& views,
                               const std::vector<int>& y, int classes,
                               const mcsvm_options& opt = {},
                               std::vector<double>* objective_trace = nullptr) {
  const std::size_t n = views.size();
  if (n < 1) throw domain_error("mcsvm needs at least one training item");
  if (y.size() != n) throw domain_error("label count must match view count");
  if (classes < 2) throw domain_error("mcsvm needs at least 2 classes");
  for (int label : y)
    if (label < 1 || label > classes) throw domain_error("label out of range");
  if (!(opt.lambda > 0.0)) throw domain_error("lambda must be positive");

  auto gram = mcsvm_gram(views);
  double trace = 0.0;
  for (std::size_t j = 0; j < n; ++j) trace += gram[j][j];
  const double step = 1.0 / std::max(trace, 1e-12);

  mcsvm_model model;
  model.lambda = opt.lambda;
  model.support_views = views;
  model.support_labels = y;
  model.tau.assign(n, std::vector<double>(classes, 0.0));

  int iter = 0;
  for (; iter < opt.max_iter; ++iter) {
    double residual = 0.0;
    std::vector<std::vector<double>> next(n);
    for (std::size_t j = 0; j < n; ++j) {
      auto grad = mcsvm_column_gradient(gram, y, model.tau, opt.lambda, j);
      std::vector<double> moved(classes);
      for (int k = 0; k < classes; ++k)
        moved[k] = model.tau[j][k] + step * grad[k];
      next[j] = mcsvm_project_column(moved, y[j]);
      for (int k = 0; k < classes; ++k)
        residual = std::max(residual, std::abs(next[j][k] - model.tau[j][k]));
    }
    model.tau = std::move(next);
    if (objective_trace)
      objective_trace->push_back(mcsvm_objective(gram, y, model.tau, opt.lambda));
    if (residual < opt.tol) {
      model.converged = true;
      ++iter;
      break;
    }
  }
  model.iterations = iter;
  model.objective = mcsvm_objective(gram, y, model.tau, opt.lambda);
  return model;
}

inline double mcsvm_score(const mcsvm_model& model,
                          const std::vector<double>& view, int k) {
  double score = 0.0;
  for (std::size_t z = 0; z < model.support_views.size(); ++z) {
    double dot = 0.0;
    for (std::size_t d = 0; d < view.size(); ++d)
      dot += model.support_views[z][d] * view[d];
    score += model.tau[z][k - 1] * dot;
  }
  return score;
}

// argmax_k sum_z tau_kz X_z'X_j with the smallest-index tie rule.
inline int mcsvm_predict(const mcsvm_model& model, const std::vector<double>& view) {
  if (!model.support_views.empty() &&
      view.size() != model.support_views[0].size())
    throw domain_error("view dimension must match the trained model");
  const int classes = int(model.tau.empty() ? 0 : model.tau[0].size());
  int best = 1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= classes; ++k) {
    const double score = mcsvm_score(model, view, k);
    if (score > best_score) {
      best = k;
      best_score = score;
    }
  }
  return best;
}

}  // namespace quorum
