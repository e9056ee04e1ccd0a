#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "quorum/error.hpp"
#include "quorum/label_matrix.hpp"

namespace quorum {

// Binary soft-margin SVM trained in the dual:
//
//   max_sigma  -1/2 sum_jz sigma_j sigma_z y_j y_z X_j'X_z + sum_j sigma_j
//   s.t.       0 <= sigma_j <= C/N_s.
//
// The box is the only constraint; the equality constraint of the textbook
// dual is intentionally absent here, and the intercept is recovered
// afterwards as the average of y_j - w'X_j over the strictly interior duals
// (see the note on csvm_intercept). Solved by projected gradient ascent with
// step 1/trace(Q), which keeps the objective nondecreasing.

struct csvm_options {
  double c = 10.0;
  double tol = 1e-9;  // sup-norm of the projected-gradient residual
  int max_iter = 200000;
};

struct csvm_model {
  std::vector<double> sigma;
  std::vector<double> weight;
  double intercept = 0.0;
  double c = 0.0;
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
};

inline double csvm_objective(const std::vector<std::vector<double>>& views,
                             const std::vector<int>& y,
                             const std::vector<double>& sigma) {
  const std::size_t n = views.size();
  double value = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    value += sigma[j];
    for (std::size_t z = 0; z < n; ++z) {
      double dot = 0.0;
      for (std::size_t d = 0; d < views[j].size(); ++d)
        dot += views[j][d] * views[z][d];
      value -= 0.5 * sigma[j] * sigma[z] * y[j] * y[z] * dot;
    }
  }
  return value;
}

// Gradient of the dual objective: 1 - (Q sigma)_j with Q_jz = y_j y_z X_j'X_z.
inline std::vector<double> csvm_gradient(
    const std::vector<std::vector<double>>& views, const std::vector<int>& y,
    const std::vector<double>& sigma) {
  const std::size_t n = views.size();
  std::vector<double> grad(n, 1.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t z = 0; z < n; ++z) {
      double dot = 0.0;
      for (std::size_t d = 0; d < views[j].size(); ++d)
        dot += views[j][d] * views[z][d];
      grad[j] -= sigma[z] * y[j] * y[z] * dot;
    }
  return grad;
}

inline csvm_model csvm_train(const std::vector<std::vector<double>>& views,
                             const std::vector<int>& y,
                             const csvm_options& opt = {},
                             std::vector<double>* objective_trace = nullptr) {
  const std::size_t n = views.size();
  if (n < 2) throw domain_error("csvm needs at least two training items");
  if (y.size() != n) throw domain_error("label count must match view count");
  bool pos = false, neg = false;
  for (int label : y) {
    if (label == 1) pos = true;
    else if (label == -1) neg = true;
    else throw domain_error("labels must be +1 or -1");
  }
  if (!pos || !neg)
    throw domain_error("csvm needs both classes in the training set");
  if (!(opt.c > 0.0)) throw domain_error("C must be positive");

  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  double trace = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t z = j; z < n; ++z) {
      double dot = 0.0;
      for (std::size_t d = 0; d < views[j].size(); ++d)
        dot += views[j][d] * views[z][d];
      q[j][z] = q[z][j] = y[j] * y[z] * dot;
      if (z == j) trace += q[j][j];
    }
  const double step = 1.0 / std::max(trace, 1e-12);
  const double box = opt.c / double(n);

  csvm_model model;
  model.c = opt.c;
  model.sigma.assign(n, 0.0);
  std::vector<double> grad(n);
  int iter = 0;
  for (; iter < opt.max_iter; ++iter) {
    for (std::size_t j = 0; j < n; ++j) {
      grad[j] = 1.0;
      for (std::size_t z = 0; z < n; ++z) grad[j] -= q[j][z] * model.sigma[z];
    }
    double residual = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double next = std::clamp(model.sigma[j] + step * grad[j], 0.0, box);
      residual = std::max(residual, std::abs(next - model.sigma[j]));
      model.sigma[j] = next;
    }
    if (objective_trace)
      objective_trace->push_back(csvm_objective(views, y, model.sigma));
    if (residual < opt.tol) {
      model.converged = true;
      ++iter;
      break;
    }
  }
  model.iterations = iter;
  model.objective = csvm_objective(views, y, model.sigma);

  model.weight.assign(views[0].size(), 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t d = 0; d < views[j].size(); ++d)
      model.weight[d] += model.sigma[j] * y[j] * views[j][d];

  // Average y_j - w'X_j over strictly interior duals; no interior dual means
  // the intercept stays 0.
  const double slack = 1e-8;
  double sum = 0.0;
  int count = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (model.sigma[j] > slack && model.sigma[j] < box - slack) {
      double dot = 0.0;
      for (std::size_t d = 0; d < views[j].size(); ++d)
        dot += model.weight[d] * views[j][d];
      sum += y[j] - dot;
      ++count;
    }
  }
  model.intercept = count > 0 ? sum / count : 0.0;
  return model;
}

inline double csvm_decision(const csvm_model& model,
                            const std::vector<double>& view) {
  if (view.size() != model.weight.size())
    throw domain_error("view length must match the trained weight vector");
  double dot = model.intercept;
  for (std::size_t d = 0; d < view.size(); ++d)
    dot += model.weight[d] * view[d];
  return dot;
}

// sign(z) with sign(0) = +1.
inline int csvm_predict(const csvm_model& model, const std::vector<double>& view) {
  return csvm_decision(model, view) >= 0.0 ? 1 : -1;
}

// ---------------------------------------------------------------------------
// One-vs-all reduction. Class k trains a binary problem on the class-k signed
// views with labels +1 for gold == k. Prediction takes the argmax of the
// real-valued scores (not their signs); a class absent from the training set
// scores -infinity.
// ---------------------------------------------------------------------------

template <typename Model>
struct ova_model {
  std::vector<std::optional<Model>> models;  // one slot per class
};

// trainer(views, labels) -> Model
template <typename Trainer>
auto ova_train(const label_matrix& m, const gold_labels& gold,
               const std::vector<int>& train_items, Trainer&& trainer) {
  using model_type = std::decay_t<decltype(trainer(
      std::declval<const std::vector<std::vector<double>>&>(),
      std::declval<const std::vector<int>&>()))>;
  if (m.classes() < 2) throw domain_error("one-vs-all needs at least 2 classes");
  ova_model<model_type> out;
  out.models.resize(m.classes());
  for (int k = 1; k <= m.classes(); ++k) {
    std::vector<std::vector<double>> views;
    std::vector<int> labels;
    bool any_positive = false;
    for (int j : train_items) {
      views.push_back(m.signed_view(j, k));
      const int y = gold.at(j) == k ? 1 : -1;
      any_positive |= y == 1;
      labels.push_back(y);
    }
    if (!any_positive) continue;  // class unseen in training: score -inf
    out.models[k - 1] = trainer(views, labels);
  }
  return out;
}

// scorer(model, view) -> double
template <typename Model, typename Scorer>
int ova_predict(const ova_model<Model>& ova, const label_matrix& m, int item,
                Scorer&& scorer) {
  int best = 1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= int(ova.models.size()); ++k) {
    if (!ova.models[k - 1]) continue;
    const double score = scorer(*ova.models[k - 1], m.signed_view(item, k));
    if (score > best_score) {
      best = k;
      best_score = score;
    }
  }
  return best;
}

}  // namespace quorum
