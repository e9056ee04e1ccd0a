#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "quorum/error.hpp"
#include "quorum/label_matrix.hpp"

namespace quorum {

// Multi-class Adaboost over labelers-as-weak-classifiers. Each round picks
// the labeler with the lowest weighted training error (a missing label counts
// as a misclassification), weights it by log((1-err)/err) + ln(K-1), then
// reweights the training items toward the mistakes. Labelers may be selected
// again in later rounds.

struct ada_round {
  int labeler = 0;
  double weight = 0.0;
  double err = 0.0;  // clamped weighted error of the selected labeler
};

struct ada_model {
  std::vector<ada_round> rounds;
  int classes = 0;
};

// Round weight for a weak classifier with weighted error `err` among K
// classes; positive exactly when err < (K-1)/K.
inline double ada_round_weight(double err, int classes) {
  return std::log((1.0 - err) / err) + std::log(double(classes - 1));
}

inline ada_model ada_train(const label_matrix& m, const gold_labels& gold,
                           const std::vector<int>& train_items, int rounds = 0,
                           std::vector<std::vector<double>>* alpha_trace = nullptr) {
  if (train_items.empty()) throw domain_error("training set is empty");
  const int L = m.labelers();
  const int K = m.classes();
  const int total_rounds = rounds > 0 ? rounds : L;
  const double eps = 1e-10;
  const std::size_t n = train_items.size();

  // mistakes[i][t]: labeler i+1 wrong on train item t (missing = wrong).
  std::vector<std::vector<char>> mistakes(L, std::vector<char>(n, 1));
  for (std::size_t t = 0; t < n; ++t) {
    const int y = gold.at(train_items[t]);
    for (const auto& e : m.item_entries(train_items[t]))
      mistakes[e.labeler - 1][t] = e.label != y;
  }

  std::vector<double> alpha(n, 1.0 / double(n));
  ada_model model;
  model.classes = K;
  for (int round = 0; round < total_rounds; ++round) {
    double alpha_sum = 0.0;
    for (double a : alpha) alpha_sum += a;
    int best = -1;
    double best_err = 0.0;
    for (int i = 0; i < L; ++i) {
      double err = 0.0;
      for (std::size_t t = 0; t < n; ++t)
        if (mistakes[i][t]) err += alpha[t];
      err /= alpha_sum;
      if (best < 0 || err < best_err) {
        best = i;
        best_err = err;
      }
    }
    if (best_err >= double(K - 1) / K) break;  // weak-learning condition gone
    const double err = std::clamp(best_err, eps, 1.0 - eps);
    const double w = ada_round_weight(err, K);
    model.rounds.push_back({best + 1, w, err});
    double total = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      if (mistakes[best][t]) alpha[t] *= std::exp(w);
      total += alpha[t];
    }
    for (double& a : alpha) a /= total;
    if (alpha_trace) alpha_trace->push_back(alpha);
  }
  return model;
}

// Weighted vote of the selected labelers; a labeler missing on the item
// abstains. An empty model falls back to class 1 via the tie rule.
inline int ada_predict(const ada_model& model, const label_matrix& m, int item) {
  std::vector<double> score(model.classes, 0.0);
  for (const auto& r : model.rounds) {
    const int label = m.label(r.labeler, item);
    if (label > 0) score[label - 1] += r.weight;
  }
  return 1 + int(std::max_element(score.begin(), score.end()) - score.begin());
}

}  // namespace quorum
