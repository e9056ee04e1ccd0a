#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "quorum/error.hpp"
#include "quorum/label_matrix.hpp"

namespace quorum {

// Dirichlet-smoothed generative classifier over labeler outputs. Priors use
// the add-one posterior mean (phi_k + 1)/(N_s + K); each labeler's
// class-conditional distribution is add-one smoothed over its label alphabet.
// Missing labels are a modeled symbol by default (alphabet 0..K) because
// sparse crowds make missingness informative; `ignore` drops them from both
// training counts and prediction.

enum class nb_missing { model, ignore };

struct nb_model {
  int classes = 0;
  int labelers = 0;
  nb_missing mode = nb_missing::model;
  std::vector<double> prior;                       // K entries
  std::vector<double> log_prior;                   // K entries
  std::vector<std::vector<std::vector<double>>> cond;      // [labeler][class][symbol]
  std::vector<std::vector<std::vector<double>>> log_cond;  // same shape
  std::vector<int> class_counts;                           // phi_k
  std::vector<std::vector<std::vector<int>>> symbol_counts;  // phi_kl per labeler
};

inline nb_model nb_train(const label_matrix& m, const gold_labels& gold,
                         const std::vector<int>& train_items,
                         nb_missing mode = nb_missing::model) {
  if (train_items.empty()) throw domain_error("training set is empty");
  const int L = m.labelers();
  const int K = m.classes();
  const int n = int(train_items.size());

  nb_model model;
  model.classes = K;
  model.labelers = L;
  model.mode = mode;
  model.class_counts.assign(K, 0);
  for (int j : train_items) {
    const int y = gold.at(j);
    if (y > K) throw domain_error("gold label exceeds the class count");
    ++model.class_counts[y - 1];
  }
  model.prior.resize(K);
  model.log_prior.resize(K);
  for (int k = 0; k < K; ++k) {
    model.prior[k] = double(model.class_counts[k] + 1) / double(n + K);
    model.log_prior[k] = std::log(model.prior[k]);
  }

  // symbol index: 0 = missing, 1..K = cast label
  model.symbol_counts.assign(
      L, std::vector<std::vector<int>>(K, std::vector<int>(K + 1, 0)));
  for (int j : train_items) {
    const int y = gold.at(j) - 1;
    std::vector<int> symbol(L, 0);
    for (const auto& e : m.item_entries(j)) symbol[e.labeler - 1] = e.label;
    for (int i = 0; i < L; ++i) ++model.symbol_counts[i][y][symbol[i]];
  }

  model.cond.assign(L, std::vector<std::vector<double>>(
                           K, std::vector<double>(K + 1, 0.0)));
  model.log_cond = model.cond;
  for (int i = 0; i < L; ++i)
    for (int k = 0; k < K; ++k) {
      const auto& counts = model.symbol_counts[i][k];
      if (mode == nb_missing::model) {
        const double denom = double(model.class_counts[k] + K + 1);
        for (int z = 0; z <= K; ++z) {
          model.cond[i][k][z] = double(counts[z] + 1) / denom;
          model.log_cond[i][k][z] = std::log(model.cond[i][k][z]);
        }
      } else {
        // Only cast labels count; the denominator uses the labeler's own
        // labeled tally so each row still sums to one.
        int labeled = 0;
        for (int z = 1; z <= K; ++z) labeled += counts[z];
        const double denom = double(labeled + K);
        for (int z = 1; z <= K; ++z) {
          model.cond[i][k][z] = double(counts[z] + 1) / denom;
          model.log_cond[i][k][z] = std::log(model.cond[i][k][z]);
        }
      }
    }
  return model;
}

// argmax_k of log prior_k + sum_i log g_k^(i)(x_ij), smallest index on ties.
inline int nb_predict(const nb_model& model, const label_matrix& m, int item) {
  std::vector<int> symbol(model.labelers, 0);
  for (const auto& e : m.item_entries(item)) symbol[e.labeler - 1] = e.label;
  int best = 1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < model.classes; ++k) {
    double score = model.log_prior[k];
    for (int i = 0; i < model.labelers; ++i) {
      if (symbol[i] == 0 && model.mode == nb_missing::ignore) continue;
      score += model.log_cond[i][k][symbol[i]];
    }
    if (score > best_score) {
      best = k + 1;
      best_score = score;
    }
  }
  return best;
}

}  // namespace quorum
