#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "quorum/error.hpp"
#include "quorum/label_matrix.hpp"

namespace quorum {

// Unsupervised plurality over the labelers who labeled item j. Ties break
// to the smallest class index, so an unlabeled item yields class 1.
inline int majority_vote(const label_matrix& m, int item) {
  std::vector<int> votes(m.classes(), 0);
  for (const auto& e : m.item_entries(item)) ++votes[e.label - 1];
  return 1 + int(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

// argmax_k sum_i w_i 1{x_ij = k}; missing labels contribute nothing.
inline int weighted_plurality(const std::vector<double>& weights,
                              const label_matrix& m, int item) {
  if (int(weights.size()) != m.labelers())
    throw domain_error("weight vector length must equal the labeler count");
  std::vector<double> score(m.classes(), 0.0);
  for (const auto& e : m.item_entries(item))
    score[e.label - 1] += weights[e.labeler - 1];
  return 1 + int(std::max_element(score.begin(), score.end()) - score.begin());
}

// Per-labeler training accuracy, normalized to sum 1. When no labeler is
// ever correct the weights fall back to uniform.
inline std::vector<double> wa_train(const label_matrix& m,
                                    const gold_labels& gold,
                                    const std::vector<int>& train_items) {
  if (train_items.empty()) throw domain_error("training set is empty");
  std::vector<double> correct(m.labelers(), 0.0);
  for (int j : train_items)
    for (const auto& e : m.item_entries(j))
      if (e.label == gold.at(j)) correct[e.labeler - 1] += 1.0;
  double total = 0.0;
  for (double q : correct) total += q;
  if (total == 0.0)
    return std::vector<double>(m.labelers(), 1.0 / m.labelers());
  for (double& q : correct) q /= total;
  return correct;
}

// ---------------------------------------------------------------------------
// Exponential weighted forecaster.
//
// The binary form follows the stagewise prediction
//   yhat = ceil(sum_i w_i x_i / sum_i w_i - 1/2)
// (the exact 1/2 boundary predicts 0 because ceil(0) = 0) and the update
//   w_i <- w_i exp(-eta (x_i - y)^2),
// both restricted to the labelers who labeled the stage item. A labeler who
// abstains neither predicts nor is penalized. With eta = sqrt(8 ln L / N_s)
// the regret to the best labeler is bounded by sqrt(N_s/2 ln L).
//
// For K > 2 the update uses the 0-1 loss (which the squared loss reduces to
// on {0,1} labels) and prediction goes through weighted_plurality.
// ---------------------------------------------------------------------------

struct ewa_state {
  std::vector<double> weights;
  double eta = 0.0;
  std::vector<double> cumulative_losses;
  double own_loss = 0.0;
  int stages = 0;
};

inline double ewa_eta(int labelers, int train_size) {
  if (labelers < 1 || train_size < 1)
    throw domain_error("eta needs positive labeler and stage counts");
  return std::sqrt(8.0 * std::log(double(labelers)) / train_size);
}

inline ewa_state ewa_init(int labelers, double eta) {
  if (labelers < 1) throw domain_error("labeler count must be >= 1");
  if (!(eta > 0.0)) throw domain_error("eta must be positive");
  ewa_state s;
  s.weights.assign(labelers, 1.0 / labelers);
  s.cumulative_losses.assign(labelers, 0.0);
  s.eta = eta;
  return s;
}

// bits: one entry per labeler, 1 or 0 for a cast label, -1 for missing.
inline int ewa_predict(const ewa_state& s, const std::vector<int>& bits) {
  double mass = 0.0, vote = 0.0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] < 0) continue;
    mass += s.weights[i];
    vote += s.weights[i] * bits[i];
  }
  if (mass <= 0.0) return 1;  // nobody labeled: default prediction
  return int(std::ceil(vote / mass - 0.5));
}

inline int ewa_step(ewa_state& s, const std::vector<int>& bits, int truth) {
  if (bits.size() != s.weights.size())
    throw domain_error("bit vector length must equal the labeler count");
  if (truth != 0 && truth != 1) throw domain_error("truth must be 0 or 1");
  const int prediction = ewa_predict(s, bits);
  s.own_loss += double((prediction - truth) * (prediction - truth));
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] < 0) continue;
    const double loss = double((bits[i] - truth) * (bits[i] - truth));
    s.cumulative_losses[i] += loss;
    s.weights[i] *= std::exp(-s.eta * loss);
  }
  ++s.stages;
  return prediction;
}

inline int ewa_step_multiclass(ewa_state& s, const label_matrix& m, int item,
                               int truth) {
  const int prediction = weighted_plurality(s.weights, m, item);
  s.own_loss += prediction == truth ? 0.0 : 1.0;
  for (const auto& e : m.item_entries(item)) {
    const double loss = e.label == truth ? 0.0 : 1.0;
    s.cumulative_losses[e.labeler - 1] += loss;
    s.weights[e.labeler - 1] *= std::exp(-s.eta * loss);
  }
  ++s.stages;
  return prediction;
}

// Forecaster loss minus the best labeler's loss in hindsight.
inline double ewa_regret(const ewa_state& s) {
  if (s.stages < 1) throw domain_error("regret needs at least one stage");
  double best = *std::min_element(s.cumulative_losses.begin(),
                                  s.cumulative_losses.end());
  return s.own_loss - best;
}

// {1, 0, -1} encoding of an item's labels against a focal class (class 1 for
// the plain binary task): 1 = focal, 0 = some other class, -1 = missing.
inline std::vector<int> binary_bits(const label_matrix& m, int item,
                                    int focal_class = 1) {
  std::vector<int> bits(m.labelers(), -1);
  for (const auto& e : m.item_entries(item))
    bits[e.labeler - 1] = e.label == focal_class ? 1 : 0;
  return bits;
}

}  // namespace quorum
