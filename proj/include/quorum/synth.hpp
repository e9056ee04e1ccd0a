#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "quorum/error.hpp"
#include "quorum/label_matrix.hpp"
#include "quorum/rng.hpp"

namespace quorum {

// Synthetic crowd: gold labels drawn uniformly over 1..K; labeler i labels
// each item independently with probability 1 - missing_rate, emitting the
// gold label with probability p_i and a uniformly chosen wrong class
// otherwise. The first round(expert_fraction * L) labelers use
// expert_accuracy, the rest novice_accuracy.
struct synth_spec {
  int labelers = 0;
  int items = 0;
  int classes = 0;
  double expert_fraction = 0.0;
  double expert_accuracy = 0.0;
  double novice_accuracy = 0.0;
  double missing_rate = 0.0;
  std::uint64_t seed = 0;
};

inline void validate(const synth_spec& s) {
  if (s.labelers < 1 || s.items < 1 || s.classes < 1)
    throw domain_error("labelers, items and classes must be >= 1");
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(s.expert_fraction) || !prob(s.expert_accuracy) ||
      !prob(s.novice_accuracy))
    throw domain_error("accuracy parameters must lie in [0, 1]");
  if (!(s.missing_rate >= 0.0 && s.missing_rate < 1.0))
    throw domain_error("missing rate must lie in [0, 1)");
}

inline std::pair<label_matrix, gold_labels> synth_generate(const synth_spec& spec) {
  validate(spec);
  rng r(spec.seed);
  const int L = spec.labelers, N = spec.items, K = spec.classes;
  const int experts = int(std::llround(spec.expert_fraction * L));

  std::vector<std::pair<int, int>> gold_rows;
  std::vector<int> truth(N + 1, 0);
  for (int j = 1; j <= N; ++j) {
    truth[j] = 1 + int(r.below(K));
    gold_rows.push_back({j, truth[j]});
  }

  std::vector<label_triple> rows;
  for (int i = 1; i <= L; ++i) {
    const double accuracy =
        (i <= experts) ? spec.expert_accuracy : spec.novice_accuracy;
    for (int j = 1; j <= N; ++j) {
      if (spec.missing_rate > 0.0 && r.bernoulli(spec.missing_rate)) continue;
      int label = truth[j];
      if (K > 1 && !r.bernoulli(accuracy)) {
        int wrong = int(r.below(K - 1));
        label = (wrong + 1 < truth[j]) ? wrong + 1 : wrong + 2;
      }
      rows.push_back({j, i, label});
    }
  }
  // High missing rates can leave the last item or labeler without any row,
  // which would shrink the matrix dimensions below the requested shape.
  bool have_last_item = false, have_last_labeler = false;
  for (const auto& row : rows) {
    have_last_item |= row.item == N;
    have_last_labeler |= row.labeler == L;
  }
  if (rows.empty() || !have_last_item || !have_last_labeler)
    rows.push_back({N, L, truth[N]});
  return {label_matrix(rows, K), gold_labels(gold_rows)};
}

}  // namespace quorum
