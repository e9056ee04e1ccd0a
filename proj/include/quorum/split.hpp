#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "quorum/error.hpp"
#include "quorum/label_matrix.hpp"
#include "quorum/rng.hpp"

namespace quorum {

enum class split_method {
  seeded_shuffle,  // Fisher-Yates over the gold items, first N_s train
  first_n,         // lowest N_s item ids train; for regression tests
};

struct split_spec {
  int train_size = 0;
  std::uint64_t seed = 0;
  split_method method = split_method::seeded_shuffle;
};

// Train ids keep selection order (online methods consume them as a stream);
// test ids are sorted ascending.
struct train_test_split {
  std::vector<int> train;
  std::vector<int> test;
};

// Partitions the gold-labeled items into |train| = N_s and the rest.
// Deterministic for a given spec.
inline train_test_split split(const gold_labels& gold, const split_spec& spec) {
  const int n = int(gold.size());
  if (spec.train_size < 1) throw domain_error("train size must be >= 1");
  if (spec.train_size >= n)
    throw domain_error("train size must be smaller than the gold item count");
  std::vector<int> ids;
  ids.reserve(n);
  for (const auto& [item, label] : gold.entries()) ids.push_back(item);
  if (spec.method == split_method::seeded_shuffle) {
    rng r(spec.seed);
    r.shuffle(ids);
  }
  train_test_split out;
  out.train.assign(ids.begin(), ids.begin() + spec.train_size);
  out.test.assign(ids.begin() + spec.train_size, ids.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace quorum
