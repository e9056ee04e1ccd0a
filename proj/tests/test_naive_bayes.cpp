#include <gtest/gtest.h>

#include <cmath>

#include "quorum/baselines.hpp"
#include "quorum/naive_bayes.hpp"
#include "quorum/split.hpp"
#include "quorum/synth.hpp"

namespace {

using namespace quorum;

label_matrix echo_matrix(const gold_labels& gold, int classes) {
  std::vector<label_triple> rows;
  for (const auto& [item, label] : gold.entries()) rows.push_back({item, 1, label});
  return label_matrix(rows, classes);
}

TEST(NbTrain, SmoothedPriors) {
  // N_s = 4, K = 2, phi = (3, 1): priors (4/6, 2/6).
  gold_labels gold({{1, 1}, {2, 1}, {3, 1}, {4, 2}});
  auto m = echo_matrix(gold, 2);
  auto model = nb_train(m, gold, {1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(model.prior[0], 4.0 / 6.0);
  EXPECT_DOUBLE_EQ(model.prior[1], 2.0 / 6.0);
}

TEST(NbTrain, UnseenClassKeepsPositivePrior) {
  gold_labels gold({{1, 1}, {2, 1}, {3, 1}});
  auto m = echo_matrix(gold, 3);
  auto model = nb_train(m, gold, {1, 2, 3});
  EXPECT_DOUBLE_EQ(model.prior[1], 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(model.prior[2], 1.0 / 6.0);
  EXPECT_GT(model.prior[1], 0.0);
}

TEST(NbTrain, EchoLabelerConcentratesItsRows) {
  gold_labels gold({{1, 1}, {2, 2}, {3, 1}, {4, 2}, {5, 1}});
  auto m = echo_matrix(gold, 2);
  auto model = nb_train(m, gold, {1, 2, 3, 4, 5});
  for (int k = 0; k < 2; ++k) {
    const auto& row = model.cond[0][k];
    const double diagonal = row[k + 1];
    for (int z = 0; z <= 2; ++z) EXPECT_GE(diagonal, row[z]);
  }
}

TEST(NbTrain, RowsSumToOneInBothModes) {
  synth_spec spec;
  spec.labelers = 5;
  spec.items = 25;
  spec.classes = 3;
  spec.expert_fraction = 0.4;
  spec.expert_accuracy = 0.9;
  spec.novice_accuracy = 0.4;
  spec.missing_rate = 0.3;
  spec.seed = 41;
  auto [m, gold] = synth_generate(spec);
  std::vector<int> train;
  for (int j = 1; j <= 15; ++j) train.push_back(j);
  for (auto mode : {nb_missing::model, nb_missing::ignore}) {
    auto model = nb_train(m, gold, train, mode);
    double prior_sum = 0.0;
    for (double p : model.prior) prior_sum += p;
    EXPECT_NEAR(prior_sum, 1.0, 1e-10);
    for (int i = 0; i < model.labelers; ++i)
      for (int k = 0; k < model.classes; ++k) {
        double row_sum = 0.0;
        for (int z = mode == nb_missing::model ? 0 : 1; z <= model.classes; ++z) {
          EXPECT_GT(model.cond[i][k][z], 0.0);
          row_sum += model.cond[i][k][z];
        }
        EXPECT_NEAR(row_sum, 1.0, 1e-10);
      }
  }
}

TEST(NbPredict, UniformModelFallsToClassOne) {
  // One labeler who abstains on both training items; classes equally
  // frequent, so every class scores identically on an unlabeled query.
  label_matrix m({{3, 1, 1}}, 2);  // the labeler only labeled item 3
  gold_labels gold({{1, 1}, {2, 2}});
  auto model = nb_train(m, gold, {1, 2});
  EXPECT_EQ(nb_predict(model, m, 1), 1);
}

TEST(NbPredict, FollowsAPerfectlyCorrelatedLabeler) {
  gold_labels gold({{1, 1}, {2, 2}, {3, 1}, {4, 2}});
  auto m = echo_matrix(gold, 2);
  auto model = nb_train(m, gold, {1, 2, 3, 4});
  // New item: the labeler says 2.
  label_matrix query({{1, 1, 2}}, 2);
  EXPECT_EQ(nb_predict(model, query, 1), 2);
}

TEST(NbPredict, LogDomainMatchesProductDomain) {
  synth_spec spec;
  spec.labelers = 4;
  spec.items = 30;
  spec.classes = 3;
  spec.expert_fraction = 0.5;
  spec.expert_accuracy = 0.8;
  spec.novice_accuracy = 0.4;
  spec.missing_rate = 0.25;
  spec.seed = 14;
  auto [m, gold] = synth_generate(spec);
  std::vector<int> train;
  for (int j = 1; j <= 20; ++j) train.push_back(j);
  auto model = nb_train(m, gold, train);
  for (int j = 1; j <= m.items(); ++j) {
    // product-domain argmax computed independently
    int best = 1;
    double best_score = -1.0;
    for (int k = 1; k <= model.classes; ++k) {
      double score = model.prior[k - 1];
      std::vector<int> symbol(model.labelers, 0);
      for (const auto& e : m.item_entries(j)) symbol[e.labeler - 1] = e.label;
      for (int i = 0; i < model.labelers; ++i)
        score *= model.cond[i][k - 1][symbol[i]];
      if (score > best_score) {
        best = k;
        best_score = score;
      }
    }
    EXPECT_EQ(nb_predict(model, m, j), best);
  }
}

TEST(NbPredict, SilentLabelerIsNeutralInIgnoreMode) {
  synth_spec spec;
  spec.labelers = 5;
  spec.items = 30;
  spec.classes = 2;
  spec.expert_fraction = 0.6;
  spec.expert_accuracy = 0.85;
  spec.novice_accuracy = 0.55;
  spec.missing_rate = 0.2;
  spec.seed = 23;
  auto [m, gold] = synth_generate(spec);
  std::vector<int> train;
  for (int j = 1; j <= 18; ++j) train.push_back(j);

  // Append a labeler who never labels anything (id 6 exists via a single
  // label on a fresh item beyond the evaluation range? keep the matrix shape
  // by raising L with an entry on the last item, then drop it from queries).
  auto rows = m.rows();
  rows.push_back({m.items(), 6, 1});
  label_matrix grown(rows, m.classes());

  auto base = nb_train(m, gold, train, nb_missing::ignore);
  auto with_extra = nb_train(grown, gold, train, nb_missing::ignore);
  for (int j = 1; j < m.items(); ++j)  // last item differs by construction
    EXPECT_EQ(nb_predict(with_extra, grown, j), nb_predict(base, m, j));
}

TEST(NbPredict, NearMajorityVoteOnEasyCrowd) {
  synth_spec spec;
  spec.labelers = 30;
  spec.items = 300;
  spec.classes = 2;
  spec.expert_fraction = 1.0;
  spec.expert_accuracy = 0.8;
  spec.novice_accuracy = 0.8;
  spec.missing_rate = 0.0;
  spec.seed = 314;
  auto [m, gold] = synth_generate(spec);
  auto s = split(gold, {30, 7, split_method::seeded_shuffle});
  auto model = nb_train(m, gold, s.train);
  int nb_correct = 0, mv_correct = 0;
  for (int j : s.test) {
    if (nb_predict(model, m, j) == gold.at(j)) ++nb_correct;
    if (majority_vote(m, j) == gold.at(j)) ++mv_correct;
  }
  const double nb_acc = double(nb_correct) / s.test.size();
  const double mv_acc = double(mv_correct) / s.test.size();
  EXPECT_GT(nb_acc, mv_acc - 0.05);
}

}  // namespace
