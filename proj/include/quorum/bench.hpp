#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "quorum/adaboost.hpp"
#include "quorum/baselines.hpp"
#include "quorum/em.hpp"
#include "quorum/error.hpp"
#include "quorum/io.hpp"
#include "quorum/label_matrix.hpp"
#include "quorum/mcsvm.hpp"
#include "quorum/naive_bayes.hpp"
#include "quorum/saddle.hpp"
#include "quorum/split.hpp"
#include "quorum/svm.hpp"

namespace quorum {

// ---------------------------------------------------------------------------
// Method registry (benchmark row order).
// ---------------------------------------------------------------------------

enum class method_id {
  best_labeler_oracle,
  majority_vote,
  weighted_averaging,
  ewa,
  csvm,
  mcsvm,
  em_unsup,
  em_sup,
  naive_bayes,
  mc_adaboost,
  saddle,
  saddle_robust,
};

inline const std::vector<std::pair<method_id, const char*>>& method_registry() {
  static const std::vector<std::pair<method_id, const char*>> registry = {
      {method_id::best_labeler_oracle, "best-labeler-oracle"},
      {method_id::majority_vote, "majority-vote"},
      {method_id::weighted_averaging, "weighted-averaging"},
      {method_id::ewa, "ewa"},
      {method_id::csvm, "csvm"},
      {method_id::mcsvm, "mcsvm"},
      {method_id::em_unsup, "em-unsup"},
      {method_id::em_sup, "em-sup"},
      {method_id::naive_bayes, "naive-bayes"},
      {method_id::mc_adaboost, "mc-adaboost"},
      {method_id::saddle, "saddle"},
      {method_id::saddle_robust, "saddle-robust"},
  };
  return registry;
}

inline const char* method_name(method_id id) {
  for (const auto& [mid, name] : method_registry())
    if (mid == id) return name;
  throw domain_error("unknown method id");
}

inline method_id method_from_name(const std::string& name) {
  for (const auto& [mid, mname] : method_registry())
    if (name == mname) return mid;
  throw domain_error("unknown method '" + name + "'");
}

// ---------------------------------------------------------------------------
// Evaluation options and results.
// ---------------------------------------------------------------------------

struct eval_options {
  std::optional<double> fixed_c;       // csvm; unset -> LOOCV sweep
  std::optional<double> fixed_lambda;  // mcsvm / saddle; unset -> LOOCV sweep
  std::optional<double> eta;           // ewa; unset -> sqrt(8 ln L / N_s)
  em_options em;
  nb_missing nb_mode = nb_missing::model;
  csvm_options csvm;      // c overridden per sweep
  mcsvm_options mcsvm;    // lambda overridden per sweep
  saddle_options saddle;  // lambda overridden per sweep
  int ada_rounds = 0;     // 0 -> L
};

struct bench_row {
  std::string dataset;
  std::string method;
  int train_size = 0;
  int test_size = 0;
  int labelers = 0;
  int correct = 0;
  double accuracy = 0.0;
  std::string hyperparams;
  double seconds = 0.0;
  bool converged = true;
  std::string error;  // nonempty: the cell failed
};

struct bench_dataset {
  std::string name;
  label_matrix matrix;
  gold_labels gold;
  int train_size = 0;  // N_s for this benchmark column
};

namespace detail {

inline std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

// Hyperparameter sweeps run from 0 to 200 in 21 linear points. The solvers
// require C > 0 and (for mcsvm) lambda > 0, so those grids drop the zero;
// the saddle method accepts lambda = 0. Grids are ordered least regularized
// first so ties resolve toward the most regularized value.
inline std::vector<double> loocv_grid_c() {
  std::vector<double> grid;
  for (int v = 200; v >= 10; v -= 10) grid.push_back(double(v));
  return grid;  // most regularized = smallest C = last
}

inline std::vector<double> loocv_grid_lambda(bool include_zero) {
  std::vector<double> grid;
  for (int v = include_zero ? 0 : 10; v <= 200; v += 10)
    grid.push_back(double(v));
  return grid;  // most regularized = largest lambda = last
}

// Leave-one-out accuracy of `predict_held_out(sub_train, value, item)` over
// the training items; a fold whose training throws counts as a miss.
template <typename FoldPredict>
double loocv_accuracy(const std::vector<int>& train, const gold_labels& gold,
                      double value, FoldPredict&& predict_held_out) {
  int correct = 0;
  for (std::size_t t = 0; t < train.size(); ++t) {
    std::vector<int> sub;
    sub.reserve(train.size() - 1);
    for (std::size_t s = 0; s < train.size(); ++s)
      if (s != t) sub.push_back(train[s]);
    try {
      if (predict_held_out(sub, value, train[t]) == gold.at(train[t])) ++correct;
    } catch (const error&) {
      // untrainable fold: scored as a miss
    }
  }
  return double(correct) / double(train.size());
}

// Returns the grid value with the best fold accuracy; ties go to the value
// appearing later in the grid (grids above order most regularized last).
template <typename FoldPredict>
double loocv_tune(const std::vector<double>& grid, const std::vector<int>& train,
                  const gold_labels& gold, FoldPredict&& predict_held_out) {
  if (grid.empty()) throw domain_error("empty hyperparameter grid");
  if (train.size() < 2) throw domain_error("loocv needs at least 2 train items");
  double best_value = grid.front();
  double best_accuracy = -1.0;
  for (double value : grid) {
    const double acc = loocv_accuracy(train, gold, value, predict_held_out);
    if (acc >= best_accuracy) {
      best_accuracy = acc;
      best_value = value;
    }
  }
  return best_value;
}

// Best single labeler on the test set; a missing label counts as wrong.
struct oracle_result {
  int labeler = 0;
  int correct = 0;
  double accuracy = 0.0;
};

inline oracle_result best_labeler_oracle(const label_matrix& m,
                                         const gold_labels& gold,
                                         const std::vector<int>& test) {
  if (test.empty()) throw domain_error("test set is empty");
  oracle_result best;
  for (int i = 1; i <= m.labelers(); ++i) {
    int correct = 0;
    for (int j : test)
      if (m.label(i, j) == gold.at(j)) ++correct;
    if (correct > best.correct || best.labeler == 0) {
      best.labeler = i;
      best.correct = correct;
    }
  }
  best.accuracy = double(best.correct) / double(test.size());
  return best;
}

// ---------------------------------------------------------------------------
// Per-method training/prediction used by both LOOCV folds and the final fit.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::vector<double>> signed_views(const label_matrix& m,
                                                     const std::vector<int>& items,
                                                     int focal_class) {
  std::vector<std::vector<double>> views;
  views.reserve(items.size());
  for (int j : items) views.push_back(m.signed_view(j, focal_class));
  return views;
}

// One-vs-all csvm with a given C; returns a per-item class predictor.
struct csvm_ova_fit {
  ova_model<csvm_model> ova;
  bool converged = true;
};

inline csvm_ova_fit fit_csvm(const label_matrix& m, const gold_labels& gold,
                             const std::vector<int>& train, double c,
                             const csvm_options& base) {
  csvm_options opt = base;
  opt.c = c;
  csvm_ova_fit fit;
  fit.ova = ova_train(m, gold, train,
                      [&](const std::vector<std::vector<double>>& views,
                          const std::vector<int>& y) {
                        return csvm_train(views, y, opt);
                      });
  for (const auto& model : fit.ova.models)
    if (model && !model->converged) fit.converged = false;
  return fit;
}

struct saddle_ova_fit {
  std::vector<std::vector<double>> per_class_w;  // empty vector = untrained
  bool converged = true;
};

inline saddle_ova_fit fit_saddle(const label_matrix& m, const gold_labels& gold,
                                 const std::vector<int>& train, double lambda,
                                 const saddle_options& base) {
  saddle_options opt = base;
  opt.lambda = lambda;
  saddle_ova_fit fit;
  auto ova = ova_train(m, gold, train,
                       [&](const std::vector<std::vector<double>>& views,
                           const std::vector<int>& y) {
                         return saddle_solve(views, y, opt);
                       });
  fit.per_class_w.resize(ova.models.size());
  for (std::size_t k = 0; k < ova.models.size(); ++k)
    if (ova.models[k]) {
      fit.per_class_w[k] = ova.models[k]->w;
      if (!ova.models[k]->converged) fit.converged = false;
    }
  return fit;
}

inline int predict_saddle_robust(const saddle_ova_fit& fit, const label_matrix& m,
                                 int item) {
  return weighted_plurality(robust_reliability(fit.per_class_w, m.labelers()), m,
                            item);
}

inline mcsvm_model fit_mcsvm(const label_matrix& m, const gold_labels& gold,
                             const std::vector<int>& train, double lambda,
                             const mcsvm_options& base) {
  mcsvm_options opt = base;
  opt.lambda = lambda;
  std::vector<std::vector<double>> views;
  std::vector<int> y;
  for (int j : train) {
    views.push_back(m.one_hot_view(j));
    y.push_back(gold.at(j));
  }
  return mcsvm_train(views, y, m.classes(), opt);
}

}  // namespace detail

// Dispatch body shared by evaluate(); kept separate so evaluate can wrap
// any training failure with the method name attached.
template <typename Score>
inline void run_method(method_id method, bench_row& row, const label_matrix& m,
                       const gold_labels& gold, const train_test_split& split,
                       const eval_options& opt, Score&& score) {
  switch (method) {
    case method_id::best_labeler_oracle: {
      auto oracle = best_labeler_oracle(m, gold, split.test);
      row.correct = oracle.correct;
      row.accuracy = oracle.accuracy;
      break;
    }
    case method_id::majority_vote: {
      score([&](int j) { return majority_vote(m, j); });
      break;
    }
    case method_id::weighted_averaging: {
      auto w = wa_train(m, gold, split.train);
      score([&](int j) { return weighted_plurality(w, m, j); });
      break;
    }
    case method_id::ewa: {
      const double eta =
          opt.eta ? *opt.eta : ewa_eta(m.labelers(), int(split.train.size()));
      auto state = ewa_init(m.labelers(), eta);
      if (m.classes() == 2) {
        for (int j : split.train)
          ewa_step(state, binary_bits(m, j), gold.at(j) == 1 ? 1 : 0);
        score([&](int j) {
          return ewa_predict(state, binary_bits(m, j)) == 1 ? 1 : 2;
        });
      } else {
        for (int j : split.train) ewa_step_multiclass(state, m, j, gold.at(j));
        score([&](int j) { return weighted_plurality(state.weights, m, j); });
      }
      row.hyperparams = "eta=" + detail::format_value(eta);
      break;
    }
    case method_id::csvm: {
      double c = opt.fixed_c.value_or(0.0);
      if (!opt.fixed_c) {
        c = loocv_tune(loocv_grid_c(), split.train, gold,
                       [&](const std::vector<int>& sub, double value, int item) {
                         auto fit = detail::fit_csvm(m, gold, sub, value, opt.csvm);
                         return ova_predict(fit.ova, m, item, csvm_decision);
                       });
      }
      auto fit = detail::fit_csvm(m, gold, split.train, c, opt.csvm);
      row.converged = fit.converged;
      score([&](int j) { return ova_predict(fit.ova, m, j, csvm_decision); });
      row.hyperparams = "C=" + detail::format_value(c);
      break;
    }
    case method_id::mcsvm: {
      double lambda = opt.fixed_lambda.value_or(0.0);
      if (!opt.fixed_lambda) {
        lambda = loocv_tune(
            loocv_grid_lambda(false), split.train, gold,
            [&](const std::vector<int>& sub, double value, int item) {
              auto fit = detail::fit_mcsvm(m, gold, sub, value, opt.mcsvm);
              return mcsvm_predict(fit, m.one_hot_view(item));
            });
      }
      auto fit = detail::fit_mcsvm(m, gold, split.train, lambda, opt.mcsvm);
      row.converged = fit.converged;
      score([&](int j) { return mcsvm_predict(fit, m.one_hot_view(j)); });
      row.hyperparams = "lambda=" + detail::format_value(lambda);
      break;
    }
    case method_id::em_unsup:
    case method_id::em_sup: {
      std::vector<double> wa;
      if (method == method_id::em_sup) wa = wa_train(m, gold, split.train);
      if (m.classes() == 2) {
        auto u0 = method == method_id::em_sup ? init_supervised(m, 1, wa)
                                              : init_unsupervised(m, 1);
        auto result = em_fit(m, 1, std::move(u0), opt.em);
        row.converged = result.converged;
        score([&](int j) {
          return em_predict_binary(result.params, j) == 1 ? 1 : 2;
        });
      } else {
        bool all_converged = true;
        auto labels = em_multiclass(m, opt.em,
                                    method == method_id::em_sup
                                        ? em_init::supervised
                                        : em_init::unsupervised,
                                    wa, &all_converged);
        row.converged = all_converged;
        score([&](int j) { return labels[j - 1]; });
      }
      break;
    }
    case method_id::naive_bayes: {
      auto model = nb_train(m, gold, split.train, opt.nb_mode);
      score([&](int j) { return nb_predict(model, m, j); });
      break;
    }
    case method_id::mc_adaboost: {
      auto model = ada_train(m, gold, split.train, opt.ada_rounds);
      score([&](int j) { return ada_predict(model, m, j); });
      break;
    }
    case method_id::saddle: {
      double lambda = opt.fixed_lambda.value_or(0.0);
      if (!opt.fixed_lambda) {
        lambda = loocv_tune(
            loocv_grid_lambda(true), split.train, gold,
            [&](const std::vector<int>& sub, double value, int item) {
              auto fit = detail::fit_saddle(m, gold, sub, value, opt.saddle);
              return saddle_predict_multiclass(fit.per_class_w, m, item);
            });
      }
      auto fit = detail::fit_saddle(m, gold, split.train, lambda, opt.saddle);
      row.converged = fit.converged;
      score([&](int j) { return saddle_predict_multiclass(fit.per_class_w, m, j); });
      row.hyperparams = "lambda=" + detail::format_value(lambda);
      break;
    }
    case method_id::saddle_robust: {
      double lambda = opt.fixed_lambda.value_or(0.0);
      if (!opt.fixed_lambda) {
        lambda = loocv_tune(
            loocv_grid_lambda(true), split.train, gold,
            [&](const std::vector<int>& sub, double value, int item) {
              auto fit = detail::fit_saddle(m, gold, sub, value, opt.saddle);
              return detail::predict_saddle_robust(fit, m, item);
            });
      }
      auto fit = detail::fit_saddle(m, gold, split.train, lambda, opt.saddle);
      row.converged = fit.converged;
      score([&](int j) { return detail::predict_saddle_robust(fit, m, j); });
      row.hyperparams = "lambda=" + detail::format_value(lambda);
      break;
    }
  }
}

// Runs one method on one dataset split and fills a result row (timing left to
// the caller). Unsupervised methods (majority vote, EM) consume the full
// label matrix and are scored on the test items only; supervised methods see
// gold labels for the training items alone.
inline bench_row evaluate(method_id method, const std::string& dataset_name,
                          const label_matrix& m, const gold_labels& gold,
                          const train_test_split& split,
                          const eval_options& opt = {}) {
  bench_row row;
  row.dataset = dataset_name;
  row.method = method_name(method);
  row.train_size = int(split.train.size());
  row.test_size = int(split.test.size());
  row.labelers = m.labelers();

  auto score = [&](auto&& predict) {
    for (int j : split.test)
      if (predict(j) == gold.at(j)) ++row.correct;
    row.accuracy = double(row.correct) / double(split.test.size());
  };

  try {
    run_method(method, row, m, gold, split, opt, score);
  } catch (const std::exception& e) {
    throw error(std::string(row.method) + ": " + e.what());
  }
  return row;
}

// Full registry sweep: rows appear in (dataset order given, registry method
// order), regardless of execution details. Failures are recorded on their
// row and the run continues.
inline std::vector<bench_row> bench_all(const std::vector<bench_dataset>& datasets,
                                        const std::vector<method_id>& methods,
                                        std::uint64_t split_seed,
                                        split_method split_how = split_method::seeded_shuffle,
                                        const eval_options& opt = {}) {
  if (datasets.empty()) throw domain_error("no datasets given");
  if (methods.empty()) throw domain_error("no methods given");
  std::vector<bench_row> rows;
  for (const auto& ds : datasets) {
    auto parts = split(ds.gold, {ds.train_size, split_seed, split_how});
    for (method_id method : methods) {
      const auto start = std::chrono::steady_clock::now();
      bench_row row;
      try {
        row = evaluate(method, ds.name, ds.matrix, ds.gold, parts, opt);
      } catch (const std::exception& e) {
        row.dataset = ds.name;
        row.method = method_name(method);
        row.train_size = int(parts.train.size());
        row.test_size = int(parts.test.size());
        row.labelers = ds.matrix.labelers();
        row.accuracy = std::numeric_limits<double>::quiet_NaN();
        row.error = e.what();
      }
      row.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
              .count();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Report writers.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace detail

// `timing` substitutes measured wall time for the constant 0.000; reruns with
// fixed seeds are byte-identical only when it is off.
inline void write_csv(const std::vector<bench_row>& rows, std::ostream& out,
                      bool timing = false) {
  out << "dataset,method,ns,test_size,labelers,accuracy,hyperparams,seconds,"
         "converged\n";
  char buf[64];
  for (const auto& row : rows) {
    out << detail::csv_safe(row.dataset) << ',' << row.method << ','
        << row.train_size << ',' << row.test_size << ',' << row.labelers << ',';
    if (row.error.empty()) {
      std::snprintf(buf, sizeof(buf), "%.10g", row.accuracy);
      out << buf;
    } else {
      out << "nan";
    }
    out << ',' << detail::csv_safe(row.hyperparams) << ',';
    std::snprintf(buf, sizeof(buf), "%.3f", timing ? row.seconds : 0.0);
    out << buf << ',';
    if (!row.error.empty())
      out << "error(" << detail::csv_safe(row.error) << ")";
    else
      out << (row.converged ? '1' : '0');
    out << '\n';
  }
}

// Aligned text table for eyeballing a benchmark: datasets across,
// methods down, the oracle row as "accuracy (correct)".
inline void write_pretty(const std::vector<bench_row>& rows, std::ostream& out) {
  std::vector<std::string> datasets;
  for (const auto& row : rows)
    if (std::find(datasets.begin(), datasets.end(), row.dataset) == datasets.end())
      datasets.push_back(row.dataset);
  auto find_row = [&](const std::string& method,
                      const std::string& dataset) -> const bench_row* {
    for (const auto& row : rows)
      if (row.method == method && row.dataset == dataset) return &row;
    return nullptr;
  };

  const int name_width = 24, col_width = 14;
  auto pad = [&](const std::string& s, int width) {
    std::string padded = s;
    if (int(padded.size()) < width) padded.resize(width, ' ');
    return padded;
  };

  auto dataset_row = [&](const std::string& ds) -> const bench_row& {
    for (const auto& row : rows)
      if (row.dataset == ds) return row;
    return rows.front();
  };
  auto header_line = [&](const char* label, auto&& cell) {
    out << pad(label, name_width);
    for (const auto& ds : datasets) out << pad(cell(ds), col_width);
    out << '\n';
  };
  header_line("dataset", [](const std::string& ds) { return ds; });
  header_line("train size (Ns)", [&](const std::string& ds) {
    return std::to_string(dataset_row(ds).train_size);
  });
  header_line("test size (N-Ns)", [&](const std::string& ds) {
    return std::to_string(dataset_row(ds).test_size);
  });
  header_line("labelers (L)", [&](const std::string& ds) {
    return std::to_string(dataset_row(ds).labelers);
  });
  out << '\n';

  char buf[64];
  for (const auto& [mid, mname] : method_registry()) {
    bool present = false;
    for (const auto& row : rows)
      if (row.method == mname) present = true;
    if (!present) continue;
    out << pad(mname, name_width);
    for (const auto& ds : datasets) {
      const bench_row* row = find_row(mname, ds);
      std::string cell = "-";
      if (row && row->error.empty()) {
        std::snprintf(buf, sizeof(buf), "%.4g", row->accuracy);
        cell = buf;
        if (mid == method_id::best_labeler_oracle)
          cell += " (" + std::to_string(row->correct) + ")";
      } else if (row) {
        cell = "error";
      }
      out << pad(cell, col_width);
    }
    out << '\n';
  }
}

}  // namespace quorum
