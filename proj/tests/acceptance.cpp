// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. The benchmark CLI path may be passed as argv[1] for the protocol
// smoke test (criterion 8); without it that criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "quorum/adaboost.hpp"
#include "quorum/baselines.hpp"
#include "quorum/em.hpp"
#include "quorum/mcsvm.hpp"
#include "quorum/rng.hpp"
#include "quorum/saddle.hpp"
#include "quorum/svm.hpp"
#include "quorum/synth.hpp"

namespace {

using namespace quorum;
using views_t = std::vector<std::vector<double>>;

struct criterion_check {
  std::vector<std::string> failures;
  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string cli_path;

// --- criterion 1: EWA regret bound over 200 seeded random streams ---------
void criterion_ewa_regret(criterion_check& check) {
  const int labelers = 10, stages = 100;
  const double eta = ewa_eta(labelers, stages);
  const double bound = std::sqrt(stages / 2.0 * std::log(double(labelers)));
  check.require(std::abs(bound - 10.7298) < 1e-3, "bound constant mismatch");
  for (int stream = 0; stream < 200; ++stream) {
    rng r(52000 + stream);
    std::vector<double> accuracy(labelers);
    for (auto& a : accuracy) a = 0.6 + 0.35 * r.uniform();
    auto state = ewa_init(labelers, eta);
    for (int t = 0; t < stages; ++t) {
      const int y = int(r.below(2));
      std::vector<int> bits(labelers);
      for (int i = 0; i < labelers; ++i)
        bits[i] = r.bernoulli(accuracy[i]) ? y : 1 - y;
      ewa_step(state, bits, y);
    }
    const double regret = ewa_regret(state);
    if (regret > bound)
      check.require(false, "stream " + std::to_string(stream) + " regret " +
                               std::to_string(regret) + " > bound");
  }
}

// --- criterion 2: csvm dual objective vs exhaustive grid oracle -----------
double csvm_grid_oracle(const views_t& views, const std::vector<int>& y, double c) {
  const std::size_t n = views.size();
  const double box = c / double(n);
  std::vector<double> levels;
  for (int t = 0; t * 1e-3 <= box + 1e-12; ++t) levels.push_back(t * 1e-3);
  if (levels.back() < box - 1e-12) levels.push_back(box);

  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t z = 0; z < n; ++z) {
      double dot = 0.0;
      for (std::size_t d = 0; d < views[j].size(); ++d)
        dot += views[j][d] * views[z][d];
      q[j][z] = y[j] * y[z] * dot;
    }
  double best = -1e300;
  std::vector<double> sigma(n, 0.0);
  if (n == 1) {
    for (double a : levels) best = std::max(best, a - 0.5 * q[0][0] * a * a);
  } else if (n == 2) {
    for (double a : levels) {
      const double base_a = a - 0.5 * q[0][0] * a * a;
      for (double b : levels)
        best = std::max(best, base_a + b - 0.5 * q[1][1] * b * b - q[0][1] * a * b);
    }
  } else {
    for (double a : levels)
      for (double b : levels) {
        const double base = a + b - 0.5 * (q[0][0] * a * a + q[1][1] * b * b) -
                            q[0][1] * a * b;
        const double lin = 1.0 - q[0][2] * a - q[1][2] * b;
        for (double t : levels)
          best = std::max(best, base + t * lin - 0.5 * q[2][2] * t * t);
      }
  }
  return best;
}

void criterion_csvm_oracle(criterion_check& check) {
  rng r(777);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + int(r.below(2));
    const int dims = 1 + int(r.below(3));  // L <= 3
    views_t views(n, std::vector<double>(dims));
    std::vector<int> y(n);
    y[0] = 1;
    y[1] = -1;
    for (int j = 0; j < n; ++j) {
      if (j >= 2) y[j] = r.below(2) ? 1 : -1;
      for (int d = 0; d < dims; ++d) views[j][d] = double(r.below(3)) - 1.0;
    }
    csvm_options opt;
    opt.c = n == 3 ? 0.3 + 0.6 * r.uniform() : 0.5 + 1.5 * r.uniform();
    const auto model = csvm_train(views, y, opt);
    const double oracle = csvm_grid_oracle(views, y, opt.c);
    if (std::abs(model.objective - oracle) > 1e-3)
      check.require(false, "trial " + std::to_string(trial) + ": |" +
                               std::to_string(model.objective) + " - " +
                               std::to_string(oracle) + "| > 1e-3");
  }
}

// --- criterion 3: saddle 1-D grid oracle ----------------------------------
void criterion_saddle_oracle(criterion_check& check) {
  rng r(5005);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + int(r.below(6));
    std::vector<int> y(n);
    views_t views(n);
    for (int j = 0; j < n; ++j) {
      y[j] = r.below(2) ? 1 : -1;
      views[j] = {r.below(2) ? 1.0 : -1.0};
    }
    const double lambda = 0.05 + 0.85 * r.uniform();
    double grid_w = 0.0, grid_value = 1e300;
    for (double w = -3.0; w <= 3.0 + 1e-12; w += 1e-3) {
      double hinge = 0.0;
      for (int j = 0; j < n; ++j)
        hinge += std::max(0.0, 1.0 - y[j] * w * views[j][0]);
      const double value = hinge / n + lambda * std::abs(w);
      if (value < grid_value - 1e-12) {
        grid_value = value;
        grid_w = w;
      }
    }
    saddle_options opt;
    opt.lambda = lambda;
    opt.tol = 1e-9;  // tol 0.01 equals the largest possible 1-D step; keep
                     // iterating so the best-primal iterate is meaningful
    const auto result = saddle_solve(views, y, opt);
    if (std::abs(result.w[0] - grid_w) > 0.05)
      check.require(false, "trial " + std::to_string(trial) + ": w " +
                               std::to_string(result.w[0]) + " vs grid " +
                               std::to_string(grid_w));
  }
  // large-lambda shrinkage: above the attainable subgradient mass the zero
  // vector is optimal and the solver must sit on it
  views_t views = {{1.0}, {1.0}, {-1.0}};
  std::vector<int> y = {1, -1, -1};
  saddle_options opt;
  opt.lambda = 2.0;
  const auto result = saddle_solve(views, y, opt);
  check.require(std::abs(result.w[0]) <= opt.tol,
                "large-lambda weight not shrunk to zero");
}

// --- criterion 4: expert recovery ------------------------------------------
void criterion_expert_recovery(criterion_check& check) {
  const int seeds = 20;
  double robust_sum = 0.0, mv_sum = 0.0;
  int strict_wins = 0;
  for (int seed = 0; seed < seeds; ++seed) {
    synth_spec spec;
    spec.labelers = 50;
    spec.items = 200;
    spec.classes = 2;
    spec.expert_fraction = 0.1;  // 5 experts at 0.9, 45 labelers at 0.3
    spec.expert_accuracy = 0.9;
    spec.novice_accuracy = 0.3;
    spec.missing_rate = 0.0;
    spec.seed = 91000 + seed;
    auto [m, gold] = synth_generate(spec);
    std::vector<int> train, test;
    for (int j = 1; j <= 20; ++j) train.push_back(j);
    for (int j = 21; j <= 200; ++j) test.push_back(j);

    views_t views;
    std::vector<int> y;
    for (int j : train) {
      views.push_back(m.signed_view(j, 1));
      y.push_back(gold.at(j) == 1 ? 1 : -1);
    }
    saddle_options opt;
    opt.lambda = 0.1;
    auto reliability = robustify(saddle_solve(views, y, opt).w);

    int robust_correct = 0, mv_correct = 0;
    for (int j : test) {
      if (weighted_plurality(reliability, m, j) == gold.at(j)) ++robust_correct;
      if (majority_vote(m, j) == gold.at(j)) ++mv_correct;
    }
    const double robust_acc = robust_correct / 180.0;
    const double mv_acc = mv_correct / 180.0;
    robust_sum += robust_acc;
    mv_sum += mv_acc;
    if (robust_acc > mv_acc) ++strict_wins;
  }
  const double robust_mean = robust_sum / seeds, mv_mean = mv_sum / seeds;
  check.require(robust_mean >= 0.85, "robust mean accuracy " +
                                         std::to_string(robust_mean) + " < 0.85");
  check.require(mv_mean < 0.5, "majority vote unexpectedly above 0.5");
  check.require(robust_mean > mv_mean, "robust mean does not beat majority vote");
  check.require(strict_wins >= 18, "strict wins " + std::to_string(strict_wins) +
                                       "/20 < 18");
}

// --- criterion 5: EM likelihood monotonicity and parameter recovery --------
void criterion_em(criterion_check& check) {
  rng r(6100);
  for (int trial = 0; trial < 50; ++trial) {
    synth_spec spec;
    spec.labelers = 3 + int(r.below(10));
    spec.items = 20 + int(r.below(60));
    spec.classes = 2;
    spec.expert_fraction = r.uniform();
    spec.expert_accuracy = 0.55 + 0.45 * r.uniform();
    spec.novice_accuracy = 0.3 + 0.5 * r.uniform();
    spec.missing_rate = 0.5 * r.uniform();
    spec.seed = 62000 + trial;
    auto [m, gold] = synth_generate(spec);
    auto result = em_fit(m, 1, init_unsupervised(m, 1));
    for (std::size_t t = 1; t < result.loglik.size(); ++t)
      if (result.loglik[t] < result.loglik[t - 1] - 1e-8)
        check.require(false, "loglik decreased on trial " + std::to_string(trial) +
                                 " iteration " + std::to_string(t));
  }

  synth_spec spec;
  spec.labelers = 20;
  spec.items = 500;
  spec.classes = 2;
  spec.expert_fraction = 1.0;
  spec.expert_accuracy = 0.8;
  spec.novice_accuracy = 0.8;
  spec.missing_rate = 0.0;
  spec.seed = 63001;
  auto [m, gold] = synth_generate(spec);
  auto result = em_fit(m, 1, init_unsupervised(m, 1));
  int close = 0;
  for (double a : result.params.alpha)
    if (std::abs(a - 0.8) < 0.1) ++close;
  check.require(close >= 18, "alpha recovered for only " + std::to_string(close) +
                                 "/20 labelers");
}

// --- criterion 6: gradients vs central finite differences ------------------
void criterion_gradients(criterion_check& check) {
  rng r(4321);
  int points = 0;
  // binary svm dual objective
  while (points < 100) {
    const int n = 2 + int(r.below(3)), dims = 1 + int(r.below(3));
    views_t views(n, std::vector<double>(dims));
    std::vector<int> y(n);
    for (int j = 0; j < n; ++j) {
      y[j] = r.below(2) ? 1 : -1;
      for (int d = 0; d < dims; ++d) views[j][d] = 2.0 * r.uniform() - 1.0;
    }
    std::vector<double> sigma(n);
    for (auto& s : sigma) s = r.uniform();
    auto grad = csvm_gradient(views, y, sigma);
    const double h = 1e-5;
    for (int j = 0; j < n && points < 100; ++j, ++points) {
      auto plus = sigma, minus = sigma;
      plus[j] += h;
      minus[j] -= h;
      const double fd =
          (csvm_objective(views, y, plus) - csvm_objective(views, y, minus)) /
          (2 * h);
      const double scale = std::max({1.0, std::abs(grad[j]), std::abs(fd)});
      if (std::abs(grad[j] - fd) / scale > 1e-6)
        check.require(false, "csvm gradient mismatch");
    }
  }
  // multi-class svm dual objective
  points = 0;
  while (points < 100) {
    const int n = 1 + int(r.below(3)), classes = 2 + int(r.below(3));
    views_t views(n, std::vector<double>(std::size_t(classes) * 2));
    std::vector<int> y(n);
    for (int j = 0; j < n; ++j) {
      y[j] = 1 + int(r.below(classes));
      for (auto& v : views[j]) v = r.below(2) ? 1.0 : 0.0;
    }
    auto gram = mcsvm_gram(views);
    const double lambda = 0.5 + 2.0 * r.uniform();
    std::vector<std::vector<double>> tau(n);
    for (int j = 0; j < n; ++j) {
      std::vector<double> v(classes);
      for (auto& x : v) x = 2.0 * r.uniform() - 1.0;
      tau[j] = mcsvm_project_column(v, y[j]);
    }
    const double h = 1e-6;
    for (int j = 0; j < n && points < 100; ++j) {
      auto grad = mcsvm_column_gradient(gram, y, tau, lambda, j);
      for (int k = 0; k < classes && points < 100; ++k, ++points) {
        auto plus = tau, minus = tau;
        plus[j][k] += h;
        minus[j][k] -= h;
        const double fd = (mcsvm_objective(gram, y, plus, lambda) -
                           mcsvm_objective(gram, y, minus, lambda)) /
                          (2 * h);
        const double scale = std::max({1.0, std::abs(grad[k]), std::abs(fd)});
        if (std::abs(grad[k] - fd) / scale > 1e-6)
          check.require(false, "mcsvm gradient mismatch");
      }
    }
  }
  // saddle Lagrangian alpha gradient
  points = 0;
  while (points < 100) {
    const int n = 1 + int(r.below(5)), dims = 1 + int(r.below(4));
    views_t views(n, std::vector<double>(dims));
    std::vector<int> y(n);
    std::vector<double> w(dims), alpha(n);
    for (int j = 0; j < n; ++j) {
      y[j] = r.below(2) ? 1 : -1;
      alpha[j] = r.uniform() / n;
      for (int d = 0; d < dims; ++d) views[j][d] = double(r.below(3)) - 1.0;
    }
    for (auto& x : w) x = 2.0 * r.uniform() - 1.0;
    const double lambda = r.uniform();
    auto grad = lagrangian_gradient_alpha(w, views, y);
    const double h = 1e-6;
    for (int j = 0; j < n && points < 100; ++j, ++points) {
      auto plus = alpha, minus = alpha;
      plus[j] += h;
      minus[j] -= h;
      const double fd = (lagrangian(w, plus, views, y, lambda) -
                         lagrangian(w, minus, views, y, lambda)) /
                        (2 * h);
      const double scale = std::max({1.0, std::abs(grad[j]), std::abs(fd)});
      if (std::abs(grad[j] - fd) / scale > 1e-6)
        check.require(false, "saddle alpha gradient mismatch");
    }
  }
}

// --- criterion 7: adaboost sanity ------------------------------------------
void criterion_adaboost(criterion_check& check) {
  synth_spec spec;
  spec.labelers = 8;
  spec.items = 40;
  spec.classes = 4;
  spec.expert_fraction = 0.0;
  spec.novice_accuracy = 0.45;
  spec.missing_rate = 0.15;
  spec.seed = 71001;
  auto [noisy, gold] = synth_generate(spec);
  auto rows = noisy.rows();
  for (int j = 1; j <= noisy.items(); ++j) rows.push_back({j, 9, gold.at(j)});
  label_matrix m(rows, 4);
  std::vector<int> train;
  for (int j = 1; j <= 25; ++j) train.push_back(j);

  std::vector<std::vector<double>> trace;
  auto model = ada_train(m, gold, train, 0, &trace);
  check.require(!model.rounds.empty() && model.rounds[0].labeler == 9,
                "perfect labeler not selected in round 1");
  int correct = 0;
  for (int j : train)
    if (ada_predict(model, m, j) == gold.at(j)) ++correct;
  check.require(correct == int(train.size()), "ensemble training accuracy < 1");
  for (const auto& alpha : trace) {
    double sum = 0.0;
    bool nonneg = true;
    for (double a : alpha) {
      sum += a;
      nonneg = nonneg && a >= 0.0;
    }
    check.require(nonneg && std::abs(sum - 1.0) <= 1e-12,
                  "sample weights left the probability simplex");
  }
}

// --- criterion 8: protocol smoke test through the CLI ----------------------
std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_protocol(criterion_check& check) {
  if (cli_path.empty()) {
    check.require(false, "benchmark CLI path not given (argv[1])");
    return;
  }
  const auto dir = std::filesystem::temp_directory_path();
  const std::string labels = (dir / "acc8_labels.csv").string();
  const std::string gold = (dir / "acc8_gold.csv").string();
  const std::string report1 = (dir / "acc8_report1.csv").string();
  const std::string report2 = (dir / "acc8_report2.csv").string();

  const std::string synth_cmd = cli_path +
                                " synth --labelers 20 --items 30 --classes 4"
                                " --expert-fraction 0.8 --expert-accuracy 0.95"
                                " --novice-accuracy 0.4 --missing-rate 0"
                                " --seed 11 --labels-out " + labels +
                                " --gold-out " + gold + " 2>/dev/null";
  check.require(std::system(synth_cmd.c_str()) == 0, "synth subcommand failed");

  const std::string bench_base = cli_path + " bench --dataset math-like:" +
                                 labels + ":" + gold +
                                 ":5 --split-seed 9 --out ";
  check.require(std::system((bench_base + report1 + " 2>/dev/null").c_str()) == 0,
                "bench subcommand failed");
  check.require(std::system((bench_base + report2 + " 2>/dev/null").c_str()) == 0,
                "bench rerun failed");

  const std::string a = slurp(report1), b = slurp(report2);
  check.require(!a.empty(), "empty report");
  check.require(a == b, "reruns with fixed seeds are not byte-identical");

  // parse rows: dataset,method,ns,test_size,labelers,accuracy,...
  int rows = 0;
  std::map<std::string, double> accuracy;
  std::stringstream ss(a);
  std::string line;
  std::getline(ss, line);  // header
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    ++rows;
    std::stringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() >= 6) accuracy[fields[1]] = std::stod(fields[5]);
  }
  check.require(rows == 12, "expected 12 method rows, got " + std::to_string(rows));
  for (const char* method : {"majority-vote", "weighted-averaging", "em-unsup",
                             "em-sup", "saddle", "saddle-robust"}) {
    auto it = accuracy.find(method);
    if (it == accuracy.end() || it->second != 1.0)
      check.require(false, std::string(method) + " accuracy != 1");
  }
}

struct criterion {
  const char* name;
  double budget_seconds;
  std::function<void(criterion_check&)> body;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) cli_path = argv[1];
  const std::vector<criterion> criteria = {
      {"1. EWA regret bound over 200 random streams", 5.0, criterion_ewa_regret},
      {"2. C-SVM dual objective matches grid oracle", 30.0, criterion_csvm_oracle},
      {"3. saddle 1-D oracle and large-lambda shrinkage", 10.0,
       criterion_saddle_oracle},
      {"4. robust saddle expert recovery over 20 seeds", 60.0,
       criterion_expert_recovery},
      {"5. EM loglik monotonicity and parameter recovery", 20.0, criterion_em},
      {"6. dual/Lagrangian gradients vs finite differences", 5.0,
       criterion_gradients},
      {"7. adaboost perfect-labeler sanity", 30.0, criterion_adaboost},
      {"8. benchmark protocol smoke test via CLI", 120.0, criterion_protocol},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    criterion_check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(check);
    } catch (const std::exception& e) {
      check.require(false, std::string("exception: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (elapsed > c.budget_seconds)
      check.require(false, "runtime " + std::to_string(elapsed) + "s over budget");
    if (check.failures.empty()) {
      std::printf("PASS  %-52s (%.2fs)\n", c.name, elapsed);
    } else {
      ++failed;
      std::printf("FAIL  %-52s (%.2fs)\n", c.name, elapsed);
      for (const auto& msg : check.failures)
        std::printf("      - %s\n", msg.c_str());
    }
  }
  return failed == 0 ? 0 : 1;
}
