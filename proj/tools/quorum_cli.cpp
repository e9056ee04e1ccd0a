// Command-line front end: synthetic crowd generation, single-method runs,
// and the full benchmark sweep over the method registry.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "quorum/bench.hpp"
#include "quorum/io.hpp"
#include "quorum/label_matrix.hpp"
#include "quorum/split.hpp"
#include "quorum/synth.hpp"

namespace {

struct dataset_cli {
  std::string name;
  std::string labels_path;
  std::string gold_path;
  int train_size = 0;
};

dataset_cli parse_dataset_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 4)
    throw quorum::domain_error("dataset spec must be name:labels.csv:gold.csv:ns");
  dataset_cli ds;
  ds.name = parts[0];
  ds.labels_path = parts[1];
  ds.gold_path = parts[2];
  ds.train_size = std::stoi(parts[3]);
  return ds;
}

// Loads, raises K to cover gold if needed, and densely renumbers gapped ids.
quorum::bench_dataset bind_dataset(const dataset_cli& cli, int forced_classes,
                                   std::ostream* id_map_out) {
  auto matrix = quorum::load_labels(cli.labels_path, forced_classes);
  auto gold = quorum::load_gold(cli.gold_path);
  if (gold.max_label() > matrix.classes()) {
    if (forced_classes > 0)
      throw quorum::domain_error("gold labels exceed the forced class count");
    matrix = matrix.with_classes(gold.max_label());
  }
  auto compact = quorum::compact_ids(matrix, gold);
  if (!compact.identity) {
    std::cerr << "note: dataset '" << cli.name << "' has gapped ids; "
              << "renumbered to " << compact.matrix.items() << " items, "
              << compact.matrix.labelers() << " labelers\n";
    if (id_map_out) {
      for (std::size_t n = 0; n < compact.item_ids.size(); ++n)
        *id_map_out << cli.name << ",item," << (n + 1) << ','
                    << compact.item_ids[n] << '\n';
      for (std::size_t n = 0; n < compact.labeler_ids.size(); ++n)
        *id_map_out << cli.name << ",labeler," << (n + 1) << ','
                    << compact.labeler_ids[n] << '\n';
    }
  }
  return {cli.name, std::move(compact.matrix), std::move(compact.gold),
          cli.train_size};
}

std::vector<quorum::method_id> parse_methods(const std::string& csv) {
  std::vector<quorum::method_id> methods;
  if (csv.empty() || csv == "all") {
    for (const auto& [mid, name] : quorum::method_registry())
      methods.push_back(mid);
    return methods;
  }
  std::stringstream ss(csv);
  std::string name;
  while (std::getline(ss, name, ',')) methods.push_back(quorum::method_from_name(name));
  return methods;
}

void emit(const std::vector<quorum::bench_row>& rows, const std::string& format,
          const std::string& out_path, bool timing) {
  std::ostringstream body;
  if (format == "pretty")
    quorum::write_pretty(rows, body);
  else
    quorum::write_csv(rows, body, timing);
  if (out_path.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(out_path);
    if (!out) throw quorum::error("cannot write " + out_path);
    out << body.str();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crowd label aggregation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global --seed/--split-seed may follow the subcommand

  std::uint64_t seed = 1;
  std::uint64_t split_seed = 1;
  app.add_option("--seed", seed, "seed for synthetic data generation");
  app.add_option("--split-seed", split_seed, "seed for the train/test split");

  // --- synth ---
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic crowd dataset");
  quorum::synth_spec synth;
  std::string labels_out, gold_out;
  synth_cmd->add_option("--labelers", synth.labelers, "number of labelers (L)")
      ->required();
  synth_cmd->add_option("--items", synth.items, "number of items (N)")->required();
  synth_cmd->add_option("--classes", synth.classes, "number of classes (K)")
      ->required();
  synth_cmd->add_option("--expert-fraction", synth.expert_fraction,
                        "fraction of labelers drawn as experts");
  synth_cmd->add_option("--expert-accuracy", synth.expert_accuracy,
                        "per-label accuracy of expert labelers");
  synth_cmd->add_option("--novice-accuracy", synth.novice_accuracy,
                        "per-label accuracy of the remaining labelers");
  synth_cmd->add_option("--missing-rate", synth.missing_rate,
                        "probability a labeler skips an item");
  synth_cmd->add_option("--labels-out", labels_out, "labels CSV output path")
      ->required();
  synth_cmd->add_option("--gold-out", gold_out, "gold CSV output path")->required();

  // --- shared method options ---
  struct hyper_cli {
    std::optional<double> c, lambda, eta;
    bool loocv = false;
    std::optional<double> tol;
    std::optional<int> max_iter;
    double sw = 0.01, salpha = 0.01;
    std::string em_init = "unsup";
    double em_tol = 1e-6;
    int em_max_iter = 500;
    std::string nb_missing = "model";
    int rounds = 0;
    std::string robust = "off";
  } hyper;

  auto add_hyper_options = [&](CLI::App* cmd) {
    cmd->add_option("--c", [&](const std::vector<std::string>& v) {
         hyper.c = std::stod(v[0]);
         return true;
       }, "fixed C for csvm (default: LOOCV sweep)");
    cmd->add_option("--lambda", [&](const std::vector<std::string>& v) {
         hyper.lambda = std::stod(v[0]);
         return true;
       }, "fixed lambda for mcsvm/saddle (default: LOOCV sweep)");
    cmd->add_option("--eta", [&](const std::vector<std::string>& v) {
         hyper.eta = std::stod(v[0]);
         return true;
       }, "EWA learning rate (default: sqrt(8 ln L / Ns))");
    cmd->add_flag("--loocv", hyper.loocv, "force the LOOCV sweep even with --c/--lambda");
    cmd->add_option("--tol", [&](const std::vector<std::string>& v) {
         hyper.tol = std::stod(v[0]);
         return true;
       }, "solver convergence tolerance (csvm/mcsvm/saddle)");
    cmd->add_option("--max-iter", [&](const std::vector<std::string>& v) {
         hyper.max_iter = std::stoi(v[0]);
         return true;
       }, "solver iteration cap (csvm/mcsvm/saddle)");
    cmd->add_option("--sw", hyper.sw, "saddle w step length");
    cmd->add_option("--salpha", hyper.salpha, "saddle alpha step length");
    cmd->add_option("--em-init", hyper.em_init, "EM initialization: unsup|supervised");
    cmd->add_option("--em-tol", hyper.em_tol, "EM convergence tolerance");
    cmd->add_option("--em-max-iter", hyper.em_max_iter, "EM iteration cap");
    cmd->add_option("--nb-missing", hyper.nb_missing,
                    "naive Bayes missing handling: model|ignore");
    cmd->add_option("--rounds", hyper.rounds, "adaboost rounds (default: L)");
  };

  auto build_options = [&]() {
    quorum::eval_options opt;
    if (!hyper.loocv) {
      opt.fixed_c = hyper.c;
      opt.fixed_lambda = hyper.lambda;
    }
    opt.eta = hyper.eta;
    opt.em.tol = hyper.em_tol;
    opt.em.max_iter = hyper.em_max_iter;
    opt.nb_mode = hyper.nb_missing == "ignore" ? quorum::nb_missing::ignore
                                               : quorum::nb_missing::model;
    opt.saddle.step_w = hyper.sw;
    opt.saddle.step_alpha = hyper.salpha;
    if (hyper.tol) {
      opt.csvm.tol = *hyper.tol;
      opt.mcsvm.tol = *hyper.tol;
      opt.saddle.tol = *hyper.tol;
    }
    if (hyper.max_iter) {
      opt.csvm.max_iter = *hyper.max_iter;
      opt.mcsvm.max_iter = *hyper.max_iter;
      opt.saddle.max_iter = *hyper.max_iter;
    }
    opt.ada_rounds = hyper.rounds;
    return opt;
  };

  // --- run ---
  auto* run_cmd = app.add_subcommand("run", "run one method on one dataset");
  std::string run_labels, run_gold, run_method, run_format = "csv";
  std::string split_method_name = "shuffle";
  int run_ns = 0, forced_classes = 0;
  run_cmd->add_option("--labels", run_labels, "labels CSV")->required();
  run_cmd->add_option("--gold", run_gold, "gold CSV")->required();
  run_cmd->add_option("--method", run_method, "method name (see bench --help)")
      ->required();
  run_cmd->add_option("--ns", run_ns, "training set size N_s")->required();
  run_cmd->add_option("--k", forced_classes, "force the class count K");
  run_cmd->add_option("--split-method", split_method_name, "shuffle|first");
  run_cmd->add_option("--format", run_format, "csv|pretty");
  run_cmd->add_option("--robust", hyper.robust,
                      "on: saddle method uses the robust truncation");
  add_hyper_options(run_cmd);

  // --- bench ---
  auto* bench_cmd = app.add_subcommand("bench", "benchmark methods across datasets");
  std::vector<std::string> dataset_specs;
  std::string bench_methods = "all", bench_out, bench_format = "csv";
  std::string id_map_out;
  bool timing = false;
  bench_cmd
      ->add_option("--dataset", dataset_specs,
                   "dataset as name:labels.csv:gold.csv:ns (repeatable)")
      ->required();
  bench_cmd->add_option("--methods", bench_methods,
                        "comma-separated method names, or 'all'");
  bench_cmd->add_option("--out", bench_out, "report path (default: stdout)");
  bench_cmd->add_option("--format", bench_format, "csv|pretty");
  bench_cmd->add_option("--split-method", split_method_name, "shuffle|first");
  bench_cmd->add_option("--k", forced_classes, "force the class count K");
  bench_cmd->add_option("--id-map-out", id_map_out,
                        "write dense-id renumber mapping CSV here");
  bench_cmd->add_flag("--timing", timing,
                      "report measured wall time (breaks byte-identical reruns)");
  add_hyper_options(bench_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    auto expect_one_of = [](const std::string& flag, const std::string& value,
                            std::initializer_list<const char*> allowed) {
      for (const char* ok : allowed)
        if (value == ok) return;
      throw quorum::domain_error(flag + " must be one of the documented values, got '" +
                                 value + "'");
    };
    expect_one_of("--split-method", split_method_name, {"shuffle", "first"});
    expect_one_of("--em-init", hyper.em_init, {"unsup", "supervised"});
    expect_one_of("--nb-missing", hyper.nb_missing, {"model", "ignore"});
    expect_one_of("--robust", hyper.robust, {"on", "off"});
    expect_one_of("--format", run_format, {"csv", "pretty"});
    expect_one_of("--format", bench_format, {"csv", "pretty"});

    if (*synth_cmd) {
      synth.seed = seed;
      auto [matrix, gold] = quorum::synth_generate(synth);
      quorum::save_labels(matrix, labels_out);
      quorum::save_gold(gold, gold_out);
      std::cerr << "wrote " << matrix.entry_count() << " labels for "
                << matrix.items() << " items, " << matrix.labelers()
                << " labelers, " << matrix.classes() << " classes\n";
      return 0;
    }

    const auto split_how = split_method_name == "first"
                               ? quorum::split_method::first_n
                               : quorum::split_method::seeded_shuffle;

    if (*run_cmd) {
      std::string method = run_method;
      if (method == "saddle" && hyper.robust == "on") method = "saddle-robust";
      // --em-init overrides the initialization baked into the method name
      if (run_cmd->count("--em-init")) {
        if (method == "em-unsup" && hyper.em_init == "supervised")
          method = "em-sup";
        else if (method == "em-sup" && hyper.em_init == "unsup")
          method = "em-unsup";
      }
      auto ds = bind_dataset({"dataset", run_labels, run_gold, run_ns},
                             forced_classes, nullptr);
      auto parts = quorum::split(ds.gold, {run_ns, split_seed, split_how});
      auto row = quorum::evaluate(quorum::method_from_name(method), ds.name,
                                  ds.matrix, ds.gold, parts, build_options());
      emit({row}, run_format, "", false);
      return 0;
    }

    if (*bench_cmd) {
      std::ofstream id_map_stream;
      std::ostream* id_map = nullptr;
      if (!id_map_out.empty()) {
        id_map_stream.open(id_map_out);
        if (!id_map_stream) throw quorum::error("cannot write " + id_map_out);
        id_map_stream << "dataset,kind,new_id,old_id\n";
        id_map = &id_map_stream;
      }
      std::vector<quorum::bench_dataset> datasets;
      for (const auto& spec : dataset_specs)
        datasets.push_back(bind_dataset(parse_dataset_spec(spec), forced_classes, id_map));
      auto rows = quorum::bench_all(datasets, parse_methods(bench_methods),
                                    split_seed, split_how, build_options());
      emit(rows, bench_format, bench_out, timing);
      for (const auto& row : rows)
        if (!row.error.empty()) {
          std::cerr << "cell failed: " << row.dataset << "/" << row.method
                    << ": " << row.error << '\n';
          return 1;
        }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
