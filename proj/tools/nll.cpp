// Command-line front end. Every flag --some-flag can also be set through the
// environment variable NLL_SOME_FLAG; an explicit flag wins.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nll/bounds.hpp"
#include "nll/dataset.hpp"
#include "nll/errors.hpp"
#include "nll/experiments.hpp"
#include "nll/mlp.hpp"
#include "nll/noise.hpp"
#include "nll/nts.hpp"
#include "nll/numeric.hpp"
#include "nll/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void emit(const json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    nll::write_text(out, text);
  }
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw nll::IoError(path.string(), "cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw nll::IoError(path.string(), e.what());
  }
}

// Reads datasets that must share one class count (the largest inferred one).
std::vector<nll::LabeledDataset> read_datasets(const std::vector<std::string>& paths) {
  std::vector<nll::LabeledDataset> sets;
  int k = 2;
  for (const auto& p : paths) {
    sets.push_back(nll::read_csv(fs::path(p)));
    k = std::max(k, sets.back().k());
  }
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i].k() != k) sets[i] = nll::read_csv(fs::path(paths[i]), k);
  }
  return sets;
}

nll::TrainConfig read_train_config(const std::string& path) {
  return path.empty() ? nll::TrainConfig{} : nll::load_train_config(path);
}

// An MLP model file, or an oracle result / {"assignment": [...]} bound to `world`.
std::unique_ptr<nll::Classifier> load_classifier(const fs::path& path, const nll::DiscreteDistribution& world) {
  const json j = read_json(path);
  if (j.value("kind", std::string()) == "mlp") return std::make_unique<nll::Mlp>(nll::mlp_params_from_json(j));
  if (j.contains("assignment")) {
    return std::make_unique<nll::DiscreteClassifier>(world, j.at("assignment").get<std::vector<nll::Label>>());
  }
  throw nll::IoError(path.string(), "not a model file (expected kind \"mlp\" or an \"assignment\" array)");
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw nll::IoError(dir, ec.message());
}

std::string env_name(const std::string& flag) {
  std::string name = "NLL_";
  for (const char c : flag) name += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return name;
}

void attach_env_names(CLI::App* app) {
  for (CLI::Option* opt : app->get_options()) {
    const auto& lnames = opt->get_lnames();
    if (!lnames.empty() && lnames.front() != "help") opt->envname(env_name(lnames.front()));
  }
  for (CLI::App* sub : app->get_subcommands({})) attach_env_names(sub);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Label-noise toolkit: noise models, bounds, exact oracles, MLP training and NTS selection"};
  app.require_subcommand(1);

  // noise
  auto* noise = app.add_subcommand("noise", "Noise transition matrices")->require_subcommand(1);
  auto* noise_make = noise->add_subcommand("make", "Write a uniform or pair noise matrix");
  std::string noise_kind = "uniform", out;
  int k = 2;
  double rate = 0.0;
  noise_make->add_option("--kind", noise_kind)->check(CLI::IsMember({"uniform", "pair"}));
  noise_make->add_option("--k", k)->required();
  noise_make->add_option("--rate", rate)->required();
  noise_make->add_option("--out", out, "Output file (stdout when omitted)");
  noise_make->callback([&] {
    const auto t = noise_kind == "uniform" ? nll::uniform_noise(k, rate) : nll::pair_noise(k, rate);
    emit(nll::to_json(t), out);
  });

  // data
  auto* data = app.add_subcommand("data", "Dataset generation and manipulation")->require_subcommand(1);
  std::string data_kind = "moons", in_path, noise_path, train_out, val_out;
  std::size_t m = 1000;
  double sigma = -1.0, val_frac = 0.1;
  std::uint64_t seed = 0;
  auto* data_make = data->add_subcommand("make", "Sample a clean dataset");
  data_make->add_option("--kind", data_kind)->check(CLI::IsMember({"tabular", "circles", "moons"}));
  data_make->add_option("--m", m)->required();
  data_make->add_option("--sigma", sigma, "Jitter std (generator default when omitted)");
  data_make->add_option("--seed", seed);
  data_make->add_option("--out", out)->required();
  data_make->callback([&] {
    nll::write_csv(nll::make_clean(nll::dataset_kind_from_string(data_kind), m, sigma, seed), fs::path(out));
  });

  auto* data_corrupt = data->add_subcommand("corrupt", "Corrupt labels with a noise matrix");
  data_corrupt->add_option("--noise", noise_path)->required();
  data_corrupt->add_option("--seed", seed);
  data_corrupt->add_option("--in", in_path)->required();
  data_corrupt->add_option("--out", out)->required();
  data_corrupt->callback([&] {
    const auto t = nll::load_transition(noise_path);
    const auto ds = nll::read_csv(fs::path(in_path), t.k());
    nll::write_csv(ds.with_labels(nll::corrupt_labels(ds.labels(), t, seed)), fs::path(out));
  });

  auto* data_split = data->add_subcommand("split", "Random train/validation split");
  data_split->add_option("--val-frac", val_frac);
  data_split->add_option("--seed", seed);
  data_split->add_option("--in", in_path)->required();
  data_split->add_option("--train-out", train_out)->required();
  data_split->add_option("--val-out", val_out)->required();
  data_split->callback([&] {
    const auto [train, val] = nll::split(nll::read_csv(fs::path(in_path)), val_frac, seed);
    nll::write_csv(train, fs::path(train_out));
    nll::write_csv(val, fs::path(val_out));
  });

  auto* data_world = data->add_subcommand("world", "Write the 8-point tabular world");
  data_world->add_option("--out", out);
  data_world->callback([&] { emit(nll::to_json(nll::tabular_world()), out); });

  // train
  auto* train = app.add_subcommand("train", "Train an MLP on a labeled CSV");
  std::string data_path, val_path, test_path, config_path, ckpt_path, report_path;
  train->add_option("--data", data_path)->required();
  train->add_option("--val", val_path, "Noisy validation set monitored at each checkpoint");
  train->add_option("--config", config_path, "Training config (defaults when omitted)");
  train->add_option("--out", out)->required();
  train->add_option("--checkpoints", ckpt_path, "CSV with step,train_acc,val_acc");
  train->callback([&] {
    std::vector<std::string> paths{data_path};
    if (!val_path.empty()) paths.push_back(val_path);
    const auto sets = read_datasets(paths);
    const auto result = nll::train_mlp(sets[0], read_train_config(config_path), sets.size() > 1 ? &sets[1] : nullptr);
    nll::save_model(result.params, out);
    if (!ckpt_path.empty()) {
      std::string csv = "step,train_acc,val_acc\n";
      for (const auto& c : result.checkpoints) {
        csv += std::to_string(c.step) + "," + nll::format_double(c.train_acc) + "," +
               (c.noisy_val_acc ? nll::format_double(*c.noisy_val_acc) : "") + "\n";
      }
      nll::write_text(ckpt_path, csv);
    }
  });

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Evaluate generalization and validation bounds")->require_subcommand(1);
  double dvc = 1.0, delta = 0.05;
  std::size_t n = 1000, trials = 1000, selections = 1, workers = 1;
  std::string model_path, world_path;
  auto* bounds_gen = bounds->add_subcommand("gen", "VC generalization gap bound");
  bounds_gen->add_option("--m", m)->required();
  bounds_gen->add_option("--dvc", dvc)->required();
  bounds_gen->add_option("--delta", delta)->required();
  bounds_gen->add_option("--out", out);
  bounds_gen->callback([&] {
    const nll::BoundParams p{dvc, delta, m, 1};
    emit({{"bound", nll::generalization_gap_bound(p)}, {"inputs", {{"m", m}, {"d_vc", dvc}, {"delta", delta}}}}, out);
  });

  auto* bounds_val = bounds->add_subcommand("val", "Validation gap bound for a fixed classifier");
  bounds_val->add_option("--n", n)->required();
  bounds_val->add_option("--delta", delta)->required();
  bounds_val->add_option("--selections", selections,
                         "Number of candidates selected among; > 1 adds a union-bound variant");
  bounds_val->add_option("--out", out);
  bounds_val->callback([&] {
    json j = {{"bound", nll::validation_gap_bound(n, delta)}, {"inputs", {{"n", n}, {"delta", delta}}}};
    if (selections > 1) {
      j["inputs"]["selections"] = selections;
      j["bonferroni_bound"] = nll::bonferroni_validation_gap_bound(n, delta, selections);
    }
    emit(j, out);
  });

  auto* bounds_audit = bounds->add_subcommand("audit", "Monte Carlo audit of the validation bound");
  bounds_audit->add_option("--model", model_path)->required();
  bounds_audit->add_option("--world", world_path)->required();
  bounds_audit->add_option("--noise", noise_path)->required();
  bounds_audit->add_option("--n", n)->required();
  bounds_audit->add_option("--delta", delta)->required();
  bounds_audit->add_option("--trials", trials);
  bounds_audit->add_option("--seed", seed);
  bounds_audit->add_option("--workers", workers, "Threads (0 = all cores); results do not depend on it");
  bounds_audit->add_option("--out", out);
  bounds_audit->callback([&] {
    const auto world = nll::load_world(world_path);
    const auto t = nll::load_transition(noise_path);
    const auto h = load_classifier(model_path, world);
    const auto r = nll::audit_validation_bound(*h, world, t, n, delta, trials, seed, nll::resolve_workers(workers));
    emit({{"bound", r.bound},
          {"inputs", {{"n", n}, {"delta", delta}, {"trials", trials}, {"seed", seed}}},
          {"violations", r.violations},
          {"violation_frequency", r.violation_frequency()},
          {"exact_noisy_accuracy", r.exact_noisy_accuracy},
          {"mean_val_accuracy", r.mean_val_accuracy}},
         out);
  });

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exact search on a discrete world")->require_subcommand(1);
  auto* oracle_best = oracle->add_subcommand("best", "Best assignment for an objective");
  std::string sample_path;
  bool clean = false;
  oracle_best->add_option("--world", world_path)->required();
  auto* o_noise = oracle_best->add_option("--noise", noise_path, "Maximize noisy-distribution accuracy");
  auto* o_clean = oracle_best->add_flag("--clean", clean, "Maximize clean accuracy");
  auto* o_sample = oracle_best->add_option("--sample", sample_path, "Maximize training accuracy on a CSV sample");
  o_noise->excludes(o_clean, o_sample);
  o_clean->excludes(o_sample);
  oracle_best->add_option("--workers", workers);
  oracle_best->add_option("--out", out);
  oracle_best->callback([&] {
    const auto world = nll::load_world(world_path);
    std::optional<nll::Objective> objective;
    if (!noise_path.empty()) objective = nll::Objective::noisy(nll::load_transition(noise_path));
    if (clean) objective = nll::Objective::clean();
    if (!sample_path.empty()) objective = nll::Objective::empirical(nll::read_csv(fs::path(sample_path), world.k()));
    if (!objective) throw nll::InvalidArgument("oracle best: give one of --noise, --clean or --sample");
    emit(nll::to_json(nll::enumerate_best(world, *objective, nll::resolve_workers(workers))), out);
  });

  // nts
  auto* nts = app.add_subcommand("nts", "Noisy-best teacher and student selection");
  nts->add_option("--train", data_path)->required();
  nts->add_option("--val", val_path)->required();
  nts->add_option("--test", test_path, "Clean test set for diagnostic accuracies");
  nts->add_option("--config", config_path);
  nts->add_option("--report", report_path)->required();
  nts->callback([&] {
    std::vector<std::string> paths{data_path, val_path};
    if (!test_path.empty()) paths.push_back(test_path);
    const auto sets = read_datasets(paths);
    const auto report =
        nll::run_nts(sets[0], sets[1], read_train_config(config_path), sets.size() > 2 ? &sets[2] : nullptr);
    emit(nll::to_json(report), report_path);
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Training-size sweep with clean-test evaluation");
  std::string out_dir;
  sweep->add_option("--config", config_path, "Sweep config (defaults when omitted)");
  sweep->add_option("--out", out_dir)->required();
  sweep->callback([&] {
    const auto cfg = config_path.empty() ? nll::SweepConfig{} : nll::load_sweep_config(config_path);
    const auto result = nll::run_regime_sweep(cfg);
    make_dir(out_dir);
    std::ostringstream csv;
    nll::write_sweep_csv(result, csv);
    nll::write_text(fs::path(out_dir) / "sweep.csv", csv.str());
    json j = nll::to_json(result);
    j["config"] = nll::to_json(cfg);
    j["config"].erase("workers");
    nll::write_text(fs::path(out_dir) / "sweep.json", j.dump(2) + "\n");
    nll::write_text(fs::path(out_dir) / "sweep.svg", nll::sweep_svg(result));
  });

  // demo
  auto* demo = app.add_subcommand("demo", "Scripted demonstrations")->require_subcommand(1);
  auto* demo_tab = demo->add_subcommand("tabular", "Oracle maximizers on the 8-point world");
  demo_tab->add_option("--seed", seed);
  demo_tab->add_option("--out", out_dir)->required();
  demo_tab->callback([&] {
    make_dir(out_dir);
    nll::write_text(fs::path(out_dir) / "tabular_demo.json", nll::to_json(nll::run_tabular_demo(seed)).dump(2) + "\n");
  });

  // audit
  auto* audit = app.add_subcommand("audit", "Bound audits")->require_subcommand(1);
  auto* audit_bounds = audit->add_subcommand("bounds", "Validation and generalization bound audit suite");
  nll::BoundAuditOptions audit_opts;
  audit_bounds->add_option("--seed", seed);
  audit_bounds->add_option("--trials", audit_opts.trials);
  audit_bounds->add_option("--workers", audit_opts.workers);
  audit_bounds->add_option("--out", out_dir)->required();
  audit_bounds->callback([&] {
    make_dir(out_dir);
    const auto report = nll::run_bound_audit_suite(seed, audit_opts);
    nll::write_text(fs::path(out_dir) / "bound_audit.json", nll::to_json(report).dump(2) + "\n");
    std::cout << (report.all_ok() ? "all bounds respected" : "bound violations above tolerance") << "\n";
  });

  attach_env_names(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "nll: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
