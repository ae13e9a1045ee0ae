#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nll/dataset.hpp"
#include "nll/mlp.hpp"
#include "nll/noise.hpp"

namespace nll {

enum class DatasetKind { Tabular, Circles, Moons };

DatasetKind dataset_kind_from_string(const std::string& name);
std::string to_string(DatasetKind kind);

/// Clean sample of size m from the named generator; sigma < 0 selects the
/// generator's default jitter (ignored for the tabular world).
LabeledDataset make_clean(DatasetKind kind, std::size_t m, double sigma, Seed seed);

struct SweepConfig {
  DatasetKind dataset = DatasetKind::Moons;
  double noise_sigma = -1.0;
  TransitionMatrix noise = TransitionMatrix::from_rows({{0.7, 0.3}, {0.2, 0.8}});
  std::vector<std::size_t> sizes{8, 32, 128, 512, 2048, 8192, 32768};
  int repeats = 10;
  TrainConfig train;
  std::size_t test_size = 10000;
  Seed seed = 0;
  /// Concurrent cells; 0 uses every core. Results do not depend on it.
  std::size_t workers = 0;

  void validate() const;
};

struct SweepCell {
  std::size_t m = 0;
  int repeat = 0;
  double final_train_acc = 0.0;
  double final_test_acc = 0.0;
  int steps = 0;
  /// Row-major k x k confusion against the clean test labels.
  std::vector<double> confusion;
  bool failed = false;
  std::string error;
};

struct SweepAggregate {
  std::size_t m = 0;
  double mean_train_acc = 0.0;
  double std_train_acc = 0.0;
  double mean_test_acc = 0.0;
  double std_test_acc = 0.0;
  std::vector<double> mean_confusion;
  std::size_t failed = 0;
};

struct SweepResult {
  int k = 2;
  std::vector<SweepCell> cells;
  std::vector<SweepAggregate> aggregates;

  /// Per-size mean and sample standard deviation over the non-failed cells.
  static std::vector<SweepAggregate> aggregate(const std::vector<SweepCell>& cells, int k);
};

/// Seed of cell (m, repeat): derive_seed(base, m, repeat).
Seed cell_seed(Seed base, std::size_t m, int repeat);

/// One sweep cell: sample m points, corrupt, train, evaluate on a fresh clean
/// test set. Training failures are caught and flagged.
SweepCell run_cell(const SweepConfig& cfg, std::size_t m, int repeat);

SweepResult run_regime_sweep(const SweepConfig& cfg);

nlohmann::json to_json(const SweepConfig& cfg);
SweepConfig sweep_config_from_json(const nlohmann::json& j);
SweepConfig load_sweep_config(const std::filesystem::path& path);

/// `# ...` line documenting aggregate rows, then the header, then one row per
/// cell and one aggregate row (repeat = -1) per size.
void write_sweep_csv(const SweepResult& r, std::ostream& out);
SweepResult read_sweep_csv(std::istream& in);
nlohmann::json to_json(const SweepResult& r);
/// Mean +- std of train and test accuracy against m on a log axis.
std::string sweep_svg(const SweepResult& r);

/// Spearman correlation between m and mean clean-test accuracy over the sizes.
double sweep_spearman(const SweepResult& r);

struct TabularPanel {
  /// 0 marks the exact-distribution case.
  std::size_t m = 0;
  LabeledDataset sample{2, 2};
  std::vector<Label> maximizer;
  bool unique = true;
  /// Empirical objective value for sampled panels, A_D~ for the exact case.
  double objective = 0.0;
  double clean_accuracy = 0.0;
  std::vector<std::vector<double>> confusion;
  std::size_t distinct_points = 0;
};

struct TabularDemo {
  TransitionMatrix noise = TransitionMatrix::identity(2);
  double max_noisy_accuracy = 0.0;
  std::vector<TabularPanel> panels;
};

/// Oracle maximizer of training accuracy on one noisy tabular sample. With
/// `one_per_point`, the sample holds each support point exactly once (m = 8).
TabularPanel tabular_panel(std::size_t m, const TransitionMatrix& t, Seed seed, bool one_per_point = false);

/// Panels m = 4, 8 (one draw per point), 32 and the exact noisy distribution,
/// under uniform_noise(2, 0.25).
TabularDemo run_tabular_demo(Seed seed);
nlohmann::json to_json(const TabularDemo& demo);

struct ValidationAuditRow {
  std::string classifier;
  std::size_t n = 0;
  double delta = 0.0;
  double bound = 0.0;
  double exact_noisy_accuracy = 0.0;
  std::size_t trials = 0;
  std::size_t violations = 0;
  /// Frequency <= delta + 3 binomial standard deviations.
  bool ok = true;
};

struct GeneralizationAuditRow {
  std::size_t m = 0;
  double d_vc = 0.0;
  double delta = 0.0;
  double bound = 0.0;
  /// max over all 256 tabular classifiers of |A_S~(h) - A_D~(h)|.
  double worst_gap = 0.0;
  bool ok = true;
};

struct BoundAuditReport {
  std::vector<ValidationAuditRow> validation;
  std::vector<GeneralizationAuditRow> generalization;
  bool all_ok() const;
};

struct BoundAuditOptions {
  std::vector<std::size_t> val_sizes{100, 1000, 5000};
  std::vector<double> deltas{0.01, 0.05, 0.25, 1.0};
  std::size_t trials = 10000;
  std::vector<std::size_t> train_sizes{1000, 10000, 100000};
  double gen_delta = 0.05;
  std::size_t workers = 0;
};

/// Worst |A_S~ - A_D~| over every assignment of the tabular world, for one
/// noisy sample of size m.
double worst_lookup_gap(std::size_t m, const TransitionMatrix& t, Seed seed);

BoundAuditReport run_bound_audit_suite(Seed seed, const BoundAuditOptions& opts = {});
nlohmann::json to_json(const BoundAuditReport& r);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nll
