#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "nll/classifier.hpp"
#include "nll/rng.hpp"

namespace nll {

/// Parameters of a fully connected rectifier network. weights[l] maps layer
/// l (layer_sizes[l] units) to layer l+1; the last layer emits raw scores.
struct MlpParams {
  std::vector<int> layer_sizes;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  /// Fan-in scaled Gaussian weights (std sqrt(2 / fan_in)), zero biases.
  static MlpParams he_init(std::vector<int> layer_sizes, Seed seed);
  static MlpParams zeros(std::vector<int> layer_sizes);

  int input_dim() const { return layer_sizes.front(); }
  int num_classes() const { return layer_sizes.back(); }
  std::size_t num_params() const;
  bool all_finite() const;

  /// Layer by layer: weights row-major, then biases.
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

  friend bool operator==(const MlpParams& a, const MlpParams& b);
};

class Mlp final : public Classifier {
 public:
  explicit Mlp(MlpParams params);

  int k() const override { return params_.num_classes(); }
  int dim() const override { return params_.input_dim(); }
  std::vector<double> predict_scores(std::span<const double> x) const override;
  std::vector<Label> predict_all(const LabeledDataset& ds) const override;

  const MlpParams& params() const noexcept { return params_; }

 private:
  MlpParams params_;
};

enum class Precision { Float32, Float64 };

struct TrainConfig {
  std::vector<int> hidden_layers{32, 32};
  int max_steps = 20000;
  double learning_rate = 0.03;
  /// Heavy-ball momentum; 0 gives plain gradient descent.
  double momentum = 0.9;
  /// 0 means full batch.
  std::size_t batch_size = 0;
  Seed seed = 0;
  int checkpoint_every = 50;
  /// Optional early exit: stop at a checkpoint once the training loss changed
  /// by at most convergence_tol (relative) over the last convergence_window
  /// steps. 0 disables the check and always runs max_steps.
  int convergence_window = 0;
  double convergence_tol = 1e-3;
  /// Arithmetic used for the SGD updates; checkpoints are always stored in double.
  Precision precision = Precision::Float32;

  void validate() const;
};

struct CheckpointRecord {
  int step = 0;
  MlpParams params;
  double train_loss = 0.0;
  double train_acc = 0.0;
  std::optional<double> noisy_val_acc;
  /// Diagnostics only; never read by model selection.
  std::optional<double> clean_test_acc;
};

struct TrainResult {
  MlpParams params;
  std::vector<CheckpointRecord> checkpoints;
  /// Mean cross-entropy of the batch at each step, before that step's update.
  std::vector<double> loss_history;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(int step, CheckpointRecord last_finite);

  int step() const noexcept { return step_; }
  const CheckpointRecord& last_finite() const noexcept { return last_finite_; }

 private:
  int step_;
  CheckpointRecord last_finite_;
};

struct LossAndGradient {
  double loss = 0.0;
  MlpParams gradient;
};

/// Mean softmax cross-entropy over `ds` and its gradient, in double precision.
LossAndGradient loss_and_gradient(const MlpParams& params, const LabeledDataset& ds);

/// Gradient descent on softmax cross-entropy. Records a checkpoint every
/// cfg.checkpoint_every steps and at the final step (max_steps, or the step
/// where the convergence check fired). `monitor` fills
/// noisy_val_acc, `clean_test` fills clean_test_acc.
TrainResult train_mlp(const LabeledDataset& train, const TrainConfig& cfg, const LabeledDataset* monitor = nullptr,
                      const LabeledDataset* clean_test = nullptr);

nlohmann::json to_json(const MlpParams& p);
MlpParams mlp_params_from_json(const nlohmann::json& j);
void save_model(const MlpParams& p, const std::filesystem::path& path);
MlpParams load_model(const std::filesystem::path& path);

nlohmann::json to_json(const TrainConfig& cfg);
/// Missing keys keep their defaults.
TrainConfig train_config_from_json(const nlohmann::json& j);
TrainConfig load_train_config(const std::filesystem::path& path);

}  // namespace nll
