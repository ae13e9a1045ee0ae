#pragma once

#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "nll/classifier.hpp"
#include "nll/dataset.hpp"
#include "nll/mlp.hpp"

namespace nll {

/// The only checkpoint fields model selection may read.
struct SelectionKey {
  int step = 0;
  double noisy_val_acc = 0.0;
};

/// Throws InvalidArgument when the record carries no validation accuracy.
SelectionKey selection_key(const CheckpointRecord& record);

/// Index of the key with the highest noisy_val_acc; ties go to the smallest step.
std::size_t select_best_index(std::span<const SelectionKey> keys);

const CheckpointRecord& select_best(std::span<const CheckpointRecord> checkpoints);

/// Same features, labels replaced by the teacher's hard predictions.
LabeledDataset relabel(const Classifier& teacher, const LabeledDataset& train_inputs);

struct NtsReport {
  std::vector<CheckpointRecord> teacher_checkpoints;
  std::vector<CheckpointRecord> student_checkpoints;
  int nt_step = 0;
  int ns_step = 0;
  double nt_val_acc = 0.0;
  double ns_val_acc = 0.0;
  /// Clean-test accuracies; present only when a clean test set was supplied.
  std::optional<double> last_epoch_acc;
  std::optional<double> nt_acc;
  std::optional<double> ns_acc;
  std::optional<double> student_last_epoch_acc;

  const CheckpointRecord& nt() const;
  const CheckpointRecord& ns() const;
};

/// Trains a teacher on `train`, picks NT by accuracy on the noisy `val`,
/// relabels the training inputs with NT, trains a student with the same
/// config and picks NS against the same noisy validation labels.
NtsReport run_nts(const LabeledDataset& train, const LabeledDataset& val, const TrainConfig& cfg,
                  const LabeledDataset* clean_test = nullptr);

/// Summary fields plus both checkpoint trails as column/row arrays and the
/// selected NT and NS parameters.
nlohmann::json to_json(const NtsReport& r);

}  // namespace nll
