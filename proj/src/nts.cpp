#include "nll/nts.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "nll/errors.hpp"

namespace nll {

SelectionKey selection_key(const CheckpointRecord& record) {
  if (!record.noisy_val_acc) throw InvalidArgument("checkpoint has no noisy validation accuracy");
  return {record.step, *record.noisy_val_acc};
}

std::size_t select_best_index(std::span<const SelectionKey> keys) {
  if (keys.empty()) throw InvalidArgument("select_best: no checkpoints");
  std::size_t best = 0;
  for (std::size_t i = 1; i < keys.size(); ++i) {
    const auto& a = keys[i];
    const auto& b = keys[best];
    if (a.noisy_val_acc > b.noisy_val_acc || (a.noisy_val_acc == b.noisy_val_acc && a.step < b.step)) best = i;
  }
  return best;
}

const CheckpointRecord& select_best(std::span<const CheckpointRecord> checkpoints) {
  std::vector<SelectionKey> keys;
  keys.reserve(checkpoints.size());
  for (const auto& c : checkpoints) keys.push_back(selection_key(c));
  return checkpoints[select_best_index(keys)];
}

LabeledDataset relabel(const Classifier& teacher, const LabeledDataset& train_inputs) {
  if (teacher.dim() != train_inputs.dim() || teacher.k() != train_inputs.k()) {
    throw InvalidArgument("relabel: teacher does not match the dataset's shape");
  }
  return train_inputs.with_labels(teacher.predict_all(train_inputs));
}

namespace {

const CheckpointRecord& find_step(const std::vector<CheckpointRecord>& trail, int step) {
  const auto it = std::find_if(trail.begin(), trail.end(), [&](const auto& c) { return c.step == step; });
  if (it == trail.end()) throw std::logic_error("selected step missing from its checkpoint trail");
  return *it;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json trail_json(const std::vector<CheckpointRecord>& trail) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : trail) {
    rows.push_back({c.step, c.train_loss, c.train_acc, optional_json(c.noisy_val_acc),
                    optional_json(c.clean_test_acc)});
  }
  return {{"columns", {"step", "train_loss", "train_acc", "val_acc", "test_acc"}}, {"rows", std::move(rows)}};
}

}  // namespace

const CheckpointRecord& NtsReport::nt() const { return find_step(teacher_checkpoints, nt_step); }
const CheckpointRecord& NtsReport::ns() const { return find_step(student_checkpoints, ns_step); }

NtsReport run_nts(const LabeledDataset& train, const LabeledDataset& val, const TrainConfig& cfg,
                  const LabeledDataset* clean_test) {
  if (train.empty() || val.empty()) throw InvalidArgument("run_nts: train and validation sets must be nonempty");
  if (train.dim() != val.dim() || train.k() != val.k()) {
    throw InvalidArgument("run_nts: train and validation sets differ in shape");
  }

  NtsReport report;
  report.teacher_checkpoints = train_mlp(train, cfg, &val, clean_test).checkpoints;
  if (report.teacher_checkpoints.empty()) throw std::logic_error("run_nts: teacher produced no checkpoints");
  const CheckpointRecord& nt = select_best(report.teacher_checkpoints);
  report.nt_step = nt.step;
  report.nt_val_acc = *nt.noisy_val_acc;

  const LabeledDataset student_train = relabel(Mlp(nt.params), train);
  report.student_checkpoints = train_mlp(student_train, cfg, &val, clean_test).checkpoints;
  if (report.student_checkpoints.empty()) throw std::logic_error("run_nts: student produced no checkpoints");
  const CheckpointRecord& ns = select_best(report.student_checkpoints);
  report.ns_step = ns.step;
  report.ns_val_acc = *ns.noisy_val_acc;

  if (clean_test != nullptr) {
    report.last_epoch_acc = report.teacher_checkpoints.back().clean_test_acc;
    report.nt_acc = nt.clean_test_acc;
    report.ns_acc = ns.clean_test_acc;
    report.student_last_epoch_acc = report.student_checkpoints.back().clean_test_acc;
  }
  return report;
}

nlohmann::json to_json(const NtsReport& r) {
  return {{"nt_step", r.nt_step},
          {"ns_step", r.ns_step},
          {"nt_val_acc", r.nt_val_acc},
          {"ns_val_acc", r.ns_val_acc},
          {"last_epoch_acc", optional_json(r.last_epoch_acc)},
          {"nt_acc", optional_json(r.nt_acc)},
          {"ns_acc", optional_json(r.ns_acc)},
          {"student_last_epoch_acc", optional_json(r.student_last_epoch_acc)},
          {"teacher_checkpoints", trail_json(r.teacher_checkpoints)},
          {"student_checkpoints", trail_json(r.student_checkpoints)},
          {"nt_model", to_json(r.nt().params)},
          {"ns_model", to_json(r.ns().params)}};
}

}  // namespace nll
