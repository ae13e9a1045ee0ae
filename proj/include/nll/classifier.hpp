#pragma once

#include <map>
#include <span>
#include <vector>

#include "nll/dataset.hpp"

namespace nll {

/// Deterministic multiclass classifier. predict() is the lowest-index argmax
/// of predict_scores().
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual int k() const = 0;
  virtual int dim() const = 0;
  virtual std::vector<double> predict_scores(std::span<const double> x) const = 0;

  virtual Label predict(std::span<const double> x) const;
  /// Predictions for every row of `ds`; implementations may batch.
  virtual std::vector<Label> predict_all(const LabeledDataset& ds) const;
};

/// Per-true-class prediction distribution: entry (i, j) = Pr[h(X) = j | Y = i].
/// Rows of classes absent from an empirical estimate are flagged undefined.
class ConfusionMatrix {
 public:
  /// Row-stochastic matrix (each row sums to 1 within 1e-9, entries in [0, 1]).
  static ConfusionMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static ConfusionMatrix identity(int k);
  /// Row-normalized counts; rows with zero total are undefined.
  static ConfusionMatrix from_counts(int k, std::span<const double> counts);

  int k() const noexcept { return k_; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i * k_ + j)]; }
  bool row_defined(int i) const { return defined_[static_cast<std::size_t>(i)]; }
  bool all_defined() const;
  std::vector<std::vector<double>> rows() const;

 private:
  ConfusionMatrix(int k, std::vector<double> data, std::vector<bool> defined)
      : k_(k), data_(std::move(data)), defined_(std::move(defined)) {}

  int k_;
  std::vector<double> data_;
  std::vector<bool> defined_;
};

/// Fraction of rows with h(x) equal to the row's label. Throws on an empty set.
double accuracy(const Classifier& h, const LabeledDataset& ds);

/// Empirical confusion of h against the labels carried by `ds`.
ConfusionMatrix confusion(const Classifier& h, const LabeledDataset& ds);

class ConstantClassifier final : public Classifier {
 public:
  ConstantClassifier(int dim, int k, Label value);

  int k() const override { return k_; }
  int dim() const override { return dim_; }
  std::vector<double> predict_scores(std::span<const double> x) const override;

 private:
  int dim_;
  int k_;
  Label value_;
};

enum class TieBreak { LowestIndex, HighestIndex };

/// Memorizing classifier: at a feature vector seen in training it predicts the
/// modal training label there, anywhere else it predicts `fallback`.
class LookupClassifier final : public Classifier {
 public:
  LookupClassifier(const LabeledDataset& train, TieBreak tie_break = TieBreak::LowestIndex, Label fallback = 0);

  int k() const override { return k_; }
  int dim() const override { return dim_; }
  std::vector<double> predict_scores(std::span<const double> x) const override;
  Label predict(std::span<const double> x) const override;

  std::size_t table_size() const noexcept { return table_.size(); }

 private:
  int dim_;
  int k_;
  Label fallback_;
  std::map<std::vector<double>, Label> table_;
};

}  // namespace nll
