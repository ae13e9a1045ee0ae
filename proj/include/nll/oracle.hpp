#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "nll/classifier.hpp"
#include "nll/dataset.hpp"
#include "nll/noise.hpp"

namespace nll {

/// One label per support point of a DiscreteDistribution. As a Classifier it
/// predicts the assigned label at support points and `fallback` elsewhere.
class DiscreteClassifier final : public Classifier {
 public:
  DiscreteClassifier(const DiscreteDistribution& d, std::vector<Label> assignment, Label fallback = 0);

  /// The assignment h induces on the support of d.
  static DiscreteClassifier from_classifier(const Classifier& h, const DiscreteDistribution& d);

  int k() const override { return k_; }
  int dim() const override { return dim_; }
  std::vector<double> predict_scores(std::span<const double> x) const override;
  Label predict(std::span<const double> x) const override;

  std::size_t size() const noexcept { return assignment_.size(); }
  std::span<const Label> assignment() const noexcept { return assignment_; }
  Label operator[](std::size_t i) const { return assignment_[i]; }

 private:
  int dim_;
  int k_;
  Label fallback_;
  std::vector<Label> assignment_;
  std::map<std::vector<double>, Label> by_point_;
};

/// sum_x p(x) [h(x) = y(x)].
double exact_clean_accuracy(const DiscreteClassifier& h, const DiscreteDistribution& d);

/// sum_x p(x) T(y(x), h(x)) = Pr[h(X) = Y~].
double exact_noisy_accuracy(const DiscreteClassifier& h, const DiscreteDistribution& d, const TransitionMatrix& t);

/// Exact Pr[h(X) = j | Y = i]. Every class needs positive mass.
ConfusionMatrix exact_confusion(const DiscreteClassifier& h, const DiscreteDistribution& d);

/// What enumerate_best maximizes.
class Objective {
 public:
  enum class Kind { Clean, Noisy, Empirical };

  static Objective clean() { return Objective(Kind::Clean, std::nullopt, std::nullopt); }
  static Objective noisy(TransitionMatrix t) { return Objective(Kind::Noisy, std::move(t), std::nullopt); }
  /// Training accuracy on `sample`; every sample point must lie on the support.
  static Objective empirical(LabeledDataset sample) {
    return Objective(Kind::Empirical, std::nullopt, std::move(sample));
  }

  Kind kind() const noexcept { return kind_; }
  const std::optional<TransitionMatrix>& noise() const noexcept { return noise_; }
  const std::optional<LabeledDataset>& sample() const noexcept { return sample_; }

  /// weights[x * k + j]: contribution of predicting j at support point x.
  std::vector<double> point_weights(const DiscreteDistribution& d) const;

 private:
  Objective(Kind kind, std::optional<TransitionMatrix> t, std::optional<LabeledDataset> s)
      : kind_(kind), noise_(std::move(t)), sample_(std::move(s)) {}

  Kind kind_;
  std::optional<TransitionMatrix> noise_;
  std::optional<LabeledDataset> sample_;
};

struct OracleResult {
  std::vector<Label> assignment;
  double value = 0.0;
  /// No other assignment comes within kTieTolerance of the best value.
  bool unique = true;
};

inline constexpr double kTieTolerance = 1e-12;
inline constexpr std::size_t kMaxAssignments = 10'000'000;

/// Number of assignments k^|support|, or nullopt past kMaxAssignments.
std::optional<std::size_t> hypothesis_space_size(const DiscreteDistribution& d);

/// Decodes assignment number `index` (first support point most significant).
std::vector<Label> assignment_at(std::size_t index, std::size_t points, int k);

/// Exhaustive search over all k^|support| assignments in lexicographic order.
/// Values within kTieTolerance of the best count as ties; the lexicographically
/// smallest tied assignment wins. Throws CapacityError past kMaxAssignments.
OracleResult enumerate_best(const DiscreteDistribution& d, const Objective& objective, std::size_t workers = 1);

nlohmann::json to_json(const OracleResult& r);

}  // namespace nll
